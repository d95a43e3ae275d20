//! Folding finitely supported even functions on `Z^d` onto `Z_m^d`, and the
//! Fourier restriction identity `DFT(g_m)(y) = m^(-d/2) g^(y/m)`.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactnum::cyclo::fold_index;
use crate::exactnum::{sign_cyclo, CycloReal, Sign, DEFAULT_MAX_BITS};
use crate::orbits::{canonicalize, OrbitIndex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("support point has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("function is not even: g({0:?}) != g(-x)")]
    NotEven(Vec<i64>),
    #[error("modulus must be at least 2")]
    Modulus,
    #[error("Z_m^d has more than {0} points")]
    TooLarge(u64),
}

/// Largest `m^d` the full-space checks iterate over.
pub const MAX_POINTS: u64 = 2_000_000;

/// Finitely supported rational function on `Z^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFn {
    d: usize,
    support: BTreeMap<Vec<i64>, BigRational>,
    even: bool,
}

impl LatticeFn {
    pub fn new(d: usize, values: impl IntoIterator<Item = (Vec<i64>, BigRational)>) -> Result<Self, ReductionError> {
        let mut support: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
        for (x, v) in values {
            if x.len() != d {
                return Err(ReductionError::Dimension {
                    expected: d,
                    got: x.len(),
                });
            }
            let e = support.entry(x).or_insert_with(BigRational::zero);
            *e += v;
        }
        support.retain(|_, v| !v.is_zero());
        let even = support
            .iter()
            .all(|(x, v)| support.get(&negate(x)) == Some(v));
        Ok(LatticeFn { d, support, even })
    }

    /// `(g(x) + g(-x)) / 2`.
    pub fn symmetrized(&self) -> LatticeFn {
        let half = BigRational::new(1.into(), 2.into());
        let vals = self
            .support
            .iter()
            .flat_map(|(x, v)| [(x.clone(), v * &half), (negate(x), v * &half)]);
        LatticeFn::new(self.d, vals.collect::<Vec<_>>()).expect("same dimension")
    }

    pub fn delta(d: usize) -> LatticeFn {
        LatticeFn::new(d, [(vec![0; d], BigRational::from_integer(1.into()))]).expect("dimension")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn support(&self) -> &BTreeMap<Vec<i64>, BigRational> {
        &self.support
    }

    pub fn get(&self, x: &[i64]) -> BigRational {
        self.support.get(x).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.support.values().sum()
    }

    fn require_even(&self) -> Result<(), ReductionError> {
        if self.even {
            return Ok(());
        }
        let bad = self
            .support
            .iter()
            .find(|(x, v)| self.support.get(&negate(x)) != Some(*v))
            .map(|(x, _)| x.clone())
            .unwrap_or_default();
        Err(ReductionError::NotEven(bad))
    }

    /// Unscaled transform at `y / m`: `sum_x g(x) cos(2 pi <x, y> / m)`.
    pub fn transform_at(&self, y: &[u32], m: u32) -> CycloReal {
        let mut coeffs = vec![BigRational::zero(); m as usize / 2 + 1];
        for (x, v) in &self.support {
            coeffs[fold_index(dot_mod(x, y, m), m)] += v;
        }
        CycloReal::from_coeffs(m, coeffs)
    }
}

fn negate(x: &[i64]) -> Vec<i64> {
    x.iter().map(|c| -c).collect()
}

fn dot_mod(x: &[i64], y: &[u32], m: u32) -> i64 {
    let m = i64::from(m);
    x.iter()
        .zip(y)
        .fold(0i64, |acc, (a, &b)| (acc + a.rem_euclid(m) * i64::from(b)) % m)
}

/// Function on `Z_m^d` with coordinates in `0..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModFn {
    pub d: usize,
    pub m: u32,
    pub values: HashMap<Vec<u32>, BigRational>,
}

impl ModFn {
    pub fn get(&self, x: &[u32]) -> BigRational {
        self.values.get(x).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.values.values().sum()
    }

    /// Unscaled discrete transform at `y`: `sum_x g_m(x) cos(2 pi <x, y> / m)`.
    pub fn transform_at(&self, y: &[u32]) -> CycloReal {
        let m = self.m;
        let mut coeffs = vec![BigRational::zero(); m as usize / 2 + 1];
        for (x, v) in &self.values {
            let dot = x
                .iter()
                .zip(y)
                .fold(0u64, |acc, (&a, &b)| (acc + u64::from(a) * u64::from(b)) % u64::from(m));
            coeffs[fold_index(dot as i64, m)] += v;
        }
        CycloReal::from_coeffs(m, coeffs)
    }

    /// Squared norm with coset representatives in `(-m/2, m/2]`.
    pub fn norm_sq(&self, x: &[u32]) -> u64 {
        x.iter()
            .map(|&c| {
                let c = u64::from(c.min(self.m - c));
                c * c
            })
            .sum()
    }

    /// Orbit averages over the representatives of `index`.
    pub fn to_reps(&self, index: &OrbitIndex) -> Vec<BigRational> {
        let mut sums = vec![BigRational::zero(); index.len()];
        for (x, v) in &self.values {
            let signed: Vec<i64> = x.iter().map(|&c| i64::from(c)).collect();
            let rep = canonicalize(&signed, self.m);
            let i = index.position(&rep).expect("canonical representative");
            sums[i] += v;
        }
        sums.into_iter()
            .enumerate()
            .map(|(i, s)| s / BigRational::from_integer(index.orbit_size(i).into()))
            .collect()
    }
}

/// `g_m(x) = sum_{n in m Z^d} g(x + n)`.
pub fn fold(g: &LatticeFn, m: u32) -> Result<ModFn, ReductionError> {
    if m < 2 {
        return Err(ReductionError::Modulus);
    }
    let mut values: HashMap<Vec<u32>, BigRational> = HashMap::new();
    for (x, v) in &g.support {
        let key: Vec<u32> = x.iter().map(|c| c.rem_euclid(i64::from(m)) as u32).collect();
        *values.entry(key).or_insert_with(BigRational::zero) += v;
    }
    values.retain(|_, v| !v.is_zero());
    Ok(ModFn { d: g.d, m, values })
}

fn all_points(d: usize, m: u32) -> Result<impl Iterator<Item = Vec<u32>>, ReductionError> {
    let total = u64::from(m)
        .checked_pow(d as u32)
        .filter(|&t| t <= MAX_POINTS)
        .ok_or(ReductionError::TooLarge(MAX_POINTS))?;
    Ok((0..total).map(move |mut k| {
        let mut y = vec![0u32; d];
        for c in y.iter_mut() {
            *c = (k % u64::from(m)) as u32;
            k /= u64::from(m);
        }
        y
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionReport {
    pub holds: bool,
    pub checked: usize,
    /// First `y` where the two sides differ.
    pub witness: Option<Vec<u32>>,
}

/// Checks `DFT(fold(g, m))(y) = m^(-d/2) g^(y/m)` exactly at every `y` in `Z_m^d`.
///
/// Both sides share the factor `m^(-d/2)`, so the unscaled sums are compared
/// as canonical real cyclotomic values.
pub fn check_restriction_identity(g: &LatticeFn, m: u32) -> Result<RestrictionReport, ReductionError> {
    g.require_even()?;
    let gm = fold(g, m)?;
    let mut checked = 0;
    for y in all_points(g.d, m)? {
        checked += 1;
        if gm.transform_at(&y) != g.transform_at(&y, m) {
            return Ok(RestrictionReport {
                holds: false,
                checked,
                witness: Some(y),
            });
        }
    }
    Ok(RestrictionReport {
        holds: true,
        checked,
        witness: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportReport {
    /// `g` is even, `g <= 0` off the radius, `sum g >= 1`, `g^(y/m) >= 0` on the grid, `m >= 2r`.
    pub hypotheses: bool,
    /// `g_m` is feasible for the discrete primal with `g_m(0) <= g(0)`.
    pub conclusions: bool,
    pub notes: Vec<String>,
}

fn nonnegative(v: &CycloReal) -> bool {
    matches!(sign_cyclo(v, DEFAULT_MAX_BITS), Ok(Sign::Zero | Sign::Positive))
}

/// Lattice-level form of the reduction: checks the hypotheses on `g` and the
/// discrete constraints on `fold(g, m)`.
pub fn transport_check(g: &LatticeFn, m: u32, r2: u64) -> Result<TransportReport, ReductionError> {
    g.require_even()?;
    let mut notes = Vec::new();
    let mut hyp = true;
    if 4 * r2 > u64::from(m) * u64::from(m) {
        hyp = false;
        notes.push("m < 2r".into());
    }
    for (x, v) in &g.support {
        let n: i64 = x.iter().map(|c| c * c).sum();
        if n as u64 >= r2 && v.is_positive() {
            hyp = false;
            notes.push(format!("g({x:?}) > 0 outside the radius"));
            break;
        }
    }
    if g.total() < BigRational::from_integer(1.into()) {
        hyp = false;
        notes.push("sum of g below 1".into());
    }
    let points: Vec<Vec<u32>> = all_points(g.d, m)?.collect();
    if let Some(y) = points.iter().find(|y| !nonnegative(&g.transform_at(y, m))) {
        hyp = false;
        notes.push(format!("transform of g negative at {y:?}/m"));
    }

    let gm = fold(g, m)?;
    let mut concl = true;
    if gm.total() < BigRational::from_integer(1.into()) {
        concl = false;
        notes.push("DFT(g_m)(0) below m^(-d/2)".into());
    }
    if let Some(y) = points.iter().find(|y| !nonnegative(&gm.transform_at(y))) {
        concl = false;
        notes.push(format!("DFT(g_m) negative at {y:?}"));
    }
    if let Some((x, _)) = gm
        .values
        .iter()
        .find(|(x, v)| gm.norm_sq(x) >= r2 && v.is_positive())
    {
        concl = false;
        notes.push(format!("g_m({x:?}) > 0 outside the radius"));
    }
    let zero = vec![0u32; g.d];
    if gm.get(&zero) > g.get(&vec![0i64; g.d]) {
        concl = false;
        notes.push("g_m(0) > g(0)".into());
    }
    Ok(TransportReport {
        hypotheses: hyp,
        conclusions: concl,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn fold_one_dimensional() {
        let g = LatticeFn::new(1, [(vec![0], q(2)), (vec![5], q(1)), (vec![-5], q(1))]).unwrap();
        let gm = fold(&g, 4).unwrap();
        assert_eq!(gm.get(&[0]), q(2));
        assert_eq!(gm.get(&[1]), q(1));
        assert_eq!(gm.get(&[3]), q(1));
        assert_eq!(gm.get(&[2]), q(0));
        assert!(check_restriction_identity(&g, 4).unwrap().holds);
    }

    #[test]
    fn delta_and_pair() {
        let r = check_restriction_identity(&LatticeFn::delta(2), 5).unwrap();
        assert!(r.holds);
        assert_eq!(r.checked, 25);
        let g = LatticeFn::new(1, [(vec![1], q(1)), (vec![-1], q(1))]).unwrap();
        let gm = fold(&g, 6).unwrap();
        for y in 0..=3u32 {
            assert_eq!(gm.transform_at(&[y]), CycloReal::cos(i64::from(y), 6).scale(&q(2)));
        }
    }

    #[test]
    fn odd_function_rejected() {
        let g = LatticeFn::new(1, [(vec![1], q(1))]).unwrap();
        assert!(!g.is_even());
        assert!(check_restriction_identity(&g, 4).is_err());
        assert!(g.symmetrized().is_even());
    }

    #[test]
    fn transport_on_hand_example() {
        // g = 1/2 delta_0 + 1/4 (delta_1 + delta_-1): sum 1, g^(t) = 1/2 + 1/2 cos(2 pi t) >= 0.
        let g = LatticeFn::new(
            1,
            [
                (vec![0], BigRational::new(1.into(), 2.into())),
                (vec![1], BigRational::new(1.into(), 4.into())),
                (vec![-1], BigRational::new(1.into(), 4.into())),
            ],
        )
        .unwrap();
        let rep = transport_check(&g, 4, 4).unwrap();
        assert!(rep.hypotheses && rep.conclusions, "{:?}", rep.notes);
    }
}

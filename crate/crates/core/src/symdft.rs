//! The symmetrized discrete Fourier matrix over orbit representatives.
//!
//! Entry `(x, y)` is `m^(-d/2) sum_{z ~ y} exp(-2 pi i <x, z> / m)`. Every
//! entry is stored unscaled as folded character counts `N_t`, so that the
//! unscaled entry equals `sum_t N_t cos(2 pi t / m)` for `t = 0..=m/2`; the
//! common factor `m^(-d/2)` is kept apart (see [`SymDftMatrix::scale`]).

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exactnum::{BoundValue, CycloReal};
use crate::orbits::{OrbitIndex, Params, Rep};

/// Largest matrix (rows times columns) that [`SymDftMatrix::build`] accepts.
pub const MAX_ENTRIES: usize = 64_000_000;

/// Largest number of stored exact counts; bigger exact matrices recompute columns.
pub const MAX_STORED_COUNTS: usize = 48_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymDftError {
    #[error("matrix with {0} representatives exceeds the dense capacity guard")]
    Capacity(usize),
    #[error("orbit index is for (d={index_d}, m={index_m}), instance is (d={d}, m={m})")]
    Mismatch {
        index_d: u32,
        index_m: u32,
        d: u32,
        m: u32,
    },
    #[error("vector length {got} does not match {expected} representatives")]
    Length { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Float64,
    Exact,
}

/// Per-coordinate factor as exponents of `w = exp(2 pi i / m)`: `w^(uv) + w^(-uv)`,
/// or just `w^(uv)` when `v` is `0` or `m/2`.
fn kernel_exponents(u: u32, v: u32, m: u32) -> Vec<usize> {
    let e = ((u64::from(u) * u64::from(v)) % u64::from(m)) as usize;
    if v == 0 || 2 * v == m {
        vec![e]
    } else {
        vec![e, (m as usize - e) % m as usize]
    }
}

/// Exact per-coordinate factor (see [`kernel_exponents`]).
pub fn kernel(u: u32, v: u32, m: u32) -> CycloReal {
    let mut counts = vec![0i64; m as usize / 2 + 1];
    for e in kernel_exponents(u, v, m) {
        counts[crate::exactnum::cyclo::fold_index(e as i64, m)] += 1;
    }
    CycloReal::from_int_coeffs(m, &counts)
}

/// Element of the integer group ring of `Z_m`.
type Ring = Vec<i128>;

fn ring_mul(a: &Ring, b: &Ring, m: usize) -> Ring {
    let mut out = vec![0i128; m];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[(i + j) % m] += x * y;
            }
        }
    }
    out
}

fn binomial(n: u32, k: u32) -> i128 {
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * i128::from(n - i) / i128::from(i + 1);
    }
    r
}

/// Folds a real group-ring element onto the cosine basis `t = 0..=m/2`.
fn fold_ring(ring: &Ring, m: u32) -> Vec<i64> {
    let mut out = vec![0i64; m as usize / 2 + 1];
    for (k, &c) in ring.iter().enumerate() {
        if c != 0 {
            out[crate::exactnum::cyclo::fold_index(k as i64, m)] +=
                i64::try_from(c).expect("character count overflow");
        }
    }
    out
}

/// Folded character counts of the unscaled entry `(x, y)`.
///
/// Sums over contingency tables `n_uv` with row sums the multiplicities of
/// the distinct values `u` of `x` and column sums those of `y`, weighting
/// each table by `prod_u mult(u)! / prod_v n_uv!` and `prod kernel(u, v)^n_uv`.
pub fn entry_counts(x: &Rep, y: &Rep, m: u32) -> Vec<i64> {
    assert_eq!(x.dim(), y.dim(), "representatives of different dimension");
    let mm = m as usize;
    let rows = x.runs();
    let cols = y.runs();
    let max_mult = rows.iter().map(|r| r.1).max().unwrap_or(0) as usize;

    // kernel powers: pow[r][c][n]
    let pows: Vec<Vec<Vec<Ring>>> = rows
        .iter()
        .map(|&(u, _)| {
            cols.iter()
                .map(|&(v, b)| {
                    let mut base = vec![0i128; mm];
                    for e in kernel_exponents(u, v, m) {
                        base[e] += 1;
                    }
                    let top = max_mult.min(b as usize);
                    let mut p = Vec::with_capacity(top + 1);
                    let mut one = vec![0i128; mm];
                    one[0] = 1;
                    p.push(one);
                    for n in 1..=top {
                        let next = ring_mul(&p[n - 1], &base, mm);
                        p.push(next);
                    }
                    p
                })
                .collect()
        })
        .collect();

    let start: Vec<u8> = cols.iter().map(|c| c.1 as u8).collect();
    let mut one = vec![0i128; mm];
    one[0] = 1;
    let mut states: HashMap<Vec<u8>, Ring> = HashMap::from([(start, one)]);
    for (ri, &(_, a)) in rows.iter().enumerate() {
        let mut next: HashMap<Vec<u8>, Ring> = HashMap::new();
        for (caps, ring) in &states {
            let mut caps = caps.clone();
            distribute(&pows[ri], 0, a, &mut caps, 1, ring.clone(), mm, &mut next);
        }
        states = next;
    }
    let total = states
        .into_iter()
        .map(|(_, r)| r)
        .reduce(|a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
        .unwrap_or_else(|| vec![0; mm]);
    fold_ring(&total, m)
}

#[allow(clippy::too_many_arguments)]
fn distribute(
    pows: &[Vec<Ring>],
    col: usize,
    remaining: u32,
    caps: &mut Vec<u8>,
    coef: i128,
    acc: Ring,
    m: usize,
    out: &mut HashMap<Vec<u8>, Ring>,
) {
    if col == caps.len() {
        if remaining == 0 {
            let slot = out.entry(caps.clone()).or_insert_with(|| vec![0; m]);
            for (s, a) in slot.iter_mut().zip(&acc) {
                *s += coef * a;
            }
        }
        return;
    }
    let rest_cap: u32 = caps[col + 1..].iter().map(|&c| u32::from(c)).sum();
    let lo = remaining.saturating_sub(rest_cap);
    let hi = remaining.min(u32::from(caps[col]));
    for n in lo..=hi {
        let c = coef * binomial(remaining, n);
        let acc_n = if n == 0 {
            acc.clone()
        } else {
            ring_mul(&acc, &pows[col][n as usize], m)
        };
        caps[col] -= n as u8;
        distribute(pows, col + 1, remaining - n, caps, c, acc_n, m, out);
        caps[col] += n as u8;
    }
}

/// `cos(2 pi t / m)` in double precision, exact at the rational angles.
pub fn cos_f64_table(m: u32) -> Vec<f64> {
    (0..=m / 2)
        .map(|t| match crate::exactnum::interval::cos_rational(i64::from(t), m) {
            Some(q) => q.to_f64().unwrap_or(f64::NAN),
            None => (2.0 * std::f64::consts::PI * f64::from(t) / f64::from(m)).cos(),
        })
        .collect()
}

fn counts_to_f64(counts: &[i64], cos: &[f64]) -> f64 {
    counts.iter().zip(cos).map(|(&c, &k)| c as f64 * k).sum()
}

/// `m^(-d/2)` as an exact value.
pub fn scale_value(d: u32, m: u32) -> BoundValue {
    let half = d / 2;
    let q = BigRational::new(
        BigInt::from(1),
        num_traits::pow(BigInt::from(m), half as usize + (d % 2) as usize),
    );
    if d % 2 == 0 {
        BoundValue::from_rational(q)
    } else {
        // m^(-k - 1/2) = m^(-k-1) sqrt(m)
        BoundValue::sqrt_term(q, u64::from(m))
    }
}

/// Dense symmetrized Fourier matrix.
#[derive(Debug, Clone)]
pub struct SymDftMatrix {
    index: Arc<OrbitIndex>,
    backend: Backend,
    scale: f64,
    cos: Vec<f64>,
    /// Scaled entries, row-major.
    float: Vec<f64>,
    /// Unscaled folded counts, row-major with stride `m/2 + 1` (exact backend only).
    counts: Option<Vec<i64>>,
}

impl SymDftMatrix {
    pub fn build(index: Arc<OrbitIndex>, backend: Backend) -> Result<Self, SymDftError> {
        let n = index.len();
        if n.checked_mul(n).is_none_or(|e| e > MAX_ENTRIES) {
            return Err(SymDftError::Capacity(n));
        }
        let m = index.m();
        let d = index.d();
        let stride = m as usize / 2 + 1;
        let store = backend == Backend::Exact && n * n * stride <= MAX_STORED_COUNTS;
        let cos = cos_f64_table(m);
        let scale = f64::from(m).powf(-f64::from(d) / 2.0);
        let sizes = index.orbit_sizes();

        // Upper triangle only: |Orb x| N(x, y) = |Orb y| N(y, x) coefficientwise.
        let upper: Vec<Vec<Vec<i64>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (i..n)
                    .map(|j| entry_counts(index.rep(i), index.rep(j), m))
                    .collect()
            })
            .collect();

        let mut float = vec![0.0; n * n];
        let mut counts = store.then(|| vec![0i64; n * n * stride]);
        for (i, row) in upper.iter().enumerate() {
            for (off, c) in row.iter().enumerate() {
                let j = i + off;
                let mirrored: Vec<i64> = c
                    .iter()
                    .map(|&v| {
                        let num = i128::from(v) * i128::from(sizes[i]);
                        debug_assert_eq!(num % i128::from(sizes[j]), 0);
                        (num / i128::from(sizes[j])) as i64
                    })
                    .collect();
                float[i * n + j] = scale * counts_to_f64(c, &cos);
                float[j * n + i] = scale * counts_to_f64(&mirrored, &cos);
                if let Some(store) = counts.as_mut() {
                    store[(i * n + j) * stride..(i * n + j + 1) * stride].copy_from_slice(c);
                    store[(j * n + i) * stride..(j * n + i + 1) * stride]
                        .copy_from_slice(&mirrored);
                }
            }
        }
        Ok(SymDftMatrix {
            index,
            backend,
            scale,
            cos,
            float,
            counts,
        })
    }

    pub fn index(&self) -> &OrbitIndex {
        &self.index
    }

    pub fn index_arc(&self) -> Arc<OrbitIndex> {
        self.index.clone()
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn m(&self) -> u32 {
        self.index.m()
    }

    pub fn d(&self) -> u32 {
        self.index.d()
    }

    /// The common factor `m^(-d/2)` in double precision.
    pub fn scale_f64(&self) -> f64 {
        self.scale
    }

    /// The common factor `m^(-d/2)` exactly.
    pub fn scale(&self) -> BoundValue {
        scale_value(self.d(), self.m())
    }

    pub fn cos_table(&self) -> &[f64] {
        &self.cos
    }

    /// Scaled entry in double precision.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.float[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.float[i * n..(i + 1) * n]
    }

    /// Folded counts of the unscaled entry `(i, j)`.
    pub fn counts(&self, i: usize, j: usize) -> Vec<i64> {
        let stride = self.m() as usize / 2 + 1;
        match &self.counts {
            Some(c) => {
                let k = (i * self.len() + j) * stride;
                c[k..k + stride].to_vec()
            }
            None => entry_counts(self.index.rep(i), self.index.rep(j), self.m()),
        }
    }

    /// Folded counts of the whole column `j`, one vector per row.
    pub fn column_counts(&self, j: usize) -> Vec<Vec<i64>> {
        (0..self.len()).map(|i| self.counts(i, j)).collect()
    }

    /// Unscaled exact entry; the true entry is this times [`SymDftMatrix::scale`].
    pub fn entry_exact(&self, i: usize, j: usize) -> CycloReal {
        CycloReal::from_int_coeffs(self.m(), &self.counts(i, j))
    }

    fn check_len(&self, v: usize) -> Result<(), SymDftError> {
        if v != self.len() {
            return Err(SymDftError::Length {
                expected: self.len(),
                got: v,
            });
        }
        Ok(())
    }

    /// `F v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, SymDftError> {
        self.check_len(v.len())?;
        Ok((0..self.len())
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `F^T v`.
    pub fn apply_transpose(&self, v: &[f64]) -> Result<Vec<f64>, SymDftError> {
        self.check_len(v.len())?;
        let n = self.len();
        let mut out = vec![0.0; n];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        Ok(out)
    }

    /// Unscaled exact `F' v` (multiply by [`SymDftMatrix::scale`] for `F v`).
    pub fn apply_exact(&self, v: &[BigRational]) -> Result<Vec<CycloReal>, SymDftError> {
        self.check_len(v.len())?;
        Ok((0..self.len())
            .into_par_iter()
            .map(|i| self.combine((0..self.len()).map(|j| (self.counts(i, j), &v[j]))))
            .collect())
    }

    /// Unscaled exact `F'^T v`.
    pub fn apply_transpose_exact(
        &self,
        v: &[BigRational],
    ) -> Result<Vec<CycloReal>, SymDftError> {
        self.check_len(v.len())?;
        Ok((0..self.len())
            .into_par_iter()
            .map(|j| self.combine((0..self.len()).map(|i| (self.counts(i, j), &v[i]))))
            .collect())
    }

    fn combine<'a>(&self, terms: impl Iterator<Item = (Vec<i64>, &'a BigRational)>) -> CycloReal {
        let stride = self.m() as usize / 2 + 1;
        let mut acc = vec![BigRational::zero(); stride];
        for (counts, q) in terms {
            if q.is_zero() {
                continue;
            }
            for (a, &c) in acc.iter_mut().zip(&counts) {
                if c != 0 {
                    *a += q * BigRational::from_integer(c.into());
                }
            }
        }
        CycloReal::from_coeffs(self.m(), acc)
    }
}

/// Builds the matrix for `params`, checking that `index` belongs to it.
pub fn build_matrix(
    params: &Params,
    index: Arc<OrbitIndex>,
    backend: Backend,
) -> Result<SymDftMatrix, SymDftError> {
    if !index.matches(params) {
        return Err(SymDftError::Mismatch {
            index_d: index.d(),
            index_m: index.m(),
            d: params.d,
            m: params.m,
        });
    }
    SymDftMatrix::build(index, backend)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::enumerate_reps;

    fn rep(c: &[u32]) -> Rep {
        Rep::from_sorted(c.to_vec(), 100).unwrap()
    }

    #[test]
    fn kernel_values() {
        assert!(kernel(1, 1, 4).is_zero());
        assert_eq!(kernel(1, 2, 4).as_rational(), Some(BigRational::from_integer((-1).into())));
        assert_eq!(kernel(3, 0, 7).as_rational(), Some(BigRational::from_integer(1.into())));
    }

    #[test]
    fn small_entries() {
        // unscaled 2 at x = y = (1,2), m = 4
        let c = entry_counts(&rep(&[1, 2]), &rep(&[1, 2]), 4);
        assert_eq!(CycloReal::from_int_coeffs(4, &c).as_rational(), Some(BigRational::from_integer(2.into())));
        let zero = rep(&[0, 0, 0]);
        let y = rep(&[1, 1, 3]);
        let c = entry_counts(&zero, &y, 7);
        assert_eq!(c.iter().sum::<i64>() as u64, crate::orbits::orbit_size(&y, 7));
    }

    #[test]
    fn one_dimensional_m4() {
        let idx = Arc::new(enumerate_reps(1, 4).unwrap());
        let f = SymDftMatrix::build(idx, Backend::Exact).unwrap();
        let want = [[1.0, 2.0, 1.0], [1.0, 0.0, -1.0], [1.0, -2.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((f.get(i, j) - 0.5 * want[i][j]).abs() < 1e-15);
            }
        }
        let mu: Vec<BigRational> = [1, 0, 1].iter().map(|&v| BigRational::from_integer(v.into())).collect();
        let lam = f.apply_transpose_exact(&mu).unwrap();
        // unscaled (2, 0, 2), scale 1/2
        let got: Vec<_> = lam.iter().map(|c| c.as_rational().unwrap()).collect();
        assert_eq!(got, [2, 0, 2].map(|v| BigRational::from_integer(v.into())));
        assert_eq!(f.scale(), BoundValue::from_rational(BigRational::new(1.into(), 2.into())));
    }

    #[test]
    fn scale_values() {
        assert_eq!(scale_value(9, 4), BoundValue::from_rational(BigRational::new(1.into(), 512.into())));
        assert_eq!(
            scale_value(3, 21),
            BoundValue::sqrt_term(BigRational::new(1.into(), 441.into()), 21)
        );
    }

    #[test]
    fn float_involution() {
        for (d, m) in [(2, 5), (3, 6), (2, 8), (4, 3)] {
            let idx = Arc::new(enumerate_reps(d, m).unwrap());
            let f = SymDftMatrix::build(idx, Backend::Float64).unwrap();
            let n = f.len();
            for i in 0..n {
                let e: Vec<f64> = (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect();
                let back = f.apply(&f.apply(&e).unwrap()).unwrap();
                for (k, v) in back.iter().enumerate() {
                    let want = if k == i { 1.0 } else { 0.0 };
                    assert!((v - want).abs() < 1e-10, "d={d} m={m}");
                }
            }
        }
    }
}

//! Real cyclotomic numbers `sum_k q_k cos(2 pi k / m)`.
//!
//! Values are stored in the cosine basis `k = 0..=m/2`, which is closed under
//! addition and (via product-to-sum) multiplication but not unique. The
//! canonical form is the reduction of the same value as a polynomial in
//! `c = 2 cos(2 pi / m)` modulo the minimal polynomial of `c`; it is zero
//! exactly when the value is zero.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::interval::{cos_table, RInterval};

type IntPoly = Vec<BigInt>;

fn trim(p: &mut IntPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_add(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let n = a.len().max(b.len());
    let mut out: IntPoly = (0..n)
        .map(|i| {
            a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default()
        })
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder of `a` by a monic `b`.
fn poly_divmod_monic(a: &IntPoly, b: &IntPoly) -> (IntPoly, IntPoly) {
    let db = b.len() - 1;
    let mut r = a.clone();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        let c = r[i].clone();
        if c.is_zero() {
            continue;
        }
        q[i - db] = c.clone();
        for (j, bj) in b.iter().enumerate() {
            r[i - db + j] -= &c * bj;
        }
    }
    r.truncate(db);
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

/// `V_0 = 2, V_1 = x, V_{n+1} = x V_n - V_{n-1}`, so `V_n(2 cos t) = 2 cos(n t)`.
fn dickson_polys(up_to: usize) -> Vec<IntPoly> {
    let mut v: Vec<IntPoly> = vec![vec![BigInt::from(2)]];
    if up_to >= 1 {
        v.push(vec![BigInt::zero(), BigInt::one()]);
    }
    for n in 1..up_to {
        let shifted: IntPoly = std::iter::once(BigInt::zero())
            .chain(v[n].iter().cloned())
            .collect();
        let neg_prev: IntPoly = v[n - 1].iter().map(|c| -c).collect();
        v.push(poly_add(&shifted, &neg_prev));
    }
    v
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|e| n % e == 0).collect()
}

fn min_poly_cache() -> &'static Mutex<HashMap<u32, Arc<IntPoly>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<IntPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Minimal polynomial of `2 cos(2 pi / m)` over Q, monic with integer
/// coefficients listed from the constant term up.
///
/// For `m >= 3` the product of these polynomials over divisors `e >= 3` of `m`
/// has roots `2 cos(2 pi j / m)`, `0 < j < m/2`; it is recovered from a
/// palindromic sum of `V_j` and the proper divisors are divided out.
pub fn min_poly(m: u32) -> Arc<IntPoly> {
    assert!(m >= 1);
    if let Some(p) = min_poly_cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    let p: IntPoly = match m {
        1 => vec![BigInt::from(-2), BigInt::one()],
        2 => vec![BigInt::from(2), BigInt::one()],
        _ => {
            let v = dickson_polys(m as usize / 2);
            let mut r: IntPoly = Vec::new();
            if m % 2 == 1 {
                r = vec![BigInt::one()];
                for vj in v.iter().take((m as usize - 1) / 2 + 1).skip(1) {
                    r = poly_add(&r, vj);
                }
            } else {
                let t = m as usize / 2 - 1;
                if t % 2 == 0 {
                    r = vec![BigInt::one()];
                }
                let start = if t % 2 == 0 { 2 } else { 1 };
                for j in (start..=t).step_by(2) {
                    r = poly_add(&r, &v[j]);
                }
            }
            for e in divisors(m) {
                if e >= 3 && e < m {
                    let (q, rem) = poly_divmod_monic(&r, &min_poly(e));
                    debug_assert!(rem.is_empty());
                    r = q;
                }
            }
            r
        }
    };
    let p = Arc::new(p);
    min_poly_cache()
        .lock()
        .unwrap()
        .entry(m)
        .or_insert(p)
        .clone()
}

/// Degree of the real cyclotomic field `Q(cos 2 pi / m)`.
pub fn field_degree(m: u32) -> usize {
    min_poly(m).len() - 1
}

/// Reduced polynomials for `cos(2 pi k / m)`, `k = 0..=m/2`.
struct CosBasis {
    polys: Vec<Vec<BigRational>>,
}

fn basis_cache() -> &'static Mutex<HashMap<u32, Arc<CosBasis>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CosBasis>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cos_basis(m: u32) -> Arc<CosBasis> {
    if let Some(b) = basis_cache().lock().unwrap().get(&m) {
        return b.clone();
    }
    let psi = min_poly(m);
    let deg = psi.len() - 1;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let polys = dickson_polys(m as usize / 2)
        .iter()
        .map(|v| {
            let (_, r) = poly_divmod_monic(v, &psi);
            let mut out = vec![BigRational::zero(); deg];
            for (i, c) in r.into_iter().enumerate() {
                out[i] = BigRational::from_integer(c) * &half;
            }
            out
        })
        .collect();
    let b = Arc::new(CosBasis { polys });
    basis_cache()
        .lock()
        .unwrap()
        .entry(m)
        .or_insert(b)
        .clone()
}

/// Folds an arbitrary integer index onto `0..=m/2` using `cos(-t) = cos(t)`.
pub fn fold_index(k: i64, m: u32) -> usize {
    let m = i64::from(m);
    let r = k.rem_euclid(m);
    r.min(m - r) as usize
}

/// `sum_k q_k cos(2 pi k / m)` with exact rational coefficients.
#[derive(Clone)]
pub struct CycloReal {
    m: u32,
    coeffs: Vec<BigRational>,
    canon: OnceLock<Vec<BigRational>>,
}

impl CycloReal {
    pub fn zero(m: u32) -> Self {
        CycloReal::from_coeffs(m, vec![BigRational::zero(); m as usize / 2 + 1])
    }

    pub fn from_coeffs(m: u32, coeffs: Vec<BigRational>) -> Self {
        assert!(m >= 1);
        assert_eq!(coeffs.len(), m as usize / 2 + 1, "cosine basis length");
        CycloReal {
            m,
            coeffs,
            canon: OnceLock::new(),
        }
    }

    /// Integer multiples of the cosines, e.g. folded character counts.
    pub fn from_int_coeffs(m: u32, counts: &[i64]) -> Self {
        CycloReal::from_coeffs(
            m,
            counts
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn from_rational(m: u32, q: BigRational) -> Self {
        let mut c = vec![BigRational::zero(); m as usize / 2 + 1];
        c[0] = q;
        CycloReal::from_coeffs(m, c)
    }

    /// `cos(2 pi k / m)`.
    pub fn cos(k: i64, m: u32) -> Self {
        let mut c = vec![BigRational::zero(); m as usize / 2 + 1];
        c[fold_index(k, m)] = BigRational::one();
        CycloReal::from_coeffs(m, c)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Reduced polynomial in `2 cos(2 pi / m)`, trailing zeros trimmed.
    pub fn canonical(&self) -> &[BigRational] {
        self.canon.get_or_init(|| {
            let basis = cos_basis(self.m);
            let deg = field_degree(self.m);
            let mut out = vec![BigRational::zero(); deg];
            for (q, poly) in self.coeffs.iter().zip(&basis.polys) {
                if q.is_zero() {
                    continue;
                }
                for (o, p) in out.iter_mut().zip(poly) {
                    if !p.is_zero() {
                        *o += q * p;
                    }
                }
            }
            while out.last().is_some_and(|c| c.is_zero()) {
                out.pop();
            }
            out
        })
    }

    pub fn is_zero(&self) -> bool {
        self.canonical().is_empty()
    }

    /// The value as a rational, when it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.canonical() {
            [] => Some(BigRational::zero()),
            [q] => Some(q.clone()),
            _ => None,
        }
    }

    fn check_same(&self, other: &CycloReal) {
        assert_eq!(self.m, other.m, "cyclotomic moduli differ");
    }

    pub fn add(&self, other: &CycloReal) -> CycloReal {
        self.check_same(other);
        CycloReal::from_coeffs(
            self.m,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn neg(&self) -> CycloReal {
        CycloReal::from_coeffs(self.m, self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn sub(&self, other: &CycloReal) -> CycloReal {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &BigRational) -> CycloReal {
        CycloReal::from_coeffs(self.m, self.coeffs.iter().map(|a| a * q).collect())
    }

    /// Product via `cos a cos b = (cos(a+b) + cos(a-b)) / 2`.
    pub fn mul(&self, other: &CycloReal) -> CycloReal {
        self.check_same(other);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut out = vec![BigRational::zero(); self.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = a * b * &half;
                out[fold_index((i + j) as i64, self.m)] += &p;
                out[fold_index(i as i64 - j as i64, self.m)] += p;
            }
        }
        CycloReal::from_coeffs(self.m, out)
    }

    /// Interval enclosure of the value from the cosine-basis sum.
    pub fn enclosure(&self, prec: u64) -> RInterval {
        let work = prec + 16;
        let table = cos_table(self.m, work);
        let mut acc = RInterval::zero();
        for (q, c) in self.coeffs.iter().zip(table.iter()) {
            if q.is_zero() {
                continue;
            }
            acc = acc.add(&RInterval::from_rational(q, work).mul(c)).round(work);
        }
        acc.round(prec)
    }

    /// Enclosure of the canonical polynomial evaluated at `2 cos(2 pi / m)`.
    pub fn canonical_enclosure(&self, prec: u64) -> RInterval {
        let work = prec + 16;
        let c = cos_table(self.m, work)
            .get(1)
            .cloned()
            .unwrap_or_else(|| RInterval::from_int(if self.m == 1 { 1 } else { -1 }))
            .mul_pow2(1);
        let mut acc = RInterval::zero();
        for q in self.canonical().iter().rev() {
            acc = acc
                .mul(&c)
                .add(&RInterval::from_rational(q, work))
                .round(work);
        }
        acc.round(prec)
    }

    pub fn to_f64(&self) -> f64 {
        let m = f64::from(self.m);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .map(|(k, q)| {
                q.to_f64().unwrap_or(f64::NAN) * (2.0 * std::f64::consts::PI * k as f64 / m).cos()
            })
            .sum()
    }
}

impl PartialEq for CycloReal {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.canonical() == other.canonical()
    }
}

impl fmt::Debug for CycloReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloReal(m={}, {self})", self.m)
    }
}

impl fmt::Display for CycloReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, q) in self.coeffs.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{q}")?;
            } else {
                write!(f, "{q}*cos(2pi*{k}/{})", self.m)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ints(v: &[i64]) -> IntPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn known_minimal_polynomials() {
        assert_eq!(*min_poly(1), ints(&[-2, 1]));
        assert_eq!(*min_poly(2), ints(&[2, 1]));
        assert_eq!(*min_poly(3), ints(&[1, 1]));
        assert_eq!(*min_poly(4), ints(&[0, 1]));
        assert_eq!(*min_poly(5), ints(&[-1, 1, 1]));
        assert_eq!(*min_poly(6), ints(&[-1, 1]));
        assert_eq!(*min_poly(7), ints(&[-1, -2, 1, 1]));
        assert_eq!(*min_poly(8), ints(&[-2, 0, 1]));
        assert_eq!(*min_poly(12), ints(&[-3, 0, 1]));
    }

    fn euler_phi(n: u32) -> usize {
        (1..=n).filter(|k| num_integer::gcd(*k, n) == 1).count()
    }

    #[test]
    fn degrees_match_totient() {
        for m in 3..=60 {
            assert_eq!(field_degree(m), euler_phi(m) / 2, "m={m}");
        }
    }

    #[test]
    fn min_poly_vanishes_numerically() {
        for m in 3..=60u32 {
            let c = 2.0 * (2.0 * std::f64::consts::PI / m as f64).cos();
            let p = min_poly(m);
            let v: f64 = p
                .iter()
                .rev()
                .fold(0.0, |acc, a| acc * c + a.to_f64().unwrap());
            assert!(v.abs() < 1e-6, "m={m} residual {v}");
        }
    }

    #[test]
    fn symmetry_identity_reduces_to_zero() {
        let v = CycloReal::cos(1, 8).add(&CycloReal::cos(3, 8));
        assert!(v.is_zero());
        assert!(!CycloReal::cos(1, 8).is_zero());
    }

    #[test]
    fn full_character_sums_vanish() {
        for m in 2..=30u32 {
            // sum over all t in Z_m of omega^t = 0, folded onto cosines.
            let mut counts = vec![0i64; m as usize / 2 + 1];
            for t in 0..m as i64 {
                counts[fold_index(t, m)] += 1;
            }
            assert!(CycloReal::from_int_coeffs(m, &counts).is_zero(), "m={m}");
        }
    }

    #[test]
    fn rational_cosines() {
        assert_eq!(CycloReal::cos(1, 6).as_rational(), Some(q(1, 2)));
        assert_eq!(CycloReal::cos(1, 3).as_rational(), Some(q(-1, 2)));
        assert_eq!(CycloReal::cos(2, 4).as_rational(), Some(q(-1, 1)));
        assert_eq!(CycloReal::cos(1, 5).as_rational(), None);
    }

    #[test]
    fn product_to_sum() {
        // (2 cos(pi/4))^2 = 2
        let c = CycloReal::cos(1, 8).scale(&q(2, 1));
        assert_eq!(c.mul(&c).as_rational(), Some(q(2, 1)));
        // cos^2 x = (1 + cos 2x)/2 for m = 7
        let a = CycloReal::cos(2, 7);
        let expect = CycloReal::from_rational(7, q(1, 2)).add(&CycloReal::cos(4, 7).scale(&q(1, 2)));
        assert_eq!(a.mul(&a), expect);
    }

    #[test]
    fn canonical_matches_raw_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let m = rng.gen_range(2..=30u32);
            let coeffs = (0..=m / 2)
                .map(|_| q(rng.gen_range(-50..50), rng.gen_range(1..20)))
                .collect();
            let v = CycloReal::from_coeffs(m, coeffs);
            let raw = v.enclosure(200);
            let canon = v.canonical_enclosure(200);
            assert!(!raw.sub(&canon).is_positive() && !raw.sub(&canon).is_negative());
            assert!((raw.mid_f64() - v.to_f64()).abs() < 1e-9 * (1.0 + v.to_f64().abs()));
        }
    }
}

//! Krawtchouk polynomials and closed-form dual certificates at `m = 4`, `r = 2`.
//!
//! Tables are keyed by patterns `(0^a, 1^b, 2^c)` and hold orbit-scaled
//! `lambda` values; the certificate is `mu = F^T lambda`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::certify::{DualCertificate, Provenance};
use crate::orbits::{enumerate_reps, OrbitError, Params, Rep};
use crate::symdft::{Backend, SymDftError, SymDftMatrix};

/// Pascal rows are memoized up to this `n`.
pub const PASCAL_ROWS: usize = 200;

#[derive(Debug, Error)]
pub enum ClosedFormError {
    #[error("general odd construction needs odd d >= 5, got {0}")]
    NotOddEnough(u32),
    #[error("no explicit table for d = {0} (have 9, 10, 11, 12)")]
    NoTable(u32),
    #[error("index out of range: {0}")]
    Range(String),
    #[error("transform violates a dual constraint at {rep}: {what}")]
    Construction { rep: Rep, what: String },
    #[error("table is for d = {table}, matrix for (d={d}, m={m})")]
    Mismatch { table: u32, d: u32, m: u32 },
    #[error(transparent)]
    Orbits(#[from] OrbitError),
    #[error(transparent)]
    Matrix(#[from] SymDftError),
}

fn pascal() -> &'static Vec<Vec<BigInt>> {
    static ROWS: OnceLock<Vec<Vec<BigInt>>> = OnceLock::new();
    ROWS.get_or_init(|| {
        let mut rows: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
        for n in 1..=PASCAL_ROWS {
            let prev = &rows[n - 1];
            let mut row = vec![BigInt::one(); n + 1];
            for k in 1..n {
                row[k] = &prev[k - 1] + &prev[k];
            }
            rows.push(row);
        }
        rows
    })
}

/// `C(n, k)`, zero outside `0 <= k <= n` (including negative `n`).
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let (n, k) = (n as usize, k as usize);
    if n <= PASCAL_ROWS {
        return pascal()[n][k].clone();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `K_j(i; n) = sum_l (-1)^l C(i, l) C(n - i, j - l)`.
pub fn krawtchouk(j: u32, i: u32, n: u32) -> Result<BigInt, ClosedFormError> {
    if i > n || j > n {
        return Err(ClosedFormError::Range(format!("K_{j}({i}; {n})")));
    }
    Ok(krawtchouk_unchecked(i64::from(j), i64::from(i), i64::from(n)))
}

/// The alternating sum for any integers; vanishes when `j` exceeds `n`.
fn krawtchouk_unchecked(j: i64, i: i64, n: i64) -> BigInt {
    let mut s = BigInt::zero();
    for l in 0..=j.max(0) {
        let t = binomial(i, l) * binomial(n - i, j - l);
        if l % 2 == 0 {
            s += t;
        } else {
            s -= t;
        }
    }
    s
}

/// Orbit-scaled `lambda` values keyed by `(a, b, c)` for `(0^a, 1^b, 2^c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTable {
    pub d: u32,
    pub entries: BTreeMap<(u32, u32, u32), BigRational>,
}

impl LambdaTable {
    pub fn params(&self) -> Params {
        Params::new(self.d, 4, 4).expect("m = 4, r^2 = 4 is valid")
    }

    pub fn get(&self, a: u32, b: u32, c: u32) -> BigRational {
        self.entries
            .get(&(a, b, c))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Dense vector over the representatives of `Z_4^d`.
    pub fn to_vector(&self, reps: &[Rep]) -> Vec<BigRational> {
        reps.iter()
            .map(|r| {
                let (a, b, c) = r.abc();
                self.get(a, b, c)
            })
            .collect()
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// The five-entry table for odd `d = 2k + 1 >= 5`.
pub fn general_odd_lambda(d: u32) -> Result<LambdaTable, ClosedFormError> {
    if d < 5 || d % 2 == 0 {
        return Err(ClosedFormError::NotOddEnough(d));
    }
    let k = (d - 1) / 2;
    let base = BigRational::new(BigInt::one() << (2 * k - 1), BigInt::from(k + 1));
    let kk = BigRational::from_integer(k.into());
    let mut entries = BTreeMap::new();
    entries.insert((d, 0, 0), base.clone());
    entries.insert((0, 0, d), base.clone());
    entries.insert((k, 0, k + 1), &kk * &base);
    entries.insert((k + 1, 0, k), &kk * &base);
    entries.insert((k, 1, k), BigRational::from_integer((2 * k + 2).into()) * &base);
    Ok(LambdaTable { d, entries })
}

/// Published tables for `d = 9, 10, 11, 12`.
pub fn explicit_lambda(d: u32) -> Result<LambdaTable, ClosedFormError> {
    let list: Vec<((u32, u32, u32), BigRational)> = match d {
        9 => vec![
            ((9, 0, 0), q(128, 5)),
            ((0, 0, 9), q(128, 5)),
            ((4, 0, 5), q(1152, 5)),
            ((5, 0, 4), q(1152, 5)),
        ],
        10 => vec![
            ((10, 0, 0), q(128, 3)),
            ((0, 0, 10), q(128, 3)),
            ((4, 2, 4), q(2560, 3)),
            ((5, 0, 5), q(256, 3)),
        ],
        11 => vec![
            ((11, 0, 0), q(256, 3)),
            ((0, 0, 11), q(256, 3)),
            ((5, 0, 6), q(1280, 3)),
            ((6, 0, 5), q(1280, 3)),
            ((5, 1, 5), q(1024, 1)),
        ],
        12 => vec![
            ((12, 0, 0), q(512, 3)),
            ((0, 0, 12), q(512, 3)),
            ((6, 0, 6), q(11264, 3)),
        ],
        _ => return Err(ClosedFormError::NoTable(d)),
    };
    Ok(LambdaTable {
        d,
        entries: list.into_iter().collect(),
    })
}

/// The proof's expression for `mu` at `(0^a, 1^b, 2^c)` with `a + b + c = 2k + 1`.
///
/// The value is orbit-scaled, the same convention as the tables.
pub fn closed_form_mu(a: u32, b: u32, c: u32, k: u32) -> Result<BigRational, ClosedFormError> {
    if k < 2 || a + b + c != 2 * k + 1 {
        return Err(ClosedFormError::Range(format!(
            "need a + b + c = 2k + 1 with k >= 2, got ({a}, {b}, {c}), k = {k}"
        )));
    }
    let (a, b, c, k) = (i64::from(a), i64::from(b), i64::from(c), i64::from(k));
    let even = b % 2 == 0;
    let first = if even {
        BigInt::from(2)
            * binomial(a + c, a)
            * (binomial(2 * k + 1, b) + BigInt::from(k) * krawtchouk_unchecked(b, k, 2 * k + 1))
    } else {
        BigInt::zero()
    };
    let second = BigInt::from(2 * k + 2)
        * (binomial(a + c - 1, c) - binomial(a + c - 1, a))
        * krawtchouk_unchecked(b, k, 2 * k);
    Ok(BigRational::new(
        (BigInt::one() << b as usize) * (first + second),
        BigInt::from(4 * (k + 1)),
    ))
}

/// Exact matrix for `Z_4^d`.
pub fn matrix_m4(d: u32) -> Result<SymDftMatrix, ClosedFormError> {
    let idx = Arc::new(enumerate_reps(d, 4)?);
    Ok(SymDftMatrix::build(idx, Backend::Exact)?)
}

/// `mu = F^T lambda`, checked against the dual constraints.
pub fn certificate_from_lambda(
    table: &LambdaTable,
    matrix: &SymDftMatrix,
) -> Result<DualCertificate, ClosedFormError> {
    if matrix.d() != table.d || matrix.m() != 4 {
        return Err(ClosedFormError::Mismatch {
            table: table.d,
            d: matrix.d(),
            m: matrix.m(),
        });
    }
    let params = table.params();
    let idx = matrix.index();
    let lam = table.to_vector(idx.reps());
    let scale = matrix.scale().as_rational().expect("m = 4 scale is rational");
    let mu: Vec<BigRational> = matrix
        .apply_transpose_exact(&lam)?
        .into_iter()
        .map(|v| v.as_rational().expect("m = 4 entries are rational") * &scale)
        .collect();
    if !mu[0].is_one() {
        return Err(ClosedFormError::Construction {
            rep: idx.rep(0).clone(),
            what: format!("mu_0 = {} instead of (r/2)^d = 1", mu[0]),
        });
    }
    let mut stored = BTreeMap::new();
    for (i, v) in mu.into_iter().enumerate().skip(1) {
        let rep = idx.rep(i);
        if v.is_negative() {
            return Err(ClosedFormError::Construction {
                rep: rep.clone(),
                what: format!("mu = {v} is negative"),
            });
        }
        if idx.norm_sq(i) < params.r2 {
            if !v.is_zero() {
                return Err(ClosedFormError::Construction {
                    rep: rep.clone(),
                    what: format!("mu = {v} inside the exclusion radius"),
                });
            }
            continue;
        }
        stored.insert(rep.clone(), v);
    }
    Ok(DualCertificate::new(params, stored, Provenance::ClosedForm))
}

/// Table for `d`: the published one for 9..=12, else the general odd family.
pub fn table_for(d: u32) -> Result<LambdaTable, ClosedFormError> {
    match d {
        9..=12 => explicit_lambda(d),
        _ => general_odd_lambda(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_krawtchouk() {
        assert_eq!(krawtchouk(0, 3, 7).unwrap(), BigInt::one());
        assert_eq!(krawtchouk(1, 3, 10).unwrap(), BigInt::from(4));
        assert_eq!(krawtchouk(2, 2, 4).unwrap(), BigInt::from(-2));
        assert!(krawtchouk(5, 1, 4).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(-1, 0), BigInt::zero());
        assert_eq!(binomial(250, 2), BigInt::from(31125));
        assert_eq!(binomial(200, 100), binomial(199, 99) + binomial(199, 100));
    }

    #[test]
    fn mu_formula_spot_values() {
        for k in 2..8 {
            assert_eq!(closed_form_mu(2 * k + 1, 0, 0, k).unwrap(), BigRational::one());
            assert!(closed_form_mu(2 * k - 1, 2, 0, k).unwrap().is_zero());
            assert!(closed_form_mu(k, 1, k, k).unwrap().is_zero());
        }
        assert!(closed_form_mu(1, 1, 1, 2).is_err());
    }

    #[test]
    fn d11_tables_agree() {
        assert_eq!(explicit_lambda(11).unwrap(), general_odd_lambda(11).unwrap());
        let t = general_odd_lambda(5).unwrap();
        assert_eq!(t.get(2, 1, 2), q(16, 1));
        assert_eq!(t.get(2, 0, 3), q(16, 3));
    }

    #[test]
    fn d9_certificate_objective() {
        let f = matrix_m4(9).unwrap();
        let cert = certificate_from_lambda(&explicit_lambda(9).unwrap(), &f).unwrap();
        assert_eq!(
            crate::certify::objective(&cert).as_rational(),
            Some(q(1, 20))
        );
    }
}

//! Exact verification of dual certificates.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use super::known::{compare_known, Comparison};
use super::DualCertificate;
use crate::exactnum::{sign, BoundValue, CycloReal, Rounding, Sign, SurdPair, DEFAULT_MAX_BITS};
use crate::lp::mu_zero;
use crate::orbits::{enumerate_reps, OrbitError, Rep};
use crate::symdft::{Backend, SymDftError, SymDftMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// A stored `mu_x` is negative.
    NegativeMu,
    /// A value is stored for a representative with `0 < |x|^2 < r^2`.
    InsideRadius,
    /// A value is stored for the zero representative.
    ZeroStored,
    /// A stored representative does not belong to `Z_m^d`.
    ForeignRep,
    /// `lambda_y < 0`.
    NegativeLambda,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Violation::NegativeMu => "mu is negative",
            Violation::InsideRadius => "mu stored inside the exclusion radius",
            Violation::ZeroStored => "mu stored at the origin",
            Violation::ForeignRep => "representative outside Z_m^d",
            Violation::NegativeLambda => "lambda is negative",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VerifyStatus {
    Verified,
    Infeasible { rep: Rep, violation: Violation },
    Indeterminate { rep: Rep, bits: u64 },
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub status: VerifyStatus,
    pub objective: BoundValue,
    /// Objective floored to `digits` decimals.
    pub decimal_lower_bound: String,
    pub comparison: Comparison,
    /// Number of `lambda_y` that are exactly zero.
    pub zero_lambdas: usize,
    /// Whether `m^(-d/2) lambda_0` reproduced the summed objective.
    pub objective_consistent: bool,
}

impl VerificationReport {
    pub fn is_verified(&self) -> bool {
        self.status == VerifyStatus::Verified
    }

    pub fn render(&self) -> String {
        let status = match &self.status {
            VerifyStatus::Verified => "VERIFIED".to_string(),
            VerifyStatus::Infeasible { rep, violation } => format!("INFEASIBLE at {rep}: {violation}"),
            VerifyStatus::Indeterminate { rep, bits } => {
                format!("INDETERMINATE at {rep} (sign unresolved at {bits} bits)")
            }
        };
        let mut s = format!("status: {status}\n");
        s.push_str(&format!("objective: {}\n", self.objective));
        s.push_str(&format!("lower bound (floor): {}\n", self.decimal_lower_bound));
        s.push_str(&format!("exact zero lambdas: {}\n", self.zero_lambdas));
        s.push_str(&self.comparison.render());
        s
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Orbits(#[from] OrbitError),
    #[error(transparent)]
    Matrix(#[from] SymDftError),
    #[error("matrix is for (d={0}, m={1}) but the certificate is not")]
    Mismatch(u32, u32),
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub digits: u32,
    pub max_bits: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            digits: 8,
            max_bits: DEFAULT_MAX_BITS,
        }
    }
}

/// `lambda = m^(-d/2) * values`, each unscaled value `A_y + B_y sqrt(r^2)`.
#[derive(Debug, Clone)]
pub struct Lambda {
    pub scale: BoundValue,
    pub values: Vec<SurdPair>,
}

impl Lambda {
    /// `lambda_y` as a rational, when both the scale and the value are rational.
    pub fn rational(&self, y: usize) -> Option<BigRational> {
        let (a, b) = self.values[y].rational_parts()?;
        if !b.is_zero() {
            return None;
        }
        Some(a * self.scale.as_rational()?)
    }

    pub fn to_f64(&self, y: usize) -> f64 {
        self.values[y].to_f64() * self.scale.to_f64()
    }
}

/// `mu_0 = c0 + c1 sqrt(r^2)` with rational parts.
fn mu_zero_parts(cert: &DualCertificate) -> (BigRational, BigRational) {
    let mu0 = mu_zero(&cert.params);
    match mu0.as_rational() {
        Some(q) => (q, BigRational::zero()),
        None => {
            let (_, q) = mu0.terms().next().expect("one surd term");
            (BigRational::zero(), q.clone() / sqrt_factor(cert.params.r2))
        }
    }
}

/// `sqrt(r2) = f sqrt(s)`; returns `f` so that `q sqrt(s) = (q / f) sqrt(r2)`.
fn sqrt_factor(r2: u64) -> BigRational {
    let (f, _) = crate::exactnum::bound::squarefree_split(r2);
    BigRational::from_integer(f.into())
}

/// `lambda = F^T mu` with `mu_0` carried symbolically.
pub fn compute_lambda(cert: &DualCertificate, matrix: &SymDftMatrix) -> Lambda {
    let idx = matrix.index();
    let m = matrix.m();
    let denom = cert.denominator();
    let numer: Vec<(usize, BigInt)> = cert
        .mu
        .iter()
        .filter_map(|(rep, v)| {
            idx.position(rep)
                .map(|i| (i, (v * BigRational::from_integer(denom.clone())).to_integer()))
        })
        .collect();
    let (c0, c1) = mu_zero_parts(cert);
    let stride = m as usize / 2 + 1;
    let values = (0..idx.len())
        .into_par_iter()
        .map(|y| {
            let mut acc = vec![BigInt::zero(); stride];
            for (x, n) in &numer {
                let counts = matrix.counts(*x, y);
                for (a, &c) in acc.iter_mut().zip(&counts) {
                    if c != 0 {
                        *a += n * c;
                    }
                }
            }
            let mut coeffs: Vec<BigRational> = acc
                .into_iter()
                .map(|a| BigRational::new(a, denom.clone()))
                .collect();
            // Column 0 of row 0 is the orbit size.
            let size = BigRational::from_integer(idx.orbit_size(y).into());
            coeffs[0] += &c0 * &size;
            let a = CycloReal::from_coeffs(m, coeffs);
            let b = CycloReal::from_rational(m, &c1 * &size);
            SurdPair::new(a, b, cert.params.r2)
        })
        .collect();
    Lambda {
        scale: matrix.scale(),
        values,
    }
}

/// Exact objective `m^(-d) (mu_0 + sum_x mu_x)`.
pub fn objective(cert: &DualCertificate) -> BoundValue {
    let p = &cert.params;
    let total: BigRational = cert.mu.values().sum();
    let md = num_traits::pow(BigInt::from(p.m), p.d as usize);
    mu_zero(p)
        .add(&BoundValue::from_rational(total))
        .scale(&BigRational::new(BigInt::from(1), md))
}

/// Builds the exact matrix and verifies.
pub fn verify(cert: &DualCertificate, opts: &VerifyOptions) -> Result<VerificationReport, VerifyError> {
    let index = Arc::new(enumerate_reps(cert.params.d, cert.params.m)?);
    let matrix = SymDftMatrix::build(index, Backend::Exact)?;
    verify_with(cert, &matrix, opts)
}

/// Verifies against a prebuilt matrix for the same `(d, m)`.
pub fn verify_with(
    cert: &DualCertificate,
    matrix: &SymDftMatrix,
    opts: &VerifyOptions,
) -> Result<VerificationReport, VerifyError> {
    if matrix.d() != cert.params.d || matrix.m() != cert.params.m {
        return Err(VerifyError::Mismatch(matrix.d(), matrix.m()));
    }
    let obj = objective(cert);
    let decimal = obj.to_decimal(opts.digits, Rounding::Floor);
    let comparison = compare_known(cert.params.d, &obj);
    let report = |status, zeros, consistent| VerificationReport {
        status,
        objective: obj.clone(),
        decimal_lower_bound: decimal.clone(),
        comparison: comparison.clone(),
        zero_lambdas: zeros,
        objective_consistent: consistent,
    };
    if let Some((rep, violation)) = cert.structural_violation() {
        return Ok(report(VerifyStatus::Infeasible { rep, violation }, 0, false));
    }

    let lambda = compute_lambda(cert, matrix);
    let consistent = lambda_zero_matches(&lambda, &obj, cert);
    let signs: Vec<Result<Sign, u64>> = lambda
        .values
        .par_iter()
        .map(|v| sign(v, opts.max_bits).map_err(|e| e.bits))
        .collect();
    let idx = matrix.index();
    let mut zeros = 0;
    for (y, s) in signs.iter().enumerate() {
        match s {
            Ok(Sign::Positive) => {}
            Ok(Sign::Zero) => zeros += 1,
            Ok(Sign::Negative) => {
                return Ok(report(
                    VerifyStatus::Infeasible {
                        rep: idx.rep(y).clone(),
                        violation: Violation::NegativeLambda,
                    },
                    zeros,
                    consistent,
                ))
            }
            Err(bits) => {
                return Ok(report(
                    VerifyStatus::Indeterminate {
                        rep: idx.rep(y).clone(),
                        bits: *bits,
                    },
                    zeros,
                    consistent,
                ))
            }
        }
    }
    Ok(report(VerifyStatus::Verified, zeros, consistent))
}

/// `m^(-d/2) lambda_0` equals the summed objective.
fn lambda_zero_matches(lambda: &Lambda, obj: &BoundValue, cert: &DualCertificate) -> bool {
    let Some((a, b)) = lambda.values[0].rational_parts() else {
        return false;
    };
    let lam0 = BoundValue::from_rational(a).add(&BoundValue::sqrt_term(b, cert.params.r2));
    lam0.mul(&lambda.scale).mul(&lambda.scale) == *obj
}

/// Floating `lambda` for diagnostics.
pub fn lambda_f64(lambda: &Lambda) -> Vec<f64> {
    (0..lambda.values.len()).map(|y| lambda.to_f64(y)).collect()
}

/// Smallest `lambda_y` in floating point, for diagnostics.
pub fn min_lambda_f64(lambda: &Lambda) -> f64 {
    lambda_f64(lambda)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

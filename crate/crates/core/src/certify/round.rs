//! Rounding floating dual solutions to exact rational certificates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use super::{DualCertificate, Provenance};
use crate::lp::{FloatSolution, SolutionKind, Status};
use crate::orbits::Rep;

/// Values below this (where nonnegativity is required) refuse rounding.
pub const NEGATIVE_REFUSAL: f64 = -1e-9;
/// Relative snap distance accepted by the automatic lattice scan.
pub const LATTICE_SNAP_TOL: f64 = 1e-9;
/// Largest lattice denominator tried by the automatic scan.
pub const LATTICE_SCAN_MAX: u64 = 1000;
/// Denominator cap used when no lattice fits.
pub const DEFAULT_DENOM_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Best approximation with denominator at most the cap.
    DenomCap(u64),
    /// Nearest point of `(1/q) Z`.
    Lattice(u64),
    /// Smallest lattice `q <= 1000` that fits every value, else `DenomCap(10^6)`.
    Auto,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::DenomCap(q) => write!(f, "denom:{q}"),
            Scheme::Lattice(q) => write!(f, "lattice:{q}"),
            Scheme::Auto => write!(f, "auto"),
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Scheme::Auto);
        }
        let (kind, q) = s
            .split_once(':')
            .ok_or_else(|| format!("scheme {s:?} is not `lattice:q`, `denom:Q` or `auto`"))?;
        let q: u64 = q
            .parse()
            .ok()
            .filter(|&q| q > 0)
            .ok_or_else(|| format!("bad denominator in {s:?}"))?;
        match kind {
            "lattice" => Ok(Scheme::Lattice(q)),
            "denom" => Ok(Scheme::DenomCap(q)),
            _ => Err(format!("unknown scheme {kind:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoundError {
    #[error("solution is {0}, not optimal")]
    NotOptimal(Status),
    #[error("expected a dual solution")]
    NotDual,
    #[error("value {value:e} at {rep} is negative beyond tolerance")]
    Negative { rep: Rep, value: f64 },
    #[error("non-finite value at {0}")]
    NonFinite(Rep),
}

/// Best rational approximation of `x` with denominator at most `cap`.
pub fn best_rational(x: &BigRational, cap: u64) -> BigRational {
    let cap = BigInt::from(cap.max(1));
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::from(1));
    let (mut p1, mut q1) = (BigInt::from(1), BigInt::zero());
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if q2 > cap {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            return BigRational::new(p1, q1);
        }
    }
    let k = (&cap - &q0) / &q1;
    let semi = BigRational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = BigRational::new(p1, q1);
    if (x - &semi).abs() < (x - &conv).abs() {
        semi
    } else {
        conv
    }
}

/// Nearest multiple of `1/q`.
pub fn snap_lattice(x: f64, q: u64) -> BigRational {
    let exact = BigRational::from_float(x).expect("finite");
    let scaled = exact * BigRational::from_integer(q.into());
    BigRational::new(scaled.round().to_integer(), BigInt::from(q))
}

fn snap_distance(x: f64, q: u64) -> f64 {
    let qf = q as f64;
    ((x * qf).round() / qf - x).abs()
}

/// Smallest `q <= LATTICE_SCAN_MAX` whose lattice is within the relative snap
/// tolerance of every value.
pub fn scan_lattice(values: &[f64]) -> Option<u64> {
    (1..=LATTICE_SCAN_MAX).find(|&q| {
        values
            .iter()
            .all(|&v| snap_distance(v, q) <= LATTICE_SNAP_TOL * v.abs().max(1.0))
    })
}

/// The scheme `Auto` resolves to for these values.
pub fn resolve_scheme(sol: &FloatSolution, scheme: Scheme) -> Scheme {
    match scheme {
        Scheme::Auto => {
            let vals: Vec<f64> = free_entries(sol).map(|(_, v)| v).collect();
            match scan_lattice(&vals) {
                Some(q) => Scheme::Lattice(q),
                None => Scheme::DenomCap(DEFAULT_DENOM_CAP),
            }
        }
        s => s,
    }
}

fn free_entries(sol: &FloatSolution) -> impl Iterator<Item = (&Rep, f64)> {
    let r2 = sol.params.r2;
    sol.entries
        .iter()
        .filter(move |(rep, _)| !rep.is_zero() && rep.norm_sq() >= r2)
        .map(|(r, v)| (r, *v))
}

/// Rounds an optimal dual solution; structural zeros are enforced and tiny
/// negatives are clamped to zero.
pub fn rationalize(sol: &FloatSolution, scheme: Scheme) -> Result<DualCertificate, RoundError> {
    if sol.kind != SolutionKind::Dual {
        return Err(RoundError::NotDual);
    }
    if sol.status != Status::Optimal {
        return Err(RoundError::NotOptimal(sol.status));
    }
    let scheme = resolve_scheme(sol, scheme);
    let mut mu = BTreeMap::new();
    for (rep, v) in free_entries(sol) {
        if !v.is_finite() {
            return Err(RoundError::NonFinite(rep.clone()));
        }
        if v < NEGATIVE_REFUSAL {
            return Err(RoundError::Negative {
                rep: rep.clone(),
                value: v,
            });
        }
        let q = match scheme {
            Scheme::Lattice(q) => snap_lattice(v, q),
            Scheme::DenomCap(cap) => best_rational(&BigRational::from_float(v).expect("finite"), cap),
            Scheme::Auto => unreachable!("resolved above"),
        };
        if q.is_positive() {
            mu.insert(rep.clone(), q);
        }
    }
    Ok(DualCertificate::new(sol.params, mu, Provenance::SolverRounded))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn lattice_and_cap() {
        assert_eq!(snap_lattice(0.333333333341, 3), q(1, 3));
        let x = BigRational::from_float(0.19999999987).unwrap();
        assert_eq!(best_rational(&x, 10), q(1, 5));
        let pi = BigRational::from_float(std::f64::consts::PI).unwrap();
        assert_eq!(best_rational(&pi, 1000), q(355, 113));
        assert_eq!(best_rational(&pi, 100), q(311, 99));
        assert_eq!(best_rational(&q(-7, 2), 5), q(-7, 2));
    }

    #[test]
    fn scan() {
        assert_eq!(scan_lattice(&[0.2, 1.4, 2.0 + 1e-12]), Some(5));
        assert_eq!(scan_lattice(&[1.0 / 3.0, 0.5]), Some(6));
        assert_eq!(scan_lattice(&[std::f64::consts::PI]), None);
    }

    #[test]
    fn scheme_parse() {
        assert_eq!("lattice:5".parse::<Scheme>(), Ok(Scheme::Lattice(5)));
        assert_eq!("denom:1000000".parse::<Scheme>(), Ok(Scheme::DenomCap(1_000_000)));
        assert_eq!("auto".parse::<Scheme>(), Ok(Scheme::Auto));
        assert!("lattice:0".parse::<Scheme>().is_err());
        assert!("grid:3".parse::<Scheme>().is_err());
    }
}

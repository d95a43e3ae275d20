//! Exact dual certificates: rounding floating solutions, exact verification,
//! objective values and comparison with known packing densities.

pub mod known;
pub mod round;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactnum::{format_rational, parse_rational, BoundValue};
use crate::orbits::{OrbitError, Params, Rep};

pub use known::{compare_known, known_density, Comparison, KnownDensity};
pub use round::{rationalize, RoundError, Scheme};
pub use verify::{compute_lambda, objective, verify, verify_with, Lambda, VerificationReport, VerifyError, VerifyOptions, VerifyStatus, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    SolverRounded,
    ClosedForm,
    File,
}

/// Orbit-scaled dual vector `mu_x` over representatives with `|x|^2 >= r^2`.
/// `mu_0 = (r/2)^d` is implied by the instance and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub params: Params,
    pub mu: BTreeMap<Rep, BigRational>,
    pub provenance: Provenance,
    /// Objective recorded in a file, if any; verification recomputes it.
    pub claimed: Option<BoundValue>,
}

#[derive(Debug, Error)]
pub enum CertFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    Params(#[from] OrbitError),
}

impl DualCertificate {
    /// Drops zero entries; keeps everything else, valid or not.
    pub fn new(params: Params, mu: BTreeMap<Rep, BigRational>, provenance: Provenance) -> Self {
        let mu = mu.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        DualCertificate {
            params,
            mu,
            provenance,
            claimed: None,
        }
    }

    /// First structural problem in representative order, if any.
    pub fn structural_violation(&self) -> Option<(Rep, Violation)> {
        for (rep, v) in &self.mu {
            let bad = if rep.dim() != self.params.d as usize
                || rep.coords().iter().any(|&c| c > self.params.m / 2)
            {
                Some(Violation::ForeignRep)
            } else if rep.is_zero() {
                Some(Violation::ZeroStored)
            } else if rep.norm_sq() < self.params.r2 {
                Some(Violation::InsideRadius)
            } else if v.is_negative() {
                Some(Violation::NegativeMu)
            } else {
                None
            };
            if let Some(b) = bad {
                return Some((rep.clone(), b));
            }
        }
        None
    }

    /// Common denominator of the stored values.
    pub fn denominator(&self) -> BigInt {
        self.mu
            .values()
            .fold(BigInt::from(1), |acc, v| num_integer::Integer::lcm(&acc, v.denom()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("DLPCERT 1\n");
        let _ = writeln!(s, "d {}", self.params.d);
        let _ = writeln!(s, "m {}", self.params.m);
        let _ = writeln!(s, "r2 {}", self.params.r2);
        s.push_str("scaling orbit\n");
        for (rep, v) in &self.mu {
            s.push_str("mu");
            for c in rep.coords() {
                let _ = write!(s, " {c}");
            }
            let _ = writeln!(s, " {}", format_rational(v));
        }
        if let Some(obj) = &self.claimed {
            let _ = writeln!(s, "objective {obj}");
        }
        s.push_str("end\n");
        s
    }
}

impl FromStr for DualCertificate {
    type Err = CertFileError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, msg: &str| CertFileError::Syntax {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, "DLPCERT 1")) => {}
            Some((n, _)) => return Err(err(n, "expected header `DLPCERT 1`")),
            None => return Err(err(0, "empty file")),
        }
        let mut field = |key: &str| -> Result<u64, CertFileError> {
            let (n, l) = lines.next().ok_or_else(|| err(0, "truncated header"))?;
            l.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .and_then(|r| r.trim().parse().ok())
                .ok_or_else(|| err(n, &format!("expected `{key} <int>`")))
        };
        let d = field("d")?;
        let m = field("m")?;
        let r2 = field("r2")?;
        let params = Params::new(
            u32::try_from(d).map_err(|_| err(2, "d too large"))?,
            u32::try_from(m).map_err(|_| err(3, "m too large"))?,
            r2,
        )?;
        match lines.next() {
            Some((_, "scaling orbit")) => {}
            Some((n, _)) => return Err(err(n, "expected `scaling orbit`")),
            None => return Err(err(0, "truncated header")),
        }
        let mut mu = BTreeMap::new();
        let mut claimed = None;
        let mut ended = false;
        let mut last: Option<Rep> = None;
        for (n, l) in lines {
            if l == "end" {
                ended = true;
                break;
            }
            if let Some(rest) = l.strip_prefix("objective ") {
                claimed = Some(
                    rest.parse::<BoundValue>()
                        .map_err(|e| err(n, &e.to_string()))?,
                );
                continue;
            }
            let rest = l
                .strip_prefix("mu ")
                .ok_or_else(|| err(n, "expected `mu`, `objective` or `end`"))?;
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != d as usize + 1 {
                return Err(err(n, "wrong number of coordinates"));
            }
            let coords = toks[..d as usize]
                .iter()
                .map(|t| t.parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| err(n, "bad coordinate"))?;
            let rep = Rep::from_sorted(coords, params.m)
                .ok_or_else(|| err(n, "coordinates are not a canonical representative"))?;
            if last.as_ref().is_some_and(|p| *p >= rep) {
                return Err(err(n, "representatives must be strictly ascending"));
            }
            let v = parse_rational(toks[d as usize]).ok_or_else(|| err(n, "bad rational"))?;
            last = Some(rep.clone());
            mu.insert(rep, v);
        }
        if !ended {
            return Err(err(0, "missing `end`"));
        }
        let mut cert = DualCertificate::new(params, mu, Provenance::File);
        cert.claimed = claimed;
        Ok(cert)
    }
}

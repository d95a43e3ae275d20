//! Values `a + b sqrt(s)` with `a, b` real cyclotomic and rigorous sign checks.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::cyclo::CycloReal;
use super::interval::RInterval;
use crate::orbits::is_square;

/// First precision tried by [`sign`].
pub const START_BITS: u64 = 128;

/// Default cap for the precision schedule.
pub const DEFAULT_MAX_BITS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sign undetermined at {bits} bits")]
pub struct Indeterminate {
    pub bits: u64,
}

/// `a + b sqrt(s)`; `sqrt(s)` is treated as independent of the cyclotomic field.
#[derive(Clone, Debug, PartialEq)]
pub struct SurdPair {
    a: CycloReal,
    b: CycloReal,
    s: u64,
}

impl SurdPair {
    /// Collapses `b sqrt(s)` into `a` when `s` is a perfect square.
    pub fn new(a: CycloReal, b: CycloReal, s: u64) -> Self {
        if is_square(s) {
            let r = crate::orbits::integer_sqrt(s);
            let root = BigRational::from_integer(BigInt::from(r));
            let m = a.m();
            SurdPair {
                a: a.add(&b.scale(&root)),
                b: CycloReal::zero(m),
                s,
            }
        } else {
            SurdPair { a, b, s }
        }
    }

    pub fn a(&self) -> &CycloReal {
        &self.a
    }

    pub fn b(&self) -> &CycloReal {
        &self.b
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn is_canonical_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn enclosure(&self, prec: u64) -> RInterval {
        let a = self.a.enclosure(prec);
        if self.b.is_zero() {
            return a;
        }
        let root = RInterval::sqrt_rational(&BigRational::from_integer(self.s.into()), prec + 8);
        a.add(&self.b.enclosure(prec + 8).mul(&root)).round(prec)
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * (self.s as f64).sqrt()
    }

    /// The value as `q1 + q2 sqrt(s)` when both parts are rational.
    pub fn rational_parts(&self) -> Option<(BigRational, BigRational)> {
        Some((self.a.as_rational()?, self.b.as_rational()?))
    }
}

/// Sign of a cyclotomic value, exact for zero and by interval refinement otherwise.
pub fn sign_cyclo(v: &CycloReal, max_bits: u64) -> Result<Sign, Indeterminate> {
    if v.is_zero() {
        return Ok(Sign::Zero);
    }
    refine(|p| v.enclosure(p), max_bits)
}

/// Sign of `a + b sqrt(s)`.
///
/// `Zero` only when both parts reduce to the zero polynomial. A nonzero
/// canonical pair whose enclosures keep straddling zero up to `max_bits`
/// yields `Indeterminate`; a sign is never guessed.
pub fn sign(value: &SurdPair, max_bits: u64) -> Result<Sign, Indeterminate> {
    if value.is_canonical_zero() {
        return Ok(Sign::Zero);
    }
    if value.b.is_zero() {
        return sign_cyclo(&value.a, max_bits);
    }
    if value.a.is_zero() {
        return sign_cyclo(&value.b, max_bits);
    }
    refine(|p| value.enclosure(p), max_bits)
}

fn refine(enclose: impl Fn(u64) -> RInterval, max_bits: u64) -> Result<Sign, Indeterminate> {
    let mut prec = START_BITS.min(max_bits.max(2));
    loop {
        let iv = enclose(prec);
        if iv.is_positive() {
            return Ok(Sign::Positive);
        }
        if iv.is_negative() {
            return Ok(Sign::Negative);
        }
        if prec >= max_bits {
            return Err(Indeterminate { bits: prec });
        }
        prec = (prec * 2).min(max_bits);
    }
}

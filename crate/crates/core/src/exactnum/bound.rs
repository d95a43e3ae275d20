//! Exact values `sum_n q_n sqrt(n)` over distinct squarefree radicands.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::interval::RInterval;
use super::rational::{format_rational, parse_decimal_or_rational};
use super::surd::Sign;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse bound value {0:?}")]
pub struct ParseBoundError(pub String);

/// Rounding direction for [`BoundValue::to_decimal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Floor,
    Ceil,
}

/// Splits `n = f^2 * s` with `s` squarefree.
pub fn squarefree_split(n: u64) -> (u64, u64) {
    assert!(n > 0);
    let mut f = 1u64;
    let mut s = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        f *= p.pow(e / 2);
        if e % 2 == 1 {
            s *= p;
        }
        p += 1;
    }
    (f, s * rest)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundValue {
    terms: BTreeMap<u64, BigRational>,
}

impl BoundValue {
    pub fn zero() -> Self {
        BoundValue::default()
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut v = BoundValue::zero();
        v.push(1, q);
        v
    }

    pub fn from_int(n: i64) -> Self {
        BoundValue::from_rational(BigRational::from_integer(n.into()))
    }

    /// `q sqrt(n)` for any positive `n`.
    pub fn sqrt_term(q: BigRational, n: u64) -> Self {
        let (f, s) = squarefree_split(n);
        let mut v = BoundValue::zero();
        v.push(s, q * BigRational::from_integer(f.into()));
        v
    }

    fn push(&mut self, n: u64, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let e = self.terms.entry(n).or_insert_with(BigRational::zero);
        *e += q;
        if e.is_zero() {
            self.terms.remove(&n);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(n, q)| (*n, q))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &BoundValue) -> BoundValue {
        let mut v = self.clone();
        for (n, q) in &other.terms {
            v.push(*n, q.clone());
        }
        v
    }

    pub fn neg(&self) -> BoundValue {
        BoundValue {
            terms: self.terms.iter().map(|(n, q)| (*n, -q)).collect(),
        }
    }

    pub fn sub(&self, other: &BoundValue) -> BoundValue {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &BigRational) -> BoundValue {
        let mut v = BoundValue::zero();
        for (n, c) in &self.terms {
            v.push(*n, c * q);
        }
        v
    }

    /// Multiplies by `sqrt(k)`.
    pub fn mul_sqrt(&self, k: u64) -> BoundValue {
        self.mul(&BoundValue::sqrt_term(BigRational::one(), k))
    }

    pub fn mul(&self, other: &BoundValue) -> BoundValue {
        let mut v = BoundValue::zero();
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                let g = a.gcd(b);
                // sqrt(a) sqrt(b) = g sqrt(a/g * b/g) with a/g, b/g coprime squarefree.
                let coef = p * q * BigRational::from_integer(g.into());
                v.push((a / g) * (b / g), coef);
            }
        }
        v
    }

    pub fn enclosure(&self, prec: u64) -> RInterval {
        let work = prec + 8;
        let mut acc = RInterval::zero();
        for (n, q) in &self.terms {
            let term = if *n == 1 {
                RInterval::from_rational(q, work)
            } else {
                let root = RInterval::sqrt_rational(&BigRational::from_integer((*n).into()), work);
                RInterval::from_rational(q, work).mul(&root)
            };
            acc = acc.add(&term).round(work);
        }
        acc.round(prec)
    }

    /// Exact sign: zero iff there are no terms (square roots of distinct
    /// squarefree integers are linearly independent over Q).
    pub fn sign(&self) -> Sign {
        if let Some(q) = self.as_rational() {
            return match q.cmp(&BigRational::zero()) {
                std::cmp::Ordering::Less => Sign::Negative,
                std::cmp::Ordering::Equal => Sign::Zero,
                std::cmp::Ordering::Greater => Sign::Positive,
            };
        }
        let mut prec = 64;
        loop {
            let iv = self.enclosure(prec);
            if iv.is_positive() {
                return Sign::Positive;
            }
            if iv.is_negative() {
                return Sign::Negative;
            }
            prec *= 2;
        }
    }

    pub fn gt(&self, other: &BoundValue) -> bool {
        self.sub(other).sign() == Sign::Positive
    }

    pub fn ge(&self, other: &BoundValue) -> bool {
        self.sub(other).sign() != Sign::Negative
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(n, q)| q.to_f64().unwrap_or(f64::NAN) * (*n as f64).sqrt())
            .sum()
    }

    /// Decimal with `digits` places, rounded toward `-inf` (`Floor`) or `+inf` (`Ceil`).
    pub fn to_decimal(&self, digits: u32, mode: Rounding) -> String {
        let scale = BigRational::from_integer(BigInt::from(10).pow(digits));
        let round = |q: &BigRational| match mode {
            Rounding::Floor => q.floor().to_integer(),
            Rounding::Ceil => q.ceil().to_integer(),
        };
        let n = if let Some(q) = self.as_rational() {
            round(&(q * &scale))
        } else {
            // Irrational values never sit on a decimal boundary, so refinement terminates.
            let mut prec = 64 + 4 * u64::from(digits);
            loop {
                let iv = self.enclosure(prec);
                let lo = round(&(iv.lo().to_rational() * &scale));
                let hi = round(&(iv.hi().to_rational() * &scale));
                if lo == hi {
                    break lo;
                }
                prec *= 2;
            }
        };
        format_fixed(&n, digits)
    }
}

fn format_fixed(n: &BigInt, digits: u32) -> String {
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let digits = digits as usize;
    let padded = if s.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = padded.split_at(padded.len() - digits);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (n, q)) in self.terms.iter().enumerate() {
            let (sign, mag) = if q.is_negative() {
                ("-", -q)
            } else {
                ("+", q.clone())
            };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            write!(f, "{}*sqrt({n})", format_rational(&mag))?;
        }
        Ok(())
    }
}

impl FromStr for BoundValue {
    type Err = ParseBoundError;

    /// Accepts the `Display` form plus bare rationals, decimals and `sqrt(n)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseBoundError(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, ch) in compact.chars().enumerate() {
            let prev = compact[..i].chars().last();
            let is_sep = (ch == '+' || ch == '-') && i > 0 && !matches!(prev, Some('e' | 'E' | '('));
            if is_sep {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut v = BoundValue::zero();
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, t.strip_prefix('+').unwrap_or(&t)),
            };
            let (coef, radicand) = if let Some(pos) = body.find("sqrt(") {
                let inner = body[pos + 5..].strip_suffix(')').ok_or_else(err)?;
                let n: u64 = inner.parse().map_err(|_| err())?;
                if n == 0 {
                    return Err(err());
                }
                let c = body[..pos].trim_end_matches('*');
                let coef = if c.is_empty() {
                    BigRational::one()
                } else {
                    parse_decimal_or_rational(c).ok_or_else(err)?
                };
                (coef, n)
            } else {
                (parse_decimal_or_rational(body).ok_or_else(err)?, 1)
            };
            let coef = if neg { -coef } else { coef };
            v = v.add(&BoundValue::sqrt_term(coef, radicand));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_split(1), (1, 1));
        assert_eq!(squarefree_split(12), (2, 3));
        assert_eq!(squarefree_split(41), (1, 41));
        assert_eq!(squarefree_split(72), (6, 2));
    }

    #[test]
    fn decimals() {
        let v = BoundValue::from_rational(q(1, 20));
        assert_eq!(v.to_decimal(8, Rounding::Floor), "0.05000000");
        let third = BoundValue::from_rational(q(1, 3));
        assert_eq!(third.to_decimal(8, Rounding::Floor), "0.33333333");
        assert_eq!(third.to_decimal(8, Rounding::Ceil), "0.33333334");
        let r2 = BoundValue::sqrt_term(q(1, 32), 2);
        assert_eq!(r2.to_decimal(8, Rounding::Floor), "0.04419417");
        assert_eq!(r2.to_decimal(8, Rounding::Ceil), "0.04419418");
        let neg = BoundValue::from_rational(q(-1, 3));
        assert_eq!(neg.to_decimal(4, Rounding::Floor), "-0.3334");
    }

    #[test]
    fn e6_density_decimal() {
        // 2^-3 3^-1/2 = sqrt(3)/24 < 0.07216879
        let v = BoundValue::sqrt_term(q(1, 24), 3);
        assert_eq!(v.to_decimal(8, Rounding::Ceil), "0.07216879");
    }

    #[test]
    fn products_of_roots() {
        let a = BoundValue::sqrt_term(q(1, 1), 6);
        let b = BoundValue::sqrt_term(q(1, 1), 10);
        // sqrt(60) = 2 sqrt(15)
        assert_eq!(a.mul(&b), BoundValue::sqrt_term(q(2, 1), 15));
        assert_eq!(a.mul(&a), BoundValue::from_int(6));
        assert_eq!(BoundValue::sqrt_term(q(1, 8), 8), BoundValue::sqrt_term(q(1, 4), 2));
    }

    #[test]
    fn display_and_parse() {
        let v = BoundValue::from_rational(q(1, 20)).add(&BoundValue::sqrt_term(q(-41, 8), 41));
        let s = v.to_string();
        assert_eq!(s, "1/20*sqrt(1) - 41/8*sqrt(41)");
        assert_eq!(s.parse::<BoundValue>().unwrap(), v);
        assert_eq!("0.05".parse::<BoundValue>().unwrap(), BoundValue::from_rational(q(1, 20)));
        assert_eq!("sqrt(2)".parse::<BoundValue>().unwrap(), BoundValue::sqrt_term(q(1, 1), 2));
        assert_eq!(
            "1/32*sqrt(2) + 1e-3".parse::<BoundValue>().unwrap(),
            BoundValue::sqrt_term(q(1, 32), 2).add(&BoundValue::from_rational(q(1, 1000)))
        );
        assert!("sqrt(x)".parse::<BoundValue>().is_err());
        assert!("".parse::<BoundValue>().is_err());
    }

    #[test]
    fn comparisons() {
        let packing9 = BoundValue::sqrt_term(q(1, 32), 2);
        let cert = BoundValue::from_rational(q(1, 20));
        assert!(cert.gt(&packing9));
        assert!(!packing9.gt(&cert));
        assert!(cert.ge(&cert));
    }

    fn arb_value() -> impl Strategy<Value = BoundValue> {
        proptest::collection::vec((1u64..50, -1000i64..1000, 1i64..100), 0..5).prop_map(|ts| {
            ts.into_iter().fold(BoundValue::zero(), |acc, (n, a, b)| {
                acc.add(&BoundValue::sqrt_term(q(a, b), n))
            })
        })
    }

    proptest! {
        #[test]
        fn add_sub_roundtrip(a in arb_value(), b in arb_value()) {
            prop_assert_eq!(a.add(&b).sub(&b), a.clone());
            prop_assert_eq!(a.to_string().parse::<BoundValue>().unwrap(), a);
        }

        #[test]
        fn floor_is_below(a in arb_value()) {
            let d: BoundValue = a.to_decimal(8, Rounding::Floor).parse().unwrap();
            prop_assert!(a.ge(&d));
            let u: BoundValue = a.to_decimal(8, Rounding::Ceil).parse().unwrap();
            prop_assert!(u.ge(&a));
        }
    }
}

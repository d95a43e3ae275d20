//! Exact arithmetic: rationals, real cyclotomic values, quadratic surds,
//! bound values `sum q sqrt(n)`, and dyadic interval enclosures.

pub mod bound;
pub mod cyclo;
pub mod interval;
pub mod rational;
pub mod surd;

pub use bound::{BoundValue, Rounding};
pub use cyclo::{field_degree, min_poly, CycloReal};
pub use interval::{cos_enclosure, Dyadic, RInterval};
pub use rational::{format_rational, parse_rational};
pub use surd::{sign, sign_cyclo, Indeterminate, Sign, SurdPair, DEFAULT_MAX_BITS};

pub type Rational = num_rational::BigRational;

/// Decimal string of `v`, floored or ceiled to `digits` places.
pub fn bound_decimal(v: &BoundValue, digits: u32, mode: Rounding) -> String {
    v.to_decimal(digits, mode)
}

//! Best known packing center densities and upper bounds, dimensions 3 to 13.

use num_rational::BigRational;

use crate::exactnum::rational::parse_decimal;
use crate::exactnum::{BoundValue, Rounding};

#[derive(Debug, Clone)]
pub struct KnownDensity {
    pub d: u32,
    /// Best known packing center density, exact.
    pub packing: BoundValue,
    pub packing_expr: &'static str,
    /// Best known upper bound on the center density (already rounded up).
    pub upper: Option<BoundValue>,
    pub upper_text: Option<&'static str>,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn known_density(d: u32) -> Option<KnownDensity> {
    let (packing, expr, upper) = match d {
        3 => (BoundValue::sqrt_term(q(1, 8), 2), "2^(-5/2)", Some("0.183889")),
        4 => (BoundValue::from_rational(q(1, 8)), "1/8", Some("0.12891")),
        5 => (BoundValue::sqrt_term(q(1, 16), 2), "2^(-7/2)", Some("0.09740")),
        6 => (BoundValue::sqrt_term(q(1, 24), 3), "2^(-3) 3^(-1/2)", Some("0.07939747")),
        7 => (BoundValue::from_rational(q(1, 16)), "1/16", Some("0.06797101")),
        9 => (BoundValue::sqrt_term(q(1, 32), 2), "2^(-9/2)", Some("0.05794146")),
        10 => (BoundValue::from_rational(q(5, 128)), "5/128", Some("0.05623564")),
        11 => (BoundValue::from_rational(q(9, 256)), "9/256", Some("0.05664513")),
        12 => (BoundValue::from_rational(q(1, 27)), "1/27", Some("0.05969745")),
        13 => (BoundValue::from_rational(q(9, 256)), "9/256", Some("0.06609354")),
        _ => return None,
    };
    Some(KnownDensity {
        d,
        packing,
        packing_expr: expr,
        upper: upper.map(|u| BoundValue::from_rational(parse_decimal(u).expect("literal"))),
        upper_text: upper,
    })
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub d: u32,
    pub bound: BoundValue,
    pub known: Option<KnownDensity>,
    /// Bound is strictly above the best known packing density.
    pub exceeds_packing: Option<bool>,
    /// Bound is strictly above the best known upper bound: the LP bound is not sharp.
    pub exceeds_upper: Option<bool>,
}

impl Comparison {
    pub fn render(&self) -> String {
        let Some(k) = &self.known else {
            return format!("dimension {}: no known-density entry\n", self.d);
        };
        let mut s = format!(
            "best packing center density {} = {}...: {}\n",
            k.packing_expr,
            k.packing.to_decimal(8, Rounding::Floor),
            if self.exceeds_packing == Some(true) { "exceeded" } else { "not exceeded" }
        );
        if let Some(u) = k.upper_text {
            s.push_str(&format!(
                "best upper bound {u}: {}\n",
                if self.exceeds_upper == Some(true) {
                    "exceeded (LP bound not sharp)"
                } else {
                    "not exceeded"
                }
            ));
        }
        s
    }
}

pub fn compare_known(d: u32, bound: &BoundValue) -> Comparison {
    let known = known_density(d);
    let exceeds_packing = known.as_ref().map(|k| bound.gt(&k.packing));
    let exceeds_upper = known
        .as_ref()
        .and_then(|k| k.upper.as_ref())
        .map(|u| bound.gt(u));
    Comparison {
        d,
        bound: bound.clone(),
        known,
        exceeds_packing,
        exceeds_upper,
    }
}

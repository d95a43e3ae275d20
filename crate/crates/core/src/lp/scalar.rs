//! Field operations the simplex needs, for `f64` (with tolerances) and exact rationals.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub trait LpScalar: Clone + Debug + PartialOrd + Send + Sync {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;

    /// `self -= a * b`.
    fn sub_mul_assign(&mut self, a: &Self, b: &Self);

    /// Treated as exactly zero by pivoting.
    fn is_negligible(&self) -> bool;
    /// Clearly positive for the ratio test (pivot elements).
    fn is_pivot_positive(&self) -> bool;
    /// Improving reduced cost (minimization).
    fn is_improving(&self) -> bool;
    /// Feasibility slack in phase one.
    fn is_infeasibility(&self) -> bool;
}

/// Pivot elements smaller than this are skipped.
pub const PIVOT_TOL: f64 = 1e-9;
/// Reduced costs above `-COST_TOL` count as optimal.
pub const COST_TOL: f64 = 1e-10;
/// Phase-one objective tolerance.
pub const FEAS_TOL: f64 = 1e-9;

impl LpScalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    #[inline]
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn is_negligible(&self) -> bool {
        f64::abs(*self) <= 1e-13
    }
    fn is_pivot_positive(&self) -> bool {
        *self > PIVOT_TOL
    }
    fn is_improving(&self) -> bool {
        *self < -COST_TOL
    }
    fn is_infeasibility(&self) -> bool {
        *self > FEAS_TOL
    }
}

impl LpScalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite value")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        if !a.is_zero() && !b.is_zero() {
            *self -= a * b;
        }
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
    fn is_pivot_positive(&self) -> bool {
        self.is_positive()
    }
    fn is_improving(&self) -> bool {
        self.is_negative()
    }
    fn is_infeasibility(&self) -> bool {
        self.is_positive()
    }
}

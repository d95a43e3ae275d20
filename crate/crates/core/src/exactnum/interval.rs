//! Interval arithmetic with dyadic endpoints.
//!
//! Additions and multiplications are exact; precision is only lost in
//! [`RInterval::round`], division, and the transcendental enclosures, all of
//! which round outward.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `mant * 2^exp`, with `mant` odd unless the value is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Dyadic::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        Dyadic {
            mant: mant >> tz,
            exp: exp + tz as i64,
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.mant.is_positive() {
            1
        } else if self.mant.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Keeps at most `prec` significant bits, rounding toward `-inf` or `+inf`.
    pub fn round(&self, prec: u64, up: bool) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        let div = BigInt::one() << shift;
        let q = if up {
            -((-&self.mant).div_floor(&div))
        } else {
            self.mant.div_floor(&div)
        };
        Dyadic::new(q, self.exp + shift as i64)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Keep 64 leading bits so the conversion never overflows on huge mantissas.
        let bits = self.mant.bits() as i64;
        let drop = (bits - 64).max(0);
        let m = (&self.mant >> drop as u64).to_f64().unwrap_or(f64::NAN);
        m * 2f64.powi((self.exp + drop) as i32)
    }

    /// Largest dyadic with `exp >= -prec` that is `<= q` (or smallest `>= q`).
    fn from_rational_dir(q: &BigRational, prec: u64, up: bool) -> Dyadic {
        if q.is_zero() {
            return Dyadic::zero();
        }
        let nb = q.numer().bits() as i64;
        let db = q.denom().bits() as i64;
        let e = prec as i64 - (nb - db);
        let (num, den) = if e >= 0 {
            (q.numer() << e as u64, q.denom().clone())
        } else {
            (q.numer().clone(), q.denom() << (-e) as u64)
        };
        let v = if up {
            -((-num).div_floor(&den))
        } else {
            num.div_floor(&den)
        };
        Dyadic::new(v, -e)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sub(other).signum().cmp(&0)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

/// Closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl RInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RInterval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        RInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn zero() -> Self {
        RInterval::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        RInterval::point(Dyadic::from_int(1))
    }

    pub fn from_int(n: i64) -> Self {
        RInterval::point(Dyadic::from_int(n))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        RInterval::point(Dyadic::new(n.clone(), 0))
    }

    /// Enclosure of `q` with about `prec` significant bits; exact when `q` is dyadic.
    pub fn from_rational(q: &BigRational, prec: u64) -> Self {
        RInterval {
            lo: Dyadic::from_rational_dir(q, prec, false),
            hi: Dyadic::from_rational_dir(q, prec, true),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn is_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi.signum() < 0
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        &self.lo.to_rational() <= q && q <= &self.hi.to_rational()
    }

    pub fn contains(&self, other: &RInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Largest absolute value over the interval.
    pub fn mag(&self) -> Dyadic {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn add(&self, other: &RInterval) -> RInterval {
        RInterval {
            lo: self.lo.add(&other.lo),
            hi: self.hi.add(&other.hi),
        }
    }

    pub fn neg(&self) -> RInterval {
        RInterval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn sub(&self, other: &RInterval) -> RInterval {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RInterval) -> RInterval {
        let p = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = p.iter().min().cloned().unwrap();
        let hi = p.iter().max().cloned().unwrap();
        RInterval { lo, hi }
    }

    pub fn mul_pow2(&self, k: i64) -> RInterval {
        RInterval {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
        }
    }

    /// Quotient enclosure; `None` when the divisor contains zero.
    pub fn div(&self, other: &RInterval, prec: u64) -> Option<RInterval> {
        if other.contains_zero() {
            return None;
        }
        let (a, b) = (self.lo.to_rational(), self.hi.to_rational());
        let (c, d) = (other.lo.to_rational(), other.hi.to_rational());
        let q = [&a / &c, &a / &d, &b / &c, &b / &d];
        let lo = q.iter().min().unwrap();
        let hi = q.iter().max().unwrap();
        Some(RInterval {
            lo: Dyadic::from_rational_dir(lo, prec, false),
            hi: Dyadic::from_rational_dir(hi, prec, true),
        })
    }

    pub fn div_int(&self, n: u64, prec: u64) -> RInterval {
        self.div(&RInterval::from_int(n as i64), prec)
            .expect("nonzero divisor")
    }

    /// Trims both endpoints to `prec` significant bits, outward.
    pub fn round(&self, prec: u64) -> RInterval {
        RInterval {
            lo: self.lo.round(prec, false),
            hi: self.hi.round(prec, true),
        }
    }

    /// Widens by `r` on both sides.
    pub fn widen(&self, r: &Dyadic) -> RInterval {
        let r = r.abs();
        RInterval {
            lo: self.lo.sub(&r),
            hi: self.hi.add(&r),
        }
    }

    /// Enclosure of `sqrt(q)` for rational `q >= 0`.
    pub fn sqrt_rational(q: &BigRational, prec: u64) -> RInterval {
        assert!(!q.is_negative(), "square root of a negative number");
        if q.is_zero() {
            return RInterval::zero();
        }
        // Scale by 4^e so that floor(q * 4^e) has about 2*prec bits.
        let nb = q.numer().bits() as i64;
        let db = q.denom().bits() as i64;
        let e = (prec as i64 + 2 - (nb - db) / 2).max(0);
        let scaled = q * BigRational::from_integer(BigInt::one() << (2 * e) as u64);
        let fl = scaled.floor().to_integer();
        let s = fl.sqrt();
        let exact = &s * &s == fl && scaled.is_integer();
        let lo = Dyadic::new(s.clone(), -e);
        let hi = if exact {
            lo.clone()
        } else {
            Dyadic::new(s + 1, -e)
        };
        RInterval { lo, hi }
    }
}

impl fmt::Display for RInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `2^p * atan(1/n)` truncated series and a bound on its absolute error in ulps.
fn atan_inv_fixed(n: u64, p: u64) -> (BigInt, BigInt) {
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut pow = (BigInt::one() << p) / &n;
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    loop {
        let term = &pow / BigInt::from(2 * i + 1);
        if term.is_zero() {
            break;
        }
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        pow /= &n2;
        i += 1;
    }
    // Each floored power is within 2 ulps and each term within 3; the tail
    // after the first zero term is below 3 ulps.
    (sum, BigInt::from(3 * (i + 2)))
}

fn pi_cache() -> &'static Mutex<HashMap<u64, RInterval>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, RInterval>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Enclosure of pi with absolute width about `2^(4-prec)`, via Machin's formula.
pub fn pi_enclosure(prec: u64) -> RInterval {
    if let Some(v) = pi_cache().lock().unwrap().get(&prec) {
        return v.clone();
    }
    let p = prec + 8;
    let (a, ea) = atan_inv_fixed(5, p);
    let (b, eb) = atan_inv_fixed(239, p);
    let s = BigInt::from(16) * a - BigInt::from(4) * b;
    let e = BigInt::from(16) * ea + BigInt::from(4) * eb;
    let v = RInterval {
        lo: Dyadic::new(&s - &e, -(p as i64)),
        hi: Dyadic::new(&s + &e, -(p as i64)),
    };
    pi_cache().lock().unwrap().insert(prec, v.clone());
    v
}

/// Taylor enclosure of `cos(x)` for a dyadic `0 <= x <= 2`.
fn cos_point(x: &Dyadic, prec: u64) -> RInterval {
    let x2 = RInterval::point(x.mul(x)).round(prec);
    let mut term = RInterval::one();
    let mut sum = RInterval::one();
    let tiny = Dyadic::new(BigInt::one(), -(prec as i64) - 4);
    let mut i: u64 = 1;
    loop {
        term = term
            .mul(&x2)
            .round(prec)
            .div_int((2 * i - 1) * (2 * i), prec)
            .neg();
        sum = sum.add(&term).round(prec);
        if term.mag() < tiny {
            break;
        }
        i += 1;
    }
    // Alternating with decreasing magnitudes (x^2 < 12), so the tail is
    // bounded by the last term.
    sum.widen(&term.mag())
}

/// Rational value of `cos(2 pi k / m)` when it is rational (Niven).
pub fn cos_rational(k: i64, m: u32) -> Option<BigRational> {
    let m = i64::from(m);
    let mut k = k.rem_euclid(m);
    k = k.min(m - k);
    let g = k.gcd(&m);
    let den = m / g;
    let v = match den {
        1 => BigRational::one(),
        2 => -BigRational::one(),
        3 => BigRational::new((-1).into(), 2.into()),
        4 => BigRational::zero(),
        6 => BigRational::new(1.into(), 2.into()),
        _ => return None,
    };
    Some(v)
}

/// Rigorous enclosure of `cos(2 pi k / m)` with width at most `2^(1-prec)`.
///
/// Exact point intervals whenever the cosine is rational.
pub fn cos_enclosure(k: i64, m: u32, prec: u64) -> RInterval {
    if let Some(q) = cos_rational(k, m) {
        return RInterval::from_rational(&q, prec.max(8));
    }
    let mi = i64::from(m);
    let mut k = k.rem_euclid(mi);
    k = k.min(mi - k);
    // Reduce to phi in [0, pi/2]: cos(theta) = -cos(pi - theta).
    let (num, negate) = if 4 * k <= mi {
        (2 * k, false)
    } else {
        (mi - 2 * k, true)
    };
    let frac = BigRational::new(num.into(), mi.into());
    let target = Dyadic::new(BigInt::one(), 1 - prec as i64);
    let mut guard = 32;
    loop {
        let p = prec + guard;
        let phi = pi_enclosure(p)
            .mul(&RInterval::from_rational(&frac, p))
            .round(p);
        let phi_lo = if phi.lo.signum() < 0 {
            Dyadic::zero()
        } else {
            phi.lo.clone()
        };
        let upper = cos_point(&phi_lo, p).hi;
        let lower = cos_point(&phi.hi, p).lo;
        let mut r = RInterval {
            lo: lower,
            hi: upper,
        }
        .round(prec + 4);
        if negate {
            r = r.neg();
        }
        if r.width() <= target {
            return r;
        }
        guard *= 2;
    }
}

fn cos_table_cache() -> &'static Mutex<HashMap<(u32, u64), Arc<Vec<RInterval>>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u64), Arc<Vec<RInterval>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Enclosures of `cos(2 pi k / m)` for `k = 0..=m/2`, cached per `(m, prec)`.
pub fn cos_table(m: u32, prec: u64) -> Arc<Vec<RInterval>> {
    if let Some(t) = cos_table_cache().lock().unwrap().get(&(m, prec)) {
        return t.clone();
    }
    let t: Arc<Vec<RInterval>> = Arc::new(
        (0..=i64::from(m / 2))
            .map(|k| cos_enclosure(k, m, prec))
            .collect(),
    );
    cos_table_cache()
        .lock()
        .unwrap()
        .entry((m, prec))
        .or_insert(t)
        .clone()
}

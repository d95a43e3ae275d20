//! Orbit representatives of `Z_m^d` under the hyperoctahedral group
//! `G_d = Z_2^d ⋊ S_d` (coordinate permutations and sign flips).
//!
//! Representatives are sorted tuples `0 <= x_1 <= ... <= x_d <= m/2`, kept in
//! lexicographic ascending order so that every file layout derived from an
//! [`OrbitIndex`] is deterministic.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Largest number of representatives an index may hold.
pub const MAX_REPS: u128 = 10_000_000;

/// Largest supported dimension. `2^d d!` must fit in a `u64`.
pub const MAX_DIM: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u32),
    #[error("squared radius must be at least 1")]
    ZeroRadius,
    #[error("m = {m} is smaller than 2r for r^2 = {r2} (need 4 r^2 <= m^2)")]
    RadiusTooLarge { m: u32, r2: u64 },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("vector has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A problem instance: dimension `d`, modulus `m` and integral squared radius `r2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    pub d: u32,
    pub m: u32,
    pub r2: u64,
}

impl Params {
    pub fn new(d: u32, m: u32, r2: u64) -> Result<Self, OrbitError> {
        if d == 0 {
            return Err(OrbitError::ZeroDimension);
        }
        if m < 2 {
            return Err(OrbitError::ModulusTooSmall(m));
        }
        if r2 == 0 {
            return Err(OrbitError::ZeroRadius);
        }
        if 4 * r2 > u64::from(m) * u64::from(m) {
            return Err(OrbitError::RadiusTooLarge { m, r2 });
        }
        Ok(Params { d, m, r2 })
    }

    /// `floor(m/2)`, the largest representative coordinate.
    pub fn half(&self) -> u32 {
        self.m / 2
    }

    pub fn r2_is_square(&self) -> bool {
        is_square(self.r2)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} m={} r2={}", self.d, self.m, self.r2)
    }
}

pub(crate) fn is_square(n: u64) -> bool {
    let r = integer_sqrt(n);
    r * r == n
}

pub(crate) fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// A canonical orbit representative: sorted coordinates in `[0, m/2]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rep(Vec<u32>);

impl Rep {
    /// Wraps coordinates that are already canonical for modulus `m`.
    pub fn from_sorted(coords: Vec<u32>, m: u32) -> Option<Rep> {
        let ok = coords.windows(2).all(|w| w[0] <= w[1]) && coords.iter().all(|&c| c <= m / 2);
        ok.then_some(Rep(coords))
    }

    pub fn zero(d: u32) -> Rep {
        Rep(vec![0; d as usize])
    }

    /// Pattern `(0^a, 1^b, 2^c)`.
    pub fn pattern(a: u32, b: u32, c: u32) -> Rep {
        let mut v = vec![0; a as usize];
        v.extend(std::iter::repeat(1).take(b as usize));
        v.extend(std::iter::repeat(2).take(c as usize));
        Rep(v)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn norm_sq(&self) -> u64 {
        norm_sq(self)
    }

    /// Distinct values with their multiplicities, ascending.
    pub fn runs(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &c in &self.0 {
            match out.last_mut() {
                Some((v, n)) if *v == c => *n += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    /// Count of coordinates equal to `1` and `2` etc. as `(a, b, c)` when `m = 4`.
    pub fn abc(&self) -> (u32, u32, u32) {
        let mut t = (0, 0, 0);
        for &c in &self.0 {
            match c {
                0 => t.0 += 1,
                1 => t.1 += 1,
                _ => t.2 += 1,
            }
        }
        t
    }
}

impl fmt::Display for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Sum of squared coordinates.
pub fn norm_sq(rep: &Rep) -> u64 {
    rep.0.iter().map(|&c| u64::from(c) * u64::from(c)).sum()
}

/// Number of distinct vectors of `Z_m^d` equivalent to `rep`.
///
/// `d! / prod mult(v)!` arrangements times a sign choice for every coordinate
/// that is neither `0` nor `m/2`.
pub fn orbit_size(rep: &Rep, m: u32) -> u64 {
    let d = rep.dim() as u64;
    let mut size: u64 = factorial(d);
    let mut free_signs = 0u32;
    for (v, mult) in rep.runs() {
        size /= factorial(u64::from(mult));
        if v != 0 && 2 * v != m {
            free_signs += mult;
        }
    }
    size << free_signs
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Canonical representative of an arbitrary vector mod `m`.
pub fn canonicalize(vector: &[i64], m: u32) -> Rep {
    let m = i64::from(m);
    let mut coords: Vec<u32> = vector
        .iter()
        .map(|&v| {
            let r = v.rem_euclid(m);
            r.min(m - r) as u32
        })
        .collect();
    coords.sort_unstable();
    Rep(coords)
}

/// `C(n, k)` in `u128`, `None` on overflow.
fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Number of representatives, `C(d + floor(m/2), d)`.
pub fn rep_count(d: u32, m: u32) -> Option<u128> {
    binomial_u128(u128::from(d) + u128::from(m / 2), u128::from(d))
}

/// All representatives of `Z_m^d / G_d` with orbit sizes and squared norms.
#[derive(Debug, Clone)]
pub struct OrbitIndex {
    d: u32,
    m: u32,
    reps: Vec<Rep>,
    orbit_sizes: Vec<u64>,
    norm_sqs: Vec<u64>,
    lookup: HashMap<Rep, usize>,
}

impl OrbitIndex {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[Rep] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> &Rep {
        &self.reps[i]
    }

    pub fn orbit_sizes(&self) -> &[u64] {
        &self.orbit_sizes
    }

    pub fn orbit_size(&self, i: usize) -> u64 {
        self.orbit_sizes[i]
    }

    pub fn norm_sqs(&self) -> &[u64] {
        &self.norm_sqs
    }

    pub fn norm_sq(&self, i: usize) -> u64 {
        self.norm_sqs[i]
    }

    pub fn position(&self, rep: &Rep) -> Option<usize> {
        self.lookup.get(rep).copied()
    }

    /// Position of the orbit containing an arbitrary vector.
    pub fn locate(&self, vector: &[i64]) -> Result<usize, OrbitError> {
        if vector.len() != self.d as usize {
            return Err(OrbitError::DimensionMismatch {
                expected: self.d as usize,
                got: vector.len(),
            });
        }
        Ok(self.lookup[&canonicalize(vector, self.m)])
    }

    pub fn matches(&self, params: &Params) -> bool {
        self.d == params.d && self.m == params.m
    }
}

/// Enumerates every representative in lexicographic ascending order.
pub fn enumerate_reps(d: u32, m: u32) -> Result<OrbitIndex, OrbitError> {
    if d == 0 {
        return Err(OrbitError::ZeroDimension);
    }
    if m < 2 {
        return Err(OrbitError::ModulusTooSmall(m));
    }
    if d > MAX_DIM {
        return Err(OrbitError::Capacity(format!(
            "dimension {d} exceeds the supported maximum {MAX_DIM}"
        )));
    }
    let count = rep_count(d, m).filter(|&c| c <= MAX_REPS).ok_or_else(|| {
        OrbitError::Capacity(format!(
            "Z_{m}^{d} has more than {MAX_REPS} orbit representatives"
        ))
    })? as usize;

    let half = m / 2;
    let mut reps = Vec::with_capacity(count);
    let mut cur = vec![0u32; d as usize];
    push_sorted(&mut reps, &mut cur, 0, 0, half);
    debug_assert_eq!(reps.len(), count);

    let orbit_sizes = reps.iter().map(|r| orbit_size(r, m)).collect();
    let norm_sqs = reps.iter().map(norm_sq).collect();
    let lookup = reps.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    Ok(OrbitIndex {
        d,
        m,
        reps,
        orbit_sizes,
        norm_sqs,
        lookup,
    })
}

fn push_sorted(out: &mut Vec<Rep>, cur: &mut Vec<u32>, pos: usize, min: u32, half: u32) {
    if pos == cur.len() {
        out.push(Rep(cur.clone()));
        return;
    }
    for v in min..=half {
        cur[pos] = v;
        push_sorted(out, cur, pos + 1, v, half);
    }
}

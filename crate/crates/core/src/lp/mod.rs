//! Radialized primal and dual discrete LPs and a dense simplex solver.
//!
//! Dual variables are orbit-scaled `mu_x` for `x != 0`; `mu_0 = (r/2)^d` is
//! pinned and folded into the right-hand sides. Primal variables are the
//! unscaled values `f(x)` of a `G_d`-invariant function.

pub mod scalar;
pub mod simplex;
pub mod solfile;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactnum::BoundValue;
use crate::orbits::Params;
use crate::symdft::SymDftMatrix;

pub use scalar::LpScalar;
pub use simplex::{simplex_solve, Limits};
pub use solfile::{FloatSolution, SolutionKind};

/// Default lower buffer on every `lambda_y`.
pub const DEFAULT_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("matrix is for (d={md}, m={mm}), instance is {params}")]
    Mismatch { md: u32, mm: u32, params: Params },
    #[error("exact mode needs rational data; {0} has irrational cosines, m^(-d/2) or (r/2)^d")]
    NotRational(Params),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Float,
    ExactRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::IterationLimit => "iteration-limit",
        })
    }
}

impl std::str::FromStr for Status {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "optimal" => Ok(Status::Optimal),
            "infeasible" => Ok(Status::Infeasible),
            "unbounded" => Ok(Status::Unbounded),
            "iteration-limit" => Ok(Status::IterationLimit),
            _ => Err(format!("unknown status {s:?}")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Variable<T> {
    pub lower: Option<T>,
    pub upper: Option<T>,
    /// Representative position this variable belongs to.
    pub rep: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub rel: Relation,
    pub rhs: T,
    pub rep: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct LpInstance<T> {
    pub sense: Sense,
    pub objective: Vec<T>,
    pub offset: T,
    pub vars: Vec<Variable<T>>,
    pub rows: Vec<Constraint<T>>,
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub status: Status,
    /// One value per variable (empty unless optimal).
    pub values: Vec<T>,
    pub objective: T,
    pub iterations: usize,
}

impl<T: LpScalar> LpInstance<T> {
    pub fn evaluate(&self, x: &[T]) -> T {
        self.objective
            .iter()
            .zip(x)
            .fold(self.offset.clone(), |acc, (c, v)| acc.add(&c.mul(v)))
    }

    /// Largest violation of any bound or constraint at `x`, as `f64`.
    pub fn max_violation(&self, x: &[T]) -> f64 {
        let mut worst = 0.0f64;
        for (v, xi) in self.vars.iter().zip(x) {
            if let Some(l) = &v.lower {
                worst = worst.max(l.sub(xi).to_f64());
            }
            if let Some(u) = &v.upper {
                worst = worst.max(xi.sub(u).to_f64());
            }
        }
        for row in &self.rows {
            let lhs = row
                .coeffs
                .iter()
                .zip(x)
                .fold(T::zero(), |acc, (a, v)| acc.add(&a.mul(v)));
            let gap = lhs.sub(&row.rhs).to_f64();
            worst = worst.max(match row.rel {
                Relation::Le => gap,
                Relation::Ge => -gap,
                Relation::Eq => gap.abs(),
            });
        }
        worst
    }

    pub fn solve(&self, limits: &Limits) -> LpSolution<T> {
        simplex_solve(self, limits)
    }
}

/// `(r/2)^d` exactly.
pub fn mu_zero(params: &Params) -> BoundValue {
    let quarter = BigRational::new(BigInt::from(params.r2), BigInt::from(4));
    let whole = num_traits::pow(quarter, (params.d / 2) as usize);
    if params.d % 2 == 0 {
        BoundValue::from_rational(whole)
    } else {
        BoundValue::sqrt_term(whole / BigRational::from_integer(2.into()), params.r2)
    }
}

/// Whether the instance's data lies in `Q` so exact-rational solving applies.
pub fn exact_supported(params: &Params) -> bool {
    matches!(params.m, 1 | 2 | 3 | 4 | 6)
        && crate::symdft::scale_value(params.d, params.m).as_rational().is_some()
        && mu_zero(params).as_rational().is_some()
}

fn check(params: &Params, matrix: &SymDftMatrix) -> Result<(), LpError> {
    if matrix.d() != params.d || matrix.m() != params.m {
        return Err(LpError::Mismatch {
            md: matrix.d(),
            mm: matrix.m(),
            params: *params,
        });
    }
    Ok(())
}

/// Scaled entry access in a given scalar type.
trait Entries<T> {
    fn entry(&self, i: usize, j: usize) -> T;
}

struct FloatEntries<'a>(&'a SymDftMatrix);

impl Entries<f64> for FloatEntries<'_> {
    fn entry(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }
}

struct ExactEntries<'a> {
    matrix: &'a SymDftMatrix,
    cos: Vec<BigRational>,
    scale: BigRational,
}

impl<'a> ExactEntries<'a> {
    fn new(matrix: &'a SymDftMatrix) -> Self {
        let m = matrix.m();
        let cos = (0..=m / 2)
            .map(|t| {
                crate::exactnum::interval::cos_rational(i64::from(t), m)
                    .expect("rational cosine")
            })
            .collect();
        let scale = matrix.scale().as_rational().expect("rational scale");
        ExactEntries { matrix, cos, scale }
    }
}

impl Entries<BigRational> for ExactEntries<'_> {
    fn entry(&self, i: usize, j: usize) -> BigRational {
        let s: BigRational = self
            .matrix
            .counts(i, j)
            .iter()
            .zip(&self.cos)
            .map(|(&c, q)| q * BigRational::from_integer(c.into()))
            .sum();
        s * &self.scale
    }
}

fn dual_lp<T: LpScalar>(
    params: &Params,
    matrix: &SymDftMatrix,
    f: &impl Entries<T>,
    mu0: T,
    scale: T,
    eps: T,
) -> LpInstance<T> {
    let idx = matrix.index();
    let n = idx.len();
    let vars: Vec<Variable<T>> = (1..n)
        .map(|x| Variable {
            lower: Some(T::zero()),
            upper: (idx.norm_sq(x) < params.r2).then(T::zero),
            rep: Some(x),
        })
        .collect();
    let rows = (0..n)
        .map(|y| {
            let mut rhs = eps.clone();
            rhs.sub_mul_assign(&f.entry(0, y), &mu0);
            Constraint {
                coeffs: (1..n).map(|x| f.entry(x, y)).collect(),
                rel: Relation::Ge,
                rhs,
                rep: Some(y),
            }
        })
        .collect();
    LpInstance {
        sense: Sense::Max,
        objective: (1..n).map(|x| scale.mul(&f.entry(x, 0))).collect(),
        offset: scale.mul(&f.entry(0, 0)).mul(&mu0),
        vars,
        rows,
    }
}

fn primal_lp<T: LpScalar>(
    params: &Params,
    matrix: &SymDftMatrix,
    f: &impl Entries<T>,
    mu0: T,
    scale: T,
) -> LpInstance<T> {
    let idx = matrix.index();
    let n = idx.len();
    let vars = (0..n)
        .map(|x| Variable {
            lower: None,
            upper: (x != 0 && idx.norm_sq(x) >= params.r2).then(T::zero),
            rep: Some(x),
        })
        .collect();
    let rows = (0..n)
        .map(|y| Constraint {
            coeffs: (0..n).map(|x| f.entry(y, x)).collect(),
            rel: Relation::Ge,
            rhs: if y == 0 { scale.clone() } else { T::zero() },
            rep: Some(y),
        })
        .collect();
    let mut objective = vec![T::zero(); n];
    objective[0] = mu0;
    LpInstance {
        sense: Sense::Min,
        objective,
        offset: T::zero(),
        vars,
        rows,
    }
}

/// Dual LP in double precision: maximize `m^(-d/2) lambda_0` subject to
/// `lambda = F^T mu >= eps`, `mu_x = 0` for `0 < |x|^2 < r^2`, `mu >= 0`.
pub fn build_dual_lp(params: &Params, matrix: &SymDftMatrix, eps: f64) -> Result<LpInstance<f64>, LpError> {
    check(params, matrix)?;
    Ok(dual_lp(
        params,
        matrix,
        &FloatEntries(matrix),
        mu_zero(params).to_f64(),
        matrix.scale_f64(),
        eps,
    ))
}

/// Dual LP over the rationals; refused unless [`exact_supported`].
pub fn build_dual_lp_exact(
    params: &Params,
    matrix: &SymDftMatrix,
    eps: &BigRational,
) -> Result<LpInstance<BigRational>, LpError> {
    check(params, matrix)?;
    if !exact_supported(params) {
        return Err(LpError::NotRational(*params));
    }
    let e = ExactEntries::new(matrix);
    let scale = e.scale.clone();
    Ok(dual_lp(
        params,
        matrix,
        &e,
        mu_zero(params).as_rational().expect("checked"),
        scale,
        eps.clone(),
    ))
}

/// Primal LP in double precision: minimize `(r/2)^d f_0` subject to
/// `(F f)_0 >= m^(-d/2)`, `(F f)_y >= 0`, `f_x <= 0` for `|x|^2 >= r^2`.
pub fn build_primal_lp(params: &Params, matrix: &SymDftMatrix) -> Result<LpInstance<f64>, LpError> {
    check(params, matrix)?;
    Ok(primal_lp(
        params,
        matrix,
        &FloatEntries(matrix),
        mu_zero(params).to_f64(),
        matrix.scale_f64(),
    ))
}

pub fn build_primal_lp_exact(
    params: &Params,
    matrix: &SymDftMatrix,
) -> Result<LpInstance<BigRational>, LpError> {
    check(params, matrix)?;
    if !exact_supported(params) {
        return Err(LpError::NotRational(*params));
    }
    let e = ExactEntries::new(matrix);
    let scale = e.scale.clone();
    Ok(primal_lp(
        params,
        matrix,
        &e,
        mu_zero(params).as_rational().expect("checked"),
        scale,
    ))
}

/// Exact rational `eps` from its decimal value.
pub fn eps_rational(eps: f64) -> BigRational {
    if eps == 0.0 {
        return <BigRational as Zero>::zero();
    }
    crate::exactnum::rational::parse_decimal(&format!("{eps:e}"))
        .unwrap_or_else(|| BigRational::from_float(eps).unwrap_or_else(<BigRational as One>::one))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::enumerate_reps;
    use crate::symdft::Backend;
    use std::sync::Arc;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn setup(d: u32, m: u32, r2: u64) -> (Params, SymDftMatrix) {
        let p = Params::new(d, m, r2).unwrap();
        let idx = Arc::new(enumerate_reps(d, m).unwrap());
        (p, SymDftMatrix::build(idx, Backend::Exact).unwrap())
    }

    #[test]
    fn hand_example_dual() {
        let (p, f) = setup(1, 4, 4);
        let lp = build_dual_lp(&p, &f, 0.0).unwrap();
        assert_eq!(lp.vars.len(), 2);
        assert_eq!(lp.vars[0].upper, Some(0.0));
        assert_eq!(lp.rows[1].coeffs, vec![0.0, -1.0]);
        assert_eq!(lp.rows[1].rhs, -1.0);
        let sol = lp.solve(&Limits::default());
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - 0.5).abs() < 1e-12);
        assert!((sol.values[1] - 1.0).abs() < 1e-12);

        let ex = build_dual_lp_exact(&p, &f, &<BigRational as Zero>::zero()).unwrap();
        let sol = ex.solve(&Limits::default());
        assert_eq!(sol.objective, q(1, 2));
        assert_eq!(sol.values, vec![q(0, 1), q(1, 1)]);
    }

    #[test]
    fn hand_example_primal() {
        let (p, f) = setup(1, 4, 4);
        let lp = build_primal_lp_exact(&p, &f).unwrap();
        let sol = lp.solve(&Limits::default());
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(sol.objective, q(1, 2));
        assert_eq!(sol.values[0], q(1, 2));
        let fl = build_primal_lp(&p, &f).unwrap().solve(&Limits::default());
        assert!((fl.objective - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mu_zero_forms() {
        assert_eq!(mu_zero(&Params::new(9, 4, 4).unwrap()), BoundValue::from_int(1));
        assert_eq!(
            mu_zero(&Params::new(3, 21, 41).unwrap()),
            BoundValue::sqrt_term(q(41, 8), 41)
        );
        assert!(exact_supported(&Params::new(9, 4, 4).unwrap()));
        assert!(!exact_supported(&Params::new(3, 6, 5).unwrap()));
        assert!(!exact_supported(&Params::new(2, 5, 4).unwrap()));
    }

    #[test]
    fn eps_parse() {
        assert_eq!(eps_rational(1e-10), q(1, 10_000_000_000));
        assert_eq!(eps_rational(0.0), q(0, 1));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LpInstance {
            sense: Sense::Max,
            objective: vec![1.0],
            offset: 0.0,
            vars: vec![Variable { lower: Some(0.0), upper: None, rep: None }],
            rows: vec![],
        };
        assert_eq!(lp.solve(&Limits::default()).status, Status::Unbounded);
        let lp = LpInstance {
            sense: Sense::Min,
            objective: vec![1.0],
            offset: 0.0,
            vars: vec![Variable { lower: Some(0.0), upper: Some(1.0), rep: None }],
            rows: vec![Constraint { coeffs: vec![1.0], rel: Relation::Ge, rhs: 2.0, rep: None }],
        };
        assert_eq!(lp.solve(&Limits::default()).status, Status::Infeasible);
    }
}

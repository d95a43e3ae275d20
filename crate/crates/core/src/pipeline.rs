//! End-to-end runs: float dual solve with an eps buffer, rounding, exact
//! verification and comparison, plus the named reproduction presets.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use num_rational::BigRational;
use thiserror::Error;

use crate::certify::{
    objective, rationalize, verify_with, DualCertificate, RoundError, Scheme, VerificationReport, VerifyError,
    VerifyOptions,
};
use crate::closedform::{self, ClosedFormError};
use crate::exactnum::{BoundValue, Rounding, DEFAULT_MAX_BITS};
use crate::lp::{build_dual_lp, FloatSolution, Limits, LpError, SolutionKind, Status, DEFAULT_EPS};
use crate::orbits::{enumerate_reps, OrbitError, Params};
use crate::symdft::{Backend, SymDftError, SymDftMatrix};

/// Overrides the rayon thread count.
pub const THREADS_ENV: &str = "DLPBOUND_THREADS";
/// Overrides the sign-determination precision cap.
pub const MAX_BITS_ENV: &str = "DLPBOUND_MAX_BITS";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Orbits(#[from] OrbitError),
    #[error(transparent)]
    Matrix(#[from] SymDftError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Round(#[from] RoundError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error("dual LP ended {0}")]
    Solver(Status),
    #[error("unknown preset {0:?}; run `preset --list`")]
    UnknownPreset(String),
    #[error("preset {0} is long-running; pass --allow-long")]
    LongPreset(String),
}

/// Thread count from the environment, if set and positive.
pub fn env_threads() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Sign-determination cap from the environment, else the default.
pub fn env_max_bits() -> u64 {
    std::env::var(MAX_BITS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&b| b >= 64)
        .unwrap_or(DEFAULT_MAX_BITS)
}

/// Configures the global rayon pool once; later calls are no-ops.
pub fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads.or_else(env_threads) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: Params,
    pub eps: f64,
    pub scheme: Scheme,
    pub verify: VerifyOptions,
    pub limits: Limits,
    /// Retry with larger eps and finer rounding when verification fails.
    pub retry: bool,
}

impl RunConfig {
    pub fn new(params: Params) -> Self {
        RunConfig {
            params,
            eps: DEFAULT_EPS,
            scheme: Scheme::Auto,
            verify: VerifyOptions {
                max_bits: env_max_bits(),
                ..VerifyOptions::default()
            },
            limits: Limits::default(),
            retry: true,
        }
    }
}

/// One solve-round-verify attempt.
#[derive(Debug, Clone)]
pub struct Attempt {
    pub eps: f64,
    pub scheme: Scheme,
    pub verified: bool,
    pub note: String,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub solution: FloatSolution,
    pub certificate: DualCertificate,
    pub report: VerificationReport,
    pub attempts: Vec<Attempt>,
    pub seconds: f64,
}

impl PipelineOutcome {
    pub fn render(&self) -> String {
        let p = &self.certificate.params;
        let mut s = format!("instance: d={} m={} r2={}\n", p.d, p.m, p.r2);
        s.push_str(&format!("float objective: {:.10}\n", self.solution.objective));
        for a in &self.attempts {
            s.push_str(&format!(
                "attempt eps={:e} scheme={}: {}{}\n",
                a.eps,
                a.scheme,
                if a.verified { "verified" } else { "rejected" },
                if a.note.is_empty() { String::new() } else { format!(" ({})", a.note) }
            ));
        }
        s.push_str(&self.report.render());
        s.push_str(&format!("elapsed: {:.1}s\n", self.seconds));
        s
    }
}

/// `(eps, scheme)` pairs tried in order.
fn ladder(cfg: &RunConfig) -> Vec<(f64, Scheme)> {
    let mut steps = vec![(cfg.eps, cfg.scheme)];
    if cfg.retry {
        for eps in [cfg.eps, 1e-8, 1e-6] {
            for scheme in [Scheme::Auto, Scheme::DenomCap(1_000_000_000), Scheme::DenomCap(1_000_000_000_000)] {
                if eps >= cfg.eps && !steps.contains(&(eps, scheme)) {
                    steps.push((eps, scheme));
                }
            }
        }
    }
    steps
}

/// Solves the float dual LP with buffer `eps`.
pub fn solve_dual(
    params: &Params,
    matrix: &SymDftMatrix,
    eps: f64,
    limits: &Limits,
) -> Result<FloatSolution, PipelineError> {
    let lp = build_dual_lp(params, matrix, eps)?;
    let sol = lp.solve(limits);
    Ok(FloatSolution::from_lp(*params, SolutionKind::Dual, eps, matrix.index(), &lp, &sol))
}

/// Solve, round, verify and compare, against a prebuilt exact matrix.
pub fn pipeline_with(cfg: &RunConfig, matrix: &SymDftMatrix) -> Result<PipelineOutcome, PipelineError> {
    let start = Instant::now();
    let mut attempts = Vec::new();
    let mut solved: Option<FloatSolution> = None;
    let mut last: Option<(FloatSolution, DualCertificate, VerificationReport)> = None;
    for (eps, scheme) in ladder(cfg) {
        let sol = match solved.take() {
            Some(s) if s.eps == eps => s,
            _ => solve_dual(&cfg.params, matrix, eps, &cfg.limits)?,
        };
        if sol.status != Status::Optimal {
            return Err(PipelineError::Solver(sol.status));
        }
        let cert = match rationalize(&sol, scheme) {
            Ok(c) => c,
            Err(e) => {
                attempts.push(Attempt {
                    eps,
                    scheme,
                    verified: false,
                    note: e.to_string(),
                });
                solved = Some(sol);
                continue;
            }
        };
        let resolved = crate::certify::round::resolve_scheme(&sol, scheme);
        let report = verify_with(&cert, matrix, &cfg.verify)?;
        let verified = report.is_verified();
        attempts.push(Attempt {
            eps,
            scheme,
            verified,
            note: if resolved == scheme { String::new() } else { format!("resolved to {resolved}") },
        });
        let mut cert = cert;
        cert.claimed = Some(report.objective.clone());
        if verified {
            return Ok(PipelineOutcome {
                solution: sol,
                certificate: cert,
                report,
                attempts,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
        solved = Some(sol.clone());
        last = Some((sol, cert, report));
    }
    match last {
        Some((solution, certificate, report)) => Ok(PipelineOutcome {
            solution,
            certificate,
            report,
            attempts,
            seconds: start.elapsed().as_secs_f64(),
        }),
        None => Err(PipelineError::Round(
            rationalize(solved.as_ref().expect("at least one solve"), cfg.scheme).unwrap_err(),
        )),
    }
}

/// Builds the exact matrix for the instance and runs the pipeline.
pub fn pipeline(cfg: &RunConfig) -> Result<PipelineOutcome, PipelineError> {
    let index = Arc::new(enumerate_reps(cfg.params.d, cfg.params.m)?);
    let matrix = SymDftMatrix::build(index, Backend::Exact)?;
    pipeline_with(cfg, &matrix)
}

/// What a preset must show for its verdict to hold.
#[derive(Debug, Clone)]
pub enum Expectation {
    /// Verified with objective strictly above the value.
    Above(BoundValue),
    /// Verified with objective at least the value.
    AtLeast(BoundValue),
    /// Verified with objective exactly the value.
    Exactly(BoundValue),
}

impl Expectation {
    pub fn holds(&self, obj: &BoundValue) -> bool {
        match self {
            Expectation::Above(v) => obj.gt(v),
            Expectation::AtLeast(v) => obj.ge(v),
            Expectation::Exactly(v) => obj == v,
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &BoundValue| format!("{v} = {}", v.to_decimal(8, Rounding::Floor));
        match self {
            Expectation::Above(v) => write!(f, "objective > {}", show(v)),
            Expectation::AtLeast(v) => write!(f, "objective >= {}", show(v)),
            Expectation::Exactly(v) => write!(f, "objective = {}", show(v)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetKind {
    /// Solve, round, verify.
    Solver,
    /// Published `lambda` table at `m = 4`.
    Explicit,
    /// General odd-dimensional construction at `m = 4`.
    OddClosedForm,
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub kind: PresetKind,
    pub params: Params,
    pub expect: Expectation,
    /// Optional `(target, tolerance)` the objective should land near.
    pub target: Option<(f64, f64)>,
    pub long: bool,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn dec(s: &str) -> BoundValue {
    BoundValue::from_rational(crate::exactnum::rational::parse_decimal(s).expect("literal"))
}

fn solver_preset(name: &str, d: u32, m: u32, r2: u64, expect: Expectation, long: bool) -> Preset {
    Preset {
        name: name.to_string(),
        kind: PresetKind::Solver,
        params: Params::new(d, m, r2).expect("preset parameters are valid"),
        expect,
        target: None,
        long,
    }
}

/// Every known preset, in listing order.
pub fn presets() -> Vec<Preset> {
    let packing = |d| crate::certify::known_density(d).expect("tabulated").packing;
    let mut out = vec![
        solver_preset("d3-min", 3, 21, 41, Expectation::Above(packing(3)), false),
        solver_preset("d4-min", 4, 16, 30, Expectation::Above(packing(4)), false),
        solver_preset("d5-min", 5, 10, 14, Expectation::Above(packing(5)), false),
        solver_preset("d6-min", 6, 8, 16, Expectation::Above(packing(6)), false),
        solver_preset("d6-full", 6, 12, 16, Expectation::AtLeast(dec("0.0763")), false),
        Preset {
            target: Some((0.06374745, 1e-3)),
            ..solver_preset("d7-full", 7, 8, 16, Expectation::Above(dec("0.0625")), false)
        },
        solver_preset("d3-full", 3, 53, 89, Expectation::AtLeast(dec("0.1839")), true),
        solver_preset("d4-full", 4, 30, 66, Expectation::AtLeast(dec("0.1291")), true),
        solver_preset("d5-full", 5, 24, 34, Expectation::AtLeast(dec("0.0982")), true),
    ];
    for (d, v) in [(9, q(1, 20)), (10, q(1, 24)), (11, q(1, 24)), (12, q(1, 24))] {
        out.push(Preset {
            name: format!("d{d}-explicit"),
            kind: PresetKind::Explicit,
            params: Params::new(d, 4, 4).expect("valid"),
            expect: Expectation::Exactly(BoundValue::from_rational(v)),
            target: None,
            long: false,
        });
    }
    for d in (5..=13).step_by(2) {
        out.push(Preset {
            name: format!("d{d}-odd-closed-form"),
            kind: PresetKind::OddClosedForm,
            params: Params::new(d, 4, 4).expect("valid"),
            expect: Expectation::Exactly(BoundValue::from_rational(q(1, 2 * (i64::from(d) + 1)))),
            target: None,
            long: false,
        });
    }
    out
}

pub fn find_preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}

#[derive(Debug, Clone)]
pub struct PresetOutcome {
    pub preset: Preset,
    pub certificate: DualCertificate,
    pub report: VerificationReport,
    /// Pipeline details for solver presets.
    pub run: Option<PipelineOutcome>,
    pub expectation_met: bool,
    /// Why the expectation failed, empty when it held.
    pub diff: String,
}

impl PresetOutcome {
    pub fn render(&self) -> String {
        let mut s = format!("preset: {}\n", self.preset.name);
        match &self.run {
            Some(run) => s.push_str(&run.render()),
            None => s.push_str(&self.report.render()),
        }
        s.push_str(&format!("expected: {}", self.preset.expect));
        if let Some((t, tol)) = self.preset.target {
            s.push_str(&format!(", within {tol:e} of {t}"));
        }
        s.push('\n');
        if self.expectation_met {
            s.push_str("verdict: as expected\n");
        } else {
            s.push_str(&format!("verdict: MISMATCH\n{}", self.diff));
        }
        s
    }
}

fn closed_form_certificate(preset: &Preset) -> Result<(DualCertificate, VerificationReport), PipelineError> {
    let d = preset.params.d;
    let table = match preset.kind {
        PresetKind::Explicit => closedform::explicit_lambda(d)?,
        _ => closedform::general_odd_lambda(d)?,
    };
    let matrix = closedform::matrix_m4(d)?;
    let mut cert = closedform::certificate_from_lambda(&table, &matrix)?;
    let opts = VerifyOptions {
        max_bits: env_max_bits(),
        ..VerifyOptions::default()
    };
    let report = verify_with(&cert, &matrix, &opts)?;
    cert.claimed = Some(objective(&cert));
    Ok((cert, report))
}

/// Runs a preset and checks its expected verdict.
pub fn run_preset(name: &str, allow_long: bool) -> Result<PresetOutcome, PipelineError> {
    let preset = find_preset(name).ok_or_else(|| PipelineError::UnknownPreset(name.to_string()))?;
    if preset.long && !allow_long {
        return Err(PipelineError::LongPreset(preset.name));
    }
    let (certificate, report, run) = match preset.kind {
        PresetKind::Solver => {
            let run = pipeline(&RunConfig::new(preset.params))?;
            (run.certificate.clone(), run.report.clone(), Some(run))
        }
        _ => {
            let (c, r) = closed_form_certificate(&preset)?;
            (c, r, None)
        }
    };
    let mut diff = String::new();
    if !report.is_verified() {
        diff.push_str(&format!("certificate did not verify: {:?}\n", report.status));
    }
    if !preset.expect.holds(&report.objective) {
        diff.push_str(&format!(
            "objective {} = {} fails {}\n",
            report.objective,
            report.objective.to_decimal(10, Rounding::Floor),
            preset.expect
        ));
    }
    if let Some((t, tol)) = preset.target {
        let got = report.objective.to_f64();
        if (got - t).abs() > tol {
            diff.push_str(&format!("objective {got:.10} is not within {tol:e} of {t}\n"));
        }
    }
    Ok(PresetOutcome {
        expectation_met: diff.is_empty(),
        preset,
        certificate,
        report,
        run,
        diff,
    })
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dlpbound_core::certify::{self, DualCertificate, Scheme, VerifyOptions};
use dlpbound_core::closedform;
use dlpbound_core::exactnum::{BoundValue, Rounding};
use dlpbound_core::lp::{self, FloatSolution, Limits, Mode, SolutionKind, DEFAULT_EPS};
use dlpbound_core::orbits::{enumerate_reps, Params};
use dlpbound_core::pipeline::{self, init_threads, RunConfig};
use dlpbound_core::symdft::{Backend, SymDftMatrix};

#[derive(Parser)]
#[command(name = "dlpbound", version, about = "Certified dual bounds for the discrete Cohn-Elkies LP")]
struct Cli {
    /// Worker threads (overrides DLPBOUND_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepFormat {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMode {
    Float,
    Exact,
}

#[derive(clap::Args)]
struct Instance {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    m: u32,
    /// Squared exclusion radius, a positive integer.
    #[arg(long)]
    r2: String,
}

impl Instance {
    fn params(&self) -> Result<Params, String> {
        let r2: u64 = self.r2.trim().parse().map_err(|_| {
            format!(
                "r2 must be a positive integer, got {:?}; an integer r^2 loses nothing since only lattice norms matter",
                self.r2
            )
        })?;
        Params::new(self.d, self.m, r2).map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// List orbit representatives of Z_m^d.
    Reps {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: RepFormat,
    },
    /// Solve the dual LP and write a solution file.
    Solve {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long, value_enum, default_value = "float")]
        mode: SolveMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the primal LP and write a solution file.
    PrimalSolve {
        #[command(flatten)]
        inst: Instance,
        /// Accepted for symmetry with `solve`; the primal has no buffer.
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long, value_enum, default_value = "float")]
        mode: SolveMode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Round a dual solution file to an exact certificate.
    Round {
        #[arg(long = "in")]
        input: PathBuf,
        /// `lattice:q`, `denom:Q` or `auto`.
        #[arg(long, default_value = "auto")]
        scheme: Scheme,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a certificate exactly; exit 0 only when verified.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 8)]
        digits: u32,
        /// Precision cap for sign determination (overrides DLPBOUND_MAX_BITS).
        #[arg(long)]
        max_bits: Option<u64>,
    },
    /// Emit and verify the closed-form certificate at m = 4, r^2 = 4.
    ClosedForm {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a bound against the known densities.
    Compare {
        #[arg(long)]
        d: u32,
        /// Rational, decimal, or `q*sqrt(n)` sums.
        #[arg(long)]
        bound: BoundValue,
    },
    /// Full solve-round-verify run.
    Run {
        #[command(flatten)]
        inst: Instance,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long, default_value = "auto")]
        scheme: Scheme,
        /// Fail instead of retrying with larger eps or finer rounding.
        #[arg(long)]
        no_retry: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named reproduction preset.
    Preset {
        name: Option<String>,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        allow_long: bool,
        /// Certificate output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("writing {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))
}

fn exact_matrix(params: &Params) -> Result<SymDftMatrix, String> {
    let index = enumerate_reps(params.d, params.m).map_err(|e| e.to_string())?;
    SymDftMatrix::build(index.into(), Backend::Exact).map_err(|e| e.to_string())
}

fn to_f64(v: &num_rational::BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
}

fn solve(inst: &Instance, eps: f64, mode: SolveMode, kind: SolutionKind, out: Option<&Path>) -> Result<ExitCode, String> {
    let params = inst.params()?;
    let matrix = exact_matrix(&params)?;
    let limits = Limits::default();
    let mode = match mode {
        SolveMode::Float => Mode::Float,
        SolveMode::Exact => Mode::ExactRational,
    };
    let file = match mode {
        Mode::Float => {
            let lp = match kind {
                SolutionKind::Dual => lp::build_dual_lp(&params, &matrix, eps),
                SolutionKind::Primal => lp::build_primal_lp(&params, &matrix),
            }
            .map_err(|e| e.to_string())?;
            let sol = lp.solve(&limits);
            FloatSolution::from_lp(params, kind, eps, matrix.index(), &lp, &sol)
        }
        Mode::ExactRational => {
            let lp = match kind {
                SolutionKind::Dual => lp::build_dual_lp_exact(&params, &matrix, &lp::eps_rational(eps)),
                SolutionKind::Primal => lp::build_primal_lp_exact(&params, &matrix),
            }
            .map_err(|e| e.to_string())?;
            let sol = lp.solve(&limits);
            eprintln!(
                "exact objective: {}",
                dlpbound_core::exactnum::format_rational(&sol.objective)
            );
            let entries = lp
                .vars
                .iter()
                .zip(&sol.values)
                .filter_map(|(v, x)| v.rep.map(|r| (matrix.index().rep(r).clone(), to_f64(x))))
                .collect();
            FloatSolution {
                params,
                kind,
                eps,
                status: sol.status,
                objective: to_f64(&sol.objective),
                entries,
            }
        }
    };
    eprintln!("status: {}  objective: {:.12}", file.status, file.objective);
    write_out(out, &file.to_text())?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Reps { d, m, format } => {
            let index = enumerate_reps(d, m).map_err(|e| e.to_string())?;
            let mut s = String::new();
            if matches!(format, RepFormat::Csv) {
                s.push_str("coords,normSq,orbitSize\n");
            }
            for (i, rep) in index.reps().iter().enumerate() {
                let coords: Vec<String> = rep.coords().iter().map(u32::to_string).collect();
                match format {
                    RepFormat::Text => s.push_str(&format!(
                        "{} {} {}\n",
                        coords.join(" "),
                        index.norm_sq(i),
                        index.orbit_size(i)
                    )),
                    RepFormat::Csv => s.push_str(&format!(
                        "{},{},{}\n",
                        coords.join(" "),
                        index.norm_sq(i),
                        index.orbit_size(i)
                    )),
                }
            }
            print!("{s}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { inst, eps, mode, out } => solve(&inst, eps, mode, SolutionKind::Dual, out.as_deref()),
        Command::PrimalSolve { inst, eps, mode, out } => {
            solve(&inst, eps, mode, SolutionKind::Primal, out.as_deref())
        }
        Command::Round { input, scheme, out } => {
            let sol: FloatSolution = read(&input)?.parse().map_err(|e| format!("{e}"))?;
            let resolved = certify::round::resolve_scheme(&sol, scheme);
            let cert = certify::rationalize(&sol, scheme).map_err(|e| e.to_string())?;
            eprintln!("scheme: {resolved}  stored entries: {}", cert.mu.len());
            write_out(Some(&out), &cert.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            cert,
            digits,
            max_bits,
        } => {
            let cert: DualCertificate = read(&cert)?.parse().map_err(|e| format!("{e}"))?;
            let opts = VerifyOptions {
                digits,
                max_bits: max_bits.unwrap_or_else(pipeline::env_max_bits),
            };
            let report = certify::verify(&cert, &opts).map_err(|e| e.to_string())?;
            print!("{}", report.render());
            if let Some(claimed) = &cert.claimed {
                if *claimed != report.objective {
                    println!("warning: recorded objective {claimed} differs from the recomputed one");
                }
            }
            Ok(if report.is_verified() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::ClosedForm { d, out } => {
            let table = closedform::table_for(d).map_err(|e| e.to_string())?;
            let matrix = closedform::matrix_m4(d).map_err(|e| e.to_string())?;
            let mut cert = closedform::certificate_from_lambda(&table, &matrix).map_err(|e| e.to_string())?;
            let opts = VerifyOptions {
                max_bits: pipeline::env_max_bits(),
                ..VerifyOptions::default()
            };
            let report = certify::verify_with(&cert, &matrix, &opts).map_err(|e| e.to_string())?;
            cert.claimed = Some(report.objective.clone());
            match &out {
                Some(p) => write_out(Some(p), &cert.to_text())?,
                None => print!("{}", cert.to_text()),
            }
            print!("{}", report.render());
            Ok(if report.is_verified() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Compare { d, bound } => {
            let c = certify::compare_known(d, &bound);
            println!("bound: {} = {}", bound, bound.to_decimal(8, Rounding::Floor));
            print!("{}", c.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            inst,
            eps,
            scheme,
            no_retry,
            out,
        } => {
            let mut cfg = RunConfig::new(inst.params()?);
            cfg.eps = eps;
            cfg.scheme = scheme;
            cfg.retry = !no_retry;
            let outcome = pipeline::pipeline(&cfg).map_err(|e| e.to_string())?;
            if let Some(p) = &out {
                write_out(Some(p), &outcome.certificate.to_text())?;
            }
            print!("{}", outcome.render());
            Ok(if outcome.report.is_verified() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Preset {
            name,
            list,
            allow_long,
            out,
        } => {
            if list || name.is_none() {
                for p in pipeline::presets() {
                    println!(
                        "{:<22} d={:<2} m={:<2} r2={:<3} {}{}",
                        p.name,
                        p.params.d,
                        p.params.m,
                        p.params.r2,
                        p.expect,
                        if p.long { "  [long]" } else { "" }
                    );
                }
                return Ok(ExitCode::SUCCESS);
            }
            let outcome = pipeline::run_preset(name.as_deref().unwrap_or_default(), allow_long)
                .map_err(|e| e.to_string())?;
            if let Some(p) = &out {
                write_out(Some(p), &outcome.certificate.to_text())?;
            }
            print!("{}", outcome.render());
            Ok(if outcome.expectation_met {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

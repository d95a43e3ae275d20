//! Floating solution files (`DLPSOL 1`).
//!
//! ```text
//! DLPSOL 1
//! d 1
//! m 4
//! r2 4
//! kind dual
//! eps 1e-10
//! status optimal
//! objective 0.5
//! var 1 0
//! var 2 1
//! end
//! ```
//! `var` lines carry the representative coordinates then the value; dual
//! files hold orbit-scaled `mu_x` for `x != 0`, primal files hold `f(x)`.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::{LpInstance, LpSolution, Status};
use crate::orbits::{OrbitIndex, Params, Rep};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    Dual,
    Primal,
}

#[derive(Debug, Error)]
pub enum SolFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    Params(#[from] crate::orbits::OrbitError),
}

#[derive(Debug, Clone)]
pub struct FloatSolution {
    pub params: Params,
    pub kind: SolutionKind,
    pub eps: f64,
    pub status: Status,
    pub objective: f64,
    pub entries: Vec<(Rep, f64)>,
}

impl FloatSolution {
    pub fn from_lp(
        params: Params,
        kind: SolutionKind,
        eps: f64,
        index: &OrbitIndex,
        lp: &LpInstance<f64>,
        sol: &LpSolution<f64>,
    ) -> Self {
        let entries = lp
            .vars
            .iter()
            .zip(&sol.values)
            .filter_map(|(v, &x)| v.rep.map(|r| (index.rep(r).clone(), x)))
            .collect();
        FloatSolution {
            params,
            kind,
            eps,
            status: sol.status,
            objective: sol.objective,
            entries,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("DLPSOL 1\n");
        let _ = writeln!(s, "d {}", self.params.d);
        let _ = writeln!(s, "m {}", self.params.m);
        let _ = writeln!(s, "r2 {}", self.params.r2);
        let kind = match self.kind {
            SolutionKind::Dual => "dual",
            SolutionKind::Primal => "primal",
        };
        let _ = writeln!(s, "kind {kind}");
        let _ = writeln!(s, "eps {:e}", self.eps);
        let _ = writeln!(s, "status {}", self.status);
        let _ = writeln!(s, "objective {:e}", self.objective);
        for (rep, v) in &self.entries {
            s.push_str("var");
            for c in rep.coords() {
                let _ = write!(s, " {c}");
            }
            let _ = writeln!(s, " {v:e}");
        }
        s.push_str("end\n");
        s
    }
}

impl FromStr for FloatSolution {
    type Err = SolFileError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, msg: &str| SolFileError::Syntax {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, "DLPSOL 1")) => {}
            Some((n, _)) => return Err(err(n, "expected header `DLPSOL 1`")),
            None => return Err(err(0, "empty file")),
        }
        let mut header = |key: &str| -> Result<String, SolFileError> {
            let (n, l) = lines.next().ok_or_else(|| err(0, "truncated header"))?;
            l.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .map(|r| r.trim().to_string())
                .ok_or_else(|| err(n, &format!("expected `{key} ...`")))
        };
        let num = |s: String, key: &str| -> Result<u64, SolFileError> {
            s.parse().map_err(|_| err(0, &format!("bad {key}")))
        };
        let d = num(header("d")?, "d")? as u32;
        let m = num(header("m")?, "m")? as u32;
        let r2 = num(header("r2")?, "r2")?;
        let params = Params::new(d, m, r2)?;
        let kind = match header("kind")?.as_str() {
            "dual" => SolutionKind::Dual,
            "primal" => SolutionKind::Primal,
            _ => return Err(err(0, "kind must be dual or primal")),
        };
        let eps: f64 = header("eps")?.parse().map_err(|_| err(0, "bad eps"))?;
        let status: Status = header("status")?.parse().map_err(|e: String| err(0, &e))?;
        let objective: f64 = header("objective")?
            .parse()
            .map_err(|_| err(0, "bad objective"))?;
        let mut entries = Vec::new();
        let mut ended = false;
        for (n, l) in lines {
            if l == "end" {
                ended = true;
                break;
            }
            let rest = l
                .strip_prefix("var ")
                .ok_or_else(|| err(n, "expected `var` or `end`"))?;
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != d as usize + 1 {
                return Err(err(n, "wrong number of coordinates"));
            }
            let coords = toks[..d as usize]
                .iter()
                .map(|t| t.parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| err(n, "bad coordinate"))?;
            let rep = Rep::from_sorted(coords, m).ok_or_else(|| err(n, "not a canonical representative"))?;
            let v: f64 = toks[d as usize].parse().map_err(|_| err(n, "bad value"))?;
            entries.push((rep, v));
        }
        if !ended {
            return Err(err(0, "missing `end`"));
        }
        Ok(FloatSolution {
            params,
            kind,
            eps,
            status,
            objective,
            entries,
        })
    }
}

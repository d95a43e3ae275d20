//! Dense two-phase tableau simplex.
//!
//! Bounds are moved into the constraint matrix (shift, reflect or split each
//! variable so that it becomes nonnegative). In `f64` mode columns and then
//! rows are equilibrated. Pricing is Dantzig's rule with
//! a switch to Bland's rule after a streak of degenerate pivots. In `f64`
//! mode the final basis is re-solved from the original data by Gaussian
//! elimination with compensated iterative refinement.

use super::scalar::LpScalar;
use super::{LpInstance, LpSolution, Relation, Sense, Status};

#[derive(Debug, Clone)]
pub struct Limits {
    /// `None` means `50 * (columns + rows)` of the standard form, slacks included.
    pub max_iterations: Option<usize>,
    /// Degenerate pivots in a row before switching to Bland's rule.
    pub degenerate_streak: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_iterations: None,
            degenerate_streak: 30,
        }
    }
}

enum VarMap<T> {
    Fixed(T),
    Shift { col: usize, lower: T },
    Reflect { col: usize, upper: T },
    Split { pos: usize, neg: usize },
}

struct StdRow<T> {
    coeffs: Vec<T>,
    rel: Relation,
    rhs: T,
}

struct Tableau<T> {
    rows: usize,
    cols: usize,
    /// Row-major, `cols + 1` entries per row (last is the right-hand side).
    t: Vec<T>,
    basis: Vec<usize>,
    iterations: usize,
    limit: usize,
    streak_limit: usize,
    /// Smallest usable pivot in `f64` mode, at least `PIVOT_TOL`.
    pivot_min: f64,
    /// Right-hand sides still carry the anti-degeneracy shift.
    perturbed: bool,
}

/// Negative basic values down to this are read as zero; below it the dual
/// cleanup pivots them out.
const CLEANUP_TOL: f64 = 1e-10;

/// Relative size of the right-hand-side shift in `f64` mode.
const PERTURB: f64 = 1e-7;

/// Magnitudes snapped to zero when the tableau is rebuilt.
const REINVERT_ZERO: f64 = 1e-11;

/// Times a phase may restart from rebuilt reduced costs.
const REBUILDS: usize = 4;

enum PhaseEnd {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl<T: LpScalar> Tableau<T> {
    fn stride(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, r: usize, c: usize) -> &T {
        &self.t[r * self.stride() + c]
    }

    fn rhs(&self, r: usize) -> &T {
        self.at(r, self.cols)
    }

    /// Right-hand side with roundoff negatives read as zero.
    fn clamped_rhs(&self, r: usize) -> T {
        let v = self.rhs(r);
        if !T::EXACT && *v < T::zero() {
            T::zero()
        } else {
            v.clone()
        }
    }

    fn pivot(&mut self, r: usize, c: usize, cost: &mut [T]) {
        let s = self.stride();
        let p = self.t[r * s + c].clone();
        for v in &mut self.t[r * s..(r + 1) * s] {
            *v = if v.is_negligible() { T::zero() } else { v.div(&p) };
        }
        self.t[r * s + c] = T::one();
        let nz: Vec<usize> = (0..s)
            .filter(|&j| !self.t[r * s + j].is_negligible())
            .collect();
        let prow: Vec<T> = nz.iter().map(|&j| self.t[r * s + j].clone()).collect();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * s + c].clone();
            if f.is_negligible() {
                if !T::EXACT {
                    self.t[i * s + c] = T::zero();
                }
                continue;
            }
            let row = &mut self.t[i * s..(i + 1) * s];
            for (&j, pv) in nz.iter().zip(&prow) {
                row[j].sub_mul_assign(&f, pv);
            }
            row[c] = T::zero();
        }
        let f = cost[c].clone();
        if !f.is_negligible() {
            for (&j, pv) in nz.iter().zip(&prow) {
                cost[j].sub_mul_assign(&f, pv);
            }
        }
        cost[c] = T::zero();
        self.basis[r] = c;
    }

    /// Reduced costs `base - base_B B^-1 [A | b]`; the last entry is minus the objective.
    fn reduced_costs(&self, base: &[T]) -> Vec<T> {
        let mut cost = base.to_vec();
        for i in 0..self.rows {
            let cb = &base[self.basis[i]];
            if cb.is_negligible() && (T::EXACT || cb.to_f64() == 0.0) {
                continue;
            }
            for (j, v) in cost.iter_mut().enumerate() {
                v.sub_mul_assign(cb, self.at(i, j));
            }
        }
        cost
    }

    /// Minimizes `base` over columns `< allowed`.
    ///
    /// In `f64` mode the tableau drifts over long degenerate runs, so when
    /// no improving column is left it is rebuilt from `original` and the run
    /// resumes if the fresh reduced costs still improve.
    /// A column whose cost clears `COST_TOL` but whose entries all sit below
    /// the pivot tolerance is roundoff, not a ray: it is skipped until the
    /// next pivot. Only a column with no positive entry at all is unbounded,
    /// and never in phase one, whose objective is bounded below by zero.
    fn run(&mut self, base: &[T], allowed: usize, phase_one: bool, original: &[T]) -> PhaseEnd {
        let mut cost = self.reduced_costs(base);
        let mut streak = 0usize;
        let mut pivots_since_rebuild = 0usize;
        let mut rebuilds = 0usize;
        let mut skipped = vec![false; allowed];
        loop {
            let bland = streak >= self.streak_limit;
            let improving = |j: usize| !skipped[j] && cost[j].is_improving();
            let entering = if bland {
                (0..allowed).find(|&j| improving(j))
            } else {
                let mut best: Option<usize> = None;
                for j in 0..allowed {
                    if improving(j) && best.is_none_or(|b| cost[j] < cost[b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                let stale = pivots_since_rebuild > 0 || self.perturbed;
                if T::EXACT || !stale || rebuilds >= REBUILDS {
                    return PhaseEnd::Optimal;
                }
                self.reinvert(original);
                cost = self.reduced_costs(base);
                if self.dual_cleanup(&mut cost, allowed) {
                    return PhaseEnd::IterationLimit;
                }
                rebuilds += 1;
                pivots_since_rebuild = 0;
                skipped.iter_mut().for_each(|s| *s = false);
                continue;
            };
            if self.iterations >= self.limit {
                return PhaseEnd::IterationLimit;
            }
            let Some(r) = self.ratio_test(c, bland) else {
                let ray = (0..self.rows).all(|i| *self.at(i, c) <= T::zero());
                if ray && !phase_one {
                    return PhaseEnd::Unbounded;
                }
                skipped[c] = true;
                continue;
            };
            if self.rhs(r).is_negligible() {
                streak += 1;
            } else {
                streak = 0;
            }
            self.pivot(r, c, &mut cost);
            self.iterations += 1;
            pivots_since_rebuild += 1;
            skipped.iter_mut().for_each(|s| *s = false);
        }
    }

    /// Dual simplex pivots that restore `x_B >= 0` after a rebuild, keeping
    /// reduced costs nonnegative. Returns `true` on hitting the iteration cap.
    fn dual_cleanup(&mut self, cost: &mut [T], allowed: usize) -> bool {
        loop {
            let leaving = (0..self.rows)
                .filter(|&i| self.rhs(i).to_f64() < -CLEANUP_TOL)
                .min_by(|&a, &b| self.rhs(a).to_f64().total_cmp(&self.rhs(b).to_f64()));
            let Some(r) = leaving else {
                return false;
            };
            let mut pick: Option<(usize, f64, f64)> = None;
            for j in 0..allowed {
                let a = self.at(r, j).to_f64();
                if a >= -self.pivot_min.max(super::scalar::PIVOT_TOL) {
                    continue;
                }
                let ratio = cost[j].to_f64().max(0.0) / -a;
                let better = match pick {
                    None => true,
                    Some((_, best, size)) => ratio < best - 1e-12 || (ratio <= best + 1e-12 && -a > size),
                };
                if better {
                    pick = Some((j, ratio, -a));
                }
            }
            // No candidate means the row is infeasible; phase one or the
            // caller's check reports it.
            let Some((c, _, _)) = pick else {
                return false;
            };
            if self.iterations >= self.limit {
                return true;
            }
            self.pivot(r, c, cost);
            self.iterations += 1;
        }
    }

    /// Recomputes `B^-1 [A | b]` from the original rows at the current basis,
    /// clearing accumulated roundoff. A no-op in exact mode or when the basis
    /// matrix is numerically singular.
    fn reinvert(&mut self, original: &[T]) {
        if T::EXACT {
            return;
        }
        let (n, s) = (self.rows, self.stride());
        let b: Vec<f64> = (0..n)
            .flat_map(|i| self.basis.iter().map(move |&j| original[i * s + j].to_f64()))
            .collect();
        let Some(lu) = Lu::factor(b, n) else {
            return;
        };
        self.perturbed = false;
        for j in 0..s {
            let col: Vec<f64> = (0..n).map(|i| original[i * s + j].to_f64()).collect();
            for (i, v) in lu.solve(&col).into_iter().enumerate() {
                self.t[i * s + j] = T::from_f64(if v.abs() <= REINVERT_ZERO { 0.0 } else { v });
            }
        }
        for (i, &j) in self.basis.iter().enumerate() {
            for k in 0..n {
                self.t[k * s + j] = if k == i { T::one() } else { T::zero() };
            }
        }
        // Basic values a hair below zero are shifted back onto the bound.
        // Together with the snap above this keeps degenerate rows exactly
        // degenerate, so the streak counter still sees them.
        for i in 0..n {
            let v = &mut self.t[i * s + self.cols];
            if v.to_f64() < 0.0 && v.to_f64() >= -CLEANUP_TOL {
                *v = T::zero();
            }
        }
    }

    fn pivot_ok(&self, a: &T) -> bool {
        a.is_pivot_positive() && (T::EXACT || a.to_f64() > self.pivot_min)
    }

    fn ratio_test(&self, c: usize, bland: bool) -> Option<usize> {
        let mut min: Option<T> = None;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if self.pivot_ok(a) {
                let ratio = self.clamped_rhs(i).div(a);
                if min.as_ref().is_none_or(|m| ratio < *m) {
                    min = Some(ratio);
                }
            }
        }
        let min = min?;
        // Ties within a relative 1e-12 (exact ties in exact mode); the
        // largest pivot among them wins.
        let slack = if T::EXACT {
            T::zero()
        } else {
            T::from_f64(1e-12 * (1.0 + min.to_f64().abs()))
        };
        let bound = min.add(&slack);
        let mut pick: Option<usize> = None;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if !self.pivot_ok(a) || self.clamped_rhs(i).div(a) > bound {
                continue;
            }
            pick = match pick {
                None => Some(i),
                Some(p) => {
                    let better = if bland {
                        self.basis[i] < self.basis[p]
                    } else {
                        a > self.at(p, c)
                            || (a.to_f64() == self.at(p, c).to_f64() && self.basis[i] < self.basis[p])
                    };
                    Some(if better { i } else { p })
                }
            };
        }
        pick
    }
}

/// Solves `lp` to optimality, infeasibility, unboundedness or the iteration cap.
///
/// In `f64` mode an answer that fails its own check against `lp` (an optimum
/// violating a constraint by more than `ACCEPT_VIOLATION`, or a claim of
/// infeasibility) is retried with stricter pivot thresholds.
pub fn simplex_solve<T: LpScalar>(lp: &LpInstance<T>, limits: &Limits) -> LpSolution<T> {
    if T::EXACT {
        return solve_once(lp, limits, 0.0);
    }
    let mut last = None;
    for pivot_min in RETRY_PIVOTS {
        let sol = solve_once(lp, limits, pivot_min);
        let trusted = match sol.status {
            Status::Optimal => lp.max_violation(&sol.values) <= ACCEPT_VIOLATION,
            Status::Infeasible => false,
            _ => true,
        };
        if trusted {
            return sol;
        }
        last = Some(sol);
    }
    last.expect("at least one attempt")
}

/// Pivot thresholds tried in turn by [`simplex_solve`] in `f64` mode.
const RETRY_PIVOTS: [f64; 3] = [super::scalar::PIVOT_TOL, 1e-7, 1e-5];

/// Largest constraint violation accepted from an `f64` optimum.
pub const ACCEPT_VIOLATION: f64 = 1e-6;

fn solve_once<T: LpScalar>(lp: &LpInstance<T>, limits: &Limits, pivot_min: f64) -> LpSolution<T> {
    let nvars = lp.vars.len();

    // Standard-form columns.
    let mut maps = Vec::with_capacity(nvars);
    let mut ncol = 0usize;
    let mut bound_rows: Vec<(usize, T)> = Vec::new();
    for v in &lp.vars {
        let map = match (&v.lower, &v.upper) {
            (Some(l), Some(u)) if l == u => VarMap::Fixed(l.clone()),
            (Some(l), u) => {
                let col = ncol;
                ncol += 1;
                if let Some(u) = u {
                    bound_rows.push((col, u.sub(l)));
                }
                VarMap::Shift { col, lower: l.clone() }
            }
            (None, Some(u)) => {
                let col = ncol;
                ncol += 1;
                VarMap::Reflect { col, upper: u.clone() }
            }
            (None, None) => {
                ncol += 2;
                VarMap::Split {
                    pos: ncol - 2,
                    neg: ncol - 1,
                }
            }
        };
        maps.push(map);
    }

    let mut rows: Vec<StdRow<T>> = Vec::with_capacity(lp.rows.len() + bound_rows.len());
    for row in &lp.rows {
        let mut coeffs = vec![T::zero(); ncol];
        let mut rhs = row.rhs.clone();
        for (a, map) in row.coeffs.iter().zip(&maps) {
            if a.is_negligible() && (T::EXACT || a.to_f64() == 0.0) {
                continue;
            }
            match map {
                VarMap::Fixed(x) => rhs.sub_mul_assign(a, x),
                VarMap::Shift { col, lower } => {
                    coeffs[*col] = coeffs[*col].add(a);
                    rhs.sub_mul_assign(a, lower);
                }
                VarMap::Reflect { col, upper } => {
                    coeffs[*col] = coeffs[*col].sub(a);
                    rhs.sub_mul_assign(a, upper);
                }
                VarMap::Split { pos, neg } => {
                    coeffs[*pos] = coeffs[*pos].add(a);
                    coeffs[*neg] = coeffs[*neg].sub(a);
                }
            }
        }
        rows.push(StdRow {
            coeffs,
            rel: row.rel,
            rhs,
        });
    }
    for (col, ub) in bound_rows {
        let mut coeffs = vec![T::zero(); ncol];
        coeffs[col] = T::one();
        rows.push(StdRow {
            coeffs,
            rel: Relation::Le,
            rhs: ub,
        });
    }

    // Column equilibration (f64 only): x_j = scale_j * x'_j.
    let mut col_scale = vec![T::one(); ncol];
    if !T::EXACT {
        for (j, sc) in col_scale.iter_mut().enumerate() {
            let big = rows.iter().map(|r| r.coeffs[j].to_f64().abs()).fold(0.0, f64::max);
            if big > 0.0 {
                *sc = T::from_f64(1.0 / big);
                for row in &mut rows {
                    row.coeffs[j] = row.coeffs[j].mul(sc);
                }
            }
        }
    }

    // Row equilibration and nonnegative right-hand sides.
    for row in &mut rows {
        if !T::EXACT {
            let big = row.coeffs.iter().map(|a| a.to_f64().abs()).fold(0.0, f64::max);
            if big > 0.0 {
                let s = T::from_f64(1.0 / big);
                for a in &mut row.coeffs {
                    *a = a.mul(&s);
                }
                row.rhs = row.rhs.mul(&s);
            }
        }
        if row.rhs < T::zero() {
            for a in &mut row.coeffs {
                *a = a.neg();
            }
            row.rhs = row.rhs.neg();
            row.rel = match row.rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let nrows = rows.len();
    let nslack = rows.iter().filter(|r| r.rel != Relation::Eq).count();
    let nart = rows.iter().filter(|r| r.rel != Relation::Le).count();
    let cols = ncol + nslack + nart;
    let stride = cols + 1;
    let mut t = vec![T::zero(); nrows * stride];
    let mut basis = vec![0usize; nrows];
    let mut slack = ncol;
    let mut art = ncol + nslack;
    for (i, row) in rows.iter().enumerate() {
        for (j, a) in row.coeffs.iter().enumerate() {
            t[i * stride + j] = a.clone();
        }
        t[i * stride + cols] = row.rhs.clone();
        match row.rel {
            Relation::Le => {
                t[i * stride + slack] = T::one();
                basis[i] = slack;
                slack += 1;
            }
            Relation::Ge => {
                t[i * stride + slack] = T::one().neg();
                slack += 1;
                t[i * stride + art] = T::one();
                basis[i] = art;
                art += 1;
            }
            Relation::Eq => {
                t[i * stride + art] = T::one();
                basis[i] = art;
                art += 1;
            }
        }
    }
    let original = t.clone();
    let perturbed = !T::EXACT;
    if perturbed {
        // Distinct tiny shifts of the right-hand sides break the ties behind
        // degenerate stalling; rebuilding from `original` removes them.
        for i in 0..nrows {
            let v = &mut t[i * stride + cols];
            let spread = 1.0 + (i as f64 * 0.618_033_988_75).fract();
            *v = v.add(&T::from_f64(PERTURB * spread * (1.0 + v.to_f64().abs())));
        }
    }
    let limit = limits
        .max_iterations
        .unwrap_or(50 * (cols + nrows).max(1));
    let mut tab = Tableau {
        rows: nrows,
        cols,
        t,
        basis,
        iterations: 0,
        limit,
        streak_limit: limits.degenerate_streak,
        pivot_min,
        perturbed,
    };
    let art_start = ncol + nslack;

    let finish = |status: Status, iterations: usize| LpSolution {
        status,
        values: Vec::new(),
        objective: T::zero(),
        iterations,
    };

    // Phase one.
    if nart > 0 {
        // Phase one minimizes the sum of the artificials.
        let mut base = vec![T::zero(); stride];
        for c in base.iter_mut().take(cols).skip(art_start) {
            *c = T::one();
        }
        match tab.run(&base, art_start, true, &original) {
            PhaseEnd::Optimal => {}
            PhaseEnd::IterationLimit => return finish(Status::IterationLimit, tab.iterations),
            PhaseEnd::Unbounded => unreachable!("phase one is bounded below"),
        }
        let residual = (0..nrows)
            .filter(|&i| tab.basis[i] >= art_start)
            .fold(T::zero(), |acc, i| acc.add(tab.rhs(i)));
        if residual.is_infeasibility() {
            return finish(Status::Infeasible, tab.iterations);
        }
        // Drive remaining artificials out, dropping redundant rows.
        let mut keep = vec![true; nrows];
        for i in 0..nrows {
            if tab.basis[i] < art_start {
                continue;
            }
            let col = (0..art_start).find(|&j| {
                let a = tab.at(i, j);
                if T::EXACT {
                    !a.is_negligible()
                } else {
                    a.to_f64().abs() > 1e-7
                }
            });
            match col {
                Some(j) => {
                    let mut dummy = vec![T::zero(); stride];
                    tab.pivot(i, j, &mut dummy);
                }
                None => keep[i] = false,
            }
        }
        if keep.iter().any(|k| !k) {
            let mut t = Vec::new();
            let mut basis = Vec::new();
            let mut orig = Vec::new();
            for i in 0..nrows {
                if keep[i] {
                    t.extend_from_slice(&tab.t[i * stride..(i + 1) * stride]);
                    orig.extend_from_slice(&original[i * stride..(i + 1) * stride]);
                    basis.push(tab.basis[i]);
                }
            }
            tab.rows = basis.len();
            tab.t = t;
            tab.basis = basis;
            return phase_two(lp, &maps, &col_scale, art_start, tab, orig);
        }
    }
    phase_two(lp, &maps, &col_scale, art_start, tab, original)
}

fn phase_two<T: LpScalar>(
    lp: &LpInstance<T>,
    maps: &[VarMap<T>],
    col_scale: &[T],
    art_start: usize,
    mut tab: Tableau<T>,
    original: Vec<T>,
) -> LpSolution<T> {
    let cols = tab.cols;
    let stride = tab.stride();
    // Objective over standard columns, as a minimization.
    let mut c = vec![T::zero(); stride];
    for (a, map) in lp.objective.iter().zip(maps) {
        let a = match lp.sense {
            Sense::Min => a.clone(),
            Sense::Max => a.neg(),
        };
        match map {
            VarMap::Fixed(_) => {}
            VarMap::Shift { col, .. } => c[*col] = c[*col].add(&a),
            VarMap::Reflect { col, .. } => c[*col] = c[*col].sub(&a),
            VarMap::Split { pos, neg } => {
                c[*pos] = c[*pos].add(&a);
                c[*neg] = c[*neg].sub(&a);
            }
        }
    }
    for (a, sc) in c.iter_mut().zip(col_scale) {
        *a = a.mul(sc);
    }
    if !T::EXACT {
        let big = c.iter().map(|a| a.to_f64().abs()).fold(0.0, f64::max);
        if big > 0.0 {
            let s = T::from_f64(1.0 / big);
            for a in &mut c {
                *a = a.mul(&s);
            }
        }
    }
    let status = match tab.run(&c, art_start, false, &original) {
        PhaseEnd::Optimal => Status::Optimal,
        PhaseEnd::Unbounded => Status::Unbounded,
        PhaseEnd::IterationLimit => Status::IterationLimit,
    };
    if status != Status::Optimal {
        return LpSolution {
            status,
            values: Vec::new(),
            objective: T::zero(),
            iterations: tab.iterations,
        };
    }

    let mut y = vec![T::zero(); cols];
    for i in 0..tab.rows {
        let v = tab.rhs(i).clone();
        // Roundoff below zero is read as the bound, as in the polished path.
        y[tab.basis[i]] = if !T::EXACT && v < T::zero() { T::zero() } else { v };
    }
    if !T::EXACT {
        if let Some(polished) = polish(&original, &tab.basis, tab.rows, cols) {
            for (i, v) in polished.into_iter().enumerate() {
                y[tab.basis[i]] = T::from_f64(v.max(0.0));
            }
        }
    }

    for (v, sc) in y.iter_mut().zip(col_scale) {
        *v = v.mul(sc);
    }
    let values: Vec<T> = maps
        .iter()
        .map(|map| match map {
            VarMap::Fixed(x) => x.clone(),
            VarMap::Shift { col, lower } => lower.add(&y[*col]),
            VarMap::Reflect { col, upper } => upper.sub(&y[*col]),
            VarMap::Split { pos, neg } => y[*pos].sub(&y[*neg]),
        })
        .collect();
    let objective = lp.evaluate(&values);
    LpSolution {
        status,
        values,
        objective,
        iterations: tab.iterations,
    }
}

/// Re-solves `B x = b` from the original standard-form rows. Returns `None`
/// when the basis matrix is numerically singular or the result is clearly infeasible.
fn polish<T: LpScalar>(original: &[T], basis: &[usize], rows: usize, cols: usize) -> Option<Vec<f64>> {
    let stride = cols + 1;
    let n = rows;
    let a: Vec<f64> = (0..n)
        .flat_map(|i| basis.iter().map(move |&j| original[i * stride + j].to_f64()))
        .collect();
    let b: Vec<f64> = (0..n).map(|i| original[i * stride + cols].to_f64()).collect();
    let lu = Lu::factor(a.clone(), n)?;
    let mut x = lu.solve(&b);
    for _ in 0..3 {
        let r: Vec<f64> = (0..n)
            .map(|i| {
                let mut terms = Vec::with_capacity(n + 1);
                terms.push(b[i]);
                for j in 0..n {
                    let p = a[i * n + j] * x[j];
                    let e = a[i * n + j].mul_add(x[j], -p);
                    terms.push(-p);
                    terms.push(-e);
                }
                compensated_sum(&terms)
            })
            .collect();
        let dx = lu.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
    if x.iter().any(|v| !v.is_finite() || *v < -1e-7) {
        return None;
    }
    Some(x)
}

fn compensated_sum(terms: &[f64]) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for &t in terms {
        let u = s + t;
        c += if s.abs() >= t.abs() { (s - u) + t } else { (t - u) + s };
        s = u;
    }
    s + c
}

struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Vec<f64>, n: usize) -> Option<Lu> {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))?;
            if a[p * n + k].abs() < 1e-14 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(p * n + j, k * n + j);
                }
                perm.swap(p, k);
            }
            let piv = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / piv;
                if f == 0.0 {
                    continue;
                }
                a[i * n + k] = f;
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        Some(Lu { n, lu: a, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.lu[i * n + j] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.lu[i * n + j] * y[j];
            }
            y[i] /= self.lu[i * n + i];
        }
        y
    }
}

//! Checks shared by the property suites and the acceptance target. Each
//! returns a short summary on success and the first counterexample on failure.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dlpbound_core::certify::{self, DualCertificate, VerifyOptions};
use dlpbound_core::closedform;
use dlpbound_core::exactnum::cyclo::fold_index;
use dlpbound_core::exactnum::{sign_cyclo, CycloReal, Sign, DEFAULT_MAX_BITS};
use dlpbound_core::lp::{self, Limits, Status};
use dlpbound_core::orbits::{canonicalize, enumerate_reps, rep_count, OrbitIndex, Params, Rep};
use dlpbound_core::reduction::{check_restriction_identity, fold, LatticeFn};
use dlpbound_core::symdft::{Backend, SymDftMatrix};

pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn exact_matrix(d: u32, m: u32) -> SymDftMatrix {
    SymDftMatrix::build(Arc::new(enumerate_reps(d, m).unwrap()), Backend::Exact).unwrap()
}

/// Every vector of `Z_m^d` with coordinates in `0..m`.
pub fn all_vectors(d: u32, m: u32) -> impl Iterator<Item = Vec<i64>> {
    let total = u64::from(m).pow(d);
    (0..total).map(move |mut k| {
        (0..d)
            .map(|_| {
                let c = (k % u64::from(m)) as i64;
                k /= u64::from(m);
                c
            })
            .collect()
    })
}

/// `(d, m)` pairs with `m^d <= limit`, `d <= max_d`, `2 <= m <= max_m`.
pub fn small_spaces(limit: u64, max_d: u32, max_m: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        for m in 2..=max_m {
            if u64::from(m).checked_pow(d).is_some_and(|t| t <= limit) {
                out.push((d, m));
            }
        }
    }
    out
}

/// Brute-force canonicalization partitions `Z_m^d` into the enumerated reps
/// with class sizes equal to the orbit sizes; counts match `C(d + m/2, d)`.
pub fn orbit_brute_force(limit: u64) -> Check {
    let spaces = small_spaces(limit, 16, 24);
    for &(d, m) in &spaces {
        let index = enumerate_reps(d, m).map_err(|e| e.to_string())?;
        let mut counts = vec![0u64; index.len()];
        for v in all_vectors(d, m) {
            let rep = canonicalize(&v, m);
            let i = index
                .position(&rep)
                .ok_or_else(|| format!("(d={d}, m={m}): {v:?} maps to unknown {rep}"))?;
            counts[i] += 1;
        }
        if counts.as_slice() != index.orbit_sizes() {
            return Err(format!("(d={d}, m={m}): class sizes differ from orbit sizes"));
        }
        let h = u64::from(m / 2);
        let expect = closedform::binomial(i64::from(d) + h as i64, i64::from(d));
        if BigInt::from(index.len()) != expect || rep_count(d, m) != Some(index.len() as u128) {
            return Err(format!("(d={d}, m={m}): {} reps, expected {expect}", index.len()));
        }
    }
    Ok(format!("{} spaces with m^d <= {limit}", spaces.len()))
}

/// `2 * sum_y N(x,y) * N(y,z)` folded by the cosine product formula.
fn square_entry(matrix: &SymDftMatrix, x: usize, z: usize) -> CycloReal {
    let m = matrix.m();
    let stride = m as usize / 2 + 1;
    let mut acc = vec![0i128; stride];
    for y in 0..matrix.len() {
        let a = matrix.counts(x, y);
        let b = matrix.counts(y, z);
        for (s, &na) in a.iter().enumerate() {
            if na == 0 {
                continue;
            }
            for (t, &nb) in b.iter().enumerate() {
                if nb == 0 {
                    continue;
                }
                let p = i128::from(na) * i128::from(nb);
                acc[fold_index(s as i64 + t as i64, m)] += p;
                acc[fold_index(s as i64 - t as i64, m)] += p;
            }
        }
    }
    let coeffs = acc
        .into_iter()
        .map(|v| BigRational::new(BigInt::from(v), BigInt::from(2)))
        .collect();
    CycloReal::from_coeffs(m, coeffs)
}

/// `(d, m)` pairs with at most `max_reps` representatives in the sweep ranges.
pub fn spaces_with_reps(max_reps: usize, max_d: u32, max_m: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        for m in 2..=max_m {
            if rep_count(d, m).is_some_and(|n| n <= max_reps as u128) {
                out.push((d, m));
            }
        }
    }
    out
}

/// `F^2 = I` exactly: `sum_y F'(x,y) F'(y,z) = m^d [x = z]` in the real cyclotomic field.
pub fn involution_exact(max_reps: usize, max_d: u32, max_m: u32) -> Check {
    let spaces = spaces_with_reps(max_reps, max_d, max_m);
    for &(d, m) in &spaces {
        let matrix = exact_matrix(d, m);
        let md = BigRational::from_integer(num_traits::pow(BigInt::from(m), d as usize));
        let n = matrix.len();
        let bad = (0..n).find_map(|x| {
            (0..n).find_map(|z| {
                let want = if x == z { md.clone() } else { BigRational::zero() };
                (square_entry(&matrix, x, z) != CycloReal::from_rational(m, want)).then_some((x, z))
            })
        });
        if let Some((x, z)) = bad {
            let idx = matrix.index();
            return Err(format!("(d={d}, m={m}): (F^2)[{}, {}] wrong", idx.rep(x), idx.rep(z)));
        }
    }
    Ok(format!("{} spaces with |reps| <= {max_reps}", spaces.len()))
}

/// Orbit members grouped by representative index.
pub fn materialize_orbits(index: &OrbitIndex) -> Vec<Vec<Vec<i64>>> {
    let (d, m) = (index.d(), index.m());
    let mut orbits = vec![Vec::new(); index.len()];
    for v in all_vectors(d, m) {
        let i = index.position(&canonicalize(&v, m)).expect("canonical");
        orbits[i].push(v);
    }
    orbits
}

/// Entry DP against the direct sum over the materialized orbit of `y`.
pub fn dp_brute_force(limit: u64, budget: u64) -> Check {
    let mut done = 0;
    for (d, m) in small_spaces(limit, 16, 24) {
        let index = enumerate_reps(d, m).unwrap();
        if index.len() as u64 * u64::from(m).pow(d) > budget {
            continue;
        }
        let orbits = materialize_orbits(&index);
        let stride = m as usize / 2 + 1;
        for (xi, x) in index.reps().iter().enumerate() {
            for (yi, orbit) in orbits.iter().enumerate() {
                let mut direct = vec![0i64; stride];
                for u in orbit {
                    let dot: i64 = x.coords().iter().zip(u).map(|(&a, b)| i64::from(a) * b).sum();
                    direct[fold_index(dot, m)] += 1;
                }
                let dp = dlpbound_core::symdft::entry_counts(x, index.rep(yi), m);
                if dp != direct {
                    return Err(format!(
                        "(d={d}, m={m}) entry ({x}, {}): dp {dp:?} vs direct {direct:?}",
                        index.rep(yi)
                    ));
                }
            }
            let _ = xi;
        }
        done += 1;
    }
    Ok(format!("{done} spaces with m^d <= {limit}"))
}

fn random_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> BigRational {
    q(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

/// `sum_x mu_x f_x = sum_y lambda_y (F f)_y` exactly, for random instances.
pub fn summation_formula(instances: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let spaces = spaces_with_reps(120, 6, 12);
    let mut cache: HashMap<(u32, u32), SymDftMatrix> = HashMap::new();
    for k in 0..instances {
        let (d, m) = spaces[rng.gen_range(0..spaces.len())];
        let matrix = cache.entry((d, m)).or_insert_with(|| exact_matrix(d, m));
        let n = matrix.len();
        let f: Vec<BigRational> = (0..n).map(|_| random_rational(&mut rng, 20, 9)).collect();
        let mu: Vec<BigRational> = (0..n).map(|_| random_rational(&mut rng, 20, 9)).collect();
        // Both sides carry m^(-d); compare m^d * lhs with the unscaled right side.
        let md = BigRational::from_integer(num_traits::pow(BigInt::from(m), d as usize));
        let lhs: BigRational = mu.iter().zip(&f).map(|(a, b)| a * b).sum::<BigRational>() * md;
        let lam = matrix.apply_transpose_exact(&mu).unwrap();
        let ff = matrix.apply_exact(&f).unwrap();
        let rhs = lam
            .iter()
            .zip(&ff)
            .fold(CycloReal::zero(m), |acc, (a, b)| acc.add(&a.mul(b)));
        if rhs != CycloReal::from_rational(m, lhs) {
            return Err(format!("instance {k} (d={d}, m={m}): sides differ"));
        }
    }
    Ok(format!("{instances} random instances"))
}

/// Hamming weight of a `Z_2^d` representative.
fn weight(rep: &Rep) -> u32 {
    rep.coords().iter().filter(|&&c| c == 1).count() as u32
}

/// At `m = 2`, `F'(x, y) = K_{wt y}(wt x; d)`.
pub fn krawtchouk_m2(max_d: u32) -> Check {
    for d in 1..=max_d {
        let matrix = exact_matrix(d, 2);
        let idx = matrix.index();
        for x in 0..matrix.len() {
            for y in 0..matrix.len() {
                let got = matrix.entry_exact(x, y).as_rational();
                let want = closedform::krawtchouk(weight(idx.rep(y)), weight(idx.rep(x)), d).unwrap();
                if got != Some(BigRational::from_integer(want.clone())) {
                    return Err(format!("d={d} ({}, {}): {got:?} vs {want}", idx.rep(x), idx.rep(y)));
                }
            }
        }
    }
    Ok(format!("d = 1..={max_d}"))
}

/// Instances with at most `max_reps` reps and `m >= 2r`.
pub fn lp_instances(max_reps: usize) -> Vec<Params> {
    let mut out = Vec::new();
    for (d, m) in spaces_with_reps(max_reps, 8, 12) {
        let h = u64::from(m / 2);
        let max_r2 = (h * h).min(u64::from(d) * h * h);
        for r2 in 1..=max_r2 {
            if let Ok(p) = Params::new(d, m, r2) {
                out.push(p);
            }
        }
    }
    out
}

/// Float primal and dual optima agree within `tol`; exact optima agree
/// exactly where exact mode applies and `|reps| <= exact_reps`.
pub fn strong_duality(max_reps: usize, tol: f64, exact_reps: usize) -> Check {
    let mut float_checked = 0;
    let mut exact_checked = 0;
    let limits = Limits::default();
    for p in lp_instances(max_reps) {
        let matrix = exact_matrix(p.d, p.m);
        let dual = lp::build_dual_lp(&p, &matrix, 0.0).unwrap().solve(&limits);
        let primal = lp::build_primal_lp(&p, &matrix).unwrap().solve(&limits);
        if dual.status != Status::Optimal || primal.status != Status::Optimal {
            return Err(format!("{p:?}: dual {} / primal {}", dual.status, primal.status));
        }
        if (dual.objective - primal.objective).abs() > tol {
            return Err(format!(
                "{p:?}: dual {:.12} vs primal {:.12}",
                dual.objective, primal.objective
            ));
        }
        float_checked += 1;
        let exact_case = p.r2_is_square() || p.d % 2 == 0;
        if exact_case && lp::exact_supported(&p) && matrix.len() <= exact_reps {
            let zero = BigRational::zero();
            let de = lp::build_dual_lp_exact(&p, &matrix, &zero).unwrap().solve(&limits);
            let pe = lp::build_primal_lp_exact(&p, &matrix).unwrap().solve(&limits);
            if de.status != Status::Optimal || pe.status != Status::Optimal || de.objective != pe.objective {
                return Err(format!("{p:?}: exact dual {} vs primal {}", de.objective, pe.objective));
            }
            exact_checked += 1;
        }
    }
    Ok(format!("{float_checked} float instances, {exact_checked} exact"))
}

/// Random even function on `Z^d` with support in the box of the given radius.
pub fn random_even_fn(rng: &mut ChaCha8Rng, d: usize, radius: i64, terms: usize) -> LatticeFn {
    let mut vals = Vec::new();
    for _ in 0..terms {
        let x: Vec<i64> = (0..d).map(|_| rng.gen_range(-radius..=radius)).collect();
        let v = random_rational(rng, 12, 7);
        vals.push((x.iter().map(|c| -c).collect(), v.clone()));
        vals.push((x, v));
    }
    LatticeFn::new(d, vals).unwrap()
}

/// Fold plus restriction identity on random even functions, with mass conservation.
pub fn restriction_identity(cases: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    for k in 0..cases {
        let d = rng.gen_range(1..=3usize);
        let m = rng.gen_range(2..=12u32);
        let terms = rng.gen_range(1..=6);
        let g = random_even_fn(&mut rng, d, 7, terms);
        let gm = fold(&g, m).unwrap();
        if gm.total() != g.total() {
            return Err(format!("case {k}: mass not conserved"));
        }
        let report = check_restriction_identity(&g, m).unwrap();
        if !report.holds {
            return Err(format!("case {k} (d={d}, m={m}): fails at {:?}", report.witness));
        }
    }
    Ok(format!("{cases} random even functions"))
}

/// Golden certificates: closed forms for `d = 9..=13` at `m = 4`.
pub fn golden_certificates() -> Vec<(DualCertificate, SymDftMatrix)> {
    (9..=13)
        .map(|d| {
            let matrix = closedform::matrix_m4(d).unwrap();
            let cert = closedform::certificate_from_lambda(&closedform::table_for(d).unwrap(), &matrix).unwrap();
            (cert, matrix)
        })
        .collect()
}

/// Independent feasibility recomputation: `mu >= 0`, structural zeros, and
/// every `(F'^T mu)_y + mu_0 |Orb y| >= 0` with the sign taken in the field.
pub fn independently_feasible(cert: &DualCertificate, matrix: &SymDftMatrix) -> bool {
    let p = &cert.params;
    let idx = matrix.index();
    let mut dense = vec![BigRational::zero(); idx.len()];
    for (rep, v) in &cert.mu {
        if v.is_negative() || rep.is_zero() || rep.norm_sq() < p.r2 {
            return false;
        }
        match idx.position(rep) {
            Some(i) => dense[i] = v.clone(),
            None => return false,
        }
    }
    let Some(mu0) = lp::mu_zero(p).as_rational() else {
        return false;
    };
    dense[0] = mu0;
    let lam = matrix.apply_transpose_exact(&dense).unwrap();
    lam.iter()
        .all(|v| matches!(sign_cyclo(v, DEFAULT_MAX_BITS), Ok(Sign::Zero | Sign::Positive)))
}

#[derive(Debug, Clone, Copy)]
pub enum Mutation {
    FlipSign,
    NudgeUp,
    NudgeDown,
    Zero,
    Scale,
    InsideRadius,
    NewEntry,
}

/// Applies one random single-entry mutation.
pub fn mutate(cert: &DualCertificate, index: &OrbitIndex, rng: &mut ChaCha8Rng) -> (DualCertificate, Mutation) {
    const KINDS: [Mutation; 7] = [
        Mutation::FlipSign,
        Mutation::NudgeUp,
        Mutation::NudgeDown,
        Mutation::Zero,
        Mutation::Scale,
        Mutation::InsideRadius,
        Mutation::NewEntry,
    ];
    let kind = KINDS[rng.gen_range(0..KINDS.len())];
    let mut mu = cert.mu.clone();
    let keys: Vec<Rep> = mu.keys().cloned().collect();
    let pick = keys[rng.gen_range(0..keys.len())].clone();
    let nudge = q(1, 1_000_000);
    match kind {
        Mutation::FlipSign => {
            let v = mu[&pick].clone();
            mu.insert(pick, -v);
        }
        Mutation::NudgeUp => {
            let v = &mu[&pick] + &nudge;
            mu.insert(pick, v);
        }
        Mutation::NudgeDown => {
            let v = &mu[&pick] - &nudge;
            mu.insert(pick, v);
        }
        Mutation::Zero => {
            mu.remove(&pick);
        }
        Mutation::Scale => {
            let v = &mu[&pick] * q(rng.gen_range(2..=9), rng.gen_range(2..=9));
            mu.insert(pick, v);
        }
        Mutation::InsideRadius => {
            let inside: Vec<&Rep> = index
                .reps()
                .iter()
                .filter(|r| !r.is_zero() && r.norm_sq() < cert.params.r2)
                .collect();
            let r = inside[rng.gen_range(0..inside.len())].clone();
            mu.insert(r, q(rng.gen_range(1..=5), 7));
        }
        Mutation::NewEntry => {
            let outside: Vec<&Rep> = index
                .reps()
                .iter()
                .filter(|r| r.norm_sq() >= cert.params.r2 && !cert.mu.contains_key(*r))
                .collect();
            if outside.is_empty() {
                let v = &mu[&pick] + BigRational::one();
                mu.insert(pick, v);
            } else {
                let r = outside[rng.gen_range(0..outside.len())].clone();
                mu.insert(r, q(rng.gen_range(1..=5), rng.gen_range(1..=1000)));
            }
        }
    }
    // Bypass `new` so that stored zeros and negatives survive as written.
    let mutated = DualCertificate {
        params: cert.params,
        mu,
        provenance: cert.provenance,
        claimed: None,
    };
    (mutated, kind)
}

/// No mutation is Verified unless the independent recomputation agrees it is feasible.
pub fn tamper(per_cert: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let opts = VerifyOptions::default();
    let mut rejected = 0;
    let mut still_feasible = 0;
    for (cert, matrix) in golden_certificates() {
        for _ in 0..per_cert {
            let (bad, kind) = mutate(&cert, matrix.index(), &mut rng);
            let report = certify::verify_with(&bad, &matrix, &opts).map_err(|e| e.to_string())?;
            if report.is_verified() {
                if !independently_feasible(&bad, &matrix) {
                    return Err(format!("d={}: {kind:?} mutation falsely verified", cert.params.d));
                }
                still_feasible += 1;
            } else {
                rejected += 1;
            }
        }
    }
    Ok(format!("{rejected} rejected, {still_feasible} genuinely feasible"))
}

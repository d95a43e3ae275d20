mod common;

use std::sync::Arc;

use dlpbound_core::lp::{self, Limits, Status};
use dlpbound_core::orbits::{enumerate_reps, Params};
use dlpbound_core::pipeline::solve_dual;
use dlpbound_core::symdft::{Backend, SymDftMatrix};

fn float_matrix(d: u32, m: u32) -> SymDftMatrix {
    SymDftMatrix::build(Arc::new(enumerate_reps(d, m).unwrap()), Backend::Float64).unwrap()
}

#[test]
fn strong_duality_small_instances() {
    println!("{}", common::strong_duality(40, 1e-7, 30).unwrap());
}

/// Any dual-feasible point is at most any primal-feasible point.
#[test]
fn weak_duality_between_optimal_points() {
    let limits = Limits::default();
    for p in common::lp_instances(60) {
        let matrix = float_matrix(p.d, p.m);
        let dual_lp = lp::build_dual_lp(&p, &matrix, 0.0).unwrap();
        let primal_lp = lp::build_primal_lp(&p, &matrix).unwrap();
        let dual = dual_lp.solve(&limits);
        let primal = primal_lp.solve(&limits);
        assert_eq!(dual.status, Status::Optimal, "{p}");
        assert_eq!(primal.status, Status::Optimal, "{p}");
        assert!(dual_lp.max_violation(&dual.values) < 1e-7, "{p}");
        assert!(primal_lp.max_violation(&primal.values) < 1e-7, "{p}");
        assert!(dual.objective <= primal.objective + 1e-9, "{p}: {} > {}", dual.objective, primal.objective);
    }
}

#[test]
fn eps_buffer_only_lowers_the_objective() {
    let limits = Limits::default();
    for p in common::lp_instances(100) {
        let matrix = float_matrix(p.d, p.m);
        let obj = |eps: f64| lp::build_dual_lp(&p, &matrix, eps).unwrap().solve(&limits).objective;
        let (free, buffered) = (obj(0.0), obj(1e-10));
        assert!(buffered <= free + 1e-9, "{p}: {buffered} > {free}");
        assert!(free - buffered <= 1e-6, "{p}: buffer costs {}", free - buffered);
    }
}

#[test]
fn solves_are_deterministic() {
    let p = Params::new(4, 8, 8).unwrap();
    let matrix = float_matrix(4, 8);
    let a = solve_dual(&p, &matrix, 1e-10, &Limits::default()).unwrap();
    let b = solve_dual(&p, &matrix, 1e-10, &Limits::default()).unwrap();
    assert_eq!(a.to_text(), b.to_text());
}

#[test]
fn d9_float_dual_reaches_the_closed_form() {
    let p = Params::new(9, 4, 4).unwrap();
    let sol = solve_dual(&p, &float_matrix(9, 4), 1e-10, &Limits::default()).unwrap();
    assert_eq!(sol.status, Status::Optimal);
    assert!(sol.objective >= 0.05 - 1e-7, "{}", sol.objective);
}

#[test]
fn exact_mode_refuses_irrational_instances() {
    let p = Params::new(3, 6, 2).unwrap();
    assert!(!lp::exact_supported(&p));
    assert!(lp::build_dual_lp_exact(&p, &common::exact_matrix(3, 6), &common::q(0, 1)).is_err());
    let p = Params::new(2, 4, 4).unwrap();
    assert!(lp::exact_supported(&p));
    assert!(lp::build_dual_lp_exact(&p, &common::exact_matrix(2, 4), &common::q(0, 1)).is_ok());
}

#[test]
fn solution_files_round_trip() {
    let p = Params::new(3, 6, 9).unwrap();
    let sol = solve_dual(&p, &float_matrix(3, 6), 1e-10, &Limits::default()).unwrap();
    let text = sol.to_text();
    let back: lp::FloatSolution = text.parse().unwrap();
    assert_eq!(back.to_text(), text);
}

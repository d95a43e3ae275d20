mod common;

use proptest::prelude::*;

use dlpbound_core::orbits::{canonicalize, enumerate_reps, orbit_size, Params, Rep};

#[test]
fn brute_force_partition_small_spaces() {
    let summary = common::orbit_brute_force(20_000).unwrap();
    println!("{summary}");
}

#[test]
fn sizes_sum_to_space() {
    for (d, m) in common::small_spaces(1_000_000, 16, 30) {
        let index = enumerate_reps(d, m).unwrap();
        let total: u64 = index.orbit_sizes().iter().sum();
        assert_eq!(total, u64::from(m).pow(d), "(d={d}, m={m})");
    }
}

#[test]
fn preset_rep_counts() {
    for (d, m, n) in [(3, 21, 286), (4, 16, 495), (5, 10, 252), (6, 8, 210), (7, 8, 330), (6, 12, 924), (3, 53, 3654), (4, 30, 3876), (5, 24, 6188)] {
        assert_eq!(enumerate_reps(d, m).unwrap().len(), n, "(d={d}, m={m})");
    }
}

#[test]
fn params_reject_non_positive() {
    assert!(Params::new(0, 4, 4).is_err());
    assert!(Params::new(3, 1, 4).is_err());
    assert!(Params::new(3, 4, 0).is_err());
}

fn group_action(v: &[i64], perm: &[usize], flips: &[bool]) -> Vec<i64> {
    perm.iter().zip(flips).map(|(&p, &f)| if f { -v[p] } else { v[p] }).collect()
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent_and_invariant(
        (m, v, perm, flips) in (2u32..40, 1usize..9).prop_flat_map(|(m, d)| (
            Just(m),
            proptest::collection::vec(-200i64..200, d),
            Just((0..d).collect::<Vec<usize>>()).prop_shuffle(),
            proptest::collection::vec(any::<bool>(), d),
        ))
    ) {
        let c = canonicalize(&v, m);
        let again: Vec<i64> = c.coords().iter().map(|&x| i64::from(x)).collect();
        prop_assert_eq!(canonicalize(&again, m), c.clone());
        prop_assert_eq!(canonicalize(&group_action(&v, &perm, &flips), m), c.clone());
        let shifted: Vec<i64> = v.iter().map(|x| x + 3 * i64::from(m)).collect();
        prop_assert_eq!(canonicalize(&shifted, m), c.clone());
        prop_assert!(orbit_size(&c, m) >= 1);
        prop_assert!(Rep::from_sorted(c.coords().to_vec(), m).is_some());
    }
}

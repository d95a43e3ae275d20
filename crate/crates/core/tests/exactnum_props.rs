mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

use dlpbound_core::exactnum::{sign, sign_cyclo, BoundValue, CycloReal, RInterval, Rounding, Sign, SurdPair};

fn rand_q(rng: &mut impl Rng) -> BigRational {
    let num: i64 = rng.gen_range(-1_000_000_000_000..=1_000_000_000_000);
    let den: i64 = rng.gen_range(1..=1_000_000_000);
    BigRational::new(num.into(), den.into())
}

#[test]
fn interval_soundness_1e5_pairs() {
    let mut rng = common::rng(1);
    for k in 0..100_000 {
        let (a, b) = (rand_q(&mut rng), rand_q(&mut rng));
        let prec = rng.gen_range(8..200);
        let (ia, ib) = (RInterval::from_rational(&a, prec), RInterval::from_rational(&b, prec));
        let op = k % 4;
        let (exact, enc) = match op {
            0 => (&a + &b, ia.add(&ib)),
            1 => (&a - &b, ia.sub(&ib)),
            2 => (&a * &b, ia.mul(&ib)),
            _ => {
                if b.is_zero() {
                    continue;
                }
                match ia.div(&ib, prec) {
                    Some(i) => (&a / &b, i),
                    None => continue,
                }
            }
        };
        assert!(enc.contains_rational(&exact), "op {op} on {a} and {b} at {prec} bits");
    }
}

fn cyclo_strategy() -> impl Strategy<Value = (u32, Vec<i64>)> {
    (1u32..=30).prop_flat_map(|m| (Just(m), proptest::collection::vec(-50i64..50, m as usize / 2 + 1)))
}

proptest! {
    #[test]
    fn canonical_form_keeps_the_value((m, counts) in cyclo_strategy()) {
        let v = CycloReal::from_int_coeffs(m, &counts);
        let raw = v.enclosure(256);
        let canon = v.canonical_enclosure(256);
        // Both enclose the same real number.
        prop_assert!(raw.sub(&canon).contains_zero());
        match sign_cyclo(&v, 4096).unwrap() {
            Sign::Zero => prop_assert!(v.is_zero()),
            s => {
                prop_assert!(!v.is_zero());
                let f = v.to_f64();
                if f.abs() > 1e-9 {
                    prop_assert_eq!(s == Sign::Positive, f > 0.0);
                }
            }
        }
    }

    #[test]
    fn full_character_sums_reduce_to_zero(m in 2u32..=30, j in 1i64..30) {
        prop_assume!(j % i64::from(m) != 0);
        let sum = (0..i64::from(m)).fold(CycloReal::zero(m), |acc, k| acc.add(&CycloReal::cos(j * k, m)));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn surd_sign_never_contradicts_zero(m in 3u32..=24, a in -20i64..20, b in -20i64..20, s in 2u64..50) {
        let v = SurdPair::new(
            CycloReal::from_rational(m, BigRational::from_integer(a.into())),
            CycloReal::from_rational(m, BigRational::from_integer(b.into())),
            s,
        );
        match sign(&v, 4096) {
            Ok(Sign::Zero) => prop_assert!(v.is_canonical_zero()),
            Ok(_) => prop_assert!(!v.is_canonical_zero()),
            Err(_) => {}
        }
    }

    #[test]
    fn bound_value_arithmetic_is_exact(
        a in proptest::collection::vec((-1000i64..1000, 1i64..100, 1u64..30), 0..4),
        b in proptest::collection::vec((-1000i64..1000, 1i64..100, 1u64..30), 0..4),
    ) {
        let build = |terms: &Vec<(i64, i64, u64)>| terms.iter().fold(BoundValue::zero(), |acc, &(p, q, n)| {
            acc.add(&BoundValue::sqrt_term(BigRational::new(p.into(), q.into()), n))
        });
        let (x, y) = (build(&a), build(&b));
        prop_assert_eq!(x.add(&y).sub(&y), x.clone());
        let text = x.to_string();
        prop_assert_eq!(text.parse::<BoundValue>().unwrap(), x.clone());
        let floor: BoundValue = x.to_decimal(8, Rounding::Floor).parse().unwrap();
        prop_assert!(!floor.gt(&x));
    }
}

#[test]
fn decimal_floor_of_d7_style_value() {
    let v = BoundValue::from_rational(BigRational::new(BigInt::from(63_747_451u64), BigInt::from(1_000_000_000u64)));
    assert_eq!(v.to_decimal(8, Rounding::Floor), "0.06374745");
}

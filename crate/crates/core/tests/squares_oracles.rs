use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skewrot::squares::{
    classify_orbit, cross_validate, cross_validate_from, entry_point, geometric_step, strip_orbit, Family,
    GeometricState, OrbitClass, Rational, SquareConfig, StripState,
};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// First `k >= 1` with the stepper back at its start, by brute force.
fn geometric_period(a: &Rational, h0: &Rational, limit: u64) -> Option<u64> {
    let cfg = SquareConfig::new(a.clone()).unwrap();
    let start = GeometricState::new(entry_point(h0), Family::Two);
    let mut st = start.clone();
    for k in 1..=limit {
        st = geometric_step(&cfg, &st).unwrap();
        if st == start {
            return Some(k);
        }
    }
    None
}

#[test]
fn even_denominator_orbits_close_after_four_l_plus_m() {
    for m in 1..=4i64 {
        for two_l in 2..=8i64 {
            let a = q(1, 2 * m);
            let h0 = &q(two_l, 2) * &a;
            // 4(l + m) with l = two_l / 2
            let expected = (2 * two_l + 4 * m) as u64;
            assert_eq!(geometric_period(&a, &h0, 1000), Some(expected), "m={m} l={two_l}/2");
            let c = classify_orbit(&SquareConfig::new(a.clone()).unwrap(), &h0, &a, 0, 100).unwrap();
            assert_eq!(c.class, OrbitClass::Periodic { period_steps: expected, period_entries: 2 });
        }
    }
}

#[test]
fn unit_fraction_entries_stay_on_the_half_lattice() {
    for k in 2..=7i64 {
        let a = q(1, k);
        let cfg = SquareConfig::new(a.clone()).unwrap();
        for two_l in 2..=7i64 {
            let h0 = &q(two_l, 2) * &a;
            for (st, _) in strip_orbit(&cfg, &StripState::new(h0, a.clone(), 0), 200).unwrap() {
                assert_eq!(st.a_n, a);
                assert!((&(&st.h / &a) * &q(2, 1)).is_integer(), "k={k} h={}", st.h);
            }
        }
    }
}

#[test]
fn odd_denominator_integer_levels_expand_by_two_a() {
    for m in 1..=4i64 {
        let a = q(1, 2 * m - 1);
        let cfg = SquareConfig::new(a.clone()).unwrap();
        for l in 1..=3i64 {
            let h0 = &q(l, 1) * &a;
            let orbit = strip_orbit(&cfg, &StripState::new(h0.clone(), a.clone(), 0), 202).unwrap();
            let two_a = &q(2, 1) * &a;
            for n in 0..100 {
                assert_eq!(&orbit[2 * n + 2].0.h - &orbit[2 * n].0.h, two_a, "m={m} l={l} n={n}");
            }
            let c = classify_orbit(&cfg, &h0, &a, 0, 10_000).unwrap();
            assert_eq!(c.class, OrbitClass::Expanding);
        }
    }
}

#[test]
fn odd_denominator_half_levels_are_periodic() {
    for m in 1..=4i64 {
        let a = q(1, 2 * m - 1);
        let cfg = SquareConfig::new(a.clone()).unwrap();
        for two_l in [1i64, 3, 5] {
            let h0 = &q(two_l, 2) * &a;
            let c = classify_orbit(&cfg, &h0, &a, 0, 10_000).unwrap();
            let OrbitClass::Periodic { period_steps, period_entries } = c.class else {
                panic!("m={m} 2l={two_l}: {:?}", c.class);
            };
            // the exact stepper sees the same period
            assert_eq!(geometric_period(&a, &h0, 10_000), Some(period_steps), "m={m} 2l={two_l}");
            assert!(period_entries >= 1);
        }
    }
}

#[test]
fn shifted_half_levels_stay_periodic() {
    for k in 2..=6i64 {
        let a = q(1, k);
        let cfg = SquareConfig::new(a.clone()).unwrap();
        for two_l in [3i64, 5] {
            for eps_num in 0..4i64 {
                let eps = &q(eps_num, 4) * &a;
                let h0 = &(&q(two_l, 2) * &a) + &eps;
                let a0 = &a - &eps;
                let c = classify_orbit(&cfg, &h0, &a0, 0, 10_000).unwrap();
                assert!(matches!(c.class, OrbitClass::Periodic { .. }), "k={k} 2l={two_l} eps={eps}: {c:?}");
            }
        }
    }
}

#[test]
fn named_cross_validations() {
    assert!(cross_validate(&SquareConfig::new(q(1, 2)).unwrap(), &q(1, 1), 100).unwrap().matches());
    assert!(cross_validate(&SquareConfig::new(q(1, 3)).unwrap(), &q(1, 1), 100).unwrap().matches());
}

#[test]
fn random_rational_cross_validations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..200 {
        let den = rng.gen_range(2..=12i64);
        let num = rng.gen_range(1..=den / 2);
        let a = q(num, den);
        let cfg = SquareConfig::new(a.clone()).unwrap();
        let h0 = &(&q(51, 1) * &a) + &q(rng.gen_range(1..1000), 1000);
        let h0 = if rng.gen_bool(0.5) { h0 } else { -h0 };
        let a0 = &a * &q(rng.gen_range(1..=16), 16);
        let st = StripState::new(h0, a0, rng.gen_range(0..2));
        let v = cross_validate_from(&cfg, &st, 50).unwrap();
        assert!(v.matches(), "case {case}: {st:?} {v:?}");
    }
}

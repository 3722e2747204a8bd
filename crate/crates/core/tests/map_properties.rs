use std::f64::consts::TAU;

use proptest::prelude::*;
use skewrot::squares::{geometric_step, Family, GeometricState, Rational, SquareConfig, SquarePoint};
use skewrot::{InversePolarFrame, MapProduct, PlanarPoint, SkewRotationMap};

fn point() -> impl Strategy<Value = PlanarPoint> {
    (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| PlanarPoint::new(x, y))
}

proptest! {
    #[test]
    fn skew_rotation_keeps_distance_to_center(c in point(), z in point(), h in -20.0..20.0f64) {
        prop_assume!(z.distance(c) > 1e-3);
        let w = SkewRotationMap::new(c, h).apply(z).unwrap();
        prop_assert!((w.distance(c) - z.distance(c)).abs() <= 1e-12 * z.distance(c).max(1.0));
    }

    #[test]
    fn arc_lengths_add(c in point(), z in point(), h1 in -10.0..10.0f64, h2 in -10.0..10.0f64) {
        prop_assume!(z.distance(c) > 1e-2);
        let two = MapProduct::new(vec![SkewRotationMap::new(c, h1), SkewRotationMap::new(c, h2)]).unwrap();
        let one = SkewRotationMap::new(c, h1 + h2);
        let scale = z.distance(c).max(1.0);
        prop_assert!(two.apply(z).unwrap().distance(one.apply(z).unwrap()) <= 1e-10 * scale);
    }

    #[test]
    fn inverse_undoes_product(z in point(), h1 in -5.0..5.0f64, h2 in -5.0..5.0f64) {
        let p = MapProduct::standard_pair(h1, h2);
        prop_assume!(p.factors().iter().all(|f| z.distance(f.center) > 1e-2));
        let w = p.apply(z).unwrap();
        prop_assume!(p.factors().iter().all(|f| w.distance(f.center) > 1e-2));
        let back = p.inverse().apply(w).unwrap();
        prop_assert!(back.distance(z) <= 1e-9 * z.norm().max(1.0));
    }

    #[test]
    fn inverse_polar_round_trip(c in point(), r in 1e-6..1e3f64, phi in 0.0..TAU) {
        let f = InversePolarFrame::new(c);
        let z = f.from_inverse_polar(r, phi).unwrap();
        let (r1, phi1) = f.to_inverse_polar(z).unwrap();
        prop_assert!((r1 - r).abs() <= 1e-9 * r);
        let d = (phi1 - phi).rem_euclid(TAU);
        prop_assert!(d.min(TAU - d) <= 1e-6);
    }

    #[test]
    fn rational_text_round_trip(n in any::<i64>(), d in 1i64..i64::MAX) {
        let q = Rational::new(n, d);
        prop_assert_eq!(q.to_string().parse::<Rational>().unwrap(), q);
    }

    #[test]
    fn exact_and_float_steps_agree(
        an in 1i64..40, ad in 1i64..40,
        xn in -200i64..200, yn in -200i64..200, d in 1i64..60,
        fam in any::<bool>(),
    ) {
        let family = if fam { Family::One } else { Family::Two };
        let q = GeometricState::new(SquarePoint::new(Rational::new(xn, d), Rational::new(yn, d)), family);
        let f = GeometricState::new(q.position.to_f64(), family);
        let cq = SquareConfig::new(Rational::new(an, ad)).unwrap();
        let cf = SquareConfig::new(an as f64 / ad as f64).unwrap();
        match (geometric_step(&cq, &q), geometric_step(&cf, &f)) {
            (Ok(a), Ok(b)) => {
                let a = a.position.to_f64();
                prop_assert!((a.x - b.position.x).abs() < 1e-9 && (a.y - b.position.y).abs() < 1e-9,
                    "{a:?} vs {:?}", b.position);
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn steps_stay_on_their_diamond(an in 1i64..40, ad in 1i64..40, xn in -200i64..200, yn in -200i64..200) {
        let c = SquareConfig::new(Rational::new(an, ad)).unwrap();
        let p = SquarePoint::new(Rational::new(xn, 7), Rational::new(yn, 7));
        let cx = Rational::new(1, 2);
        let radius = |p: &SquarePoint<Rational>| (&p.x - &cx).abs() + p.y.abs();
        prop_assume!(!radius(&p).is_zero());
        let next = geometric_step(&c, &GeometricState::new(p.clone(), Family::Two)).unwrap();
        prop_assert_eq!(radius(&next.position), radius(&p));
    }
}

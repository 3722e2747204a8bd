use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skewrot::orbit::{
    escape_initial_point, estimate_growth_exponent, iterate_orbit, radial_bounds, radial_bounds_streaming,
    rotation_number, track_escape, Separatrix,
};
use skewrot::squares::{entry_distance_series, Rational, SquareConfig, StripState};
use skewrot::{MapProduct, PlanarPoint, SkewRotationMap};

#[test]
fn kam_orbit_bounds_do_not_creep() {
    let p = MapProduct::standard_pair(3.8, 3.8);
    let z0 = PlanarPoint::new(0.0, 2.419);
    let b = radial_bounds_streaming(&p, z0, p.centroid(), &[10_000, 100_000]).unwrap();
    assert!(b[1].rho_max <= b[0].rho_max * 1.01, "{b:?}");
    assert!(b[1].rho_min > 0.0);
}

#[test]
fn sweep_of_nonzero_sums_stays_confined() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..5 {
        let centers: Vec<PlanarPoint> = (0..2)
            .map(|_| {
                let (r, t) = (rng.gen_range(0.0..1.0f64), rng.gen_range(0.0..std::f64::consts::TAU));
                PlanarPoint::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let h1: f64 = rng.gen_range(0.5..4.0);
        let h2 = rng.gen_range(0.5..4.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        if (h1 + h2).abs() < 0.3 {
            continue;
        }
        let p = MapProduct::pair(centers[0], h1, centers[1], h2);
        let rho = rng.gen_range(2.0..10.0);
        let z0 = PlanarPoint::new(rho, 0.0);
        let b = radial_bounds_streaming(&p, z0, p.centroid(), &[20_000, 200_000]).unwrap();
        assert!(b[1].rho_max <= b[0].rho_max * 1.01, "case {case}: {b:?}");
    }
}

/// Regular orbits only: on chaotic ones round-off is amplified to O(1) within 10^3 steps.
#[test]
fn orbit_runs_backwards() {
    for (h1, h2, z0) in [
        (3.8, 3.8, PlanarPoint::new(0.0, 2.419)),
        (3.8, 3.8, PlanarPoint::new(0.0, 3.0)),
        (2.5, 0.25, PlanarPoint::new(1.6, 0.0)),
        (1.0, 1.0, PlanarPoint::new(5.0, 5.0)),
    ] {
        let p = MapProduct::standard_pair(h1, h2);
        let n = 10_000;
        let fwd = iterate_orbit(&p, z0, n, false).unwrap();
        let back = iterate_orbit(&p.inverse(), fwd.full_steps[n - 1], n, false).unwrap();
        assert!(back.full_steps[n - 1].distance(z0) < 1e-6 * z0.norm(), "({h1}, {h2})");
    }
}

#[test]
fn kam_rotation_number_matches_first_order() {
    let p = MapProduct::standard_pair(3.8, 3.8);
    let t = iterate_orbit(&p, PlanarPoint::new(0.0, 2.419), 20_000, false).unwrap();
    let c = p.centroid();
    let rn = rotation_number(&t, c).unwrap();
    let mean_inv = t.full_steps.iter().map(|z| 1.0 / z.distance(c)).sum::<f64>() / t.n as f64;
    let predicted = 7.6 * mean_inv;
    assert!((rn.value - predicted).abs() < 0.1 * predicted, "{} vs {predicted}", rn.value);
}

#[test]
fn single_rotation_bounds_are_exact() {
    let f = PlanarPoint::new(-1.0, 0.0);
    let p = MapProduct::single(SkewRotationMap::new(f, 0.7));
    let z0 = PlanarPoint::new(2.0, 4.0);
    let b = radial_bounds(&iterate_orbit(&p, z0, 5000, false).unwrap(), f);
    assert!((b.rho_max - z0.distance(f)).abs() < 1e-9 && (b.rho_min - z0.distance(f)).abs() < 1e-9);
}

#[test]
fn constructed_orbit_escapes_with_rising_crossings() {
    let p = MapProduct::standard_pair(2.0, -2.0);
    let z0 = escape_initial_point(2.0, 1.0);
    let rep = track_escape(&p, z0, 1_000_000, 100.0, Separatrix::ImaginaryAxis).unwrap();
    assert!(rep.escaped);
    assert_eq!(rep.monotone_fraction, 1.0);
    let ys: Vec<f64> = rep.axis_crossings.iter().map(|c| c.y_star).collect();
    assert!(ys.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn generic_start_is_tracked_against_its_hyperbola() {
    let p = MapProduct::standard_pair(2.0, -2.0);
    let z0 = PlanarPoint::new(3.0, 5.0);
    let sep = Separatrix::hyperbola_through(z0);
    let rep = track_escape(&p, z0, 20_000, 1e4, sep).unwrap();
    assert!(!rep.axis_crossings.is_empty());
}

#[test]
fn escaping_radius_grows_with_n() {
    let p = MapProduct::standard_pair(2.0, -2.0);
    let z0 = escape_initial_point(2.0, 1.0);
    let t = iterate_orbit(&p, z0, 40_000, false).unwrap();
    let maxes: Vec<f64> =
        [5_000, 10_000, 20_000, 40_000].iter().map(|&n| t.full_steps[..n].iter().map(|z| z.norm()).fold(0.0, f64::max)).collect();
    assert!(maxes.windows(2).all(|w| w[1] > w[0]), "{maxes:?}");
}

#[test]
fn escaping_family_grows_like_square_root() {
    let a = Rational::new(1, 3);
    let cfg = SquareConfig::new(a.clone()).unwrap();
    let d = entry_distance_series(&cfg, &StripState::new(a.clone(), a, 0), 200_000).unwrap();
    let g = estimate_growth_exponent(&d).unwrap();
    assert!((g.exponent - 0.5).abs() < 0.1, "{g:?}");
}

mod common;

use common::curve;
use shrinker_core::geodesic::solve_geodesic_with_report;
use shrinker_core::{
    discrete_length, normal_field, resample_uniform, segment_distance, Error, HalfPlanePoint,
    SolveConfig,
};

#[test]
fn solved_curve_meets_stopping_conditions() {
    for m in [128usize, 512] {
        let (c, report) = solve_geodesic_with_report(&SolveConfig::with_points(m)).unwrap();
        assert!(report.residual <= 1e-10, "{report:?}");
        assert!(c.spacing_deviation() <= 1e-8, "{}", c.spacing_deviation());
        assert!(c.points().iter().all(|q| q.r > 0.0));
        let normals = normal_field(&c).unwrap();
        let g = c.length_gradient().unwrap();
        let worst = g
            .iter()
            .zip(&normals.normals)
            .fold(0.0f64, |w, (g, n)| w.max((g[0] * n[0] + g[1] * n[1]).abs()));
        assert!(worst <= 1e-10, "{worst}");
    }
}

#[test]
fn normal_moves_change_length_only_at_second_order() {
    let c = curve(512);
    let normals = normal_field(c).unwrap();
    let h = 1e-6;
    let pts = c.points();
    let m = pts.len();
    for i in 0..m {
        let (prev, next) = (pts[(i + m - 1) % m], pts[(i + 1) % m]);
        let n = normals.normals[i];
        let local = |s: f64| {
            let q = HalfPlanePoint::new(pts[i].r + s * n[0], pts[i].z + s * n[1]);
            segment_distance(prev, q) + segment_distance(q, next)
        };
        let first = 0.5 * (local(h) - local(-h));
        assert!(first.abs() <= 1e-13, "point {i}: {first:e}");
    }
}

#[test]
fn reflection_symmetry() {
    for m in [128usize, 1024] {
        let c = curve(m);
        let dev = c
            .points()
            .iter()
            .zip(c.reflect().points())
            .fold(0.0f64, |w, (a, b)| w.max(a.dist(*b)));
        assert!(dev <= 1e-8, "M = {m}: {dev:e}");
    }
}

#[test]
fn canonical_orientation() {
    let c = curve(256);
    assert!(c.signed_area2() > 0.0);
    assert_eq!(c.max_r_index(), 0);
    assert!(c.points()[0].z.abs() < 1e-12);
}

#[test]
fn deterministic() {
    let a = shrinker_core::solve_geodesic(&SolveConfig::with_points(256)).unwrap();
    let b = shrinker_core::solve_geodesic(&SolveConfig::with_points(256)).unwrap();
    for (p, q) in a.points().iter().zip(b.points()) {
        assert_eq!(p.r.to_bits(), q.r.to_bits());
        assert_eq!(p.z.to_bits(), q.z.to_bits());
    }
}

#[test]
fn resampled_fine_curve_approaches_coarse_curve() {
    // deviation between the resampled 2M curve and the M curve
    let dev = |m: usize| {
        let coarse = curve(m);
        let fine = resample_uniform(curve(2 * m), m).unwrap();
        coarse
            .points()
            .iter()
            .zip(fine.points())
            .fold(0.0f64, |w, (a, b)| w.max(a.dist(*b)))
    };
    let (d128, d256, d512) = (dev(128), dev(256), dev(512));
    for (a, b) in [(d128, d256), (d256, d512)] {
        let ratio = a / b;
        assert!((3.0..=5.0).contains(&ratio), "{a:e} / {b:e} = {ratio}");
    }
}

#[test]
fn resampling_the_solved_curve_preserves_length() {
    for m in [128usize, 256, 512] {
        let c = curve(m);
        for m_new in [m, 2 * m] {
            let r = resample_uniform(c, m_new).unwrap();
            let rel = (discrete_length(&r) - discrete_length(c)).abs() / discrete_length(c);
            assert!(rel <= 1e-4, "M = {m} -> {m_new}: {rel:e}");
        }
    }
}

#[test]
fn entropy_converges_quadratically() {
    let l: Vec<f64> = [256usize, 512, 1024, 2048]
        .iter()
        .map(|&m| discrete_length(curve(m)))
        .collect();
    assert!((l[3] - l[2]).abs() <= 1e-5, "{} vs {}", l[3], l[2]);
    for w in l.windows(3) {
        let ratio = (w[0] - w[1]) / (w[1] - w[2]);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }
}

#[test]
fn nearby_seeds_reach_the_same_curve() {
    let base = discrete_length(curve(256));
    for (r, z, rad) in [(1.6, 0.1, 0.4), (1.35, -0.05, 0.55)] {
        let config = SolveConfig {
            points: 256,
            seed_center: HalfPlanePoint::new(r, z),
            seed_radius: rad,
            ..SolveConfig::default()
        };
        let c = shrinker_core::solve_geodesic(&config).unwrap();
        assert!((discrete_length(&c) - base).abs() < 1e-10);
    }
}

#[test]
fn far_seed_fails_cleanly() {
    let config = SolveConfig {
        points: 256,
        seed_center: HalfPlanePoint::new(1.3, -0.2),
        seed_radius: 0.7,
        ..SolveConfig::default()
    };
    match shrinker_core::solve_geodesic(&config) {
        Err(Error::CurveCollapse(_)) | Err(Error::NonConvergence { .. }) => {}
        other => panic!("{other:?}"),
    }
}

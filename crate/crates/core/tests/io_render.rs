mod common;

use common::curve;
use shrinker_core::io::{curve_from_csv, curve_to_csv, read_curve, write_curve};
use shrinker_core::render::{surface_of_revolution, svg_variation, Azimuth, Variation};
use shrinker_core::spectral::labelled_spectrum;
use shrinker_core::{assemble_l0, normal_field};

#[test]
fn solved_curve_round_trips_through_a_file() {
    let c = curve(256);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    write_curve(c, &path).unwrap();
    let back = read_curve(&path).unwrap();
    for (a, b) in c.points().iter().zip(back.points()) {
        assert_eq!(a.r.to_bits(), b.r.to_bits());
        assert_eq!(a.z.to_bits(), b.z.to_bits());
    }
    assert_eq!(curve_to_csv(&back), std::fs::read_to_string(&path).unwrap());
}

#[test]
fn malformed_files_are_rejected() {
    let good = curve_to_csv(curve(64));
    let cases = [
        good.replacen("m,r,z", "m,x,z", 1),
        good.replacen("\n3,", "\n4,", 1),
        good.lines().take(3).collect::<Vec<_>>().join("\n"),
        good.replacen("\n1,3.", "\n1,-3.", 1),
        good.replacen("\n1,", "\n1,abc,", 1),
    ];
    for text in cases {
        assert!(
            curve_from_csv(&text).is_err(),
            "{}",
            &text[..80.min(text.len())]
        );
    }
    assert!(read_curve(std::path::Path::new("/nonexistent/curve.csv")).is_err());
}

fn mode(k: u32, j: usize) -> (shrinker_core::NormalField, Vec<f64>) {
    let c = curve(128);
    let normals = normal_field(c).unwrap();
    let l0 = assemble_l0(c, &normals).unwrap();
    let u = labelled_spectrum(&l0, c, &normals, k, j + 1).unwrap().modes[j]
        .u
        .clone();
    (normals, u)
}

#[test]
fn undisplaced_surface_is_rotation_invariant() {
    let c = curve(128);
    let n_theta = 12;
    let mesh = surface_of_revolution(c, n_theta, None).unwrap();
    let (s, co) = (2.0 * std::f64::consts::PI / n_theta as f64).sin_cos();
    for i in 0..n_theta {
        for m in 0..c.len() {
            let p = mesh.vertices[i * c.len() + m];
            let q = mesh.vertices[((i + 1) % n_theta) * c.len() + m];
            let rotated = [co * p[0] - s * p[1], s * p[0] + co * p[1], p[2]];
            for a in 0..3 {
                assert!((rotated[a] - q[a]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn axisymmetric_variation_moves_every_ring_alike() {
    let c = curve(128);
    let (normals, u) = mode(0, 0);
    let v = Variation {
        normals: &normals,
        u: &u,
        k: 0,
        azimuth: Azimuth::Cos,
        epsilon: 0.1,
    };
    let mesh = surface_of_revolution(c, 8, Some(v)).unwrap();
    let m = c.len();
    for i in 1..8 {
        for idx in 0..m {
            let (a, b) = (mesh.vertices[idx], mesh.vertices[i * m + idx]);
            assert!((a[0].hypot(a[1]) - b[0].hypot(b[1])).abs() < 1e-12);
            assert!((a[2] - b[2]).abs() < 1e-15);
        }
    }
    let moved = mesh.vertices[..m]
        .iter()
        .zip(c.points())
        .fold(0.0f64, |w, (p, q)| w.max((p[0] - q.r).hypot(p[2] - q.z)));
    assert!((moved - 0.1).abs() < 1e-12);
}

#[test]
fn sine_variation_vanishes_on_its_nodal_plane() {
    let c = curve(128);
    let (normals, u) = mode(2, 0);
    let v = Variation {
        normals: &normals,
        u: &u,
        k: 2,
        azimuth: Azimuth::Sin,
        epsilon: 0.2,
    };
    let mesh = surface_of_revolution(c, 8, Some(v)).unwrap();
    for (p, q) in mesh.vertices[..c.len()].iter().zip(c.points()) {
        assert!((p[0] - q.r).abs() < 1e-15 && (p[2] - q.z).abs() < 1e-15);
    }
}

#[test]
fn svg_is_deterministic() {
    let c = curve(128);
    let (normals, u) = mode(1, 0);
    let a = svg_variation(c, &normals, &u, None).unwrap();
    assert_eq!(a, svg_variation(c, &normals, &u, None).unwrap());
    assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
}

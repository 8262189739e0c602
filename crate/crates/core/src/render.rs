//! Static pictures of normal variations: an SVG of the cross-section with a
//! perturbed copy, and an OBJ surface of revolution.
//!
//! Variations `u` are rescaled to `max |u_m| = 1`, so `epsilon` is the
//! largest displacement drawn.

use std::f64::consts::PI;

use crate::geodesic::DiscreteCurve;
use crate::io::fmt17;
use crate::stability::NormalField;
use crate::{Error, Result};

pub const DEFAULT_EPSILON_FRACTION: f64 = 0.15;
pub const DEFAULT_N_THETA: usize = 64;

/// Largest Euclidean distance between two curve points.
pub fn diameter(curve: &DiscreteCurve) -> f64 {
    let pts = curve.points();
    let mut d = 0.0f64;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max(a.dist(*b));
        }
    }
    d
}

fn normalized(u: &[f64]) -> Vec<f64> {
    let max = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        u.to_vec()
    } else {
        u.iter().map(|v| v / max).collect()
    }
}

fn check_variation(curve: &DiscreteCurve, normals: &NormalField, u: &[f64]) -> Result<()> {
    if normals.len() != curve.len() || u.len() != curve.len() {
        return Err(Error::InvalidInput(format!(
            "curve has {} points but {} normals and {} variation values",
            curve.len(),
            normals.len(),
            u.len()
        )));
    }
    Ok(())
}

/// `q_m + epsilon u_m n_m` in the half-plane.
pub fn perturbed(
    curve: &DiscreteCurve,
    normals: &NormalField,
    u: &[f64],
    epsilon: f64,
) -> Result<Vec<[f64; 2]>> {
    check_variation(curve, normals, u)?;
    Ok(curve
        .points()
        .iter()
        .zip(&normals.normals)
        .zip(normalized(u))
        .map(|((q, n), u)| [q.r + epsilon * u * n[0], q.z + epsilon * u * n[1]])
        .collect())
}

fn polyline(points: &[[f64; 2]], style: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|p| format!("{},{}", fmt17(p[0]), fmt17(-p[1])))
        .collect();
    format!(
        "<polygon points=\"{}\" fill=\"none\" {style}/>\n",
        coords.join(" ")
    )
}

/// Cross-section (solid) with the variation `u` drawn dashed. `epsilon`
/// defaults to 0.15 of the curve diameter. `z` points up.
pub fn svg_variation(
    curve: &DiscreteCurve,
    normals: &NormalField,
    u: &[f64],
    epsilon: Option<f64>,
) -> Result<String> {
    let diam = diameter(curve);
    let eps = epsilon.unwrap_or(DEFAULT_EPSILON_FRACTION * diam);
    let base: Vec<[f64; 2]> = curve.points().iter().map(|q| [q.r, q.z]).collect();
    let moved = perturbed(curve, normals, u, eps)?;
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in base.iter().chain(&moved) {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(-p[1]);
        y1 = y1.max(-p[1]);
    }
    let pad = 0.05 * diam;
    let stroke = 0.005 * diam;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        fmt17(x0 - pad),
        fmt17(y0 - pad),
        fmt17(x1 - x0 + 2.0 * pad),
        fmt17(y1 - y0 + 2.0 * pad)
    );
    out.push_str(&polyline(
        &base,
        &format!("stroke=\"#1f77b4\" stroke-width=\"{}\"", fmt17(stroke)),
    ));
    out.push_str(&polyline(
        &moved,
        &format!(
            "stroke=\"#ff7f0e\" stroke-width=\"{}\" stroke-dasharray=\"{} {}\"",
            fmt17(stroke),
            fmt17(4.0 * stroke),
            fmt17(2.0 * stroke)
        ),
    ));
    out.push_str("</svg>\n");
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Azimuth {
    Cos,
    Sin,
}

/// A normal variation `epsilon u_m cos(k theta)` (or `sin`) of the surface.
#[derive(Debug, Clone, Copy)]
pub struct Variation<'a> {
    pub normals: &'a NormalField,
    pub u: &'a [f64],
    pub k: u32,
    pub azimuth: Azimuth,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices.
    pub triangles: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str(&format!(
                "v {} {} {}\n",
                fmt17(v[0]),
                fmt17(v[1]),
                fmt17(v[2])
            ));
        }
        for t in &self.triangles {
            out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
        }
        out
    }
}

/// Surface of revolution about the `z` axis with `n_theta` azimuthal
/// samples. Vertex `i * M + m` sits at angle `theta_i = 2 pi i / n_theta`
/// over curve point `m`; each quad of the `(m, i)` grid is split into two
/// triangles.
pub fn surface_of_revolution(
    curve: &DiscreteCurve,
    n_theta: usize,
    variation: Option<Variation<'_>>,
) -> Result<Mesh> {
    if n_theta < 3 {
        return Err(Error::InvalidInput(format!(
            "n_theta must be at least 3, got {n_theta}"
        )));
    }
    let m = curve.len();
    let scaled = match &variation {
        Some(v) => {
            check_variation(curve, v.normals, v.u)?;
            normalized(v.u)
        }
        None => vec![0.0; m],
    };
    let mut vertices = Vec::with_capacity(m * n_theta);
    for i in 0..n_theta {
        let theta = 2.0 * PI * i as f64 / n_theta as f64;
        let (s, c) = theta.sin_cos();
        for (idx, q) in curve.points().iter().enumerate() {
            let mut p = [q.r * c, q.r * s, q.z];
            if let Some(v) = &variation {
                let phase = f64::from(v.k) * theta;
                let w = match v.azimuth {
                    Azimuth::Cos => phase.cos(),
                    Azimuth::Sin => phase.sin(),
                };
                let amp = v.epsilon * scaled[idx] * w;
                let n = v.normals.normals[idx];
                p[0] += amp * n[0] * c;
                p[1] += amp * n[0] * s;
                p[2] += amp * n[1];
            }
            vertices.push(p);
        }
    }
    let mut triangles = Vec::with_capacity(2 * m * n_theta);
    for i in 0..n_theta {
        let ni = (i + 1) % n_theta;
        for a in 0..m {
            let b = (a + 1) % m;
            let (v00, v01, v10, v11) = (i * m + a, i * m + b, ni * m + a, ni * m + b);
            triangles.push([v00, v01, v11]);
            triangles.push([v00, v11, v10]);
        }
    }
    Ok(Mesh {
        vertices,
        triangles,
    })
}

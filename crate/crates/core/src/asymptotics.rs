//! Eigenvalue asymptotics through the Liouville substitution `u = psi sigma^{-1/2}`,
//! which turns `-L_k` into the Schrodinger operator `-d^2/ds^2 + V` in
//! Euclidean arc length `s`, with
//! `V = (sigma^{-1/2})'' sigma^{1/2} - 1 + (k^2 - 1)/r^2`.
//!
//! Derivatives along the curve use differences in `g^sigma` arc length `t`
//! (the solved points are equally spaced in `t`) composed with
//! `d/ds = sigma d/dt`; integrals use `ds = dt / sigma`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::convergence::least_squares;
use crate::geodesic::DiscreteCurve;
use crate::metric::sigma;
use crate::spectral::eigenvalues;
use crate::stability::{assemble_l0, assemble_lk, normal_field};
use crate::{discrete_length, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchrodingerProfile {
    pub k: u32,
    /// Potential at each curve point.
    pub v: Vec<f64>,
    /// Euclidean arc length position of each point, `s_0 = 0`.
    pub s: Vec<f64>,
    pub v_avg: f64,
    /// Euclidean length of the curve.
    pub s_length: f64,
    /// Minimum of the local quadratic fit at the discrete minimum of `V`.
    pub v0: f64,
    /// `V''` of that fit.
    pub vpp0: f64,
    pub argmin_index: usize,
}

pub fn potential_profile(curve: &DiscreteCurve, k: u32) -> SchrodingerProfile {
    let pts = curve.points();
    let m = pts.len();
    let dt = discrete_length(curve) / m as f64;
    let sig: Vec<f64> = pts.iter().map(|&q| sigma(q)).collect();
    let f: Vec<f64> = sig.iter().map(|s| s.powf(-0.5)).collect();
    // df/ds at the segment midpoints
    let fs: Vec<f64> = (0..m)
        .map(|i| {
            let p = (i + 1) % m;
            sigma(pts[i].midpoint(pts[p])) * (f[p] - f[i]) / dt
        })
        .collect();
    let kk = f64::from(k) * f64::from(k);
    let v: Vec<f64> = (0..m)
        .map(|i| {
            let fss = sig[i] * (fs[i] - fs[(i + m - 1) % m]) / dt;
            fss * sig[i].sqrt() - 1.0 + (kk - 1.0) / (pts[i].r * pts[i].r)
        })
        .collect();

    let inv_sum: f64 = sig.iter().map(|s| 1.0 / s).sum();
    let v_avg = v.iter().zip(&sig).map(|(v, s)| v / s).sum::<f64>() / inv_sum;

    let h: Vec<f64> = curve.segments().map(|(a, b)| a.dist(b)).collect();
    let mut s = Vec::with_capacity(m);
    let mut acc = 0.0;
    for hi in &h {
        s.push(acc);
        acc += hi;
    }
    let s_length = acc;

    let mut argmin = 0;
    for (i, vi) in v.iter().enumerate() {
        if *vi < v[argmin] {
            argmin = i;
        }
    }
    let (v0, vpp0) = quadratic_fit(
        [-h[(argmin + m - 1) % m], 0.0, h[argmin]],
        [v[(argmin + m - 1) % m], v[argmin], v[(argmin + 1) % m]],
    );

    SchrodingerProfile {
        k,
        v,
        s,
        v_avg,
        s_length,
        v0,
        vpp0,
        argmin_index: argmin,
    }
}

/// Parabola through three points with `x[1] = 0`: returns (extremal value,
/// second derivative). The extremal value is the middle sample when the
/// parabola opens downward.
fn quadratic_fit(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let (x0, x2) = (x[0], x[2]);
    let d0 = (y[0] - y[1]) / x0;
    let d2 = (y[2] - y[1]) / x2;
    let a = (d2 - d0) / (x2 - x0);
    let b = d0 - a * x0;
    let c = y[1];
    if a > 0.0 {
        (c - b * b / (4.0 * a), 2.0 * a)
    } else {
        (c, 2.0 * a)
    }
}

/// `(2 pi / l)^2 j^2 + V_avg`, the estimate for both `lambda_{2j-1}` and
/// `lambda_{2j}`.
pub fn high_j_estimate(profile: &SchrodingerProfile, j: usize) -> f64 {
    let w = 2.0 * PI / profile.s_length;
    w * w * (j * j) as f64 + profile.v_avg
}

/// Harmonic oscillator levels `V(0) + (2j + 1) sqrt(V''(0)/2)` of the well
/// at the outermost point.
pub fn high_k_estimate(profile: &SchrodingerProfile, j: usize) -> Result<f64> {
    if !(profile.vpp0 > 0.0) {
        return Err(Error::NoWell {
            k: profile.k,
            curvature: profile.vpp0,
        });
    }
    Ok(profile.v0 + (2 * j + 1) as f64 * (profile.vpp0 / 2.0).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftRow {
    pub j: usize,
    pub lambda: f64,
    pub estimate: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftDiagnostic {
    pub k: u32,
    pub rows: Vec<DriftRow>,
    /// Log-log slope of |deviation| against `j` over `fit_range`.
    pub exponent: f64,
    pub fit_range: (usize, usize),
}

impl DriftDiagnostic {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,lambda,estimate,deviation\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.j,
                crate::io::fmt17(r.lambda),
                crate::io::fmt17(r.estimate),
                crate::io::fmt17(r.deviation)
            ));
        }
        out
    }
}

/// Compares `lambda_{2j}` with [`high_j_estimate`] for `j = 1..=j_max` and
/// fits the deviation exponent over the top decade `[j_max/10, j_max]`.
pub fn drift_from_eigenvalues(
    profile: &SchrodingerProfile,
    values: &[f64],
    j_max: usize,
) -> Result<DriftDiagnostic> {
    if j_max < 10 || 2 * j_max >= values.len() {
        return Err(Error::InvalidInput(format!(
            "j_max = {j_max} needs at least 10 and {} eigenvalues, have {}",
            2 * j_max + 1,
            values.len()
        )));
    }
    let rows: Vec<DriftRow> = (1..=j_max)
        .map(|j| {
            let estimate = high_j_estimate(profile, j);
            DriftRow {
                j,
                lambda: values[2 * j],
                estimate,
                deviation: values[2 * j] - estimate,
            }
        })
        .collect();
    let lo = j_max.div_ceil(10);
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows[lo - 1..]
        .iter()
        .map(|r| ((r.j as f64).log10(), r.deviation.abs().log10()))
        .unzip();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::DegenerateFit(
            "zero deviation in the drift fit range".into(),
        ));
    }
    let (exponent, _, _) = least_squares(&xs, &ys);
    Ok(DriftDiagnostic {
        k: profile.k,
        rows,
        exponent,
        fit_range: (lo, j_max),
    })
}

pub fn drift_diagnostic(curve: &DiscreteCurve, k: u32, j_max: usize) -> Result<DriftDiagnostic> {
    let normals = normal_field(curve)?;
    let a = assemble_lk(&assemble_l0(curve, &normals)?, curve, k);
    let values = eigenvalues(&a)?;
    drift_from_eigenvalues(&potential_profile(curve, k), &values, j_max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HighKRow {
    pub k: u32,
    pub lambda0: f64,
    pub estimate: f64,
    pub v0: f64,
    pub vpp0: f64,
}

impl HighKRow {
    pub fn abs_error(&self) -> f64 {
        self.lambda0 - self.estimate
    }

    pub fn rel_error(&self) -> f64 {
        (self.lambda0 - self.estimate).abs() / self.lambda0.abs()
    }
}

/// Ground state of `-L_k` against the harmonic oscillator estimate for each
/// `k` in `ks` (all must have a well, `k >= 2`).
pub fn high_k_table(
    curve: &DiscreteCurve,
    ks: impl IntoIterator<Item = u32>,
) -> Result<Vec<HighKRow>> {
    let normals = normal_field(curve)?;
    let l0 = assemble_l0(curve, &normals)?;
    ks.into_iter()
        .map(|k| {
            let profile = potential_profile(curve, k);
            let estimate = high_k_estimate(&profile, 0)?;
            let lambda0 = eigenvalues(&assemble_lk(&l0, curve, k))?[0];
            Ok(HighKRow {
                k,
                lambda0,
                estimate,
                v0: profile.v0,
                vpp0: profile.vpp0,
            })
        })
        .collect()
}

pub fn profile_csv(profile: &SchrodingerProfile) -> String {
    let mut out = String::from("m,s,V\n");
    for (m, (s, v)) in profile.s.iter().zip(&profile.v).enumerate() {
        out.push_str(&format!(
            "{m},{},{}\n",
            crate::io::fmt17(*s),
            crate::io::fmt17(*v)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_fit_exact() {
        let p = |x: f64| 0.7 * (x - 0.01).powi(2) - 2.0;
        let x = [-0.03, 0.0, 0.05];
        let (v0, vpp) = quadratic_fit(x, x.map(p));
        assert!((vpp - 1.4).abs() < 1e-9);
        assert!((v0 + 2.0).abs() < 1e-12);
    }

    fn profile(v0: f64, vpp0: f64) -> SchrodingerProfile {
        SchrodingerProfile {
            k: 5,
            v: vec![],
            s: vec![],
            v_avg: 1.25,
            s_length: 2.0 * PI,
            v0,
            vpp0,
            argmin_index: 0,
        }
    }

    #[test]
    fn estimates() {
        let p = profile(-1.0, 8.0);
        assert_eq!(high_j_estimate(&p, 0), 1.25);
        assert!((high_j_estimate(&p, 3) - 10.25).abs() < 1e-12);
        assert_eq!(high_k_estimate(&p, 0).unwrap(), -1.0 + 2.0);
        for j in 1..5 {
            let step = high_k_estimate(&p, j).unwrap() - high_k_estimate(&p, j - 1).unwrap();
            assert!((step - 4.0).abs() < 1e-12);
        }
        assert!(matches!(
            high_k_estimate(&profile(0.0, -1.0), 0),
            Err(Error::NoWell { .. })
        ));
    }
}

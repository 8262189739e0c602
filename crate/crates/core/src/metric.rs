//! The Gaussian-weighted half-plane metric `sigma^2 (dr^2 + dz^2)` and the
//! midpoint-rule segment distance built on it.
//!
//! All 4-vectors and 4x4 matrices in this module use the coordinate order
//! `(a_r, a_z, b_r, b_z)`; downstream assembly relies on it.

use crate::{Error, Result};

/// Segments shorter than this have no well-defined direction.
pub const DEGENERATE_SEGMENT: f64 = 1e-14;

/// A point `(r, z)` of the closed half-plane `r >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HalfPlanePoint {
    pub r: f64,
    pub z: f64,
}

impl HalfPlanePoint {
    pub const fn new(r: f64, z: f64) -> Self {
        Self { r, z }
    }

    pub fn midpoint(self, other: Self) -> Self {
        Self::new(0.5 * (self.r + other.r), 0.5 * (self.z + other.z))
    }

    pub fn dist(self, other: Self) -> f64 {
        (other.r - self.r).hypot(other.z - self.z)
    }

    /// Mirror image under `z -> -z`.
    pub fn reflect(self) -> Self {
        Self::new(self.r, -self.z)
    }

    pub fn dot(self, v: [f64; 2]) -> f64 {
        self.r * v[0] + self.z * v[1]
    }
}

/// Value, gradient and Hessian of [`segment_distance`] in `(a_r, a_z, b_r, b_z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentDerivatives {
    pub value: f64,
    pub gradient: [f64; 4],
    pub hessian: [[f64; 4]; 4],
}

impl SegmentDerivatives {
    /// 2x2 block of the Hessian for endpoint `i` against endpoint `j` (0 = a, 1 = b).
    pub fn block(&self, i: usize, j: usize) -> [[f64; 2]; 2] {
        let h = &self.hessian;
        [
            [h[2 * i][2 * j], h[2 * i][2 * j + 1]],
            [h[2 * i + 1][2 * j], h[2 * i + 1][2 * j + 1]],
        ]
    }

    /// Gradient with respect to endpoint `i` (0 = a, 1 = b).
    pub fn grad(&self, i: usize) -> [f64; 2] {
        [self.gradient[2 * i], self.gradient[2 * i + 1]]
    }
}

/// The weight `sigma = r/2 * exp(-(r^2 + z^2)/4)`.
pub fn sigma(q: HalfPlanePoint) -> f64 {
    0.5 * q.r * (-(q.r * q.r + q.z * q.z) / 4.0).exp()
}

fn sigma_jet(q: HalfPlanePoint) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let (r, z) = (q.r, q.z);
    let f = 0.5 * (-(r * r + z * z) / 4.0).exp();
    let s = r * f;
    let s_r = f * (1.0 - 0.5 * r * r);
    let s_z = -0.5 * r * z * f;
    let s_rr = f * (0.25 * r * r * r - 1.5 * r);
    let s_rz = -0.5 * z * f * (1.0 - 0.5 * r * r);
    let s_zz = f * (0.25 * r * z * z - 0.5 * r);
    (s, [s_r, s_z], [[s_rr, s_rz], [s_rz, s_zz]])
}

/// Midpoint-rule approximation of the `g^sigma` distance between `a` and `b`.
pub fn segment_distance(a: HalfPlanePoint, b: HalfPlanePoint) -> f64 {
    sigma(a.midpoint(b)) * a.dist(b)
}

/// Closed-form gradient and Hessian of [`segment_distance`].
///
/// With `c = (a+b)/2`, `L = |b-a|`, `e = (b-a)/L` and `P = I - e e^T`, the
/// block for endpoints `x, y` (signs `s_a = -1`, `s_b = +1`) is
/// `L/4 Hs + s_y/2 grad(s) e^T + s_x/2 e grad(s)^T + s_x s_y sigma P / L`.
pub fn segment_derivatives(a: HalfPlanePoint, b: HalfPlanePoint) -> Result<SegmentDerivatives> {
    let d = [b.r - a.r, b.z - a.z];
    let len = d[0].hypot(d[1]);
    if !(len >= DEGENERATE_SEGMENT) {
        return Err(Error::DegenerateSegment { length: len });
    }
    let e = [d[0] / len, d[1] / len];
    let (s, gs, hs) = sigma_jet(a.midpoint(b));

    let sign = [-1.0, 1.0];
    let mut gradient = [0.0; 4];
    for x in 0..2 {
        for p in 0..2 {
            gradient[2 * x + p] = 0.5 * gs[p] * len + sign[x] * s * e[p];
        }
    }

    let mut hessian = [[0.0; 4]; 4];
    for x in 0..2 {
        for y in 0..2 {
            let sxy = sign[x] * sign[y];
            for p in 0..2 {
                for q in 0..2 {
                    let proj = if p == q { 1.0 } else { 0.0 } - e[p] * e[q];
                    hessian[2 * x + p][2 * y + q] = 0.25 * hs[p][q] * len
                        + 0.5 * sign[y] * gs[p] * e[q]
                        + 0.5 * sign[x] * e[p] * gs[q]
                        + sxy * s * proj / len;
                }
            }
        }
    }
    // exact symmetry regardless of rounding in the two cross terms
    for i in 0..4 {
        for j in 0..i {
            let avg = 0.5 * (hessian[i][j] + hessian[j][i]);
            hessian[i][j] = avg;
            hessian[j][i] = avg;
        }
    }

    Ok(SegmentDerivatives {
        value: s * len,
        gradient,
        hessian,
    })
}

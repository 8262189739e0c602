//! Discrete stability operators `-L_k` on a solved curve.
//!
//! The full `2M x 2M` Hessian of the discrete length is never formed: each
//! segment's 4x4 Hessian is projected onto the normals of its two endpoints
//! and the resulting 2x2 blocks are summed into a cyclic tridiagonal matrix.

use serde::Serialize;

use crate::geodesic::DiscreteCurve;
use crate::linalg;
use crate::metric::{sigma, SegmentDerivatives};
use crate::{discrete_length, Error, Result};

/// Two block eigenvalues closer than this (relative) cannot pick a normal.
pub const AMBIGUOUS_NORMAL: f64 = 1e-12;

pub type Block2 = [[f64; 2]; 2];

/// Outward unit normals `n_0 .. n_{M-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalField {
    pub normals: Vec<[f64; 2]>,
}

impl NormalField {
    pub(crate) fn from_vecs(normals: Vec<[f64; 2]>) -> Self {
        Self { normals }
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }
}

/// Symmetric cyclic tridiagonal `M x M` matrix representing `-L_{k;d}`.
/// `off[m]` is the entry coupling points `m` and `m + 1 (mod M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityMatrix {
    pub k: u32,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl StabilityMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        linalg::matvec(&self.diag, &self.off, u)
    }

    /// `u^T A u`.
    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        self.apply(u).iter().zip(u).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> faer::Mat<f64> {
        linalg::to_dense(&self.diag, &self.off)
    }

    /// Row-major dense copy.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let d = self.to_dense();
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| d[(i, j)]).collect())
            .collect()
    }
}

pub(crate) fn blocks_from_segments(segs: &[SegmentDerivatives]) -> Vec<Block2> {
    let n = segs.len();
    (0..n)
        .map(|m| {
            let prev = segs[(m + n - 1) % n].block(1, 1);
            let next = segs[m].block(0, 0);
            let mut h = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] = prev[i][j] + next[i][j];
                }
            }
            h
        })
        .collect()
}

/// The 2x2 diagonal blocks `H_m` of the discrete length Hessian: the
/// lower-right block of segment `(m-1, m)` plus the upper-left block of
/// segment `(m, m+1)`.
pub fn point_blocks(curve: &DiscreteCurve) -> Result<Vec<Block2>> {
    Ok(blocks_from_segments(&curve.segment_derivatives()?))
}

/// Eigenvalues `(lo, hi)` and the unit eigenvector of `hi`.
pub fn block_eigen(h: &Block2) -> (f64, f64, [f64; 2]) {
    let (a, b, c) = (h[0][0], 0.5 * (h[0][1] + h[1][0]), h[1][1]);
    let mean = 0.5 * (a + c);
    let rad = (0.5 * (a - c)).hypot(b);
    let (lo, hi) = (mean - rad, mean + rad);
    // eigenvector of hi: rotate by the half angle of (a - c, 2b)
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    (lo, hi, [theta.cos(), theta.sin()])
}

pub(crate) fn normals_from_blocks(curve: &DiscreteCurve, blocks: &[Block2]) -> Result<NormalField> {
    let c = curve.centroid();
    let normals = blocks
        .iter()
        .zip(curve.points())
        .enumerate()
        .map(|(m, (h, q))| {
            let (lo, hi, mut n) = block_eigen(h);
            if hi - lo <= AMBIGUOUS_NORMAL * lo.abs().max(hi.abs()).max(1.0) {
                return Err(Error::AmbiguousNormal { index: m, lo, hi });
            }
            if n[0] * (q.r - c.r) + n[1] * (q.z - c.z) < 0.0 {
                n = [-n[0], -n[1]];
            }
            Ok(n)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalField { normals })
}

/// Outward unit normals: the eigenvector of the larger eigenvalue of each
/// `H_m`, signed to point away from the curve centroid.
pub fn normal_field(curve: &DiscreteCurve) -> Result<NormalField> {
    normals_from_blocks(curve, &point_blocks(curve)?)
}

/// Unscaled `N^T H_d N` as (diagonal, cyclic off-diagonal).
pub(crate) fn reduce_segments(
    segs: &[SegmentDerivatives],
    normals: &NormalField,
) -> (Vec<f64>, Vec<f64>) {
    let n = segs.len();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for (m, seg) in segs.iter().enumerate() {
        let p = (m + 1) % n;
        let ends = [normals.normals[m], normals.normals[p]];
        let mut red = [[0.0; 2]; 2];
        for (i, ni) in ends.iter().enumerate() {
            for (j, nj) in ends.iter().enumerate() {
                let b = seg.block(i, j);
                red[i][j] = ni[0] * (b[0][0] * nj[0] + b[0][1] * nj[1])
                    + ni[1] * (b[1][0] * nj[0] + b[1][1] * nj[1]);
            }
        }
        diag[m] += red[0][0];
        diag[p] += red[1][1];
        off[m] += 0.5 * (red[0][1] + red[1][0]);
    }
    (diag, off)
}

/// `-L_{0;d} = (M / l_d) N^T H_d N`, assembled segment by segment.
pub fn assemble_l0(curve: &DiscreteCurve, normals: &NormalField) -> Result<StabilityMatrix> {
    if normals.len() != curve.len() {
        return Err(Error::InvalidInput(format!(
            "{} normals for a curve of {} points",
            normals.len(),
            curve.len()
        )));
    }
    let segs = curve.segment_derivatives()?;
    let scale = curve.len() as f64 / segs.iter().map(|s| s.value).sum::<f64>();
    let (mut diag, mut off) = reduce_segments(&segs, normals);
    diag.iter_mut()
        .chain(off.iter_mut())
        .for_each(|v| *v *= scale);
    Ok(StabilityMatrix { k: 0, diag, off })
}

/// `-L_{k;d} = -L_{0;d} + k^2 R_d^{-2}`. Given any `-L_{j;d}` of the same
/// curve, shifts it to mode `k`.
pub fn assemble_lk(l0: &StabilityMatrix, curve: &DiscreteCurve, k: u32) -> StabilityMatrix {
    let kk = f64::from(k) * f64::from(k) - f64::from(l0.k) * f64::from(l0.k);
    let diag = l0
        .diag
        .iter()
        .zip(curve.points())
        .map(|(d, q)| if kk == 0.0 { *d } else { d + kk / (q.r * q.r) })
        .collect();
    StabilityMatrix {
        k,
        diag,
        off: l0.off.clone(),
    }
}

/// Independent discretization of `sigma d/dt (sigma d/dt) + 1 + (1-k^2)/r^2`
/// by second-order central differences in `g^sigma` arc length `t`, with
/// `dt = l_d / M`. Used only to cross-check [`assemble_lk`].
pub fn assemble_lk_ode(curve: &DiscreteCurve, k: u32) -> StabilityMatrix {
    let m = curve.len();
    let dt = discrete_length(curve) / m as f64;
    let s: Vec<f64> = curve.points().iter().map(|&q| sigma(q)).collect();
    let kk = f64::from(k) * f64::from(k);
    let diag = (0..m)
        .map(|i| {
            let r = curve.points()[i].r;
            2.0 * s[i] * s[i] / (dt * dt) - (1.0 + (1.0 - kk) / (r * r))
        })
        .collect();
    let off = (0..m).map(|i| -s[i] * s[(i + 1) % m] / (dt * dt)).collect();
    StabilityMatrix { k, diag, off }
}

//! Spectra of the stability matrices, labelling of the modes with known
//! closed forms, and the index count.
//!
//! Eigenvalues follow the convention `-L u = lambda u`, so they are the
//! eigenvalues of the assembled matrices themselves.

use serde::Serialize;

use crate::geodesic::DiscreteCurve;
use crate::linalg;
use crate::metric::sigma;
use crate::stability::{assemble_l0, assemble_lk, normal_field, NormalField, StabilityMatrix};
use crate::{Error, Result};

/// Minimum |cosine| between an eigenvector and a template to take its label.
pub const LABEL_THRESHOLD: f64 = 0.999;
/// Mode iteration stops at the first `k` whose lowest eigenvalue reaches this.
pub const STOP_THRESHOLD: f64 = 1e-3;
/// Eigenvector residual `|A u - lambda u|_2` targeted by refinement.
pub const RESIDUAL_TARGET: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeLabel {
    Dilation,
    VerticalTranslation,
    HorizontalTranslation,
    Rotation,
    SigmaInverse,
    Generic,
}

impl ModeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dilation => "dilation",
            Self::VerticalTranslation => "vertical_translation",
            Self::HorizontalTranslation => "horizontal_translation",
            Self::Rotation => "rotation",
            Self::SigmaInverse => "sigma_inverse",
            Self::Generic => "generic",
        }
    }

    /// Dilations and translations do not count toward the index.
    pub fn is_excluded(self) -> bool {
        matches!(
            self,
            Self::Dilation | Self::VerticalTranslation | Self::HorizontalTranslation
        )
    }
}

impl std::fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenMode {
    pub k: u32,
    pub j: usize,
    pub lambda: f64,
    /// Unit eigenvector, signed so its largest-magnitude entry is positive.
    pub u: Vec<f64>,
    pub label: ModeLabel,
    pub residual: f64,
}

/// All eigenvalues of one matrix plus eigenvectors of the lowest few.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub k: u32,
    pub eigenvalues: Vec<f64>,
    pub modes: Vec<EigenMode>,
}

/// All eigenvalues, ascending.
pub fn eigenvalues(a: &StabilityMatrix) -> Result<Vec<f64>> {
    a.to_dense()
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))
}

pub fn full_spectrum(a: &StabilityMatrix, count: usize) -> Result<Spectrum> {
    let n = a.dim();
    if count > n {
        return Err(Error::InvalidInput(format!(
            "requested {count} eigenpairs of a {n}x{n} matrix"
        )));
    }
    let evd = a
        .to_dense()
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let vecs = evd.U();
    let eigenvalues: Vec<f64> = (0..n).map(|i| s[i]).collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    let modes = (0..count)
        .map(|j| {
            let u: Vec<f64> = (0..n).map(|i| vecs[(i, j)]).collect();
            let (lambda, u, residual) = refine(a, eigenvalues[j], u);
            EigenMode {
                k: a.k,
                j,
                lambda,
                u: canonical_sign(u),
                label: ModeLabel::Generic,
                residual,
            }
        })
        .collect();
    Ok(Spectrum {
        k: a.k,
        eigenvalues,
        modes,
    })
}

/// The `count` lowest eigenpairs of `a`, ascending, labelled `Generic`.
pub fn spectrum(a: &StabilityMatrix, count: usize) -> Result<Vec<EigenMode>> {
    full_spectrum(a, count).map(|s| s.modes)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(a: &StabilityMatrix, lambda: f64, u: &[f64]) -> f64 {
    let au = a.apply(u);
    au.iter()
        .zip(u)
        .map(|(x, y)| (x - lambda * y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// A few steps of shifted inverse iteration; the dense solver's backward
/// error scales with the largest eigenvalue, which is large for fine curves.
fn refine(a: &StabilityMatrix, lambda: f64, u: Vec<f64>) -> (f64, Vec<f64>, f64) {
    let mut best = (lambda, residual(a, lambda, &u), u);
    for _ in 0..3 {
        if best.1 <= RESIDUAL_TARGET {
            break;
        }
        let shifted: Vec<f64> = a.diag.iter().map(|d| d - best.0).collect();
        let x = linalg::cyclic_solve(&shifted, &a.off, &best.2);
        let nx = norm(&x);
        if !(nx.is_finite() && nx > 0.0) {
            break;
        }
        let mut v: Vec<f64> = x.iter().map(|t| t / nx).collect();
        // keep the orientation of the previous iterate
        if v.iter().zip(&best.2).map(|(p, q)| p * q).sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|t| *t = -*t);
        }
        let lam = a.quadratic_form(&v);
        let res = residual(a, lam, &v);
        if res < best.1 {
            best = (lam, res, v);
        } else {
            break;
        }
    }
    (best.0, best.2, best.1)
}

fn canonical_sign(mut u: Vec<f64>) -> Vec<f64> {
    let mut big = 0;
    for (i, v) in u.iter().enumerate() {
        if v.abs() > u[big].abs() {
            big = i;
        }
    }
    if u[big] < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    u
}

/// Continuum eigenfunctions with known eigenvalues, sampled on the curve.
pub fn templates(
    k: u32,
    curve: &DiscreteCurve,
    normals: &NormalField,
) -> Vec<(ModeLabel, Vec<f64>)> {
    let pts = curve.points();
    let ns = &normals.normals;
    let sample = |f: &dyn Fn(usize) -> f64| (0..pts.len()).map(f).collect::<Vec<f64>>();
    match k {
        0 => vec![
            // mean curvature H = <x, n>/2 on a shrinker
            (ModeLabel::Dilation, sample(&|m| 0.5 * pts[m].dot(ns[m]))),
            (ModeLabel::VerticalTranslation, sample(&|m| ns[m][1])),
        ],
        1 => vec![
            (ModeLabel::HorizontalTranslation, sample(&|m| ns[m][0])),
            (
                ModeLabel::Rotation,
                sample(&|m| pts[m].r * ns[m][1] - pts[m].z * ns[m][0]),
            ),
            (ModeLabel::SigmaInverse, sample(&|m| 1.0 / sigma(pts[m]))),
        ],
        _ => Vec::new(),
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    dot / (norm(a) * norm(b))
}

/// Label of the best-matching template with |cosine| at least
/// [`LABEL_THRESHOLD`], otherwise `Generic`.
pub fn classify(mode: &EigenMode, curve: &DiscreteCurve, normals: &NormalField) -> ModeLabel {
    templates(mode.k, curve, normals)
        .into_iter()
        .map(|(label, t)| (label, cosine(&mode.u, &t).abs()))
        .filter(|(_, c)| *c >= LABEL_THRESHOLD)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(ModeLabel::Generic, |(label, _)| label)
}

/// Spectrum of `-L_k` with every computed mode classified.
pub fn labelled_spectrum(
    l0: &StabilityMatrix,
    curve: &DiscreteCurve,
    normals: &NormalField,
    k: u32,
    count: usize,
) -> Result<Spectrum> {
    let a = assemble_lk(l0, curve, k);
    let mut spec = full_spectrum(&a, count.min(a.dim()))?;
    for mode in &mut spec.modes {
        mode.label = classify(mode, curve, normals);
    }
    Ok(spec)
}

/// JSON spectrum report.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    #[serde(rename = "M")]
    pub m: usize,
    pub k: u32,
    pub eigenvalues: Vec<f64>,
    pub labels: Vec<ModeLabel>,
    pub residuals: Vec<f64>,
}

impl SpectrumReport {
    pub fn new(m: usize, spec: &Spectrum) -> Self {
        Self {
            m,
            k: spec.k,
            eigenvalues: spec.modes.iter().map(|e| e.lambda).collect(),
            labels: spec.modes.iter().map(|e| e.label).collect(),
            residuals: spec.modes.iter().map(|e| e.residual).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeModes {
    pub k: u32,
    /// 1 for `k = 0`; 2 for `k >= 1` (the `cos k theta` and `sin k theta` copies).
    pub multiplicity: usize,
    pub eigenvalues: Vec<f64>,
    pub labels: Vec<ModeLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcludedMode {
    pub k: u32,
    pub j: usize,
    pub label: ModeLabel,
    pub lambda: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexReport {
    #[serde(rename = "M")]
    pub m: usize,
    pub per_k: Vec<NegativeModes>,
    pub excluded: Vec<ExcludedMode>,
    #[serde(rename = "total")]
    pub total_negative_with_multiplicity: usize,
    pub index: usize,
    /// First mode whose lowest eigenvalue cleared the stopping threshold.
    pub stop_k: u32,
    pub stop_lambda: f64,
}

impl IndexReport {
    pub fn excluded_count(&self) -> usize {
        self.excluded.iter().map(|e| e.multiplicity).sum()
    }

    pub fn summary(&self) -> String {
        format!(
            "index {} ({} negative, {} excluded)",
            self.index,
            self.total_negative_with_multiplicity,
            self.excluded_count()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexOptions {
    /// Eigenvectors computed (and labelled) per mode; raised automatically
    /// to cover every negative eigenvalue.
    pub count: usize,
    pub k_max: u32,
}

impl Default for IndexOptions {
    fn default() -> Self {
        Self {
            count: 8,
            k_max: 64,
        }
    }
}

pub fn compute_index(curve: &DiscreteCurve) -> Result<IndexReport> {
    compute_index_with(curve, IndexOptions::default())
}

/// Counts negative eigenvalues of `-L_k` for `k = 0, 1, ...` until the lowest
/// eigenvalue of some `k` reaches [`STOP_THRESHOLD`], then removes the
/// dilation and the three translations.
pub fn compute_index_with(curve: &DiscreteCurve, opts: IndexOptions) -> Result<IndexReport> {
    let normals = normal_field(curve)?;
    let l0 = assemble_l0(curve, &normals)?;
    let mut per_k = Vec::new();
    let mut excluded = Vec::new();
    let mut stop = None;

    for k in 0..=opts.k_max {
        let a = assemble_lk(&l0, curve, k);
        let mut spec = full_spectrum(&a, opts.count.min(a.dim()))?;
        let negatives = spec.eigenvalues.iter().take_while(|v| **v < 0.0).count();
        if negatives > spec.modes.len() {
            spec = full_spectrum(&a, negatives)?;
        }
        for mode in &mut spec.modes {
            mode.label = classify(mode, curve, &normals);
        }
        let multiplicity = if k == 0 { 1 } else { 2 };
        let neg: Vec<&EigenMode> = spec.modes.iter().filter(|e| e.lambda < 0.0).collect();
        for e in &neg {
            if e.label.is_excluded() {
                excluded.push(ExcludedMode {
                    k,
                    j: e.j,
                    label: e.label,
                    lambda: e.lambda,
                    multiplicity,
                });
            }
        }
        if !neg.is_empty() {
            per_k.push(NegativeModes {
                k,
                multiplicity,
                eigenvalues: neg.iter().map(|e| e.lambda).collect(),
                labels: neg.iter().map(|e| e.label).collect(),
            });
        }
        if spec.eigenvalues[0] >= STOP_THRESHOLD {
            stop = Some((k, spec.eigenvalues[0]));
            break;
        }
    }
    let (stop_k, stop_lambda) = stop.ok_or(Error::UnboundedIndex { k_max: opts.k_max })?;

    let expect = [
        (0, ModeLabel::Dilation),
        (0, ModeLabel::VerticalTranslation),
        (1, ModeLabel::HorizontalTranslation),
    ];
    for (k, label) in expect {
        let found = excluded
            .iter()
            .filter(|e| e.k == k && e.label == label)
            .count();
        if found != 1 {
            return Err(Error::ExclusionMismatch(format!(
                "expected one negative {label} mode at k = {k}, found {found}"
            )));
        }
    }
    if excluded.len() != expect.len() {
        return Err(Error::ExclusionMismatch(format!(
            "unexpected excluded modes: {:?}",
            excluded.iter().map(|e| (e.k, e.label)).collect::<Vec<_>>()
        )));
    }

    let total: usize = per_k
        .iter()
        .map(|p| p.multiplicity * p.eigenvalues.len())
        .sum();
    let removed: usize = excluded.iter().map(|e| e.multiplicity).sum();
    Ok(IndexReport {
        m: curve.len(),
        per_k,
        excluded,
        total_negative_with_multiplicity: total,
        index: total - removed,
        stop_k,
        stop_lambda,
    })
}

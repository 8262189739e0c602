//! Resolution studies: solve at several `M`, track eigenvalues and the
//! entropy, and fit `log10 |estimate - truth|` against `log10 M`.
//!
//! When the truth is not known it is taken to be the candidate value whose
//! regression has the smallest residual.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::geodesic::{solve_geodesic, DiscreteCurve, SolveConfig};
use crate::io::fmt17;
use crate::spectral::eigenvalues;
use crate::stability::{assemble_l0, assemble_lk, normal_field};
use crate::{discrete_length, Error, Result};

pub const DEFAULT_M_LIST: [usize; 5] = [128, 256, 512, 1024, 2048];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `lambda_j` of `-L_k`, counted from 0 without multiplicity.
    Eigenvalue { k: u32, j: usize },
    /// Discrete length of the solved curve.
    Entropy,
}

impl Quantity {
    /// The 16 eigenvalues `k = 0..3`, `j = 0..3`.
    pub fn table() -> Vec<Quantity> {
        (0..4)
            .flat_map(|k| (0..4).map(move |j| Quantity::Eigenvalue { k, j }))
            .collect()
    }

    /// Exact continuum values of the modes generated by symmetries and by
    /// the `sigma^{-1}` eigenfunction.
    pub fn known_true_value(self) -> Option<f64> {
        match self {
            Quantity::Eigenvalue { k: 0, j: 1 } | Quantity::Eigenvalue { k: 1, j: 0 } => Some(-1.0),
            Quantity::Eigenvalue { k: 0, j: 2 } | Quantity::Eigenvalue { k: 1, j: 1 } => Some(-0.5),
            Quantity::Eigenvalue { k: 1, j: 2 } => Some(0.0),
            _ => None,
        }
    }

    pub fn name(self) -> String {
        match self {
            Quantity::Eigenvalue { k, j } => format!("k{k}_lambda{j}"),
            Quantity::Entropy => "entropy".into(),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Ordinary least squares `y = slope x + intercept`; returns
/// `(slope, intercept, sum of squared residuals)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    (slope, intercept, rss)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub true_value: f64,
    /// Sum of squared residuals of the base-10 regression.
    pub residual: f64,
}

fn regress(ms: &[usize], estimates: &[f64], v: f64) -> Option<(f64, f64, f64)> {
    let xs: Vec<f64> = ms.iter().map(|&m| (m as f64).log10()).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| (e - v).abs().log10()).collect();
    ys.iter()
        .all(|y| y.is_finite())
        .then(|| least_squares(&xs, &ys))
}

/// Golden-section minimization of `f` on `[a, b]`.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Fits `log10 |estimate - v|` against `log10 M`. With `true_value` absent,
/// `v` minimizes the regression residual over the estimate range widened by
/// ten times its spread on each side.
///
/// The residual tends to `+inf` at each estimate, so the search range is cut
/// at the estimates and every piece is searched. The well around the truth
/// is narrow next to the finest estimate, so each piece is scanned on a grid
/// refined geometrically toward both ends and every local minimum of the
/// scan is refined by golden-section search.
pub fn fit_loglog(ms: &[usize], estimates: &[f64], true_value: Option<f64>) -> Result<LogLogFit> {
    if ms.len() < 3 || ms.len() != estimates.len() {
        return Err(Error::InvalidInput(format!(
            "need at least 3 resolutions with one estimate each, got {} and {}",
            ms.len(),
            estimates.len()
        )));
    }
    if let Some(v) = true_value {
        let (slope, intercept, residual) = regress(ms, estimates, v).ok_or_else(|| {
            Error::DegenerateFit(format!("an estimate equals the true value {v}"))
        })?;
        return Ok(LogLogFit {
            slope,
            intercept,
            true_value: v,
            residual,
        });
    }

    let mut sorted = estimates.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let spread = hi - lo;
    if !(spread > 0.0) {
        return Err(Error::DegenerateFit("all estimates are equal".into()));
    }
    let mut cuts = vec![lo - 10.0 * spread];
    cuts.extend(&sorted);
    cuts.push(hi + 10.0 * spread);

    let cost = |v: f64| regress(ms, estimates, v).map_or(f64::INFINITY, |r| r.2);
    let mut best: Option<(f64, f64)> = None;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut grid: Vec<f64> = (0..=120)
            .flat_map(|i| {
                let t = 0.5 * 10f64.powf(-0.1 * f64::from(i));
                [a + t * (b - a), b - t * (b - a)]
            })
            .filter(|v| *v > a && *v < b)
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let vals: Vec<f64> = grid.iter().map(|&v| cost(v)).collect();
        for i in 0..grid.len() {
            let left_ok = i == 0 || vals[i] <= vals[i - 1];
            let right_ok = i + 1 == grid.len() || vals[i] <= vals[i + 1];
            if !(left_ok && right_ok) {
                continue;
            }
            let left = if i == 0 { a } else { grid[i - 1] };
            let right = if i + 1 == grid.len() { b } else { grid[i + 1] };
            let v = golden_section(cost, left, right);
            let c = cost(v);
            if best.is_none_or(|(_, bc)| c < bc) {
                best = Some((v, c));
            }
        }
    }
    let (v, _) = best.ok_or_else(|| Error::DegenerateFit("empty search interval".into()))?;
    let (slope, intercept, residual) = regress(ms, estimates, v)
        .ok_or_else(|| Error::DegenerateFit(format!("candidate {v} equals an estimate")))?;
    Ok(LogLogFit {
        slope,
        intercept,
        true_value: v,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub quantity: Quantity,
    pub m_list: Vec<usize>,
    pub estimates: Vec<f64>,
    pub true_value: f64,
    pub true_value_known: bool,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    /// `estimate - true_value` per `M`.
    pub errors: Vec<f64>,
}

impl ConvergenceStudy {
    pub fn from_estimates(quantity: Quantity, m_list: &[usize], estimates: &[f64]) -> Result<Self> {
        let known = quantity.known_true_value();
        let fit = fit_loglog(m_list, estimates, known)?;
        Ok(Self {
            quantity,
            m_list: m_list.to_vec(),
            estimates: estimates.to_vec(),
            true_value: fit.true_value,
            true_value_known: known.is_some(),
            slope: fit.slope,
            intercept: fit.intercept,
            residual: fit.residual,
            errors: estimates.iter().map(|e| e - fit.true_value).collect(),
        })
    }

    /// Signed error at the finest resolution.
    pub fn final_error(&self) -> f64 {
        *self
            .errors
            .last()
            .expect("studies have at least 3 resolutions")
    }

    pub fn final_estimate(&self) -> f64 {
        *self
            .estimates
            .last()
            .expect("studies have at least 3 resolutions")
    }

    /// Mean of `|e(M_i)| / |e(M_{i+1})|` over consecutive resolutions.
    pub fn mean_error_ratio(&self) -> f64 {
        let ratios: Vec<f64> = self
            .errors
            .windows(2)
            .map(|w| (w[0] / w[1]).abs())
            .collect();
        ratios.iter().sum::<f64>() / ratios.len() as f64
    }

    /// Rows `M,abs_error` for a log-log plot.
    pub fn loglog_csv(&self) -> String {
        let mut out = String::from("M,abs_error\n");
        for (m, e) in self.m_list.iter().zip(&self.errors) {
            out.push_str(&format!("{m},{}\n", fmt17(e.abs())));
        }
        out
    }
}

fn check_m_list(m_list: &[usize]) -> Result<()> {
    if m_list.len() < 3 || m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(format!(
            "resolutions must be strictly ascending with at least 3 entries, got {m_list:?}"
        )));
    }
    Ok(())
}

/// Values of `quantities` on one solved curve.
pub fn measure(curve: &DiscreteCurve, quantities: &[Quantity]) -> Result<Vec<f64>> {
    let mut needed: BTreeMap<u32, usize> = BTreeMap::new();
    for q in quantities {
        if let Quantity::Eigenvalue { k, j } = *q {
            let e = needed.entry(k).or_default();
            *e = (*e).max(j + 1);
        }
    }
    let mut spectra = BTreeMap::new();
    if !needed.is_empty() {
        let l0 = assemble_l0(curve, &normal_field(curve)?)?;
        for (&k, &count) in &needed {
            let values = eigenvalues(&assemble_lk(&l0, curve, k))?;
            if values.len() < count {
                return Err(Error::InvalidInput(format!(
                    "{count} eigenvalues requested from a {}-point curve",
                    values.len()
                )));
            }
            spectra.insert(k, values);
        }
    }
    Ok(quantities
        .iter()
        .map(|q| match *q {
            Quantity::Eigenvalue { k, j } => spectra[&k][j],
            Quantity::Entropy => discrete_length(curve),
        })
        .collect())
}

/// Studies from curves already solved at ascending resolutions.
pub fn run_study_on_curves(
    quantities: &[Quantity],
    curves: &[&DiscreteCurve],
) -> Result<Vec<ConvergenceStudy>> {
    let m_list: Vec<usize> = curves.iter().map(|c| c.len()).collect();
    check_m_list(&m_list)?;
    let per_m = curves
        .iter()
        .map(|c| measure(c, quantities))
        .collect::<Result<Vec<_>>>()?;
    quantities
        .iter()
        .enumerate()
        .map(|(i, &q)| {
            let estimates: Vec<f64> = per_m.iter().map(|v| v[i]).collect();
            ConvergenceStudy::from_estimates(q, &m_list, &estimates)
        })
        .collect()
}

/// Solves one curve per resolution with `base` (its point count replaced)
/// and fits every quantity.
pub fn run_study(
    quantities: &[Quantity],
    m_list: &[usize],
    base: &SolveConfig,
) -> Result<Vec<ConvergenceStudy>> {
    check_m_list(m_list)?;
    let curves = m_list
        .iter()
        .map(|&m| {
            solve_geodesic(&SolveConfig {
                points: m,
                ..base.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    run_study_on_curves(quantities, &curves.iter().collect::<Vec<_>>())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub k: u32,
    pub j: usize,
    pub computed: f64,
    pub true_value: f64,
    pub known: bool,
    /// `computed - true_value`.
    pub error: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    /// Resolution of the `computed` column.
    pub m: usize,
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,j,computed,true_value,known,error,slope\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.k,
                r.j,
                fmt17(r.computed),
                fmt17(r.true_value),
                r.known,
                fmt17(r.error),
                fmt17(r.slope)
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:>2} {:>8} {:>14} {:>14} {:>10} {:>8}\n",
            "k",
            "lambda",
            format!("M = {}", self.m),
            "true value",
            "error",
            "slope"
        );
        for r in &self.rows {
            let truth = if r.known {
                format!("{:.1}", r.true_value)
            } else {
                format!("{:.8}", r.true_value)
            };
            out.push_str(&format!(
                "{:>2} {:>8} {:>14.8} {:>14} {:>10.1e} {:>8.3}\n",
                r.k,
                format!("lambda{}", r.j),
                r.computed,
                truth,
                r.error,
                r.slope
            ));
        }
        out
    }
}

/// Eigenvalue rows sorted by `(k, j)`; other quantities are skipped.
pub fn table_report(studies: &[ConvergenceStudy]) -> TableReport {
    let mut rows: Vec<TableRow> = studies
        .iter()
        .filter_map(|s| match s.quantity {
            Quantity::Eigenvalue { k, j } => Some(TableRow {
                k,
                j,
                computed: s.final_estimate(),
                true_value: s.true_value,
                known: s.true_value_known,
                error: s.final_error(),
                slope: s.slope,
            }),
            Quantity::Entropy => None,
        })
        .collect();
    rows.sort_by_key(|r| (r.k, r.j));
    TableReport {
        m: studies
            .first()
            .and_then(|s| s.m_list.last().copied())
            .unwrap_or(0),
        rows,
    }
}

/// Long-format rows `quantity,M,estimate,true_value,abs_error`.
pub fn study_csv(studies: &[ConvergenceStudy]) -> String {
    let mut out = String::from("quantity,M,estimate,true_value,abs_error\n");
    for s in studies {
        for ((m, e), err) in s.m_list.iter().zip(&s.estimates).zip(&s.errors) {
            out.push_str(&format!(
                "{},{m},{},{},{}\n",
                s.quantity,
                fmt17(*e),
                fmt17(s.true_value),
                fmt17(err.abs())
            ));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySummary {
    pub quantity: String,
    pub true_value: f64,
    pub true_value_known: bool,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub final_error: f64,
}

pub fn study_summary(studies: &[ConvergenceStudy]) -> Vec<StudySummary> {
    studies
        .iter()
        .map(|s| StudySummary {
            quantity: s.quantity.name(),
            true_value: s.true_value,
            true_value_known: s.true_value_known,
            slope: s.slope,
            intercept: s.intercept,
            residual: s.residual,
            final_error: s.final_error(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MS: [usize; 5] = DEFAULT_M_LIST;

    fn synthetic(c: f64, v: f64) -> Vec<f64> {
        MS.iter().map(|&m| c / (m * m) as f64 + v).collect()
    }

    #[test]
    fn least_squares_line() {
        let (s, i, r) = least_squares(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((s - 2.0).abs() < 1e-15 && (i - 1.0).abs() < 1e-15 && r < 1e-28);
    }

    #[test]
    fn known_truth_recovers_slope() {
        for (c, v) in [(3.0, -1.0), (-40.0, 0.5), (0.7, 0.0)] {
            let fit = fit_loglog(&MS, &synthetic(c, v), Some(v)).unwrap();
            assert!((fit.slope + 2.0).abs() < 1e-6, "{fit:?}");
            assert!(fit.residual < 1e-20);
        }
    }

    #[test]
    fn unknown_truth_recovered() {
        for (c, v) in [(3.0, -3.7), (-40.0, 1.726), (0.7, 0.11), (-5.0, -0.48)] {
            let fit = fit_loglog(&MS, &synthetic(c, v), None).unwrap();
            assert!((fit.true_value - v).abs() < 1e-8, "{fit:?}");
            assert!((fit.slope + 2.0).abs() < 1e-6, "{fit:?}");
        }
    }

    #[test]
    fn degenerate_fits() {
        let e = synthetic(1.0, 0.0);
        assert!(matches!(
            fit_loglog(&MS, &e, Some(e[2])),
            Err(Error::DegenerateFit(_))
        ));
        assert!(matches!(
            fit_loglog(&MS, &[1.0; 5], None),
            Err(Error::DegenerateFit(_))
        ));
        assert!(matches!(
            fit_loglog(&MS[..2], &e[..2], None),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn known_values() {
        assert_eq!(
            Quantity::Eigenvalue { k: 0, j: 1 }.known_true_value(),
            Some(-1.0)
        );
        assert_eq!(
            Quantity::Eigenvalue { k: 1, j: 2 }.known_true_value(),
            Some(0.0)
        );
        assert_eq!(Quantity::Eigenvalue { k: 0, j: 0 }.known_true_value(), None);
        assert_eq!(Quantity::Entropy.known_true_value(), None);
        assert_eq!(Quantity::table().len(), 16);
    }

    #[test]
    fn table_signs_and_order() {
        let studies: Vec<ConvergenceStudy> = [(1u32, 1usize, 2.0, -0.5), (0, 3, -7.0, 0.99)]
            .iter()
            .map(|&(k, j, c, v)| {
                ConvergenceStudy::from_estimates(
                    Quantity::Eigenvalue { k, j },
                    &MS,
                    &synthetic(c, v),
                )
                .unwrap()
            })
            .collect();
        let t = table_report(&studies);
        assert_eq!((t.rows[0].k, t.rows[0].j), (0, 3));
        assert!(t.rows[0].error < 0.0 && t.rows[1].error > 0.0);
        assert!(t.rows[1].known && !t.rows[0].known);
        assert_eq!(t.to_csv().lines().count(), 3);
        assert!((studies[0].mean_error_ratio() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_m_list() {
        assert!(check_m_list(&[128, 256]).is_err());
        assert!(check_m_list(&[256, 128, 512]).is_err());
        assert!(check_m_list(&[128, 256, 512]).is_ok());
    }
}

//! Symmetric cyclic tridiagonal matrices: entries on the diagonal and on the
//! first off-diagonals, with the corners `(0, n-1)` and `(n-1, 0)` closing the
//! cycle. `off[m]` couples `m` and `(m + 1) % n`.

use faer::linalg::solvers::Solve;
use faer::Mat;

pub(crate) fn matvec(diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut y: Vec<f64> = diag.iter().zip(x).map(|(d, v)| d * v).collect();
    for m in 0..n {
        let p = (m + 1) % n;
        y[m] += off[m] * x[p];
        y[p] += off[m] * x[m];
    }
    y
}

pub(crate) fn to_dense(diag: &[f64], off: &[f64]) -> Mat<f64> {
    let n = diag.len();
    let mut a = Mat::<f64>::zeros(n, n);
    for m in 0..n {
        a[(m, m)] += diag[m];
        let p = (m + 1) % n;
        a[(m, p)] += off[m];
        a[(p, m)] += off[m];
    }
    a
}

/// Tridiagonal solve with partial pivoting (the `gtsv` elimination).
/// `sub[i]` is entry `(i+1, i)`, `sup[i]` is entry `(i, i+1)`.
fn tridiagonal_solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let (dl, mut d, mut du, mut b) = (sub.to_vec(), diag.to_vec(), sup.to_vec(), rhs.to_vec());
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                return None;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    if d[n - 1] == 0.0 {
        return None;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n > 1 {
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    Some(x)
}

fn sherman_morrison(diag: &[f64], off: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    let corner = off[n - 1];
    let gamma = if diag[0] != 0.0 { -diag[0] } else { -1.0 };
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= corner * corner / gamma;
    let band = &off[..n - 1];
    let y = tridiagonal_solve(band, &d, band, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = corner;
    let z = tridiagonal_solve(band, &d, band, &u)?;
    let vy = y[0] + corner / gamma * y[n - 1];
    let vz = z[0] + corner / gamma * z[n - 1];
    let denom = 1.0 + vz;
    if denom == 0.0 || !denom.is_finite() {
        return None;
    }
    let f = vy / denom;
    Some(y.iter().zip(&z).map(|(a, b)| a - f * b).collect())
}

/// Solves `A x = rhs`. Falls back to a dense LU when the O(n) route loses
/// accuracy (Sherman-Morrison breaks down when the uncorrected band is
/// singular).
pub(crate) fn cyclic_solve(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    if n >= 3 {
        if let Some(x) = sherman_morrison(diag, off, rhs) {
            let ax = matvec(diag, off, &x);
            let scale = diag.iter().chain(off).fold(0.0f64, |m, v| m.max(v.abs()));
            let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let bn = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let res = ax
                .iter()
                .zip(rhs)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if x.iter().all(|v| v.is_finite()) && res <= 1e-11 * (3.0 * scale * xn + bn) {
                return x;
            }
        }
    }
    let a = to_dense(diag, off);
    let b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
    let x = a.partial_piv_lu().solve(&b);
    (0..n).map(|i| x[(i, 0)]).collect()
}

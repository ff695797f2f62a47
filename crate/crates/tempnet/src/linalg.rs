//! Small least-squares helper shared by the stationarity tests and the
//! ARIMA estimators.

use nalgebra::{DMatrix, DVector};

pub(crate) struct OlsFit {
    pub coeffs: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Ordinary least squares of `y` on the rows of `x`. Returns `None` when the
/// normal equations are singular (collinear or constant regressors).
pub(crate) fn ols(x: &[Vec<f64>], y: &[f64]) -> Option<OlsFit> {
    let n = x.len();
    if n == 0 || n != y.len() {
        return None;
    }
    let k = x[0].len();
    if n <= k {
        return None;
    }
    let xm = DMatrix::from_fn(n, k, |i, j| x[i][j]);
    let yv = DVector::from_column_slice(y);
    let xtx = xm.transpose() * &xm;
    let xty = xm.transpose() * &yv;
    let xtx_inv = xtx.clone().try_inverse()?;
    // reject numerically singular systems the inverse did not catch
    if xtx_inv.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let ident_err = (&xtx * &xtx_inv - DMatrix::<f64>::identity(k, k)).abs().max();
    if !ident_err.is_finite() || ident_err > 1e-6 {
        return None;
    }
    let beta = &xtx_inv * xty;
    let fitted = &xm * &beta;
    let residuals: Vec<f64> = (0..n).map(|i| y[i] - fitted[i]).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let sigma2 = ssr / (n - k) as f64;
    let std_errors = (0..k)
        .map(|j| (sigma2 * xtx_inv[(j, j)]).max(0.0).sqrt())
        .collect();
    Some(OlsFit {
        coeffs: beta.iter().copied().collect(),
        std_errors,
        residuals,
    })
}

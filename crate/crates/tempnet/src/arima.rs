//! Sliding-window ARIMA(p,d,q) forecasting.
//!
//! Estimation is two-stage Hannan-Rissanen (a long autoregression to proxy
//! the innovations, then a lagged regression) followed by a conditional
//! sum-of-squares refinement with Nelder-Mead. AR stationarity and MA
//! invertibility are enforced by optimizing in partial-autocorrelation
//! space, mapped through tanh.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::ols;
use crate::stationarity::{kpss_test, Decision};

pub const MAX_P: usize = 3;
pub const MAX_Q: usize = 3;
pub const MAX_D: usize = 2;

const NM_MAX_ITER: usize = 200;
const NM_TOL: f64 = 1e-8;

/// A fitted ARIMA model for one training window.
#[derive(Debug, Clone)]
pub struct ArimaModel {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub intercept: f64,
    pub innovation_variance: f64,
}

impl ArimaModel {
    /// The (0,1,0) zero-drift fallback: forecasts the last observed value.
    pub fn random_walk() -> Self {
        ArimaModel {
            p: 0,
            d: 1,
            q: 0,
            ar: Vec::new(),
            ma: Vec::new(),
            intercept: 0.0,
            innovation_variance: 0.0,
        }
    }
}

/// Outcome of one sliding-window forecast step.
#[derive(Debug, Clone)]
pub struct PredictionRecord {
    pub t: usize,
    pub predicted: f64,
    pub original: f64,
    /// None when the original value is 0 and the percentage error is
    /// undefined; such records are excluded from error aggregates.
    pub pct_error: Option<f64>,
    pub order: (usize, usize, usize),
    /// Filled in by the spectral suitability filter when enabled.
    pub suitable: Option<bool>,
}

/// d-th order forward difference; the length shrinks by d.
pub fn difference(y: &[f64], d: usize) -> Result<Vec<f64>> {
    if y.len() <= d {
        return Err(Error::Argument(format!(
            "cannot difference a series of length {} {d} times",
            y.len()
        )));
    }
    let mut z = y.to_vec();
    for _ in 0..d {
        z = z.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(z)
}

/// Conditional sum of squares of an ARMA(p,q) recursion over `z`, with
/// pre-sample innovations fixed at zero. Returns (css, residuals); the
/// residuals cover t in p..z.len().
fn css_residuals(z: &[f64], ar: &[f64], ma: &[f64], c: f64) -> (f64, Vec<f64>) {
    let p = ar.len();
    let n = z.len();
    let mut resid = vec![0.0; n];
    let mut css = 0.0;
    for t in p..n {
        let mut pred = c;
        for (i, &a) in ar.iter().enumerate() {
            pred += a * z[t - 1 - i];
        }
        for (j, &b) in ma.iter().enumerate() {
            if t >= j + 1 {
                pred += b * resid[t - 1 - j];
            }
        }
        let e = z[t] - pred;
        resid[t] = e;
        css += e * e;
    }
    (css, resid)
}

/// Durbin-Levinson: partial autocorrelations -> AR coefficients. Any pacf
/// vector in (-1,1)^p yields a stationary AR polynomial.
fn pacf_to_ar(pacf: &[f64]) -> Vec<f64> {
    let p = pacf.len();
    let mut phi = vec![0.0; p];
    for k in 0..p {
        let mut next = phi.clone();
        next[k] = pacf[k];
        for j in 0..k {
            next[j] = phi[j] - pacf[k] * phi[k - 1 - j];
        }
        phi = next;
    }
    phi
}

/// Inverse of [`pacf_to_ar`]; None when the coefficients are not stationary.
fn ar_to_pacf(ar: &[f64]) -> Option<Vec<f64>> {
    let p = ar.len();
    let mut phi = ar.to_vec();
    let mut pacf = vec![0.0; p];
    for k in (0..p).rev() {
        let r = phi[k];
        if r.abs() >= 1.0 {
            return None;
        }
        pacf[k] = r;
        let denom = 1.0 - r * r;
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = (prev[j] + r * prev[k - 1 - j]) / denom;
        }
    }
    Some(pacf)
}

/// Map the unconstrained optimizer vector to (ar, ma, c). MA invertibility
/// reuses the AR stationarity map on the negated polynomial.
fn unpack(params: &[f64], p: usize, q: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let ar_pacf: Vec<f64> = params[..p].iter().map(|x| x.tanh()).collect();
    let ma_pacf: Vec<f64> = params[p..p + q].iter().map(|x| x.tanh()).collect();
    let ar = pacf_to_ar(&ar_pacf);
    let ma: Vec<f64> = pacf_to_ar(&ma_pacf).iter().map(|v| -v).collect();
    (ar, ma, params[p + q])
}

fn atanh_clamped(r: f64) -> f64 {
    r.clamp(-0.98, 0.98).atanh()
}

/// Hannan-Rissanen initialization: (ar, ma, c) estimates, possibly
/// non-stationary, or None when the regressions are singular.
fn hannan_rissanen(z: &[f64], p: usize, q: usize) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let n = z.len();
    if q == 0 {
        // pure AR: one lagged regression is the CSS minimizer already
        let rows: Vec<Vec<f64>> = (p..n)
            .map(|t| {
                let mut row = vec![1.0];
                row.extend((0..p).map(|i| z[t - 1 - i]));
                row
            })
            .collect();
        let resp: Vec<f64> = z[p..].to_vec();
        let fit = ols(&rows, &resp)?;
        return Some((fit.coeffs[1..].to_vec(), Vec::new(), fit.coeffs[0]));
    }

    // stage 1: long AR to estimate the innovations
    let h = (2 * (p + q) + 2).min(n / 4).max(1);
    let rows: Vec<Vec<f64>> = (h..n)
        .map(|t| {
            let mut row = vec![1.0];
            row.extend((0..h).map(|i| z[t - 1 - i]));
            row
        })
        .collect();
    let resp: Vec<f64> = z[h..].to_vec();
    let long_ar = ols(&rows, &resp)?;
    let mut innov = vec![0.0; n];
    innov[h..].copy_from_slice(&long_ar.residuals);

    // stage 2: regress z_t on its lags and the estimated innovations
    let start = h.max(p).max(q);
    let rows: Vec<Vec<f64>> = (start..n)
        .map(|t| {
            let mut row = vec![1.0];
            row.extend((0..p).map(|i| z[t - 1 - i]));
            row.extend((0..q).map(|j| innov[t - 1 - j]));
            row
        })
        .collect();
    let resp: Vec<f64> = z[start..].to_vec();
    let fit = ols(&rows, &resp)?;
    Some((
        fit.coeffs[1..1 + p].to_vec(),
        fit.coeffs[1 + p..].to_vec(),
        fit.coeffs[0],
    ))
}

/// Derivative-free minimizer (Nelder-Mead) used for the CSS refinement.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    steps: &[f64],
    max_iter: usize,
    tol: f64,
) -> Vec<f64> {
    let dim = x0.len();
    if dim == 0 {
        return Vec::new();
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let fx = f(&x);
        simplex.push((x, fx));
    }

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= tol * (1.0 + best.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let at = |coef: f64| -> Vec<f64> {
            (0..dim)
                .map(|j| centroid[j] + coef * (centroid[j] - simplex[dim].0[j]))
                .collect()
        };
        let reflected = at(1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = at(2.0);
            let fe = f(&expanded);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let contracted = at(-0.5);
            let fc = f(&contracted);
            if fc < simplex[dim].1 {
                simplex[dim] = (contracted, fc);
            } else {
                // shrink toward the best vertex
                let best_x = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for j in 0..dim {
                        v.0[j] = best_x[j] + 0.5 * (v.0[j] - best_x[j]);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
    }
    simplex
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap()
        .0
}

/// Coefficients fitted on an already-differenced series.
#[derive(Debug, Clone)]
pub struct ArmaFit {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub intercept: f64,
    pub sigma2: f64,
}

/// Fit an ARMA(p,q) to `z`. Returns None for a degenerate window (constant
/// or collinear), in which case the caller substitutes a naive forecast.
pub fn fit_arma(z: &[f64], p: usize, q: usize) -> Result<Option<ArmaFit>> {
    let n = z.len();
    if n < 20.max(4 * (p + q + 1)) {
        return Err(Error::Argument(format!(
            "window of length {n} too short to fit ARMA({p},{q})"
        )));
    }
    let mean = z.iter().sum::<f64>() / n as f64;
    let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    if p == 0 && q == 0 {
        return Ok(Some(ArmaFit {
            ar: Vec::new(),
            ma: Vec::new(),
            intercept: mean,
            sigma2: var,
        }));
    }
    if var <= f64::EPSILON * mean.abs().max(1.0) {
        return Ok(None); // constant window
    }

    let init = hannan_rissanen(z, p, q);
    let (ar0, ma0, c0) = match init {
        Some(v) => v,
        None => return Ok(None),
    };

    // move to unconstrained space; fall back to zero when the initial
    // estimate is outside the stationary/invertible region
    let ar_x = ar_to_pacf(&ar0)
        .map(|pacf| pacf.iter().map(|&r| atanh_clamped(r)).collect())
        .unwrap_or_else(|| vec![0.0; p]);
    let neg_ma: Vec<f64> = ma0.iter().map(|v| -v).collect();
    let ma_x = ar_to_pacf(&neg_ma)
        .map(|pacf| pacf.iter().map(|&r| atanh_clamped(r)).collect())
        .unwrap_or_else(|| vec![0.0; q]);
    let mut x0 = ar_x;
    x0.extend(ma_x);
    x0.push(c0);

    let sd = var.sqrt();
    let mut steps = vec![0.25; p + q];
    steps.push(0.25 * sd);

    let objective = |x: &[f64]| -> f64 {
        let (ar, ma, c) = unpack(x, p, q);
        css_residuals(z, &ar, &ma, c).0
    };
    let best = nelder_mead(objective, &x0, &steps, NM_MAX_ITER, NM_TOL);
    let (ar, ma, c) = unpack(&best, p, q);
    let (css, _) = css_residuals(z, &ar, &ma, c);
    let dof = n - p;
    Ok(Some(ArmaFit {
        ar,
        ma,
        intercept: c,
        sigma2: css / dof as f64,
    }))
}

/// Choose d with KPSS (smallest d whose differenced window tests
/// stationary, capped at 2), then (p,q) by AICc over the grid. Falls back
/// to (0,1,0) when every fit is degenerate.
pub fn select_order(window: &[f64]) -> Result<ArimaModel> {
    if window.len() < 20 {
        return Err(Error::Argument(format!(
            "window of length {} too short for order selection",
            window.len()
        )));
    }
    let mut d = MAX_D;
    for cand in 0..=MAX_D {
        let z = difference(window, cand)?;
        if z.len() < 20 {
            d = cand;
            break;
        }
        if kpss_test(&z)?.decision == Decision::Stationary {
            d = cand;
            break;
        }
    }
    let z = difference(window, d)?;

    let mut orders: Vec<(usize, usize)> = (0..=MAX_P)
        .flat_map(|p| (0..=MAX_Q).map(move |q| (p, q)))
        .collect();
    // tie-priority: smaller p+q first, then smaller p
    orders.sort_by_key(|&(p, q)| (p + q, p));

    let n = z.len() as f64;
    let mut best: Option<(f64, ArimaModel)> = None;
    for (p, q) in orders {
        if z.len() < 20.max(4 * (p + q + 1)) {
            continue;
        }
        let fit = match fit_arma(&z, p, q)? {
            Some(f) => f,
            None => continue,
        };
        let k = (p + q + 1) as f64;
        if n - k - 1.0 <= 0.0 {
            continue;
        }
        let aicc = n * fit.sigma2.max(1e-300).ln() + 2.0 * k * n / (n - k - 1.0);
        let better = match &best {
            None => true,
            Some((best_aicc, _)) => aicc < best_aicc - 1e-9,
        };
        if better {
            best = Some((
                aicc,
                ArimaModel {
                    p,
                    d,
                    q,
                    ar: fit.ar,
                    ma: fit.ma,
                    intercept: fit.intercept,
                    innovation_variance: fit.sigma2,
                },
            ));
        }
    }
    Ok(best.map(|(_, m)| m).unwrap_or_else(ArimaModel::random_walk))
}

/// One-step-ahead mean forecast: ARMA recursion on the differenced history
/// with in-sample residuals for the MA terms, re-integrated to the original
/// scale.
pub fn forecast_one(model: &ArimaModel, history: &[f64]) -> Result<f64> {
    if history.len() < model.p + model.d + 1 {
        return Err(Error::Argument(format!(
            "history of length {} too short for ARIMA({},{},{})",
            history.len(),
            model.p,
            model.d,
            model.q
        )));
    }
    let z = difference(history, model.d)?;
    let (_, resid) = css_residuals(&z, &model.ar, &model.ma, model.intercept);
    let n = z.len();
    let mut z_hat = model.intercept;
    for (i, &a) in model.ar.iter().enumerate() {
        z_hat += a * z[n - 1 - i];
    }
    for (j, &b) in model.ma.iter().enumerate() {
        if n >= j + 1 {
            z_hat += b * resid[n - 1 - j];
        }
    }
    // invert the differencing: add back the last value of each lower level
    let mut forecast = z_hat;
    let mut level = history.to_vec();
    for _ in 0..model.d {
        forecast += *level.last().expect("non-empty");
        level = level.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(forecast)
}

fn pct_error(original: f64, predicted: f64) -> Option<f64> {
    if original == 0.0 {
        None
    } else {
        Some(100.0 * (original - predicted).abs() / original.abs())
    }
}

/// Sliding-window cross-validation: for each t in `test_range`, train on the
/// w+1 steps t-1-w..=t-1, select an order, fit, and forecast step t.
pub fn sliding_prediction(
    values: &[f64],
    w: usize,
    test_range: std::ops::Range<usize>,
) -> Result<Vec<PredictionRecord>> {
    if test_range.start <= w {
        return Err(Error::Argument(format!(
            "test range must start after the window (start {} <= w {w})",
            test_range.start
        )));
    }
    if test_range.end > values.len() {
        return Err(Error::Argument(format!(
            "test range end {} exceeds series length {}",
            test_range.end,
            values.len()
        )));
    }
    let mut records: Vec<PredictionRecord> = test_range
        .clone()
        .into_par_iter()
        .map(|t| {
            let window = &values[t - 1 - w..=t - 1];
            let (model, predicted) = match select_order(window) {
                Ok(model) => {
                    let f = forecast_one(&model, window)
                        .unwrap_or_else(|_| *window.last().expect("non-empty"));
                    (model, f)
                }
                Err(_) => (ArimaModel::random_walk(), *window.last().expect("non-empty")),
            };
            let original = values[t];
            PredictionRecord {
                t,
                predicted,
                original,
                pct_error: pct_error(original, predicted),
                order: (model.p, model.d, model.q),
                suitable: None,
            }
        })
        .collect();
    records.sort_by_key(|r| r.t);
    Ok(records)
}

/// Fraction of records with defined percentage error at or below the
/// threshold. Records with undefined error are excluded first.
pub fn error_summary(records: &[PredictionRecord], threshold_pct: f64) -> Result<f64> {
    let defined: Vec<f64> = records.iter().filter_map(|r| r.pct_error).collect();
    if defined.is_empty() {
        return Err(Error::Argument(
            "no records with defined percentage error".into(),
        ));
    }
    let hits = defined.iter().filter(|&&e| e <= threshold_pct).count();
    Ok(hits as f64 / defined.len() as f64)
}

/// Mean percentage error over records where it is defined.
pub fn mean_pct_error(records: &[PredictionRecord]) -> Option<f64> {
    let defined: Vec<f64> = records.iter().filter_map(|r| r.pct_error).collect();
    if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gauss(rng: &mut ChaCha8Rng) -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    fn ar1(seed: u64, alpha: f64, t: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = vec![0.0; t];
        for i in 1..t {
            y[i] = alpha * y[i - 1] + gauss(&mut rng);
        }
        y
    }

    #[test]
    fn difference_basics() {
        assert_eq!(difference(&[1.0, 2.0, 3.0, 4.0], 1).unwrap(), vec![1.0, 1.0, 1.0]);
        assert_eq!(difference(&[1.0, 4.0, 9.0, 16.0], 2).unwrap(), vec![2.0, 2.0]);
        let y = vec![3.0, 1.0, 4.0];
        assert_eq!(difference(&y, 0).unwrap(), y);
        assert!(difference(&[1.0], 1).is_err());
    }

    #[test]
    fn difference_then_integrate_round_trips() {
        let y = vec![2.0, 5.0, 3.0, 8.0, 1.0, 9.0];
        let z = difference(&y, 1).unwrap();
        let mut acc = y[0];
        let rebuilt: Vec<f64> = std::iter::once(y[0])
            .chain(z.iter().map(|dz| {
                acc += dz;
                acc
            }))
            .collect();
        assert_eq!(rebuilt, y);
    }

    #[test]
    fn white_noise_fit_recovers_mean_and_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z: Vec<f64> = (0..500).map(|_| 2.0 + gauss(&mut rng)).collect();
        let fit = fit_arma(&z, 0, 0).unwrap().unwrap();
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / z.len() as f64;
        assert_abs_diff_eq!(fit.intercept, mean, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.sigma2, var, epsilon = 1e-12);
    }

    #[test]
    fn ar1_coefficient_recovered() {
        let mut hits = 0;
        for seed in 0..20 {
            let y = ar1(seed, 0.8, 500);
            let fit = fit_arma(&y, 1, 0).unwrap().unwrap();
            if (fit.ar[0] - 0.8).abs() < 0.1 {
                hits += 1;
            }
        }
        assert!(hits >= 18, "recovered alpha in only {hits}/20 runs");
    }

    #[test]
    fn ma1_coefficient_recovered() {
        let mut hits = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            let e: Vec<f64> = (0..1001).map(|_| gauss(&mut rng)).collect();
            let z: Vec<f64> = (1..1001).map(|i| e[i] + 0.5 * e[i - 1]).collect();
            let fit = fit_arma(&z, 0, 1).unwrap().unwrap();
            if (fit.ma[0] - 0.5).abs() < 0.1 {
                hits += 1;
            }
        }
        assert!(hits >= 18, "recovered beta in only {hits}/20 runs");
    }

    #[test]
    fn constant_window_is_degenerate() {
        let z = vec![4.0; 64];
        assert!(fit_arma(&z, 1, 0).unwrap().is_none());
    }

    #[test]
    fn fitted_ar_is_stationary() {
        // near-unit-root data must still produce a stationary AR polynomial
        let y = ar1(5, 0.99, 300);
        let fit = fit_arma(&y, 2, 0).unwrap().unwrap();
        assert!(ar_to_pacf(&fit.ar).is_some(), "fitted AR not stationary: {:?}", fit.ar);
    }

    #[test]
    fn pacf_round_trip() {
        let pacf = vec![0.6, -0.3, 0.1];
        let ar = pacf_to_ar(&pacf);
        let back = ar_to_pacf(&ar).unwrap();
        for (a, b) in pacf.iter().zip(&back) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn order_selection_picks_differencing_for_random_walk() {
        let walk: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let mut level = 0.0;
            (0..120)
                .map(|_| {
                    level += gauss(&mut rng);
                    level
                })
                .collect()
        };
        let model = select_order(&walk).unwrap();
        assert!(model.d >= 1, "random walk selected d = {}", model.d);
    }

    #[test]
    fn order_selection_on_ramp_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let ramp: Vec<f64> = (0..100).map(|i| i as f64 + 0.01 * gauss(&mut rng)).collect();
        let model = select_order(&ramp).unwrap();
        assert!(model.d >= 1);
    }

    #[test]
    fn order_selection_on_white_noise_is_parsimonious() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let z: Vec<f64> = (0..200).map(|_| gauss(&mut rng)).collect();
        let model = select_order(&z).unwrap();
        // the chosen order's AICc must be within 2 of the (0,0,0) fit
        let flat = fit_arma(&z, 0, 0).unwrap().unwrap();
        let n = z.len() as f64;
        let aicc_flat = n * flat.sigma2.ln() + 2.0 * n / (n - 2.0);
        let k = (model.p + model.q + 1) as f64;
        let aicc_model =
            n * model.innovation_variance.ln() + 2.0 * k * n / (n - k - 1.0);
        assert_eq!(model.d, 0);
        assert!(
            aicc_model <= aicc_flat + 2.0,
            "chosen ({},{},{}) aicc {aicc_model} vs flat {aicc_flat}",
            model.p,
            model.d,
            model.q
        );
    }

    #[test]
    fn random_walk_forecast_is_last_value() {
        let model = ArimaModel::random_walk();
        let history = vec![3.0, 7.0, 12.0, 41.0];
        assert_abs_diff_eq!(forecast_one(&model, &history).unwrap(), 41.0);
    }

    #[test]
    fn ar1_forecast_matches_hand_recursion() {
        let model = ArimaModel {
            p: 1,
            d: 0,
            q: 0,
            ar: vec![0.5],
            ma: vec![],
            intercept: 0.0,
            innovation_variance: 1.0,
        };
        let history = vec![2.0, 4.0, 10.0];
        assert_abs_diff_eq!(forecast_one(&model, &history).unwrap(), 5.0);
    }

    #[test]
    fn fitted_ar1_forecast_matches_manual_recursion() {
        let y = ar1(23, 0.7, 300);
        let fit = fit_arma(&y, 1, 0).unwrap().unwrap();
        let model = ArimaModel {
            p: 1,
            d: 0,
            q: 0,
            ar: fit.ar.clone(),
            ma: vec![],
            intercept: fit.intercept,
            innovation_variance: fit.sigma2,
        };
        let expect = fit.ar[0] * y[y.len() - 1] + fit.intercept;
        assert_abs_diff_eq!(forecast_one(&model, &y).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn constant_series_predicts_perfectly() {
        let values = vec![5.0; 80];
        let records = sliding_prediction(&values, 32, 40..60).unwrap();
        assert_eq!(records.len(), 20);
        for r in &records {
            assert_abs_diff_eq!(r.pct_error.unwrap(), 0.0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(error_summary(&records, 20.0).unwrap(), 1.0);
    }

    #[test]
    fn zero_originals_are_flagged_undefined() {
        let mut values = vec![5.0; 80];
        values[50] = 0.0;
        let records = sliding_prediction(&values, 32, 40..60).unwrap();
        let undefined: Vec<_> = records.iter().filter(|r| r.pct_error.is_none()).collect();
        assert_eq!(undefined.len(), 1);
        assert_eq!(undefined[0].t, 50);
    }

    #[test]
    fn error_summary_counts_threshold() {
        let rec = |e: f64| PredictionRecord {
            t: 0,
            predicted: 0.0,
            original: 1.0,
            pct_error: Some(e),
            order: (0, 0, 0),
            suitable: None,
        };
        let records = vec![rec(10.0), rec(30.0)];
        assert_abs_diff_eq!(error_summary(&records, 20.0).unwrap(), 0.5);
        assert!(error_summary(&[], 20.0).is_err());
    }

    #[test]
    fn prediction_depends_only_on_training_window() {
        let mut values = ar1(31, 0.6, 120);
        let records = sliding_prediction(&values, 40, 60..61).unwrap();
        // perturb data outside [t-1-w, t-1] = [19, 59]
        values[5] += 100.0;
        values[80] -= 50.0;
        let records2 = sliding_prediction(&values, 40, 60..61).unwrap();
        assert_eq!(records[0].predicted, records2[0].predicted);
    }

    #[test]
    fn pct_error_is_scale_invariant() {
        let values = ar1(37, 0.6, 150);
        let records = sliding_prediction(&values, 48, 60..70).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| v * 37.5).collect();
        let records2 = sliding_prediction(&scaled, 48, 60..70).unwrap();
        for (a, b) in records.iter().zip(&records2) {
            assert_eq!(a.order.1, b.order.1, "d changed under scaling at t={}", a.t);
            match (a.pct_error, b.pct_error) {
                (Some(ea), Some(eb)) => assert_abs_diff_eq!(ea, eb, epsilon = 1e-5),
                (None, None) => {}
                other => panic!("definedness changed under scaling: {other:?}"),
            }
        }
    }

    #[test]
    fn ar_recovery_improves_with_window() {
        let mut prev_err = f64::INFINITY;
        for t in [100usize, 400, 1600] {
            let mut total = 0.0;
            for seed in 0..30 {
                let y = ar1(seed * 7 + t as u64, 0.6, t);
                let fit = fit_arma(&y, 1, 0).unwrap().unwrap();
                total += (fit.ar[0] - 0.6).abs();
            }
            let mean_err = total / 30.0;
            assert!(mean_err < prev_err, "error did not shrink at T={t}: {mean_err}");
            prev_err = mean_err;
        }
    }
}

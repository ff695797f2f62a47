//! KPSS and ADF stationarity tests at the 5% level.
//!
//! Both use the standard published critical values for the constant-only
//! (level) specification: 0.463 for KPSS, -2.86 for ADF.

use crate::error::{Error, Result};
use crate::linalg::ols;

pub const KPSS_CRITICAL_5PCT: f64 = 0.463;
pub const ADF_CRITICAL_5PCT: f64 = -2.86;

/// Stand-in statistic for a degenerate (constant) series under ADF, where
/// the regression is singular but the series is trivially stationary.
const DEGENERATE_ADF_STAT: f64 = -1.0e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationarityTest {
    Kpss,
    Adf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Stationary,
    NonStationary,
}

#[derive(Debug, Clone, Copy)]
pub struct StationarityReport {
    pub test: StationarityTest,
    pub statistic: f64,
    pub critical_value_5pct: f64,
    pub decision: Decision,
}

fn require_length(y: &[f64], min: usize) -> Result<()> {
    if y.len() < min {
        return Err(Error::Argument(format!(
            "series of length {} is too short for a stationarity test (need {min})",
            y.len()
        )));
    }
    Ok(())
}

/// KPSS level-stationarity test. Long-run variance uses a Bartlett kernel
/// with lag truncation floor(4 * (T/100)^(1/4)); non-stationary when the
/// statistic exceeds the 5% critical value.
pub fn kpss_test(y: &[f64]) -> Result<StationarityReport> {
    require_length(y, 20)?;
    let t = y.len();
    let mean = y.iter().sum::<f64>() / t as f64;
    let resid: Vec<f64> = y.iter().map(|v| v - mean).collect();

    let mut partial_sum_sq = 0.0;
    let mut running = 0.0;
    for e in &resid {
        running += e;
        partial_sum_sq += running * running;
    }

    let max_lag = (4.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize;
    let gamma = |lag: usize| -> f64 {
        resid[lag..]
            .iter()
            .zip(&resid)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / t as f64
    };
    let mut long_run_var = gamma(0);
    for j in 1..=max_lag.min(t - 1) {
        let w = 1.0 - j as f64 / (max_lag as f64 + 1.0);
        long_run_var += 2.0 * w * gamma(j);
    }

    let statistic = if long_run_var <= 0.0 {
        0.0 // constant (or degenerate) series
    } else {
        partial_sum_sq / (t as f64 * t as f64 * long_run_var)
    };
    let decision = if statistic > KPSS_CRITICAL_5PCT {
        Decision::NonStationary
    } else {
        Decision::Stationary
    };
    Ok(StationarityReport {
        test: StationarityTest::Kpss,
        statistic,
        critical_value_5pct: KPSS_CRITICAL_5PCT,
        decision,
    })
}

/// Augmented Dickey-Fuller test with constant. The lag order starts at
/// floor(12 * (T/100)^(1/4)) and is trimmed while the last lag's t-ratio is
/// insignificant at the 10% level. Non-stationary when the t-ratio on the
/// lagged level exceeds the 5% critical value.
pub fn adf_test(y: &[f64]) -> Result<StationarityReport> {
    require_length(y, 20)?;
    let t = y.len();
    let max_lag_cap = t / 2 - 2;
    let mut lag = ((12.0 * (t as f64 / 100.0).powf(0.25)).floor() as usize).min(max_lag_cap);

    let diff: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();

    let statistic = loop {
        // regression: diff[i] on [1, y[i], diff[i-1..i-lag]]
        let start = lag; // index into diff
        let rows = diff.len() - start;
        if rows < lag + 4 {
            if lag == 0 {
                break None;
            }
            lag -= 1;
            continue;
        }
        let mut x = Vec::with_capacity(rows);
        let mut resp = Vec::with_capacity(rows);
        for i in start..diff.len() {
            let mut row = Vec::with_capacity(lag + 2);
            row.push(1.0);
            row.push(y[i]); // level lagged one step relative to diff[i]
            for j in 1..=lag {
                row.push(diff[i - j]);
            }
            x.push(row);
            resp.push(diff[i]);
        }
        match ols(&x, &resp) {
            None => break None, // constant / collinear series
            Some(fit) => {
                if lag > 0 {
                    let last = lag + 1;
                    let t_last = if fit.std_errors[last] > 0.0 {
                        fit.coeffs[last] / fit.std_errors[last]
                    } else {
                        0.0
                    };
                    if t_last.abs() < 1.645 {
                        lag -= 1;
                        continue;
                    }
                }
                if fit.std_errors[1] > 0.0 {
                    break Some(fit.coeffs[1] / fit.std_errors[1]);
                }
                break None;
            }
        }
    };

    let statistic = statistic.unwrap_or(DEGENERATE_ADF_STAT);
    let decision = if statistic > ADF_CRITICAL_5PCT {
        Decision::NonStationary
    } else {
        Decision::Stationary
    };
    Ok(StationarityReport {
        test: StationarityTest::Adf,
        statistic,
        critical_value_5pct: ADF_CRITICAL_5PCT,
        decision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gauss(rng: &mut ChaCha8Rng) -> f64 {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub(crate) fn white_noise(seed: u64, t: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..t).map(|_| gauss(&mut rng)).collect()
    }

    pub(crate) fn random_walk(seed: u64, t: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut level = 0.0;
        (0..t)
            .map(|_| {
                level += gauss(&mut rng);
                level
            })
            .collect()
    }

    #[test]
    fn constant_series_is_stationary_under_both() {
        let y = vec![3.5; 50];
        let k = kpss_test(&y).unwrap();
        assert_eq!(k.statistic, 0.0);
        assert_eq!(k.decision, Decision::Stationary);
        let a = adf_test(&y).unwrap();
        assert_eq!(a.decision, Decision::Stationary);
        assert!(a.statistic.is_finite());
    }

    #[test]
    fn short_series_rejected() {
        assert!(kpss_test(&[1.0; 10]).is_err());
        assert!(adf_test(&[1.0; 10]).is_err());
    }

    #[test]
    fn kpss_size_near_nominal_on_white_noise() {
        let rejections = (0..200)
            .filter(|&s| {
                kpss_test(&white_noise(s, 500)).unwrap().decision == Decision::NonStationary
            })
            .count();
        // nominal size 5%; allow a broad band for 200 replications
        assert!(rejections <= 24, "KPSS rejected white noise {rejections}/200 times");
    }

    #[test]
    fn kpss_detects_random_walk() {
        let detected = (0..100)
            .filter(|&s| {
                kpss_test(&random_walk(s, 500)).unwrap().decision == Decision::NonStationary
            })
            .count();
        assert!(detected >= 95, "KPSS flagged only {detected}/100 random walks");
    }

    #[test]
    fn adf_detects_random_walk_and_accepts_ar1() {
        let non_stat = (0..100)
            .filter(|&s| adf_test(&random_walk(s, 500)).unwrap().decision == Decision::NonStationary)
            .count();
        assert!(non_stat >= 90, "ADF kept unit-root null on only {non_stat}/100 walks");

        let stationary = (0..100)
            .filter(|&s| {
                let noise = white_noise(s + 1000, 500);
                let mut y = vec![0.0; 500];
                for i in 1..500 {
                    y[i] = 0.5 * y[i - 1] + noise[i];
                }
                adf_test(&y).unwrap().decision == Decision::Stationary
            })
            .count();
        assert!(stationary >= 90, "ADF called AR(0.5) stationary only {stationary}/100 times");
    }

    #[test]
    fn adf_ramp_is_nonstationary_under_constant_spec() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y: Vec<f64> = (0..300)
            .map(|i| i as f64 * 0.5 + 0.1 * gauss(&mut rng))
            .collect();
        assert_eq!(adf_test(&y).unwrap().decision, Decision::NonStationary);
    }
}

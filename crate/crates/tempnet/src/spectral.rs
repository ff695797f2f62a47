//! Short-time Fourier spectrograms of metric series, three-band PSD
//! summaries (LPSD/MPSD/HPSD), and the per-point prediction-suitability
//! filter built on them.
//!
//! Band boundaries are DFT bin indices within a window: low = bins 1..=4,
//! mid = 5..=15, high = 16..=window/2. The DC bin is excluded since segment
//! means are removed.

use rustfft::{num_complex::Complex, FftPlanner};

use crate::arima::PredictionRecord;
use crate::error::{Error, Result};

pub const LOW_BAND_END: usize = 4; // inclusive
pub const MID_BAND_END: usize = 15; // inclusive

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Taper {
    Rectangular,
    Hann,
}

impl std::str::FromStr for Taper {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rectangular" => Ok(Taper::Rectangular),
            "hann" => Ok(Taper::Hann),
            other => Err(Error::Config(format!("unknown taper `{other}`"))),
        }
    }
}

/// One STFT segment: the starting step and its one-sided PSD.
#[derive(Debug, Clone)]
pub struct Segment {
    pub start: usize,
    pub psd: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Spectrogram {
    pub segments: Vec<Segment>,
    pub window_size: usize,
    pub hop: usize,
    pub taper: Taper,
}

/// Mean PSD of the low/mid/high bands.
#[derive(Debug, Clone, Copy, Default)]
pub struct PsdBins {
    pub lpsd: f64,
    pub mpsd: f64,
    pub hpsd: f64,
}

fn taper_weights(taper: Taper, n: usize) -> Vec<f64> {
    match taper {
        Taper::Rectangular => vec![1.0; n],
        Taper::Hann => (0..n)
            .map(|i| {
                let x = std::f64::consts::PI * i as f64 / n as f64;
                x.sin() * x.sin()
            })
            .collect(),
    }
}

/// One-sided PSD of a single segment: mean removed, taper applied,
/// PSD_k = |X_k|^2 / (N * sum(w^2)), doubled for 0 < k < N/2. With a
/// rectangular taper the PSD then sums to the segment variance.
pub fn segment_psd(segment: &[f64], taper: Taper) -> Vec<f64> {
    let n = segment.len();
    let mean = segment.iter().sum::<f64>() / n as f64;
    let w = taper_weights(taper, n);
    let mut buf: Vec<Complex<f64>> = segment
        .iter()
        .zip(&w)
        .map(|(&x, &wi)| Complex::new((x - mean) * wi, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let w2: f64 = w.iter().map(|v| v * v).sum();
    let half = n / 2;
    (0..=half)
        .map(|k| {
            let psd = buf[k].norm_sqr() / (n as f64 * w2);
            if k > 0 && k < half {
                2.0 * psd
            } else {
                psd
            }
        })
        .collect()
}

/// Short-time Fourier transform over `y` with the given window, hop and
/// taper. The window size must be a power of two no longer than the series.
pub fn stft(y: &[f64], window_size: usize, hop: usize, taper: Taper) -> Result<Spectrogram> {
    if window_size == 0 || !window_size.is_power_of_two() {
        return Err(Error::Argument(format!(
            "window size {window_size} must be a power of two"
        )));
    }
    if window_size > y.len() {
        return Err(Error::Argument(format!(
            "window size {window_size} longer than series of length {}",
            y.len()
        )));
    }
    if hop == 0 {
        return Err(Error::Argument("hop must be at least 1".into()));
    }
    let mut segments = Vec::new();
    let mut start = 0;
    while start + window_size <= y.len() {
        segments.push(Segment {
            start,
            psd: segment_psd(&y[start..start + window_size], taper),
        });
        start += hop;
    }
    Ok(Spectrogram {
        segments,
        window_size,
        hop,
        taper,
    })
}

/// Band means of one PSD vector. Requires window_size/2 > 15 so all three
/// bands are non-empty.
pub fn psd_to_bins(psd: &[f64]) -> Result<PsdBins> {
    let half = psd.len() - 1;
    if half <= MID_BAND_END {
        return Err(Error::Argument(format!(
            "window size {} too small for three frequency bands",
            2 * half
        )));
    }
    let mean = |lo: usize, hi: usize| -> f64 {
        psd[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
    };
    Ok(PsdBins {
        lpsd: mean(1, LOW_BAND_END),
        mpsd: mean(LOW_BAND_END + 1, MID_BAND_END),
        hpsd: mean(MID_BAND_END + 1, half),
    })
}

/// Per-segment band means plus their average over the spectrogram.
pub fn psd_bins(spec: &Spectrogram) -> Result<(Vec<PsdBins>, PsdBins)> {
    let per: Vec<PsdBins> = spec
        .segments
        .iter()
        .map(|s| psd_to_bins(&s.psd))
        .collect::<Result<_>>()?;
    let n = per.len().max(1) as f64;
    let avg = PsdBins {
        lpsd: per.iter().map(|b| b.lpsd).sum::<f64>() / n,
        mpsd: per.iter().map(|b| b.mpsd).sum::<f64>() / n,
        hpsd: per.iter().map(|b| b.hpsd).sum::<f64>() / n,
    };
    Ok((per, avg))
}

/// Share of low-band power in a single window: lpsd / (lpsd + mpsd + hpsd).
/// A window with zero total power returns 1 (trivially predictable).
pub fn lpsd_ratio(window: &[f64]) -> Result<f64> {
    let psd = segment_psd(window, Taper::Rectangular);
    let bins = psd_to_bins(&psd)?;
    let total = bins.lpsd + bins.mpsd + bins.hpsd;
    if total <= 0.0 {
        Ok(1.0)
    } else {
        Ok(bins.lpsd / total)
    }
}

/// Suitability of a forecasting window: suitable iff the low-band power
/// share reaches the threshold.
pub fn suitability(window: &[f64], theta: f64) -> Result<bool> {
    Ok(lpsd_ratio(window)? >= theta)
}

/// Data-driven threshold: the 25th percentile of the lpsd ratio over all
/// windows of size `w` ending before `prefix_end`.
pub fn auto_threshold(values: &[f64], w: usize, prefix_end: usize) -> Result<f64> {
    let prefix_end = prefix_end.min(values.len());
    if prefix_end < w + 1 {
        return Err(Error::Argument(format!(
            "training prefix of length {prefix_end} shorter than window {w}"
        )));
    }
    let mut ratios: Vec<f64> = (w..prefix_end)
        .map(|end| lpsd_ratio(&values[end - w..end]))
        .collect::<Result<_>>()?;
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let idx = (ratios.len() - 1) / 4;
    Ok(ratios[idx])
}

/// Mark each prediction record with the suitability of its training window.
pub fn annotate_suitability(
    records: &mut [PredictionRecord],
    values: &[f64],
    w: usize,
    theta: f64,
) -> Result<()> {
    for r in records.iter_mut() {
        // the w points immediately preceding the test step
        let window = &values[r.t - w..r.t];
        r.suitable = Some(suitability(window, theta)?);
    }
    Ok(())
}

/// Error-fraction summary before and after dropping unsuitable points.
#[derive(Debug, Clone, Copy)]
pub struct FilteredSummary {
    pub unfiltered: f64,
    /// None when no suitable point remains.
    pub filtered: Option<f64>,
    pub dropped: usize,
}

pub fn filtered_summary(
    records: &[PredictionRecord],
    threshold_pct: f64,
) -> Result<FilteredSummary> {
    let unfiltered = crate::arima::error_summary(records, threshold_pct)?;
    let suitable: Vec<PredictionRecord> = records
        .iter()
        .filter(|r| r.suitable.unwrap_or(true))
        .cloned()
        .collect();
    let dropped = records.len() - suitable.len();
    let filtered = crate::arima::error_summary(&suitable, threshold_pct).ok();
    Ok(FilteredSummary {
        unfiltered,
        filtered,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_series_has_zero_psd() {
        let psd = segment_psd(&vec![7.5; 64], Taper::Rectangular);
        assert!(psd.iter().all(|&p| p.abs() < 1e-18));
    }

    #[test]
    fn cosine_concentrates_at_its_bin() {
        let n = 64;
        let y: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 10.0 * i as f64 / n as f64).cos())
            .collect();
        let psd = segment_psd(&y, Taper::Rectangular);
        // closed form: a sampled unit cosine at an exact bin has variance 1/2,
        // all of it in that bin
        for (k, &p) in psd.iter().enumerate() {
            if k == 10 {
                assert_abs_diff_eq!(p, 0.5, epsilon = 1e-9);
            } else {
                assert!(p < 1e-12, "leakage at bin {k}: {p}");
            }
        }
    }

    fn segment_variance(seg: &[f64]) -> f64 {
        let mean = seg.iter().sum::<f64>() / seg.len() as f64;
        seg.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / seg.len() as f64
    }

    #[test]
    fn parseval_holds_per_segment() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y: Vec<f64> = (0..512).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let spec = stft(&y, 64, 32, Taper::Rectangular).unwrap();
        for seg in &spec.segments {
            let var = segment_variance(&y[seg.start..seg.start + 64]);
            let total: f64 = seg.psd.iter().sum();
            assert!(
                (total - var).abs() <= 1e-9 * var.max(1e-30),
                "segment {}: psd sum {total} vs variance {var}",
                seg.start
            );
        }
    }

    #[test]
    fn additive_shift_leaves_psd_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + 123.0).collect();
        let a = segment_psd(&y, Taper::Hann);
        let b = segment_psd(&shifted, Taper::Hann);
        for (pa, pb) in a.iter().zip(&b) {
            assert_abs_diff_eq!(pa, pb, epsilon = 1e-9);
        }
    }

    #[test]
    fn scaling_scales_psd_quadratically() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let y: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let scaled: Vec<f64> = y.iter().map(|v| v * 3.0).collect();
        let a = segment_psd(&y, Taper::Rectangular);
        let b = segment_psd(&scaled, Taper::Rectangular);
        for (pa, pb) in a.iter().zip(&b) {
            assert_abs_diff_eq!(9.0 * pa, *pb, epsilon = 1e-9);
        }
        // and the suitability decision is ratio-based, hence unchanged
        assert_eq!(
            suitability(&y, 0.3).unwrap(),
            suitability(&scaled, 0.3).unwrap()
        );
    }

    #[test]
    fn hop_equal_window_partitions_series() {
        let y: Vec<f64> = (0..96).map(|i| i as f64).collect();
        let spec = stft(&y, 32, 32, Taper::Rectangular).unwrap();
        let starts: Vec<usize> = spec.segments.iter().map(|s| s.start).collect();
        assert_eq!(starts, vec![0, 32, 64]);
    }

    #[test]
    fn stft_argument_errors() {
        let y = vec![0.0; 16];
        assert!(stft(&y, 32, 16, Taper::Rectangular).is_err());
        assert!(stft(&y, 12, 4, Taper::Rectangular).is_err());
        assert!(stft(&y, 8, 0, Taper::Rectangular).is_err());
    }

    #[test]
    fn slow_sinusoid_dominates_low_band() {
        let n = 64;
        let y: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 2.0 * i as f64 / n as f64).sin())
            .collect();
        let bins = psd_to_bins(&segment_psd(&y, Taper::Rectangular)).unwrap();
        assert!(bins.lpsd > 100.0 * bins.mpsd.max(bins.hpsd));
    }

    #[test]
    fn white_noise_bands_are_comparable() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let y: Vec<f64> = (0..4096).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let spec = stft(&y, 64, 64, Taper::Rectangular).unwrap();
        let (_, avg) = psd_bins(&spec).unwrap();
        for ratio in [avg.lpsd / avg.mpsd, avg.mpsd / avg.hpsd] {
            assert!((0.5..2.0).contains(&ratio), "band ratio {ratio} outside [0.5,2)");
        }
    }

    #[test]
    fn psd_bins_requires_room_for_three_bands() {
        let psd = segment_psd(&vec![1.0; 16], Taper::Rectangular);
        assert!(psd_to_bins(&psd).is_err());
    }

    #[test]
    fn suitability_edge_cases() {
        assert!(suitability(&vec![2.0; 64], 0.9).unwrap()); // constant: trivially predictable
        let alternating: Vec<f64> = (0..64).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(!suitability(&alternating, 0.01).unwrap()); // all energy at Nyquist
    }

    fn rec(t: usize, e: f64, suitable: bool) -> PredictionRecord {
        PredictionRecord {
            t,
            predicted: 0.0,
            original: 1.0,
            pct_error: Some(e),
            order: (0, 0, 0),
            suitable: Some(suitable),
        }
    }

    #[test]
    fn filtered_summary_drops_unsuitable() {
        let records = vec![rec(0, 10.0, true), rec(1, 90.0, false)];
        let s = filtered_summary(&records, 20.0).unwrap();
        assert_abs_diff_eq!(s.unfiltered, 0.5);
        assert_abs_diff_eq!(s.filtered.unwrap(), 1.0);
        assert_eq!(s.dropped, 1);
    }

    #[test]
    fn all_suitable_means_filtered_equals_unfiltered() {
        let records = vec![rec(0, 10.0, true), rec(1, 30.0, true)];
        let s = filtered_summary(&records, 20.0).unwrap();
        assert_eq!(s.unfiltered, s.filtered.unwrap());
        assert_eq!(s.dropped, 0);
    }

    #[test]
    fn zero_suitable_points_reported_as_undefined() {
        let records = vec![rec(0, 10.0, false)];
        let s = filtered_summary(&records, 20.0).unwrap();
        assert!(s.filtered.is_none());
    }

    #[test]
    fn auto_threshold_is_a_low_quantile() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let y: Vec<f64> = (0..300)
            .map(|i| (i as f64 * 0.05).sin() * 5.0 + rng.gen_range(-0.5..0.5))
            .collect();
        let theta = auto_threshold(&y, 64, 200).unwrap();
        let ratios: Vec<f64> = (64..200).map(|e| lpsd_ratio(&y[e - 64..e]).unwrap()).collect();
        let below = ratios.iter().filter(|&&r| r < theta).count() as f64 / ratios.len() as f64;
        assert!(below <= 0.26, "{below}");
    }
}

//! Structural-memory analysis: neighborhood overlap against lag and the
//! forecasting-window choice derived from it.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{NodeId, Snapshot, SnapshotSeries};

/// Mean neighborhood overlap per lag.
#[derive(Debug, Clone)]
pub struct OverlapCurve {
    pub lags: Vec<usize>,
    pub mean_overlap: Vec<f64>,
}

fn neighbor_sets(s: &Snapshot) -> std::collections::HashMap<NodeId, BTreeSet<NodeId>> {
    let mut map: std::collections::HashMap<NodeId, BTreeSet<NodeId>> =
        std::collections::HashMap::new();
    for &(u, v) in s.edges() {
        map.entry(u).or_default().insert(v);
        map.entry(v).or_default().insert(u);
    }
    map
}

/// Mean Jaccard similarity of per-node neighborhoods between two snapshots,
/// averaged over nodes active in the first. Nodes active at `s_t` but absent
/// at `s_tk` contribute 0. Returns 0 when no node is active at `s_t`.
pub fn neighborhood_overlap(s_t: &Snapshot, s_tk: &Snapshot) -> f64 {
    let nbr_t = neighbor_sets(s_t);
    if nbr_t.is_empty() {
        return 0.0;
    }
    let nbr_tk = neighbor_sets(s_tk);
    let empty = BTreeSet::new();
    let mut total = 0.0;
    for (node, set_t) in &nbr_t {
        let set_tk = nbr_tk.get(node).unwrap_or(&empty);
        let inter = set_t.intersection(set_tk).count() as f64;
        let union = set_t.union(set_tk).count() as f64;
        total += inter / union;
    }
    total / nbr_t.len() as f64
}

/// Average neighborhood overlap over all valid snapshot pairs for each lag
/// `1..=max_lag`.
pub fn overlap_decay(series: &SnapshotSeries, max_lag: usize) -> Result<OverlapCurve> {
    if max_lag == 0 || max_lag >= series.len() {
        return Err(Error::Argument(format!(
            "max_lag {max_lag} must be in 1..{}",
            series.len()
        )));
    }
    let mean_overlap: Vec<f64> = (1..=max_lag)
        .into_par_iter()
        .map(|k| {
            let pairs = series.len() - k;
            let sum: f64 = (0..pairs)
                .map(|t| neighborhood_overlap(series.snapshot(t), series.snapshot(t + k)))
                .sum();
            sum / pairs as f64
        })
        .collect();
    Ok(OverlapCurve {
        lags: (1..=max_lag).collect(),
        mean_overlap,
    })
}

/// Default lag range for [`overlap_decay`]: min(200, T/4), at least 1.
pub fn default_max_lag(series_len: usize) -> usize {
    (series_len / 4).clamp(1, 200)
}

/// Smallest lag at which the curve drops below `threshold`, or the largest
/// lag if it never crosses.
pub fn crossing_lag(curve: &OverlapCurve, threshold: f64) -> usize {
    curve
        .lags
        .iter()
        .zip(&curve.mean_overlap)
        .find(|&(_, &o)| o < threshold)
        .map(|(&k, _)| k)
        .unwrap_or_else(|| *curve.lags.last().expect("curve non-empty"))
}

/// Forecasting window: the power of two nearest to the crossing lag, ties
/// rounded down.
pub fn select_window(curve: &OverlapCurve, threshold: f64) -> Result<usize> {
    if curve.lags.is_empty() {
        return Err(Error::Argument("empty overlap curve".into()));
    }
    if !(0.0..1.0).contains(&threshold) || threshold == 0.0 {
        return Err(Error::Argument(format!(
            "threshold {threshold} must be in (0,1)"
        )));
    }
    Ok(nearest_power_of_two(crossing_lag(curve, threshold)))
}

pub fn nearest_power_of_two(k: usize) -> usize {
    debug_assert!(k >= 1);
    let lo = 1usize << (usize::BITS - 1 - k.leading_zeros());
    if lo == k {
        return k;
    }
    let hi = lo << 1;
    if k - lo <= hi - k {
        lo
    } else {
        hi
    }
}

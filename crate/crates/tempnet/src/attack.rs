//! Targeted-attack simulation on temporal networks: node rankings by
//! random order, average temporal degree, or predicted degree, scored by
//! temporal efficiency and robustness.
//!
//! Time-respecting paths advance at most one hop per snapshot, waiting at a
//! node is free, and duration is counted inclusively (arrival - departure
//! + 1).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arima::{forecast_one, select_order, ArimaModel};
use crate::error::{Error, Result};
use crate::graph::{NodeId, SnapshotSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Random,
    AvgDeg,
    PredDeg,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::AvgDeg => "avg_deg",
            Strategy::PredDeg => "pred_deg",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Strategy::Random),
            "avg_deg" => Ok(Strategy::AvgDeg),
            "pred_deg" => Ok(Strategy::PredDeg),
            other => Err(Error::Config(format!("unknown attack strategy `{other}`"))),
        }
    }
}

/// Robustness against removal fraction for one strategy.
#[derive(Debug, Clone)]
pub struct AttackCurve {
    pub strategy: Strategy,
    pub seed: u64,
    /// (fraction removed, robustness R); truncated when a removal would
    /// leave fewer than two nodes.
    pub points: Vec<(f64, f64)>,
    pub truncated: bool,
}

/// Duration in steps of the fastest time-respecting path from i to j inside
/// [t1, tn], restricted to nodes where `alive` is true. None when
/// unreachable.
pub fn temporal_distance(
    series: &SnapshotSeries,
    i: NodeId,
    j: NodeId,
    t1: usize,
    tn: usize,
    alive: &[bool],
) -> Option<usize> {
    if i == j {
        return Some(0);
    }
    durations_from(series, i, t1, tn, alive)[j as usize]
}

/// Fastest-path durations from `source` to every node. For each departure
/// step s the earliest arrivals are found by one forward sweep; the minimum
/// inclusive duration over departures is kept.
fn durations_from(
    series: &SnapshotSeries,
    source: NodeId,
    t1: usize,
    tn: usize,
    alive: &[bool],
) -> Vec<Option<usize>> {
    let n = series.node_count();
    let mut best: Vec<Option<usize>> = vec![None; n];
    best[source as usize] = Some(0);
    if !alive[source as usize] {
        return best;
    }
    for depart in t1..=tn {
        // nodes reached so far in a sweep departing at `depart`; waiting is
        // free, so a step without progress must not end the sweep
        let mut reached = vec![false; n];
        reached[source as usize] = true;
        let mut unreached = alive.iter().filter(|&&a| a).count().saturating_sub(1);
        for step in depart..=tn {
            if unreached == 0 {
                break;
            }
            let duration = step - depart + 1;
            // early exit: durations only grow with step, so once even the
            // current duration cannot improve anything we may stop
            if best.iter().enumerate().all(|(v, b)| {
                !alive[v] || v == source as usize || b.map_or(false, |d| d <= duration)
            }) {
                break;
            }
            let mut newly: Vec<usize> = Vec::new();
            for &(u, v) in series.snapshot(step).edges() {
                let (u, v) = (u as usize, v as usize);
                if !alive[u] || !alive[v] {
                    continue;
                }
                if reached[u] && !reached[v] {
                    newly.push(v);
                }
                if reached[v] && !reached[u] {
                    newly.push(u);
                }
            }
            for v in newly {
                if !reached[v] {
                    reached[v] = true;
                    unreached -= 1;
                    if best[v].map_or(true, |d| duration < d) {
                        best[v] = Some(duration);
                    }
                }
            }
        }
    }
    best
}

/// Average of 1/d_ij over ordered pairs of the surviving nodes.
pub fn temporal_efficiency(
    series: &SnapshotSeries,
    t1: usize,
    tn: usize,
    alive: &[bool],
) -> Result<f64> {
    let nodes: Vec<NodeId> = (0..series.node_count() as NodeId)
        .filter(|&v| alive[v as usize])
        .collect();
    let n = nodes.len();
    if n < 2 {
        return Err(Error::Argument(format!(
            "temporal efficiency needs at least 2 nodes, have {n}"
        )));
    }
    if tn >= series.len() || t1 > tn {
        return Err(Error::Argument(format!(
            "interval {t1}..{tn} invalid for series of length {}",
            series.len()
        )));
    }
    let total: f64 = nodes
        .par_iter()
        .map(|&i| {
            let durations = durations_from(series, i, t1, tn, alive);
            nodes
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| durations[j as usize].map_or(0.0, |d| 1.0 / d as f64))
                .sum::<f64>()
        })
        .sum();
    Ok(total / (n * (n - 1)) as f64)
}

/// Node ordering for removal, highest priority first.
pub fn rank_nodes(
    series: &SnapshotSeries,
    strategy: Strategy,
    rank_step: usize,
    w: usize,
    seed: u64,
) -> Result<Vec<NodeId>> {
    let n = series.node_count();
    match strategy {
        Strategy::Random => {
            let mut nodes: Vec<NodeId> = (0..n as NodeId).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            nodes.shuffle(&mut rng);
            Ok(nodes)
        }
        Strategy::AvgDeg => {
            if rank_step == 0 || rank_step > series.len() {
                return Err(Error::Argument(format!(
                    "rank step {rank_step} outside series of length {}",
                    series.len()
                )));
            }
            let scores: Vec<f64> = (0..n as NodeId)
                .map(|v| {
                    let deg = series.degree_series(v);
                    deg[..rank_step].iter().sum::<f64>() / rank_step as f64
                })
                .collect();
            Ok(nodes_sorted(&scores))
        }
        Strategy::PredDeg => {
            if rank_step <= w || rank_step > series.len() {
                return Err(Error::Argument(format!(
                    "pred_deg needs rank step > window ({rank_step} vs {w})"
                )));
            }
            let scores: Vec<f64> = (0..n as NodeId)
                .collect::<Vec<_>>()
                .par_iter()
                .map(|&v| {
                    let deg = series.degree_series(v);
                    let window = &deg[rank_step - 1 - w..rank_step];
                    if window.iter().all(|&d| d == 0.0) {
                        return 0.0;
                    }
                    match select_order(window) {
                        Ok(model) => forecast_one(&model, window)
                            .unwrap_or_else(|_| *window.last().expect("non-empty")),
                        Err(_) => forecast_one(&ArimaModel::random_walk(), window)
                            .unwrap_or(0.0),
                    }
                })
                .collect();
            Ok(nodes_sorted(&scores))
        }
    }
}

/// Descending score order, node index as the deterministic tie-break.
fn nodes_sorted(scores: &[f64]) -> Vec<NodeId> {
    let mut nodes: Vec<NodeId> = (0..scores.len() as NodeId).collect();
    nodes.sort_by(|&a, &b| {
        scores[b as usize]
            .partial_cmp(&scores[a as usize])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    nodes
}

/// Remove the top ceil(P*N) ranked nodes for each fraction and report the
/// robustness R = E_damaged / E_baseline over the interval. The ranking is
/// computed once, not after each removal.
pub fn run_attack(
    series: &SnapshotSeries,
    strategy: Strategy,
    fractions: &[f64],
    t1: usize,
    tn: usize,
    rank_step: usize,
    w: usize,
    seed: u64,
) -> Result<AttackCurve> {
    if fractions.iter().any(|&p| !(0.0..1.0).contains(&p)) {
        return Err(Error::Argument("removal fractions must lie in [0,1)".into()));
    }
    let n = series.node_count();
    let ranking = rank_nodes(series, strategy, rank_step, w, seed)?;
    let all_alive = vec![true; n];
    let baseline = temporal_efficiency(series, t1, tn, &all_alive)?;
    if baseline <= 0.0 {
        return Err(Error::Argument(
            "baseline temporal efficiency is zero; nothing to attack".into(),
        ));
    }

    let mut points = Vec::with_capacity(fractions.len());
    let mut truncated = false;
    for &p in fractions {
        let k = (p * n as f64).ceil() as usize;
        if n - k < 2 {
            truncated = true;
            break;
        }
        let mut alive = vec![true; n];
        for &v in &ranking[..k] {
            alive[v as usize] = false;
        }
        let damaged = temporal_efficiency(series, t1, tn, &alive)?;
        points.push((p, damaged / baseline));
    }
    Ok(AttackCurve {
        strategy,
        seed,
        points,
        truncated,
    })
}

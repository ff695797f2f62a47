//! The eight per-snapshot structural properties and their assembly into
//! per-property time series.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::community::louvain;
use crate::error::{Error, Result};
use crate::graph::{Snapshot, SnapshotSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropertyId {
    ActiveNodes,
    ActiveEdges,
    AvgDegree,
    ClusteringCoeffSum,
    BetweennessSum,
    ClosenessSum,
    Modularity,
    EdgeEmergence,
}

impl PropertyId {
    pub const ALL: [PropertyId; 8] = [
        PropertyId::ActiveNodes,
        PropertyId::ActiveEdges,
        PropertyId::AvgDegree,
        PropertyId::ClusteringCoeffSum,
        PropertyId::BetweennessSum,
        PropertyId::ClosenessSum,
        PropertyId::Modularity,
        PropertyId::EdgeEmergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyId::ActiveNodes => "active_nodes",
            PropertyId::ActiveEdges => "active_edges",
            PropertyId::AvgDegree => "avg_degree",
            PropertyId::ClusteringCoeffSum => "clustering_sum",
            PropertyId::BetweennessSum => "betweenness_sum",
            PropertyId::ClosenessSum => "closeness_sum",
            PropertyId::Modularity => "modularity",
            PropertyId::EdgeEmergence => "edge_emergence",
        }
    }
}

impl std::str::FromStr for PropertyId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PropertyId::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown property `{s}`")))
    }
}

/// One property evaluated over every snapshot of a series.
#[derive(Debug, Clone)]
pub struct MetricSeries {
    pub property: PropertyId,
    pub values: Vec<f64>,
    pub resolution: u64,
}

pub fn active_nodes(s: &Snapshot) -> f64 {
    s.active_nodes().len() as f64
}

pub fn active_edges(s: &Snapshot) -> f64 {
    s.edge_count() as f64
}

pub fn avg_degree(s: &Snapshot) -> f64 {
    let n = s.active_nodes().len();
    if n == 0 {
        0.0
    } else {
        2.0 * s.edge_count() as f64 / n as f64
    }
}

/// Sum over nodes of the local clustering coefficient; nodes of degree < 2
/// contribute 0.
pub fn clustering_sum(s: &Snapshot, n: usize) -> f64 {
    let adj = s.adjacency(n);
    let mut total = 0.0;
    for i in 0..n {
        let deg = adj[i].len();
        if deg < 2 {
            continue;
        }
        let mut triangles = 0usize;
        for a in 0..deg {
            for b in (a + 1)..deg {
                if s.contains_edge(adj[i][a], adj[i][b]) {
                    triangles += 1;
                }
            }
        }
        total += triangles as f64 / ((deg * (deg - 1)) as f64 / 2.0);
    }
    total
}

/// Brandes' betweenness, unnormalized, each unordered pair counted once.
pub fn betweenness_sum(s: &Snapshot, n: usize) -> f64 {
    betweenness(s, n).iter().sum()
}

pub fn betweenness(s: &Snapshot, n: usize) -> Vec<f64> {
    let adj = s.adjacency(n);
    let mut centrality = vec![0.0f64; n];
    for source in 0..n {
        if adj[source].is_empty() {
            continue;
        }
        let mut stack = Vec::with_capacity(n);
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![-1i64; n];
        sigma[source] = 1.0;
        dist[source] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                let w = w as usize;
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != source {
                centrality[w] += delta[w];
            }
        }
    }
    // each unordered pair was counted from both endpoints
    for c in &mut centrality {
        *c /= 2.0;
    }
    centrality
}

/// Sum over nodes of component-restricted closeness:
/// r_i / sum of distances to the r_i nodes reachable from i.
pub fn closeness_sum(s: &Snapshot, n: usize) -> f64 {
    let adj = s.adjacency(n);
    let mut total = 0.0;
    for source in 0..n {
        if adj[source].is_empty() {
            continue;
        }
        let mut dist = vec![-1i64; n];
        dist[source] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        let mut reach = 0u64;
        let mut dist_sum = 0i64;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                let w = w as usize;
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    reach += 1;
                    dist_sum += dist[w];
                    queue.push_back(w);
                }
            }
        }
        if dist_sum > 0 {
            total += reach as f64 / dist_sum as f64;
        }
    }
    total
}

/// Modularity of the Louvain partition of the snapshot.
pub fn modularity(s: &Snapshot, n: usize) -> f64 {
    louvain(s, n).modularity
}

/// |A_{t+1}| / |E_t| where A_{t+1} are the edges of the successor snapshot
/// adjacent to an edge of `s_t`. With `new_only` (the default reading) edges
/// already present at `t` are excluded from A. Returns 0 when E_t is empty.
pub fn edge_emergence(s_t: &Snapshot, s_t1: &Snapshot, new_only: bool) -> f64 {
    if s_t.edge_count() == 0 {
        return 0.0;
    }
    let active_t = s_t.active_nodes();
    let adjacent = s_t1
        .edges()
        .iter()
        .filter(|&&(u, v)| active_t.contains(&u) || active_t.contains(&v))
        .filter(|&&(u, v)| !new_only || !s_t.contains_edge(u, v))
        .count();
    adjacent as f64 / s_t.edge_count() as f64
}

fn evaluate(p: PropertyId, s: &Snapshot, n: usize) -> f64 {
    match p {
        PropertyId::ActiveNodes => active_nodes(s),
        PropertyId::ActiveEdges => active_edges(s),
        PropertyId::AvgDegree => avg_degree(s),
        PropertyId::ClusteringCoeffSum => clustering_sum(s, n),
        PropertyId::BetweennessSum => betweenness_sum(s, n),
        PropertyId::ClosenessSum => closeness_sum(s, n),
        PropertyId::Modularity => modularity(s, n),
        PropertyId::EdgeEmergence => unreachable!("edge emergence needs two snapshots"),
    }
}

/// Evaluate one property over the whole series. EdgeEmergence yields length
/// T-1 (raw form); all others length T. Snapshots are processed in parallel.
pub fn metric_series(series: &SnapshotSeries, p: PropertyId) -> Result<MetricSeries> {
    if series.is_empty() {
        return Err(Error::Argument("metric series over empty snapshot series".into()));
    }
    let n = series.node_count();
    let values: Vec<f64> = match p {
        PropertyId::EdgeEmergence => (0..series.len() - 1)
            .into_par_iter()
            .map(|t| edge_emergence(series.snapshot(t), series.snapshot(t + 1), true))
            .collect(),
        _ => series
            .snapshots()
            .par_iter()
            .map(|s| evaluate(p, s, n))
            .collect(),
    };
    Ok(MetricSeries {
        property: p,
        values,
        resolution: series.resolution(),
    })
}

/// All eight properties, EdgeEmergence padded with a trailing 0 so the rows
/// of the metrics table share one length.
pub fn metric_table(series: &SnapshotSeries) -> Result<Vec<MetricSeries>> {
    let mut out = Vec::with_capacity(PropertyId::ALL.len());
    for p in PropertyId::ALL {
        let mut m = metric_series(series, p)?;
        if p == PropertyId::EdgeEmergence {
            m.values.push(0.0);
        }
        out.push(m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn triangle() -> Snapshot {
        Snapshot::new(vec![(0, 1), (1, 2), (0, 2)])
    }

    #[test]
    fn counts_on_small_graphs() {
        assert_eq!(active_nodes(&triangle()), 3.0);
        assert_eq!(active_nodes(&Snapshot::empty()), 0.0);
        assert_eq!(active_nodes(&Snapshot::new(vec![(0, 1), (2, 3)])), 4.0);
        assert_eq!(active_edges(&triangle()), 3.0);
        assert_eq!(active_edges(&Snapshot::new(vec![(0, 1), (1, 0)])), 1.0);
    }

    #[test]
    fn avg_degree_cases() {
        assert_abs_diff_eq!(avg_degree(&triangle()), 2.0);
        let path = Snapshot::new(vec![(0, 1), (1, 2)]);
        assert_abs_diff_eq!(avg_degree(&path), 4.0 / 3.0);
        assert_eq!(avg_degree(&Snapshot::empty()), 0.0);
    }

    #[test]
    fn degree_identity() {
        let s = Snapshot::new(vec![(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)]);
        assert_abs_diff_eq!(
            avg_degree(&s) * active_nodes(&s),
            2.0 * active_edges(&s),
            epsilon = 1e-12
        );
    }

    #[test]
    fn clustering_triangle_and_star() {
        assert_abs_diff_eq!(clustering_sum(&triangle(), 3), 3.0);
        let star = Snapshot::new(vec![(0, 1), (0, 2), (0, 3)]);
        assert_abs_diff_eq!(clustering_sum(&star, 4), 0.0);
    }

    #[test]
    fn clustering_chorded_cycle() {
        // 4-cycle 0-1-2-3 plus chord (0,2): triangles {0,1,2} and {0,2,3}.
        // c_0 = c_2 = 2/3, c_1 = c_3 = 1.
        let s = Snapshot::new(vec![(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]);
        assert_abs_diff_eq!(clustering_sum(&s, 4), 2.0 / 3.0 * 2.0 + 2.0, epsilon = 1e-12);
    }

    #[test]
    fn betweenness_known_values() {
        let path = Snapshot::new(vec![(0, 1), (1, 2)]);
        assert_abs_diff_eq!(betweenness_sum(&path, 3), 1.0, epsilon = 1e-12);
        let star = Snapshot::new(vec![(0, 1), (0, 2), (0, 3)]);
        assert_abs_diff_eq!(betweenness_sum(&star, 4), 3.0, epsilon = 1e-12);
        let k4 = Snapshot::new(vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_abs_diff_eq!(betweenness_sum(&k4, 4), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn closeness_known_values() {
        assert_abs_diff_eq!(closeness_sum(&triangle(), 3), 3.0, epsilon = 1e-12);
        let path = Snapshot::new(vec![(0, 1), (1, 2)]);
        assert_abs_diff_eq!(closeness_sum(&path, 3), 1.0 + 2.0 / 3.0 + 2.0 / 3.0, epsilon = 1e-12);
        assert_eq!(closeness_sum(&Snapshot::empty(), 3), 0.0);
    }

    #[test]
    fn edge_emergence_figure_case() {
        // E_t = {(i,e),(x,y)}; at t+1 the adjacent new edges are
        // (i,a),(e,b),(x,c),(y,d) -> 4/2 = 2.
        // ids: i=0 e=1 x=2 y=3 a=4 b=5 c=6 d=7
        let s_t = Snapshot::new(vec![(0, 1), (2, 3)]);
        let s_t1 = Snapshot::new(vec![(0, 4), (1, 5), (2, 6), (3, 7)]);
        assert_abs_diff_eq!(edge_emergence(&s_t, &s_t1, true), 2.0);
    }

    #[test]
    fn edge_emergence_edge_cases() {
        let s = triangle();
        assert_eq!(edge_emergence(&s, &s, true), 0.0);
        let ab = Snapshot::new(vec![(0, 1)]);
        let cd = Snapshot::new(vec![(2, 3)]);
        assert_eq!(edge_emergence(&ab, &cd, true), 0.0);
        assert_eq!(edge_emergence(&Snapshot::empty(), &ab, true), 0.0);
        // persistent edges included under the alternate reading
        assert_abs_diff_eq!(edge_emergence(&s, &s, false), 1.0);
    }

    #[test]
    fn series_matches_per_snapshot_calls() {
        let snaps = vec![
            triangle(),
            Snapshot::new(vec![(0, 1), (1, 3)]),
            Snapshot::empty(),
            Snapshot::new(vec![(2, 3)]),
        ];
        let series = SnapshotSeries::new(
            snaps.clone(),
            300,
            crate::graph::NodeLabels::new(vec!["a".into(), "b".into(), "c".into(), "d".into()]),
        );
        for p in PropertyId::ALL {
            let m = metric_series(&series, p).unwrap();
            match p {
                PropertyId::EdgeEmergence => {
                    assert_eq!(m.values.len(), snaps.len() - 1);
                    for t in 0..snaps.len() - 1 {
                        assert_eq!(m.values[t], edge_emergence(&snaps[t], &snaps[t + 1], true));
                    }
                }
                _ => {
                    assert_eq!(m.values.len(), snaps.len());
                    for (t, s) in snaps.iter().enumerate() {
                        assert_eq!(m.values[t], evaluate(p, s, 4), "{:?} at {t}", p);
                    }
                }
            }
        }
    }

    #[test]
    fn constant_triangle_series_has_constant_avg_degree() {
        let series = SnapshotSeries::new(
            vec![triangle(); 5],
            300,
            crate::graph::NodeLabels::new(vec!["a".into(), "b".into(), "c".into()]),
        );
        let m = metric_series(&series, PropertyId::AvgDegree).unwrap();
        assert!(m.values.iter().all(|&v| (v - 2.0).abs() < 1e-12));
    }
}

//! Synthetic temporal contact networks with tunable memory and burstiness.
//!
//! These generators stand in for face-to-face contact traces when none are
//! on disk: edges persist step to step, a slow activity cycle alternates
//! busy and silent phases, and node sociability is heterogeneous.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{NodeId, NodeLabels, Snapshot, SnapshotSeries};

/// Contact network driven by a periodic activity level with edge memory.
#[derive(Debug, Clone)]
pub struct BurstyNetwork {
    pub nodes: usize,
    pub steps: usize,
    /// Length of one busy/silent activity cycle, in steps.
    pub period: f64,
    /// Per-pair edge birth probability at full activity.
    pub edge_birth: f64,
    /// Probability an existing edge survives into the next step, at full
    /// activity.
    pub persistence: f64,
    /// Activity floor during silent phases, in [0,1].
    pub silent_level: f64,
}

impl Default for BurstyNetwork {
    fn default() -> Self {
        BurstyNetwork {
            nodes: 40,
            steps: 600,
            period: 120.0,
            edge_birth: 0.02,
            persistence: 0.75,
            silent_level: 0.05,
        }
    }
}

fn labels(n: usize) -> NodeLabels {
    NodeLabels::new((0..n).map(|i| format!("n{i}")).collect())
}

impl BurstyNetwork {
    /// Activity level in [silent_level, 1]: a smoothed square wave.
    pub fn activity(&self, t: usize) -> f64 {
        let phase = (2.0 * std::f64::consts::PI * t as f64 / self.period).sin();
        let profile = (0.5 + 0.5 * phase).powi(2);
        self.silent_level + (1.0 - self.silent_level) * profile
    }

    /// Sociability weight of a node, in (0, 1].
    fn sociability(&self, v: usize) -> f64 {
        0.3 + 0.7 * (v as f64 + 1.0) / self.nodes as f64
    }

    pub fn generate(&self, seed: u64) -> SnapshotSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.nodes;
        let mut current: Vec<(NodeId, NodeId)> = Vec::new();
        let mut snapshots = Vec::with_capacity(self.steps);
        for t in 0..self.steps {
            let a = self.activity(t);
            let mut next: Vec<(NodeId, NodeId)> = Vec::new();
            // surviving edges
            for &e in &current {
                if rng.gen::<f64>() < self.persistence * a.sqrt() {
                    next.push(e);
                }
            }
            // new edges
            for u in 0..n {
                for v in (u + 1)..n {
                    let p = self.edge_birth * a * self.sociability(u) * self.sociability(v);
                    if rng.gen::<f64>() < p {
                        next.push((u as NodeId, v as NodeId));
                    }
                }
            }
            let snap = Snapshot::new(next);
            current = snap.edges().to_vec();
            snapshots.push(snap);
        }
        SnapshotSeries::new(snapshots, 300, labels(n))
    }
}

/// Contact network whose node activity drifts over time: half the nodes ramp
/// up from a low level, half decay from a high one, crossing mid-trace.
/// Historical average degree then misranks nodes near the end of the trace
/// while a short-window forecast does not.
#[derive(Debug, Clone)]
pub struct DriftingNetwork {
    pub nodes: usize,
    pub steps: usize,
    pub edge_scale: f64,
}

impl Default for DriftingNetwork {
    fn default() -> Self {
        DriftingNetwork {
            nodes: 30,
            steps: 240,
            edge_scale: 0.35,
        }
    }
}

impl DriftingNetwork {
    /// Activity of node v at step t, linear in t. Even nodes rise, odd nodes
    /// decay; amplitudes vary with the node index.
    pub fn node_activity(&self, v: usize, t: usize) -> f64 {
        let x = t as f64 / self.steps as f64;
        let amp = 0.4 + 0.6 * ((v / 2) as f64 + 1.0) / (self.nodes as f64 / 2.0);
        if v % 2 == 0 {
            0.1 + 0.9 * x * amp
        } else {
            (0.1 + 0.9 * (1.0 - x)) * amp
        }
    }

    pub fn generate(&self, seed: u64) -> SnapshotSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.nodes;
        let mut snapshots = Vec::with_capacity(self.steps);
        for t in 0..self.steps {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    let p = self.edge_scale
                        * self.node_activity(u, t)
                        * self.node_activity(v, t);
                    if rng.gen::<f64>() < p {
                        edges.push((u as NodeId, v as NodeId));
                    }
                }
            }
            snapshots.push(Snapshot::new(edges));
        }
        SnapshotSeries::new(snapshots, 300, labels(n))
    }
}

/// Uniform random graph series without any temporal memory; a baseline for
/// overlap-decay comparisons.
pub fn memoryless_series(nodes: usize, steps: usize, edge_prob: f64, seed: u64) -> SnapshotSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let snapshots = (0..steps)
        .map(|_| {
            let mut edges = Vec::new();
            for u in 0..nodes {
                for v in (u + 1)..nodes {
                    if rng.gen::<f64>() < edge_prob {
                        edges.push((u as NodeId, v as NodeId));
                    }
                }
            }
            Snapshot::new(edges)
        })
        .collect();
    SnapshotSeries::new(snapshots, 300, labels(nodes))
}

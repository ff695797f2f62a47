//! Snapshot graphs and the snapshot series a temporal contact network is
//! aggregated into.
//!
//! Node ids are dense `u32` indices assigned at ingest; the original labels
//! are kept alongside so reports can show them.

use std::collections::BTreeSet;

pub type NodeId = u32;

/// A single static snapshot: a simple undirected graph given by its edge set.
/// Edges are stored as `(u, v)` with `u < v`, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    edges: Vec<(NodeId, NodeId)>,
}

impl Snapshot {
    pub fn new(mut edges: Vec<(NodeId, NodeId)>) -> Self {
        for e in &mut edges {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.retain(|&(u, v)| u != v);
        edges.sort_unstable();
        edges.dedup();
        Snapshot { edges }
    }

    pub fn empty() -> Self {
        Snapshot { edges: Vec::new() }
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).is_ok()
    }

    /// Nodes with degree >= 1.
    pub fn active_nodes(&self) -> BTreeSet<NodeId> {
        let mut s = BTreeSet::new();
        for &(u, v) in &self.edges {
            s.insert(u);
            s.insert(v);
        }
        s
    }

    /// Adjacency lists over a dense index space of `n` nodes.
    pub fn adjacency(&self, n: usize) -> Vec<Vec<NodeId>> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }

    /// Copy of this snapshot with every edge touching a removed node dropped.
    pub fn without_nodes(&self, removed: &[bool]) -> Snapshot {
        Snapshot {
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|&(u, v)| !removed[u as usize] && !removed[v as usize])
                .collect(),
        }
    }
}

/// Mapping between original node labels and dense indices.
#[derive(Debug, Clone, Default)]
pub struct NodeLabels {
    labels: Vec<String>,
}

impl NodeLabels {
    pub fn new(labels: Vec<String>) -> Self {
        NodeLabels { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

/// An equispaced sequence of snapshots plus the universe of nodes seen
/// anywhere in the underlying log. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SnapshotSeries {
    snapshots: Vec<Snapshot>,
    resolution: u64,
    labels: NodeLabels,
}

impl SnapshotSeries {
    pub fn new(snapshots: Vec<Snapshot>, resolution: u64, labels: NodeLabels) -> Self {
        SnapshotSeries {
            snapshots,
            resolution,
            labels,
        }
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn snapshot(&self, t: usize) -> &Snapshot {
        &self.snapshots[t]
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn resolution(&self) -> u64 {
        self.resolution
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &NodeLabels {
        &self.labels
    }

    /// Per-step degree of one node across the whole series.
    pub fn degree_series(&self, node: NodeId) -> Vec<f64> {
        self.snapshots
            .iter()
            .map(|s| {
                s.edges()
                    .iter()
                    .filter(|&&(u, v)| u == node || v == node)
                    .count() as f64
            })
            .collect()
    }
}

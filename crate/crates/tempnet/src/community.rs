//! Louvain community detection and Newman modularity.
//!
//! The sweep is deterministic: nodes are visited in ascending index order and
//! ties in modularity gain are broken toward the lowest community index, so a
//! given snapshot always yields the same partition.

use crate::graph::Snapshot;

/// Newman modularity of an explicit partition of a snapshot, computed
/// directly from the unweighted edge list. `partition[i]` is the community
/// of node `i`; isolated nodes contribute nothing.
pub fn partition_modularity(snapshot: &Snapshot, partition: &[usize]) -> f64 {
    let m = snapshot.edge_count() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let n_comm = partition.iter().copied().max().map_or(0, |c| c + 1);
    let mut internal = vec![0.0f64; n_comm];
    let mut degree = vec![0.0f64; n_comm];
    for &(u, v) in snapshot.edges() {
        let (cu, cv) = (partition[u as usize], partition[v as usize]);
        degree[cu] += 1.0;
        degree[cv] += 1.0;
        if cu == cv {
            internal[cu] += 1.0;
        }
    }
    (0..n_comm)
        .map(|c| internal[c] / m - (degree[c] / (2.0 * m)).powi(2))
        .sum()
}

/// Result of a Louvain run: the partition on the original nodes and its Q.
#[derive(Debug, Clone)]
pub struct Communities {
    pub partition: Vec<usize>,
    pub modularity: f64,
}

/// Weighted multigraph used for the aggregation phases. Self-loop weight is
/// stored once and counts twice toward the degree.
struct WeightedGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    total_weight: f64, // m: sum of edge weights, self-loops included once
}

impl WeightedGraph {
    fn degree(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_loops[i]
    }

    fn node_count(&self) -> usize {
        self.adj.len()
    }
}

/// Run Louvain on a snapshot over `n` nodes and return the partition with its
/// modularity. A snapshot with no edges yields the singleton partition, Q = 0.
pub fn louvain(snapshot: &Snapshot, n: usize) -> Communities {
    if snapshot.edge_count() == 0 {
        return Communities {
            partition: (0..n).collect(),
            modularity: 0.0,
        };
    }
    let mut graph = WeightedGraph {
        adj: {
            let mut adj = vec![Vec::new(); n];
            for &(u, v) in snapshot.edges() {
                adj[u as usize].push((v as usize, 1.0));
                adj[v as usize].push((u as usize, 1.0));
            }
            adj
        },
        self_loops: vec![0.0; n],
        total_weight: snapshot.edge_count() as f64,
    };

    // node -> community of the original graph, refined level by level
    let mut membership: Vec<usize> = (0..n).collect();
    loop {
        let (local, moved) = local_moving(&graph);
        if !moved {
            break;
        }
        let (aggregated, remap) = aggregate(&graph, &local);
        for m in membership.iter_mut() {
            *m = remap[local[*m]];
        }
        graph = aggregated;
        if graph.node_count() <= 1 {
            break;
        }
    }

    let partition = canonical(&membership);
    let modularity = partition_modularity(snapshot, &partition);
    Communities {
        partition,
        modularity,
    }
}

/// One level of greedy node sweeps. Returns the community of each node and
/// whether any node moved.
fn local_moving(graph: &WeightedGraph) -> (Vec<usize>, bool) {
    let n = graph.node_count();
    let m = graph.total_weight;
    let mut community: Vec<usize> = (0..n).collect();
    let degrees: Vec<f64> = (0..n).map(|i| graph.degree(i)).collect();
    let mut comm_degree = degrees.clone();

    let mut any_moved = false;
    loop {
        let mut moved_this_pass = false;
        for i in 0..n {
            let current = community[i];
            // weight from i to each neighboring community
            let mut links: Vec<(usize, f64)> = Vec::new();
            for &(j, w) in &graph.adj[i] {
                let c = community[j];
                match links.iter_mut().find(|(lc, _)| *lc == c) {
                    Some((_, lw)) => *lw += w,
                    None => links.push((c, w)),
                }
            }
            comm_degree[current] -= degrees[i];
            let to_current = links
                .iter()
                .find(|(c, _)| *c == current)
                .map_or(0.0, |&(_, w)| w);
            let gain_of = |c: usize, k_ic: f64| {
                k_ic / m - comm_degree[c] * degrees[i] / (2.0 * m * m)
            };
            let mut best_comm = current;
            let mut best_gain = gain_of(current, to_current);
            for &(c, k_ic) in &links {
                if c == current {
                    continue;
                }
                let g = gain_of(c, k_ic);
                if g > best_gain + 1e-12 || ((g - best_gain).abs() <= 1e-12 && c < best_comm) {
                    best_gain = g;
                    best_comm = c;
                }
            }
            comm_degree[best_comm] += degrees[i];
            if best_comm != current {
                community[i] = best_comm;
                moved_this_pass = true;
                any_moved = true;
            }
        }
        if !moved_this_pass {
            break;
        }
    }
    (community, any_moved)
}

/// Collapse each community into one supernode. Returns the new graph and the
/// mapping old-community -> new node index.
fn aggregate(graph: &WeightedGraph, community: &[usize]) -> (WeightedGraph, Vec<usize>) {
    let remap = dense_remap(community);
    let k = remap.iter().filter(|&&r| r != usize::MAX).count();
    let mut weights: Vec<std::collections::HashMap<usize, f64>> =
        vec![std::collections::HashMap::new(); k];
    let mut self_loops = vec![0.0; k];
    for i in 0..graph.node_count() {
        let ci = remap[community[i]];
        self_loops[ci] += graph.self_loops[i];
        for &(j, w) in &graph.adj[i] {
            if j < i {
                continue; // each undirected edge once
            }
            let cj = remap[community[j]];
            if ci == cj {
                self_loops[ci] += w;
            } else {
                *weights[ci].entry(cj).or_insert(0.0) += w;
                *weights[cj].entry(ci).or_insert(0.0) += w;
            }
        }
    }
    let adj = weights
        .into_iter()
        .map(|map| {
            let mut v: Vec<(usize, f64)> = map.into_iter().collect();
            v.sort_unstable_by_key(|&(j, _)| j);
            v
        })
        .collect();
    (
        WeightedGraph {
            adj,
            self_loops,
            total_weight: graph.total_weight,
        },
        remap,
    )
}

/// Relabel community ids densely, ordered by first appearance.
fn dense_remap(community: &[usize]) -> Vec<usize> {
    let max = community.iter().copied().max().unwrap_or(0);
    let mut remap = vec![usize::MAX; max + 1];
    let mut next = 0usize;
    for &c in community {
        if remap[c] == usize::MAX {
            remap[c] = next;
            next += 1;
        }
    }
    remap
}

fn canonical(membership: &[usize]) -> Vec<usize> {
    let remap = dense_remap(membership);
    membership.iter().map(|&c| remap[c]).collect()
}

//! Immutable undirected simple graph over labelled nodes.
//!
//! Nodes are dense indices into a label table; adjacency is stored in
//! compressed sparse row form with each neighbour list sorted, so
//! `has_edge` is a binary search and iteration order is deterministic.

mod components;
pub mod io;
mod paths;
mod stats;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use components::{connected_components, ComponentPartition};
pub use paths::{single_source_shortest_paths, ShortestPathData};
pub(crate) use paths::{sweep, Sweep};
pub use stats::{local_clustering, network_parameters, NetworkParameters};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Counts of records discarded while building a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Graph {
    /// Builds a graph from `(label, label)` records. Nodes are numbered in
    /// order of first appearance; self-loops and repeated pairs are dropped
    /// and counted.
    pub fn from_edge_list<S: AsRef<str>>(records: &[(S, S)]) -> (Graph, BuildReport) {
        let mut builder = GraphBuilder::new();
        for (a, b) in records {
            let a = builder.add_node(a.as_ref());
            let b = builder.add_node(b.as_ref());
            builder.add_edge(a, b);
        }
        builder.build()
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.labels.len()).map(NodeId::new)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.labels.len()
    }

    pub(crate) fn check(&self, v: NodeId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownNode(v.index()))
        }
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        let i = v.index();
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn neighbors(&self, v: NodeId) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.adj(v.index()).iter().map(|&u| NodeId(u))
    }

    /// Sorted raw neighbour indices of node `v`.
    #[inline]
    pub(crate) fn adj(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.contains(u) && self.contains(v) && self.adj(u.index()).binary_search(&v.0).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.adj(u)
                .iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (NodeId::new(u), NodeId(v)))
        })
    }

    /// Subgraph induced by `nodes`, renumbered in the given order.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Graph {
        let mut local = vec![u32::MAX; self.node_count()];
        for (i, v) in nodes.iter().enumerate() {
            local[v.index()] = i as u32;
        }
        let mut offsets = Vec::with_capacity(nodes.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for v in nodes {
            let start = targets.len();
            targets.extend(
                self.adj(v.index())
                    .iter()
                    .map(|&u| local[u as usize])
                    .filter(|&u| u != u32::MAX),
            );
            targets[start..].sort_unstable();
            offsets.push(targets.len());
        }
        let labels: Vec<String> = nodes.iter().map(|&v| self.label(v).to_owned()).collect();
        Graph {
            index: index_labels(&labels),
            labels,
            offsets,
            targets,
        }
    }

    /// Graph on the same labelled node set with a different edge set.
    /// Pairs must be distinct and loop-free.
    pub(crate) fn with_edges(&self, edges: &[(u32, u32)]) -> Graph {
        let (offsets, targets) = csr(self.node_count(), edges);
        Graph {
            labels: self.labels.clone(),
            index: self.index.clone(),
            offsets,
            targets,
        }
    }
}

fn index_labels(labels: &[String]) -> HashMap<String, NodeId> {
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), NodeId::new(i)))
        .collect()
}

fn csr(n: usize, edges: &[(u32, u32)]) -> (Vec<usize>, Vec<u32>) {
    let mut degree = vec![0usize; n];
    for &(u, v) in edges {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    for d in &degree {
        offsets.push(offsets.last().unwrap() + d);
    }
    let mut fill = offsets[..n].to_vec();
    let mut targets = vec![0u32; 2 * edges.len()];
    for &(u, v) in edges {
        targets[fill[u as usize]] = v;
        fill[u as usize] += 1;
        targets[fill[v as usize]] = u;
        fill[v as usize] += 1;
    }
    for v in 0..n {
        targets[offsets[v]..offsets[v + 1]].sort_unstable();
    }
    (offsets, targets)
}

/// Incremental construction of a [`Graph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: Vec<(u32, u32)>,
    self_loops: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `label`, adding the node if it is new.
    pub fn add_node(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = NodeId::new(self.labels.len());
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId) {
        if a == b {
            self.self_loops += 1;
            return;
        }
        let (u, v) = if a < b { (a.0, b.0) } else { (b.0, a.0) };
        self.edges.push((u, v));
    }

    pub fn build(mut self) -> (Graph, BuildReport) {
        let before = self.edges.len();
        self.edges.sort_unstable();
        self.edges.dedup();
        let report = BuildReport {
            self_loops: self.self_loops,
            duplicates: before - self.edges.len(),
        };
        let (offsets, targets) = csr(self.labels.len(), &self.edges);
        let graph = Graph {
            labels: self.labels,
            index: self.index,
            offsets,
            targets,
        };
        (graph, report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedupes_and_drops_self_loops() {
        let (g, report) = Graph::from_edge_list(&[("a", "b"), ("b", "a"), ("a", "a")]);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(report.self_loops, 1);
        assert_eq!(report.duplicates, 1);
    }

    #[test]
    fn empty_edge_list() {
        let (g, _) = Graph::from_edge_list::<&str>(&[]);
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn first_appearance_order() {
        let (g, _) = Graph::from_edge_list(&[("c", "a"), ("b", "c")]);
        assert_eq!(g.labels(), &["c", "a", "b"]);
        assert!(g.has_edge(g.node_id("a").unwrap(), g.node_id("c").unwrap()));
        assert!(!g.has_edge(g.node_id("a").unwrap(), g.node_id("b").unwrap()));
    }

    #[test]
    fn induced_subgraph_keeps_internal_edges() {
        let (g, _) = Graph::from_edge_list(&[("a", "b"), ("b", "c"), ("c", "d")]);
        let sub = g.induced_subgraph(&[NodeId::new(1), NodeId::new(2), NodeId::new(3)]);
        assert_eq!(sub.labels(), &["b", "c", "d"]);
        assert_eq!(sub.edge_count(), 2);
        assert_eq!(sub.degree(NodeId::new(0)), 1);
    }

    proptest::proptest! {
        #[test]
        fn degree_sum_is_twice_edges(pairs in proptest::collection::vec((0u8..12, 0u8..12), 0..60)) {
            let records: Vec<(String, String)> =
                pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
            let (g, _) = Graph::from_edge_list(&records);
            proptest::prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
            for (u, v) in g.edges() {
                proptest::prop_assert!(u < v);
                proptest::prop_assert!(g.has_edge(v, u));
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use super::{connected_components, sweep, Graph, Sweep};

/// Global summary of a network. Path statistics refer to the largest
/// connected component; clustering is the mean local coefficient over
/// every node of the full graph.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NetworkParameters {
    pub nodes: usize,
    pub edges: usize,
    pub avg_degree: f64,
    pub lcc_nodes: usize,
    pub lcc_edges: usize,
    pub lcc_avg_degree: f64,
    pub diameter: u32,
    pub avg_path_length: f64,
    pub clustering: f64,
}

pub fn network_parameters(g: &Graph) -> NetworkParameters {
    if g.is_empty() {
        return NetworkParameters::default();
    }
    let parts = connected_components(g);
    let lcc = g.induced_subgraph(parts.largest().unwrap_or(&[]));
    let paths = sweep(&lcc, false);
    NetworkParameters::from_parts(g, &lcc, &paths)
}

impl NetworkParameters {
    /// Assembles the record from a graph, its largest component and an
    /// all-sources sweep over that component.
    pub(crate) fn from_parts(g: &Graph, lcc: &Graph, paths: &Sweep) -> Self {
        if g.is_empty() {
            return Self::default();
        }
        let n = lcc.node_count();
        let pairs = n * n.saturating_sub(1);
        let total: u64 = paths.distance_sum.iter().sum();
        let clustering = local_clustering(g).iter().sum::<f64>() / g.node_count() as f64;
        NetworkParameters {
            nodes: g.node_count(),
            edges: g.edge_count(),
            avg_degree: 2.0 * g.edge_count() as f64 / g.node_count() as f64,
            lcc_nodes: n,
            lcc_edges: lcc.edge_count(),
            lcc_avg_degree: if n == 0 {
                0.0
            } else {
                2.0 * lcc.edge_count() as f64 / n as f64
            },
            diameter: paths.eccentricity.iter().copied().max().unwrap_or(0),
            avg_path_length: if pairs == 0 {
                0.0
            } else {
                total as f64 / pairs as f64
            },
            clustering,
        }
    }
}

/// Local clustering coefficient of every node: closed triangles over
/// `k(k-1)/2`, zero when `k < 2`.
pub fn local_clustering(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut mark = vec![false; n];
    let mut out = vec![0.0; n];
    for v in 0..n {
        let nbrs = g.adj(v);
        let k = nbrs.len();
        if k < 2 {
            continue;
        }
        for &u in nbrs {
            mark[u as usize] = true;
        }
        let mut links = 0usize;
        for &u in nbrs {
            links += g.adj(u as usize).iter().filter(|&&w| mark[w as usize]).count();
        }
        for &u in nbrs {
            mark[u as usize] = false;
        }
        // every neighbour-neighbour edge was seen from both ends
        out[v] = (links / 2) as f64 / (k * (k - 1) / 2) as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let (g, _) = Graph::from_edge_list(&[("a", "b"), ("b", "c"), ("c", "a")]);
        let p = network_parameters(&g);
        assert_eq!(p.diameter, 1);
        assert_eq!(p.avg_path_length, 1.0);
        assert_eq!(p.clustering, 1.0);
    }

    #[test]
    fn path_of_three() {
        let (g, _) = Graph::from_edge_list(&[("a", "b"), ("b", "c")]);
        let p = network_parameters(&g);
        assert_eq!(p.clustering, 0.0);
        assert_eq!(p.diameter, 2);
        // pairs: ab=1, bc=1, ac=2
        approx::assert_relative_eq!(p.avg_path_length, 4.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn empty_graph_is_all_zero() {
        let (g, _) = Graph::from_edge_list::<&str>(&[]);
        assert_eq!(network_parameters(&g), NetworkParameters::default());
    }

    #[test]
    fn lcc_restricted_paths() {
        let (g, _) = Graph::from_edge_list(&[("a", "b"), ("b", "c"), ("c", "d"), ("x", "y")]);
        let p = network_parameters(&g);
        assert_eq!((p.nodes, p.edges, p.lcc_nodes, p.lcc_edges), (6, 4, 4, 3));
        assert_eq!(p.diameter, 3);
        // P4 pair distances: 1,1,1,2,2,3
        approx::assert_relative_eq!(p.avg_path_length, 10.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn clustering_of_triangle_with_tail() {
        let (g, _) = Graph::from_edge_list(&[("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")]);
        let c = local_clustering(&g);
        assert_eq!(c, vec![1.0, 1.0, 1.0 / 3.0, 0.0]);
    }
}

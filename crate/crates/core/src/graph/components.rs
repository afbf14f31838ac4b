use std::collections::VecDeque;

use serde::Serialize;

use super::{Graph, NodeId};

/// Partition of the node set into connected components.
///
/// Component ids are assigned after sorting by size (descending), ties
/// broken by the smallest member index, so id 0 is always the largest
/// component.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentPartition {
    component_of: Vec<usize>,
    components: Vec<Vec<NodeId>>,
}

impl ComponentPartition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component_of(&self, v: NodeId) -> usize {
        self.component_of[v.index()]
    }

    /// Members of component `id`, in increasing node order.
    pub fn members(&self, id: usize) -> &[NodeId] {
        &self.components[id]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn largest(&self) -> Option<&[NodeId]> {
        self.components.first().map(Vec::as_slice)
    }
}

pub fn connected_components(g: &Graph) -> ComponentPartition {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        let mut members = Vec::new();
        while let Some(v) = queue.pop_front() {
            members.push(NodeId::new(v));
            for &u in g.adj(v) {
                let u = u as usize;
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    // Discovery order already follows the smallest member, and the sort is stable.
    components.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let mut component_of = vec![0; n];
    for (id, members) in components.iter().enumerate() {
        for v in members {
            component_of[v.index()] = id;
        }
    }
    ComponentPartition {
        component_of,
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    #[test]
    fn triangle_plus_isolated() {
        let mut b = GraphBuilder::new();
        let x = b.add_node("x");
        let [a, c, d] = ["a", "c", "d"].map(|l| b.add_node(l));
        b.add_edge(a, c);
        b.add_edge(c, d);
        b.add_edge(d, a);
        let (g, _) = b.build();
        let parts = connected_components(&g);
        assert_eq!(parts.sizes(), vec![3, 1]);
        assert_eq!(parts.component_of(x), 1);
        assert_eq!(parts.largest().unwrap(), &[a, c, d]);
    }

    #[test]
    fn empty_graph_has_no_components() {
        let (g, _) = Graph::from_edge_list::<&str>(&[]);
        assert!(connected_components(&g).is_empty());
    }

    #[test]
    fn equal_sizes_ordered_by_smallest_member() {
        let (g, _) = Graph::from_edge_list(&[("a", "b"), ("c", "d")]);
        let parts = connected_components(&g);
        assert_eq!(parts.members(0), &[NodeId::new(0), NodeId::new(1)]);
        assert_eq!(parts.sizes().iter().sum::<usize>(), g.node_count());
    }
}

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use super::{Graph, NodeId};
use crate::error::Result;

/// Breadth-first shortest-path structure from one source.
#[derive(Debug, Clone, Serialize)]
pub struct ShortestPathData {
    pub source: NodeId,
    /// Hop distance, `None` when unreachable.
    pub distance: Vec<Option<u32>>,
    /// Number of distinct shortest paths from the source.
    pub sigma: Vec<f64>,
    pub predecessors: Vec<Vec<NodeId>>,
}

pub fn single_source_shortest_paths(g: &Graph, s: NodeId) -> Result<ShortestPathData> {
    g.check(s)?;
    let n = g.node_count();
    let mut bfs = Bfs::new(n);
    bfs.run(g, s.index(), true);
    let distance = bfs
        .dist
        .iter()
        .map(|&d| (d != UNSEEN).then_some(d))
        .collect();
    let predecessors = (0..n)
        .map(|v| bfs.preds_of(v).iter().map(|&p| NodeId(p)).collect())
        .collect();
    Ok(ShortestPathData {
        source: s,
        distance,
        sigma: bfs.sigma,
        predecessors,
    })
}

const UNSEEN: u32 = u32::MAX;

/// Reusable BFS buffers. Predecessors are kept in a flat arena indexed by
/// the CSR offsets of the graph, since a node has at most `degree` of them.
struct Bfs {
    dist: Vec<u32>,
    sigma: Vec<f64>,
    pred_start: Vec<usize>,
    pred_len: Vec<u32>,
    preds: Vec<u32>,
    queue: VecDeque<u32>,
}

impl Bfs {
    fn new(n: usize) -> Self {
        Bfs {
            dist: vec![UNSEEN; n],
            sigma: vec![0.0; n],
            pred_start: Vec::new(),
            pred_len: vec![0; n],
            preds: Vec::new(),
            queue: VecDeque::with_capacity(n),
        }
    }

    fn preds_of(&self, v: usize) -> &[u32] {
        if self.pred_start.is_empty() {
            return &[];
        }
        let start = self.pred_start[v];
        &self.preds[start..start + self.pred_len[v] as usize]
    }

    fn run(&mut self, g: &Graph, s: usize, track_preds: bool) {
        if track_preds && self.pred_start.is_empty() {
            self.pred_start = g.offsets[..g.node_count()].to_vec();
            self.preds = vec![0; g.targets.len()];
        }
        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s as u32);
        while let Some(v) = self.queue.pop_front() {
            let v = v as usize;
            let next = self.dist[v] + 1;
            for &w in g.adj(v) {
                let wi = w as usize;
                if self.dist[wi] == UNSEEN {
                    self.dist[wi] = next;
                    self.queue.push_back(w);
                }
                if self.dist[wi] == next {
                    self.sigma[wi] += self.sigma[v];
                    if track_preds {
                        let slot = self.pred_start[wi] + self.pred_len[wi] as usize;
                        self.preds[slot] = v as u32;
                        self.pred_len[wi] += 1;
                    }
                }
            }
        }
    }
}

/// All-sources BFS totals.
#[derive(Debug, Clone)]
pub(crate) struct Sweep {
    /// Sum of hop distances from each source to every node it reaches.
    pub distance_sum: Vec<u64>,
    /// Nodes reached from each source, excluding itself.
    pub reached: Vec<u32>,
    pub eccentricity: Vec<u32>,
    /// Brandes sums over ordered pairs (each unordered pair counted twice).
    pub dependency: Option<Vec<f64>>,
}

/// Sources per work item, one bit each in the BFS frontier words. Fixed
/// so that floating-point reduction order never depends on the number of
/// worker threads.
const CHUNK: usize = 64;

/// Runs `$body` with `$j` bound to each set bit of `$mask`, lowest first.
macro_rules! for_bits {
    ($j:ident in $mask:expr => $body:block) => {{
        let mut m: u64 = $mask;
        while m != 0 {
            let $j = m.trailing_zeros() as usize & (CHUNK - 1);
            m &= m - 1;
            $body
        }
    }};
}

/// Adjacency renumbered in BFS order, so that neighbours sit close in
/// memory and sources sharing a batch see similar level structure.
///
/// A leaf hanging off a node of degree two or more is folded into that
/// node: it sees the graph exactly as its host does, one hop further out,
/// so it needs neither a BFS of its own nor a place in anyone else's.
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    /// `order[new] = old`.
    order: Vec<u32>,
    /// Folded leaves per node.
    leaves: Vec<u32>,
    /// Host of each folded leaf (new index), by old index.
    host: Vec<u32>,
}

impl Csr {
    fn relabelled(g: &Graph) -> Self {
        let n = g.node_count();
        let folded = |v: usize| matches!(g.adj(v), &[u] if g.adj(u as usize).len() > 1);
        let mut order = Vec::with_capacity(n);
        let mut label = vec![u32::MAX; n];
        for root in 0..n {
            if label[root] != u32::MAX || folded(root) {
                continue;
            }
            label[root] = order.len() as u32;
            order.push(root as u32);
            let mut head = order.len() - 1;
            while head < order.len() {
                let v = order[head] as usize;
                head += 1;
                for &w in g.adj(v) {
                    if label[w as usize] == u32::MAX && !folded(w as usize) {
                        label[w as usize] = order.len() as u32;
                        order.push(w);
                    }
                }
            }
        }
        let mut leaves = vec![0u32; order.len()];
        let mut host = vec![u32::MAX; n];
        for v in 0..n {
            if folded(v) {
                let u = label[g.adj(v)[0] as usize];
                host[v] = u;
                leaves[u as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(order.len() + 1);
        let mut targets = Vec::with_capacity(g.targets.len());
        offsets.push(0);
        for &old in &order {
            let start = targets.len();
            targets.extend(g.adj(old as usize).iter().map(|&w| label[w as usize]).filter(|&w| w != u32::MAX));
            targets[start..].sort_unstable();
            offsets.push(targets.len());
        }
        Csr {
            offsets,
            targets,
            order,
            leaves,
            host,
        }
    }

    fn node_count(&self) -> usize {
        self.order.len()
    }

    #[inline(always)]
    fn adj(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

type Row = [f64; CHUNK];

/// Buffers for one batch of up to 64 sources. Bit `j` of a node's mask
/// words stands for source `first + j`, and `sigma[v][j]` holds the path
/// count from that source to `v` (later its Brandes coefficient).
struct Batch {
    visited: Vec<u64>,
    frontier: Vec<u64>,
    next: Vec<u64>,
    /// Nodes newly reached at each level with the sources reaching them.
    layer: Vec<(u32, u64)>,
    layer_start: Vec<usize>,
    sigma: Vec<Row>,
}

struct Part {
    sums: Vec<u64>,
    reached: Vec<u32>,
    ecc: Vec<u32>,
    dep: Option<Vec<f64>>,
}

impl Batch {
    fn new(n: usize, with_dependency: bool) -> Self {
        Batch {
            visited: vec![0; n],
            frontier: vec![0; n],
            next: vec![0; n],
            layer: Vec::new(),
            layer_start: Vec::new(),
            sigma: if with_dependency { vec![[0.0; CHUNK]; n] } else { Vec::new() },
        }
    }

    /// Bit-parallel BFS from `sources`, counting shortest paths
    /// along the way when `paths` is set.
    fn levels(&mut self, g: &Csr, sources: &[u32], paths: bool, part: &mut Part) {
        let n = g.node_count();
        let k = sources.len();
        self.visited.fill(0);
        self.frontier.fill(0);
        self.layer.clear();
        self.layer_start.clear();
        self.layer_start.push(0);
        for (j, &s) in sources.iter().enumerate() {
            let s = s as usize;
            self.visited[s] |= 1 << j;
            self.frontier[s] |= 1 << j;
            self.layer.push((s as u32, 1 << j));
            if paths {
                self.sigma[s][j] = 1.0;
            }
        }
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        let mut sums = [0u64; CHUNK];
        let mut reached = [0u32; CHUNK];
        let mut ecc = [0u32; CHUNK];
        for (j, &s) in sources.iter().enumerate() {
            let l = g.leaves[s as usize];
            if l > 0 {
                sums[j] = l as u64;
                reached[j] = l;
                ecc[j] = 1;
            }
        }
        let mut c: Row = [0.0; CHUNK];
        let mut level = 0u32;
        loop {
            level += 1;
            let mut any = 0u64;
            for v in 0..n {
                let seen = self.visited[v];
                if seen == full {
                    self.next[v] = 0;
                    continue;
                }
                let mut reach = 0u64;
                for &w in g.adj(v) {
                    reach |= self.frontier[w as usize];
                }
                let fresh = reach & !seen;
                self.next[v] = fresh;
                any |= fresh;
            }
            if any == 0 {
                break;
            }
            self.layer_start.push(self.layer.len());
            for v in 0..n {
                let fresh = self.next[v];
                if fresh == 0 {
                    continue;
                }
                self.visited[v] |= fresh;
                self.layer.push((v as u32, fresh));
                for_bits!(j in fresh => {
                    sums[j] += level as u64;
                    reached[j] += 1;
                    ecc[j] = ecc[j].max(level);
                    c[j] = 0.0;
                });
                let l = g.leaves[v];
                if l > 0 {
                    for_bits!(j in fresh => {
                        sums[j] += l as u64 * (level as u64 + 1);
                        reached[j] += l;
                        ecc[j] = level + 1;
                    });
                }
                if paths {
                    for &w in g.adj(v) {
                        let w = w as usize;
                        let from = &self.sigma[w];
                        for_bits!(j in self.frontier[w] & fresh => {
                            c[j] += from[j];
                        });
                    }
                    let row = &mut self.sigma[v];
                    for_bits!(j in fresh => {
                        row[j] = c[j];
                    });
                }
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
        self.layer_start.push(self.layer.len());
        for j in 0..k {
            part.sums.push(sums[j]);
            part.reached.push(reached[j]);
            part.ecc.push(ecc[j]);
        }
    }

    /// Brandes dependencies of the last BFS batch, scaled per source by
    /// `weight` and added into `acc`. Layers are walked deepest first;
    /// `below` marks the sources for which each node sits one level deeper
    /// than the current one.
    fn accumulate(&mut self, g: &Csr, weight: &Row, below: &mut [u64], acc: &mut [f64]) {
        let depth = self.layer_start.len() - 1;
        let mut c: Row = [0.0; CHUNK];
        for level in (1..depth).rev() {
            let deeper = if level + 1 < depth {
                self.layer_start[level + 1]..self.layer_start[level + 2]
            } else {
                0..0
            };
            for &(x, mask) in &self.layer[deeper.clone()] {
                below[x as usize] = mask;
            }
            for &(w, mask) in &self.layer[self.layer_start[level]..self.layer_start[level + 1]] {
                let w = w as usize;
                for_bits!(j in mask => {
                    c[j] = 0.0;
                });
                for &x in g.adj(w) {
                    let x = x as usize;
                    let from = &self.sigma[x];
                    for_bits!(j in mask & below[x] => {
                        c[j] += from[j];
                    });
                }
                let row = &mut self.sigma[w];
                let ends = g.leaves[w] as f64;
                let mut dep = 0.0;
                for_bits!(j in mask => {
                    let delta = row[j] * c[j] + ends;
                    row[j] = (1.0 + delta) / row[j];
                    dep += weight[j] * delta;
                });
                acc[w] += dep;
            }
            for &(x, _) in &self.layer[deeper] {
                below[x as usize] = 0;
            }
        }
    }
}

pub(crate) fn sweep(graph: &Graph, with_dependency: bool) -> Sweep {
    let g = &Csr::relabelled(graph);
    let n = g.node_count();
    let sources: Vec<u32> = (0..n as u32).collect();
    let parts: Vec<Part> = sources
        .par_chunks(CHUNK)
        .map_init(
            || (Batch::new(n, with_dependency), vec![0u64; n]),
            |(batch, below), chunk| {
                let mut part = Part {
                    sums: Vec::with_capacity(chunk.len()),
                    reached: Vec::with_capacity(chunk.len()),
                    ecc: Vec::with_capacity(chunk.len()),
                    dep: None,
                };
                batch.levels(g, chunk, with_dependency, &mut part);
                if with_dependency {
                    let mut weight: Row = [0.0; CHUNK];
                    for (w, &s) in weight.iter_mut().zip(chunk) {
                        *w = 1.0 + g.leaves[s as usize] as f64;
                    }
                    let mut acc = vec![0.0; n];
                    batch.accumulate(g, &weight, below, &mut acc);
                    part.dep = Some(acc);
                }
                part
            },
        )
        .collect();

    let (mut sums, mut reached, mut ecc) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut total = with_dependency.then(|| vec![0.0; n]);
    for part in parts {
        sums.extend(part.sums);
        reached.extend(part.reached);
        ecc.extend(part.ecc);
        if let (Some(total), Some(dep)) = (total.as_mut(), part.dep) {
            for (t, d) in total.iter_mut().zip(dep) {
                *t += d;
            }
        }
    }
    if let Some(total) = total.as_mut() {
        for u in 0..n {
            let l = g.leaves[u];
            if l > 0 {
                total[u] += l as f64 * (reached[u] - 1) as f64;
            }
        }
    }

    let size = graph.node_count();
    let mut out = Sweep {
        distance_sum: vec![0; size],
        reached: vec![0; size],
        eccentricity: vec![0; size],
        dependency: with_dependency.then(|| vec![0.0; size]),
    };
    for (new, &old) in g.order.iter().enumerate() {
        let old = old as usize;
        out.distance_sum[old] = sums[new];
        out.reached[old] = reached[new];
        out.eccentricity[old] = ecc[new];
        if let (Some(dep), Some(total)) = (out.dependency.as_mut(), total.as_ref()) {
            dep[old] = total[new];
        }
    }
    for (v, &u) in g.host.iter().enumerate() {
        if u != u32::MAX {
            let u = u as usize;
            out.distance_sum[v] = sums[u] + reached[u] as u64 - 1;
            out.reached[v] = reached[u];
            out.eccentricity[v] = ecc[u] + 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edge_list(&[("a", "b"), ("b", "c")]).0
    }

    #[test]
    fn path_from_end() {
        let g = path3();
        let sp = single_source_shortest_paths(&g, NodeId::new(0)).unwrap();
        assert_eq!(sp.distance, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(sp.sigma, vec![1.0, 1.0, 1.0]);
        assert_eq!(sp.predecessors[2], vec![NodeId::new(1)]);
    }

    #[test]
    fn four_cycle_opposite_has_two_paths() {
        let (g, _) = Graph::from_edge_list(&[("0", "1"), ("1", "2"), ("2", "3"), ("3", "0")]);
        let sp = single_source_shortest_paths(&g, NodeId::new(0)).unwrap();
        assert_eq!(sp.distance[2], Some(2));
        assert_eq!(sp.sigma[2], 2.0);
        assert_eq!(sp.predecessors[2].len(), 2);
    }

    #[test]
    fn star_leaves_at_distance_one() {
        let (g, _) = Graph::from_edge_list(&[("c", "x"), ("c", "y"), ("c", "z")]);
        let sp = single_source_shortest_paths(&g, NodeId::new(0)).unwrap();
        assert!(sp.distance[1..].iter().all(|d| *d == Some(1)));
    }

    #[test]
    fn unknown_source_is_an_error() {
        assert!(single_source_shortest_paths(&path3(), NodeId::new(9)).is_err());
    }

    #[test]
    fn unreachable_nodes_have_no_distance() {
        let (g, _) = Graph::from_edge_list(&[("a", "b"), ("c", "d")]);
        let sp = single_source_shortest_paths(&g, NodeId::new(0)).unwrap();
        assert_eq!(sp.distance[2], None);
        assert_eq!(sp.sigma[2], 0.0);
    }

    #[test]
    fn sweep_totals_on_path() {
        let s = sweep(&path3(), true);
        assert_eq!(s.distance_sum, vec![3, 2, 3]);
        assert_eq!(s.eccentricity, vec![2, 1, 2]);
        assert_eq!(s.dependency.unwrap(), vec![0.0, 2.0, 0.0]);
    }

    fn reference(g: &Graph) -> (Vec<u64>, Vec<u32>, Vec<u32>, Vec<f64>) {
        let n = g.node_count();
        let (mut sums, mut reached, mut ecc, mut dep) = (vec![0; n], vec![0; n], vec![0; n], vec![0.0; n]);
        for s in 0..n {
            let sp = single_source_shortest_paths(g, NodeId::new(s)).unwrap();
            let mut order: Vec<usize> = (0..n).filter(|&v| sp.distance[v].is_some()).collect();
            order.sort_by_key(|&v| sp.distance[v]);
            for &v in &order {
                let d = sp.distance[v].unwrap();
                sums[s] += d as u64;
                ecc[s] = ecc[s].max(d);
            }
            reached[s] = order.len() as u32 - 1;
            let mut delta = vec![0.0; n];
            for &w in order.iter().rev() {
                for p in &sp.predecessors[w] {
                    delta[p.index()] += sp.sigma[p.index()] / sp.sigma[w] * (1.0 + delta[w]);
                }
                if w != s {
                    dep[w] += delta[w];
                }
            }
        }
        (sums, reached, ecc, dep)
    }

    #[test]
    fn sweep_matches_per_source_brandes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for case in 0..40 {
            let n = rng.random_range(2..200);
            let mut b = crate::GraphBuilder::new();
            let ids: Vec<NodeId> = (0..n).map(|i| b.add_node(&i.to_string())).collect();
            for v in 1..n {
                if case % 2 == 0 || rng.random_bool(0.9) {
                    b.add_edge(ids[v], ids[rng.random_range(0..v)]);
                }
            }
            for _ in 0..rng.random_range(0..n) {
                let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
                if u != v {
                    b.add_edge(ids[u], ids[v]);
                }
            }
            let g = b.build().0;
            let got = sweep(&g, true);
            let (sums, reached, ecc, dep) = reference(&g);
            assert_eq!(got.distance_sum, sums, "case {case}");
            assert_eq!(got.reached, reached, "case {case}");
            assert_eq!(got.eccentricity, ecc, "case {case}");
            for (a, b) in got.dependency.unwrap().iter().zip(&dep) {
                assert!((a - b).abs() <= 1e-9 * b.max(1.0), "case {case}: {a} vs {b}");
            }
        }
    }
}

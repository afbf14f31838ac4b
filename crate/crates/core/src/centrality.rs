//! Degree, closeness, betweenness, eigenvector and PageRank centrality,
//! each rescaled so that its largest value is 100.
//!
//! Degree is scored on the whole graph. The four path- and walk-based
//! measures are scored on the largest connected component only; nodes
//! outside it carry `None`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{connected_components, sweep, Graph, NetworkParameters, NodeId};
use crate::stats::ordinal_ranks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Degree,
    Betweenness,
    Closeness,
    Eigenvector,
    PageRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    FullGraph,
    LargestComponent,
}

impl Measure {
    /// Column order of the score tables.
    pub const ALL: [Measure; 5] = [
        Measure::Degree,
        Measure::Betweenness,
        Measure::Closeness,
        Measure::Eigenvector,
        Measure::PageRank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Degree => "degree",
            Measure::Betweenness => "betweenness",
            Measure::Closeness => "closeness",
            Measure::Eigenvector => "eigenvector",
            Measure::PageRank => "pagerank",
        }
    }

    pub fn scope(self) -> Scope {
        match self {
            Measure::Degree => Scope::FullGraph,
            _ => Scope::LargestComponent,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CentralityOptions {
    pub alpha: f64,
    pub eigen_tol: f64,
    pub eigen_max_iter: usize,
    pub pagerank_tol: f64,
    pub pagerank_max_iter: usize,
}

impl Default for CentralityOptions {
    fn default() -> Self {
        CentralityOptions {
            alpha: 0.85,
            eigen_tol: 1e-10,
            eigen_max_iter: 1000,
            pagerank_tol: 1e-10,
            pagerank_max_iter: 1000,
        }
    }
}

/// Largest component of `g` as its own graph plus the original ids of its nodes.
fn largest_component(g: &Graph) -> (Graph, Vec<NodeId>) {
    let parts = connected_components(g);
    let members = parts.largest().unwrap_or(&[]).to_vec();
    (g.induced_subgraph(&members), members)
}

fn lift(n: usize, members: &[NodeId], values: Vec<f64>) -> Vec<Option<f64>> {
    let mut out = vec![None; n];
    for (v, x) in members.iter().zip(values) {
        out[v.index()] = Some(x);
    }
    out
}

pub fn degree_centrality(g: &Graph) -> Vec<f64> {
    g.degrees().into_iter().map(|d| d as f64).collect()
}

/// `(|C| - 1) / sum of distances` on the largest component. All `None`
/// when that component has fewer than two nodes.
pub fn closeness(g: &Graph) -> Vec<Option<f64>> {
    let (lcc, members) = largest_component(g);
    if lcc.node_count() < 2 {
        return vec![None; g.node_count()];
    }
    let paths = sweep(&lcc, false);
    lift(g.node_count(), &members, closeness_from(&paths.distance_sum, &paths.reached))
}

fn closeness_from(distance_sum: &[u64], reached: &[u32]) -> Vec<f64> {
    distance_sum
        .iter()
        .zip(reached)
        .map(|(&s, &r)| if s == 0 { 0.0 } else { r as f64 / s as f64 })
        .collect()
}

/// Shortest-path betweenness on the largest component, summed over
/// unordered pairs with the node itself excluded as an endpoint.
pub fn betweenness(g: &Graph) -> Vec<Option<f64>> {
    let (lcc, members) = largest_component(g);
    let paths = sweep(&lcc, true);
    lift(g.node_count(), &members, halve(paths.dependency.unwrap_or_default()))
}

fn halve(mut ordered: Vec<f64>) -> Vec<f64> {
    for b in &mut ordered {
        *b *= 0.5;
    }
    ordered
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Leading eigenvector scaled to unit maximum.
    pub vector: Vec<f64>,
    pub eigenvalue: f64,
    pub iterations: usize,
}

/// Leading adjacency eigenvector of a connected graph by power iteration.
///
/// Iterates with `A + I`, which shares eigenvectors with `A` but has a
/// strictly dominant Perron root even on bipartite graphs. Stops when the
/// max-norm change between successive unit-max iterates drops below `tol`.
pub fn eigenvector_connected(g: &Graph, tol: f64, max_iter: usize) -> Result<EigenResult> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Empty("eigenvector centrality of an empty graph"));
    }
    let mut x = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut change = f64::INFINITY;
    for iter in 1..=max_iter {
        for v in 0..n {
            next[v] = x[v] + g.adj(v).iter().map(|&u| x[u as usize]).sum::<f64>();
        }
        let max = next.iter().copied().fold(0.0, f64::max);
        change = 0.0;
        for v in 0..n {
            let y = next[v] / max;
            change = f64::max(change, (y - x[v]).abs());
            x[v] = y;
        }
        if change < tol {
            let ax: f64 = (0..n)
                .map(|v| x[v] * g.adj(v).iter().map(|&u| x[u as usize]).sum::<f64>())
                .sum();
            let xx: f64 = x.iter().map(|a| a * a).sum();
            return Ok(EigenResult {
                vector: x,
                eigenvalue: ax / xx,
                iterations: iter,
            });
        }
    }
    Err(Error::NotConverged {
        measure: "eigenvector",
        iterations: max_iter,
        residual: change,
    })
}

pub fn eigenvector(g: &Graph, tol: f64, max_iter: usize) -> Result<Vec<Option<f64>>> {
    let (lcc, members) = largest_component(g);
    let res = eigenvector_connected(&lcc, tol, max_iter)?;
    Ok(lift(g.node_count(), &members, res.vector))
}

/// PageRank of a connected graph: stationary vector of
/// `alpha * T + (1 - alpha) / N`, summing to one.
///
/// With `alpha = 1` the plain walk can be periodic, so the lazy chain
/// `(I + T) / 2`, which has the same stationary vector, is iterated
/// instead. Convergence is on the L1 change between iterates.
pub fn pagerank_connected(g: &Graph, alpha: f64, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("damping factor {alpha} outside (0, 1]")));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Empty("pagerank of an empty graph"));
    }
    let lazy = alpha == 1.0;
    let inv_deg: Vec<f64> = (0..n)
        .map(|v| {
            let d = g.adj(v).len();
            if d == 0 {
                0.0
            } else {
                1.0 / d as f64
            }
        })
        .collect();
    let uniform = 1.0 / n as f64;
    let mut x = vec![uniform; n];
    let mut share = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        let mut dangling = 0.0;
        for v in 0..n {
            share[v] = x[v] * inv_deg[v];
            if inv_deg[v] == 0.0 {
                dangling += x[v];
            }
        }
        let base = (1.0 - alpha) * uniform + alpha * dangling * uniform;
        for v in 0..n {
            let walk = g.adj(v).iter().map(|&u| share[u as usize]).sum::<f64>();
            next[v] = base + alpha * walk;
            if lazy {
                next[v] = 0.5 * (next[v] + x[v]);
            }
        }
        change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if change < tol {
            let total: f64 = x.iter().sum();
            for v in &mut x {
                *v /= total;
            }
            return Ok(x);
        }
    }
    Err(Error::NotConverged {
        measure: "pagerank",
        iterations: max_iter,
        residual: change,
    })
}

pub fn pagerank(g: &Graph, alpha: f64, tol: f64, max_iter: usize) -> Result<Vec<Option<f64>>> {
    let (lcc, members) = largest_component(g);
    let pr = pagerank_connected(&lcc, alpha, tol, max_iter)?;
    Ok(lift(g.node_count(), &members, pr))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rescaled {
    pub values: Vec<f64>,
    /// Set when every input was zero and no maximum exists.
    pub all_zero: bool,
}

/// `100 * C / max(C)`. The maximum maps to exactly 100.
pub fn rescale(raw: &[f64]) -> Rescaled {
    let max = raw.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Rescaled {
            values: vec![0.0; raw.len()],
            all_zero: true,
        };
    }
    Rescaled {
        values: raw.iter().map(|&c| c / max * 100.0).collect(),
        all_zero: false,
    }
}

fn rescale_scoped(raw: &[Option<f64>]) -> (Vec<Option<f64>>, bool) {
    let present: Vec<f64> = raw.iter().flatten().copied().collect();
    if present.is_empty() {
        return (raw.to_vec(), false);
    }
    let r = rescale(&present);
    let mut it = r.values.into_iter();
    (raw.iter().map(|x| x.map(|_| it.next().unwrap())).collect(), r.all_zero)
}

/// One value per measure, in [`Measure::ALL`] order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub degree: Option<f64>,
    pub betweenness: Option<f64>,
    pub closeness: Option<f64>,
    pub eigenvector: Option<f64>,
    pub pagerank: Option<f64>,
}

impl Scores {
    pub fn get(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::Degree => self.degree,
            Measure::Betweenness => self.betweenness,
            Measure::Closeness => self.closeness,
            Measure::Eigenvector => self.eigenvector,
            Measure::PageRank => self.pagerank,
        }
    }

    pub fn set(&mut self, m: Measure, value: Option<f64>) {
        match m {
            Measure::Degree => self.degree = value,
            Measure::Betweenness => self.betweenness = value,
            Measure::Closeness => self.closeness = value,
            Measure::Eigenvector => self.eigenvector = value,
            Measure::PageRank => self.pagerank = value,
        }
    }

    /// All five values, if every one is present.
    pub fn complete(&self) -> Option<[f64; 5]> {
        let mut out = [0.0; 5];
        for m in Measure::ALL {
            out[m.index()] = self.get(m)?;
        }
        Some(out)
    }
}

/// Mean of the five rescaled values, not itself rescaled.
pub fn average_score(rescaled: &Scores) -> Option<f64> {
    rescaled.complete().map(|v| v.iter().sum::<f64>() / 5.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityRow {
    pub title: String,
    pub in_lcc: bool,
    pub raw: Scores,
    pub rescaled: Scores,
    pub average: Option<f64>,
    pub rank_by_average: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityTable {
    pub alpha: f64,
    pub scope: Vec<(Measure, Scope)>,
    pub rows: Vec<CentralityRow>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl CentralityTable {
    /// Builds a table from rescaled scores alone, e.g. a published table.
    /// Averages and ranks are recomputed.
    pub fn from_rescaled(entries: Vec<(String, Scores)>) -> Self {
        let rows = entries
            .into_iter()
            .map(|(title, rescaled)| CentralityRow {
                in_lcc: rescaled.complete().is_some(),
                average: average_score(&rescaled),
                title,
                raw: Scores::default(),
                rescaled,
                rank_by_average: None,
            })
            .collect();
        let mut table = CentralityTable {
            alpha: f64::NAN,
            scope: Measure::ALL.iter().map(|&m| (m, m.scope())).collect(),
            rows,
            warnings: Vec::new(),
        };
        table.assign_ranks();
        table
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rescaled_column(&self, m: Measure) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.rescaled.get(m)).collect()
    }

    pub fn averages(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.average).collect()
    }

    /// Row indices of ranked nodes in order of rank.
    pub fn by_rank(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.rows[i].rank_by_average.is_some())
            .collect();
        idx.sort_by_key(|&i| self.rows[i].rank_by_average);
        idx
    }

    pub fn top_k(&self, k: usize) -> Vec<usize> {
        let mut idx = self.by_rank();
        idx.truncate(k);
        idx
    }

    fn assign_ranks(&mut self) {
        let titles: Vec<&str> = self.rows.iter().map(|r| r.title.as_str()).collect();
        let ranks = ordinal_ranks(&self.averages(), &titles);
        for (row, rank) in self.rows.iter_mut().zip(ranks) {
            row.rank_by_average = rank;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub table: CentralityTable,
    pub parameters: NetworkParameters,
}

/// Scores every node and summarises the network, sharing one
/// all-sources sweep between closeness, betweenness and path statistics.
pub fn analyze(g: &Graph, opts: &CentralityOptions) -> Result<Analysis> {
    if g.is_empty() {
        return Err(Error::Empty("graph has no nodes"));
    }
    let n = g.node_count();
    let (lcc, members) = largest_component(g);
    let paths = sweep(&lcc, true);
    let parameters = NetworkParameters::from_parts(g, &lcc, &paths);
    let mut warnings = Vec::new();

    let mut raw: [Vec<Option<f64>>; 5] = Default::default();
    raw[Measure::Degree.index()] = degree_centrality(g).into_iter().map(Some).collect();
    raw[Measure::Closeness.index()] = if lcc.node_count() < 2 {
        warnings.push("largest component has fewer than 2 nodes; closeness undefined".to_owned());
        vec![None; n]
    } else {
        lift(n, &members, closeness_from(&paths.distance_sum, &paths.reached))
    };
    raw[Measure::Betweenness.index()] =
        lift(n, &members, halve(paths.dependency.clone().unwrap_or_default()));
    raw[Measure::Eigenvector.index()] = lift(
        n,
        &members,
        eigenvector_connected(&lcc, opts.eigen_tol, opts.eigen_max_iter)?.vector,
    );
    raw[Measure::PageRank.index()] = lift(
        n,
        &members,
        pagerank_connected(&lcc, opts.alpha, opts.pagerank_tol, opts.pagerank_max_iter)?,
    );

    let mut rescaled: [Vec<Option<f64>>; 5] = Default::default();
    for m in Measure::ALL {
        let (values, all_zero) = rescale_scoped(&raw[m.index()]);
        if all_zero {
            warnings.push(format!("{} is zero everywhere; rescaled to 0", m.name()));
        }
        rescaled[m.index()] = values;
    }

    let mut in_lcc = vec![false; n];
    for v in &members {
        in_lcc[v.index()] = true;
    }
    let rows = (0..n)
        .map(|v| {
            let mut r = Scores::default();
            let mut s = Scores::default();
            for m in Measure::ALL {
                r.set(m, raw[m.index()][v]);
                s.set(m, rescaled[m.index()][v]);
            }
            CentralityRow {
                title: g.label(NodeId::new(v)).to_owned(),
                in_lcc: in_lcc[v],
                raw: r,
                average: average_score(&s),
                rescaled: s,
                rank_by_average: None,
            }
        })
        .collect();
    let mut table = CentralityTable {
        alpha: opts.alpha,
        scope: Measure::ALL.iter().map(|&m| (m, m.scope())).collect(),
        rows,
        warnings,
    };
    table.assign_ranks();
    Ok(Analysis { table, parameters })
}

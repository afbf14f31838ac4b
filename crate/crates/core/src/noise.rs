//! Edge-rewiring noise model and Monte Carlo ensembles.
//!
//! A rewired network drops `round(p * E)` edges chosen uniformly without
//! replacement and proposes the same number of new edges whose endpoints
//! are drawn independently with probability `k_orig / 2E`. Proposals that
//! are self-loops or already present are discarded, not redrawn.
//!
//! Sample `i` of an ensemble draws from ChaCha8 stream `i` under the
//! master seed, and samples are merged in index order, so results do not
//! depend on how work is spread over threads.

use std::collections::HashSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{analyze, CentralityOptions, CentralityTable, Measure};
use crate::error::{Error, Result};
use crate::graph::{Graph, NetworkParameters};
use crate::stats::ordinal_ranks;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseConfig {
    pub p: f64,
    pub samples: usize,
    pub master_seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            p: 0.1,
            samples: 1000,
            master_seed: 20170620,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        check_p(self.p)?;
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("rewiring fraction {p} outside [0, 1]")))
    }
}

/// Random stream for sample `index` of an ensemble.
pub fn sample_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeTheory {
    pub k_orig: f64,
    pub expected: f64,
    pub sigma: f64,
}

/// Mean and spread of a node's degree after rewiring:
/// `<k_new> = k` and `sigma^2 = p k (2 - p - k / 2E)`.
pub fn degree_theory(k: f64, p: f64, edges: usize) -> Result<DegreeTheory> {
    check_p(p)?;
    if edges == 0 {
        return Err(Error::InvalidParameter("edge count must be at least 1".into()));
    }
    if k < 0.0 {
        return Err(Error::InvalidParameter(format!("negative degree {k}")));
    }
    let stubs = 2.0 * edges as f64;
    let var = p * k * (2.0 - p - k / stubs);
    Ok(DegreeTheory {
        k_orig: k,
        expected: k,
        sigma: var.max(0.0).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewireReport {
    pub removed: usize,
    pub added: usize,
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Precomputed edge and stub tables of a base graph, shared by every
/// sample drawn from it.
pub struct Rewirer<'g> {
    graph: &'g Graph,
    edges: Vec<(u32, u32)>,
    stubs: Vec<u32>,
}

impl<'g> Rewirer<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let edges: Vec<(u32, u32)> = graph
            .edges()
            .map(|(u, v)| (u.index() as u32, v.index() as u32))
            .collect();
        // each node appears once per incident edge, so a uniform stub is
        // a node drawn with probability k / 2E
        let mut stubs = Vec::with_capacity(2 * edges.len());
        for &(u, v) in &edges {
            stubs.push(u);
            stubs.push(v);
        }
        stubs.sort_unstable();
        Rewirer { graph, edges, stubs }
    }

    pub fn rewire<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> Result<(Graph, RewireReport)> {
        check_p(p)?;
        let e = self.edges.len();
        if e == 0 {
            return Err(Error::InvalidParameter("cannot rewire a graph without edges".into()));
        }
        let m = (p * e as f64).round() as usize;
        let mut removed = vec![false; e];
        for i in index::sample(rng, e, m) {
            removed[i] = true;
        }
        let mut present: HashSet<(u32, u32)> = self
            .edges
            .iter()
            .zip(&removed)
            .filter(|(_, &r)| !r)
            .map(|(&edge, _)| edge)
            .collect();
        let mut report = RewireReport {
            removed: m,
            ..Default::default()
        };
        for _ in 0..m {
            let a = self.stubs[rng.random_range(0..self.stubs.len())];
            let b = self.stubs[rng.random_range(0..self.stubs.len())];
            if a == b {
                report.self_loops += 1;
            } else if present.insert((a.min(b), a.max(b))) {
                report.added += 1;
            } else {
                report.duplicates += 1;
            }
        }
        let mut edges: Vec<(u32, u32)> = present.into_iter().collect();
        edges.sort_unstable();
        Ok((self.graph.with_edges(&edges), report))
    }
}

/// One rewiring of `g`.
pub fn rewire<R: Rng + ?Sized>(g: &Graph, p: f64, rng: &mut R) -> Result<(Graph, RewireReport)> {
    Rewirer::new(g).rewire(p, rng)
}

/// Quartiles, Tukey whiskers at 1.5 IQR, and the points beyond them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

/// Quantiles interpolate linearly between order statistics at `q (n - 1)`.
pub fn box_stats(values: &[f64]) -> Result<BoxStats> {
    if values.is_empty() {
        return Err(Error::Empty("box statistics of an empty sample"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |f: f64| {
        let pos = f * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    };
    let (q1, median, q3) = (q(0.25), q(0.5), q(0.75));
    let iqr = q3 - q1;
    let (whisker_low, whisker_high) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let outliers = sorted
        .iter()
        .copied()
        .filter(|&v| v < whisker_low || v > whisker_high)
        .collect();
    Ok(BoxStats {
        q1,
        median,
        q3,
        whisker_low,
        whisker_high,
        outliers,
    })
}

/// Running mean and population standard deviation (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    #[serde(skip)]
    m2: f64,
    pub std: f64,
}

impl Summary {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.std = (self.m2 / self.count as f64).sqrt();
    }

    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut s = Summary::default();
        for v in values {
            s.push(v);
        }
        s
    }
}

/// Series tracked per node: the five measures then the average.
pub const SERIES: usize = 6;
pub const AVERAGE: usize = 5;

pub fn series_name(i: usize) -> &'static str {
    if i == AVERAGE {
        "average"
    } else {
        Measure::ALL[i].name()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeEnsemble {
    pub title: String,
    pub k_orig: usize,
    /// Raw degree after rewiring.
    pub degree: Summary,
    /// Per-run rescaled score of each series.
    pub scores: [Summary; SERIES],
    pub ranks: [Summary; SERIES],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrackedNode {
    pub title: String,
    pub node: usize,
    pub rank_boxes: [Option<BoxStats>; SERIES],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub rewire: RewireReport,
    pub parameters: Option<NetworkParameters>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseEnsembleStats {
    pub config: NoiseConfig,
    pub base_edges: usize,
    pub completed: usize,
    pub failed: usize,
    pub nodes: Vec<NodeEnsemble>,
    pub tracked: Vec<TrackedNode>,
    pub samples: Vec<SampleRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleOptions {
    pub centrality: CentralityOptions,
    /// Nodes whose full rank distribution is kept: the top `top_k` by
    /// average plus the top `per_measure` of every measure, on the
    /// unperturbed graph.
    pub top_k: usize,
    pub per_measure: usize,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        EnsembleOptions {
            centrality: CentralityOptions::default(),
            top_k: 35,
            per_measure: 10,
        }
    }
}

fn tracked_nodes(base: &CentralityTable, opts: &EnsembleOptions) -> Vec<usize> {
    let mut chosen: Vec<usize> = base.top_k(opts.top_k);
    let titles: Vec<&str> = base.rows.iter().map(|r| r.title.as_str()).collect();
    for m in Measure::ALL {
        let ranks = ordinal_ranks(&base.rescaled_column(m), &titles);
        let mut top: Vec<(usize, usize)> = ranks
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.filter(|&r| r <= opts.per_measure).map(|r| (r, i)))
            .collect();
        top.sort_unstable();
        for (_, i) in top {
            if !chosen.contains(&i) {
                chosen.push(i);
            }
        }
    }
    chosen
}

struct SampleOutcome {
    record: SampleRecord,
    degrees: Vec<usize>,
    scores: Option<(Vec<[Option<f64>; SERIES]>, Vec<[Option<usize>; SERIES]>)>,
}

fn run_sample(
    rewirer: &Rewirer<'_>,
    cfg: &NoiseConfig,
    opts: &CentralityOptions,
    titles: &[&str],
    index: usize,
) -> Result<SampleOutcome> {
    let mut rng = sample_rng(cfg.master_seed, index as u64);
    let (g, rewire) = rewirer.rewire(cfg.p, &mut rng)?;
    let degrees = g.degrees();
    let mut record = SampleRecord {
        index,
        rewire,
        parameters: None,
        failure: None,
    };
    let analysis = match analyze(&g, opts) {
        Ok(a) => a,
        Err(e) => {
            record.failure = Some(e.to_string());
            return Ok(SampleOutcome {
                record,
                degrees,
                scores: None,
            });
        }
    };
    record.parameters = Some(analysis.parameters);
    let table = analysis.table;
    let n = table.rows.len();
    let mut scores = vec![[None; SERIES]; n];
    let mut ranks = vec![[None; SERIES]; n];
    for s in 0..SERIES {
        let column = if s == AVERAGE {
            table.averages()
        } else {
            table.rescaled_column(Measure::ALL[s])
        };
        let r = ordinal_ranks(&column, titles);
        for v in 0..n {
            scores[v][s] = column[v];
            ranks[v][s] = r[v];
        }
    }
    Ok(SampleOutcome {
        record,
        degrees,
        scores: Some((scores, ranks)),
    })
}

/// Samples in flight at once; results are merged batch by batch in
/// sample order.
const BATCH: usize = 16;

/// Runs `cfg.samples` rewirings of `g` and aggregates per-node score and
/// rank statistics. Each run is rescaled before it is aggregated.
pub fn run_ensemble(g: &Graph, cfg: &NoiseConfig, opts: &EnsembleOptions) -> Result<NoiseEnsembleStats> {
    cfg.validate()?;
    let base = analyze(g, &opts.centrality)?.table;
    let rewirer = Rewirer::new(g);
    let titles: Vec<&str> = g.labels().iter().map(String::as_str).collect();
    let k_orig = g.degrees();
    let mut nodes: Vec<NodeEnsemble> = titles
        .iter()
        .zip(&k_orig)
        .map(|(t, &k)| NodeEnsemble {
            title: (*t).to_owned(),
            k_orig: k,
            degree: Summary::default(),
            scores: [Summary::default(); SERIES],
            ranks: [Summary::default(); SERIES],
        })
        .collect();
    let tracked_ids = tracked_nodes(&base, opts);
    let mut tracked_ranks: Vec<[Vec<f64>; SERIES]> = vec![Default::default(); tracked_ids.len()];
    let mut samples = Vec::with_capacity(cfg.samples);
    let (mut completed, mut failed) = (0, 0);

    let mut start = 0;
    while start < cfg.samples {
        let end = (start + BATCH).min(cfg.samples);
        let outcomes: Vec<Result<SampleOutcome>> = (start..end)
            .into_par_iter()
            .map(|i| run_sample(&rewirer, cfg, &opts.centrality, &titles, i))
            .collect();
        for outcome in outcomes {
            let outcome = outcome?;
            for (node, &d) in nodes.iter_mut().zip(&outcome.degrees) {
                node.degree.push(d as f64);
            }
            match &outcome.scores {
                Some((scores, ranks)) => {
                    completed += 1;
                    for (v, node) in nodes.iter_mut().enumerate() {
                        for s in 0..SERIES {
                            if let Some(x) = scores[v][s] {
                                node.scores[s].push(x);
                            }
                            if let Some(r) = ranks[v][s] {
                                node.ranks[s].push(r as f64);
                            }
                        }
                    }
                    for (t, &v) in tracked_ranks.iter_mut().zip(&tracked_ids) {
                        for s in 0..SERIES {
                            if let Some(r) = ranks[v][s] {
                                t[s].push(r as f64);
                            }
                        }
                    }
                }
                None => failed += 1,
            }
            samples.push(outcome.record);
        }
        start = end;
    }

    let tracked = tracked_ids
        .iter()
        .zip(tracked_ranks)
        .map(|(&v, ranks)| TrackedNode {
            title: titles[v].to_owned(),
            node: v,
            rank_boxes: ranks.map(|r| box_stats(&r).ok()),
        })
        .collect();
    Ok(NoiseEnsembleStats {
        config: *cfg,
        base_edges: g.edge_count(),
        completed,
        failed,
        nodes,
        tracked,
        samples,
    })
}

impl NoiseEnsembleStats {
    /// Ordinal rank of every node by mean average score, ties by title.
    pub fn rank_by_mean_average(&self) -> Vec<Option<usize>> {
        let means: Vec<Option<f64>> = self
            .nodes
            .iter()
            .map(|n| (n.scores[AVERAGE].count > 0).then_some(n.scores[AVERAGE].mean))
            .collect();
        let titles: Vec<&str> = self.nodes.iter().map(|n| n.title.as_str()).collect();
        ordinal_ranks(&means, &titles)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeStdFit {
    /// Least-squares slope through the origin of degree std against `sqrt(k_orig)`.
    pub slope: f64,
    /// Uncentred coefficient of determination; `None` when every std is zero.
    pub r_squared: Option<f64>,
    pub adjusted_r_squared: Option<f64>,
    pub nodes: usize,
    /// Mean of `sigma(k) / sqrt(k)` from [`degree_theory`] over the same nodes.
    pub theory_ratio: f64,
}

pub fn degree_std_regression(ens: &NoiseEnsembleStats) -> Result<DegreeStdFit> {
    let points: Vec<(f64, f64)> = ens
        .nodes
        .iter()
        .filter(|n| n.k_orig >= 1 && n.degree.count > 0)
        .map(|n| ((n.k_orig as f64).sqrt(), n.degree.std))
        .collect();
    let mut distinct: Vec<usize> = ens.nodes.iter().filter(|n| n.k_orig >= 1).map(|n| n.k_orig).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InvalidParameter(
            "degree std regression needs at least two distinct degrees".into(),
        ));
    }
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let syy: f64 = points.iter().map(|(_, y)| y * y).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = points.iter().map(|(x, y)| (y - slope * x).powi(2)).sum();
    let n = points.len() as f64;
    let r_squared = (syy > 0.0).then(|| 1.0 - ss_res / syy);
    let adjusted_r_squared = r_squared.filter(|_| n > 1.0).map(|r2| 1.0 - (1.0 - r2) * n / (n - 1.0));
    let mut ratio = Summary::default();
    for node in ens.nodes.iter().filter(|n| n.k_orig >= 1) {
        let t = degree_theory(node.k_orig as f64, ens.config.p, ens.base_edges)?;
        ratio.push(t.sigma / (node.k_orig as f64).sqrt());
    }
    Ok(DegreeStdFit {
        slope,
        r_squared,
        adjusted_r_squared,
        nodes: points.len(),
        theory_ratio: ratio.mean,
    })
}

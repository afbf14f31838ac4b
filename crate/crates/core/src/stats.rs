//! Rank assignment, Pearson/Spearman correlation and the log-binned
//! power-law fit of the degree distribution.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::centrality::{CentralityTable, Measure};
use crate::error::{Error, Result};
use crate::graph::Graph;

fn descending(a: f64, b: f64) -> Ordering {
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

/// Ranks 1..n in decreasing order of value, tied values sharing the mean
/// of the positions they occupy.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| descending(values[a], values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        // positions i+1 ..= j
        let shared = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = shared;
        }
        i = j;
    }
    ranks
}

/// Ranks 1..m over the present values, decreasing, ties broken by label.
pub fn ordinal_ranks<L: AsRef<str>>(values: &[Option<f64>], labels: &[L]) -> Vec<Option<usize>> {
    let mut idx: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_some()).collect();
    idx.sort_by(|&a, &b| {
        descending(values[a].unwrap(), values[b].unwrap())
            .then_with(|| labels[a].as_ref().cmp(labels[b].as_ref()))
    });
    let mut ranks = vec![None; values.len()];
    for (r, i) in idx.into_iter().enumerate() {
        ranks[i] = Some(r + 1);
    }
    ranks
}

/// Product-moment correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!(
            "series lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two observations"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson correlation of the fractional ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return pearson(x, y);
    }
    pearson(&fractional_ranks(x), &fractional_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "k")]
pub enum Population {
    LargestComponent,
    TopK(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    pub population: Population,
    pub size: usize,
    /// `None` where a series has zero variance over the population.
    pub pearson: Vec<Vec<Option<f64>>>,
    pub spearman: Vec<Vec<Option<f64>>>,
}

/// Series order of the correlation tables.
pub const CORRELATION_SERIES: [Option<Measure>; 6] = [
    Some(Measure::Degree),
    Some(Measure::PageRank),
    Some(Measure::Eigenvector),
    Some(Measure::Betweenness),
    Some(Measure::Closeness),
    None,
];

fn series_label(m: Option<Measure>) -> &'static str {
    match m {
        Some(Measure::Degree) => "Degree",
        Some(Measure::PageRank) => "PageRank",
        Some(Measure::Eigenvector) => "Eigenvector",
        Some(Measure::Betweenness) => "Betweenness",
        Some(Measure::Closeness) => "Closeness",
        None => "Average",
    }
}

/// Pearson and Spearman matrices over the five rescaled measures and the
/// average, for every scored node or for the top `k` by average.
pub fn correlation_matrix(table: &CentralityTable, population: Population) -> CorrelationMatrix {
    let rows: Vec<usize> = match population {
        Population::LargestComponent => table.by_rank(),
        Population::TopK(k) => table.top_k(k),
    };
    let series: Vec<Vec<f64>> = CORRELATION_SERIES
        .iter()
        .map(|m| {
            rows.iter()
                .map(|&i| {
                    let r = &table.rows[i];
                    match m {
                        Some(m) => r.rescaled.get(*m).unwrap_or(f64::NAN),
                        None => r.average.unwrap_or(f64::NAN),
                    }
                })
                .collect()
        })
        .collect();
    let k = series.len();
    let mut p = vec![vec![None; k]; k];
    let mut s = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i == j {
                p[i][j] = Some(1.0);
                s[i][j] = Some(1.0);
            } else if j > i {
                p[i][j] = pearson(&series[i], &series[j]).ok();
                s[i][j] = spearman(&series[i], &series[j]).ok();
            } else {
                p[i][j] = p[j][i];
                s[i][j] = s[j][i];
            }
        }
    }
    CorrelationMatrix {
        labels: CORRELATION_SERIES.iter().map(|&m| series_label(m).to_owned()).collect(),
        population,
        size: rows.len(),
        pearson: p,
        spearman: s,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBin {
    pub lower: f64,
    pub upper: f64,
    /// Geometric mean of the bin edges.
    pub center: f64,
    pub count: f64,
    /// Number of integer degrees inside `[lower, upper)`, up to the largest
    /// observed degree.
    pub width: usize,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBinnedFit {
    pub ratio: f64,
    pub origin: f64,
    pub edges: Vec<f64>,
    pub bins: Vec<LogBin>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub zero_degree_nodes: usize,
}

/// Log-binned fit of a degree distribution.
pub fn degree_distribution_fit(g: &Graph, ratio: f64) -> Result<LogBinnedFit> {
    let degrees = g.degrees();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut hist = vec![0.0; max + 1];
    for &d in &degrees {
        hist[d] += 1.0;
    }
    let zero = hist.first().copied().unwrap_or(0.0) as usize;
    let counts: Vec<(usize, f64)> = hist
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c > 0.0)
        .map(|(k, &c)| (k, c))
        .collect();
    let mut fit = fit_degree_histogram(&counts, g.node_count() as f64, ratio)?;
    fit.zero_degree_nodes = zero;
    Ok(fit)
}

/// Fits `log10(density) = slope * log10(center) + intercept` over the
/// non-empty geometric bins of a `(degree, frequency)` histogram. Bins
/// start at degree 1 and each edge is `ratio` times the previous one.
pub fn fit_degree_histogram(counts: &[(usize, f64)], total: f64, ratio: f64) -> Result<LogBinnedFit> {
    if !(ratio > 1.0) {
        return Err(Error::InvalidParameter(format!("bin ratio {ratio} must exceed 1")));
    }
    let max = counts.iter().filter(|c| c.0 >= 1).map(|c| c.0).max().unwrap_or(0);
    if max == 0 {
        return Err(Error::InsufficientBins(0));
    }
    let mut edges = vec![1.0f64];
    while *edges.last().unwrap() <= max as f64 {
        let next = edges.last().unwrap() * ratio;
        edges.push(next);
    }
    let mut bins = Vec::new();
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let first = lo.ceil() as usize;
        // the last bin is clipped to the observed support
        let width = (hi.ceil() as usize).min(max + 1).saturating_sub(first);
        let count: f64 = counts
            .iter()
            .filter(|&&(k, _)| k >= 1 && (k as f64) >= lo && (k as f64) < hi)
            .map(|c| c.1)
            .sum();
        if width == 0 || count <= 0.0 {
            continue;
        }
        bins.push(LogBin {
            lower: lo,
            upper: hi,
            center: (lo * hi).sqrt(),
            count,
            width,
            density: count / (width as f64 * total),
        });
    }
    if bins.len() < 3 {
        return Err(Error::InsufficientBins(bins.len()));
    }
    let xs: Vec<f64> = bins.iter().map(|b| b.center.log10()).collect();
    let ys: Vec<f64> = bins.iter().map(|b| b.density.log10()).collect();
    let line = least_squares(&xs, &ys);
    Ok(LogBinnedFit {
        ratio,
        origin: 1.0,
        edges,
        bins,
        slope: line.slope,
        slope_stderr: line.slope_stderr,
        intercept: line.intercept,
        r_squared: line.r_squared,
        zero_degree_nodes: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Line {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
}

/// Ordinary least squares with intercept. Needs at least three points
/// for a finite standard error.
pub(crate) fn least_squares(x: &[f64], y: &[f64]) -> Line {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    Line {
        slope,
        intercept,
        slope_stderr: (ss_res / (n - 2.0) / sxx).sqrt(),
        r_squared: if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::Scores;
    use approx::assert_relative_eq;

    #[test]
    fn fractional_ranks_share_ties() {
        assert_eq!(fractional_ranks(&[10.0, 20.0, 20.0, 5.0]), vec![3.0, 1.5, 1.5, 4.0]);
        let r = fractional_ranks(&[1.0, 1.0, 1.0]);
        assert_eq!(r, vec![2.0; 3]);
    }

    #[test]
    fn ordinal_ranks_break_ties_by_label() {
        let v = [Some(1.0), None, Some(3.0), Some(1.0)];
        let r = ordinal_ranks(&v, &["b", "x", "c", "a"]);
        assert_eq!(r, vec![Some(3), None, Some(1), Some(2)]);
    }

    #[test]
    fn pearson_extremes() {
        let x = [1.0, 2.0, 4.0, 8.0];
        assert_relative_eq!(pearson(&x, &x).unwrap(), 1.0);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_relative_eq!(pearson(&x, &neg).unwrap(), -1.0);
        assert!(matches!(pearson(&x, &[3.0; 4]), Err(Error::UndefinedCorrelation(_))));
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn spearman_examples() {
        let x = [0.5, 1.0, 3.0, 7.5];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.powi(3) + 2.0).collect();
        assert_relative_eq!(spearman(&x, &y).unwrap(), 1.0);
        // ranks (3,2,1) vs (1,3,2): centred (1,0,-1)·(-1,1,0) = -1 over 2
        assert_relative_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap(), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn identical_measures_correlate_fully() {
        let rows = (0..6)
            .map(|i| {
                let v = Some(10.0 + i as f64 * i as f64);
                (
                    format!("n{i}"),
                    Scores {
                        degree: v,
                        betweenness: v,
                        closeness: Some(1.0 + i as f64),
                        eigenvector: v,
                        pagerank: v,
                    },
                )
            })
            .collect();
        let table = CentralityTable::from_rescaled(rows);
        let m = correlation_matrix(&table, Population::TopK(4));
        assert_eq!(m.size, 4);
        assert_relative_eq!(m.pearson[0][1].unwrap(), 1.0);
        assert_relative_eq!(m.spearman[0][4].unwrap(), 1.0);
        for i in 0..6 {
            assert_eq!(m.pearson[i][i], Some(1.0));
            for j in 0..6 {
                assert_eq!(m.pearson[i][j], m.pearson[j][i]);
            }
        }
    }

    #[test]
    fn exact_power_law_histogram() {
        let counts: Vec<(usize, f64)> = (1..=1000).map(|k| (k, (k as f64).powf(-3.0))).collect();
        let fit = fit_degree_histogram(&counts, 1.0, 1.5).unwrap();
        assert!((fit.slope + 3.0).abs() < 0.05, "slope {}", fit.slope);
        assert_eq!(fit.bins.len(), 18);
    }

    #[test]
    fn single_degree_cannot_be_fitted() {
        let names: Vec<String> = (0..6).map(|i| i.to_string()).collect();
        let edges: Vec<(String, String)> = (0..6).map(|i| (names[i].clone(), names[(i + 1) % 6].clone())).collect();
        let (g, _) = Graph::from_edge_list(&edges);
        assert!(matches!(degree_distribution_fit(&g, 1.5), Err(Error::InsufficientBins(1))));
    }

    #[test]
    fn zero_degree_nodes_reported() {
        let mut b = crate::graph::GraphBuilder::new();
        let hub = b.add_node("hub");
        for i in 0..30 {
            let leaf = b.add_node(&format!("l{i}"));
            if i < 20 {
                b.add_edge(hub, leaf);
            }
        }
        let mid = [b.add_node("m1"), b.add_node("m2"), b.add_node("m3")];
        b.add_edge(mid[0], mid[1]);
        b.add_edge(mid[1], mid[2]);
        b.add_edge(mid[2], mid[0]);
        b.add_edge(mid[0], hub);
        let (g, _) = b.build();
        let fit = degree_distribution_fit(&g, 1.5).unwrap();
        assert_eq!(fit.zero_degree_nodes, 10);
        assert!(fit.slope < 0.0);
    }

    proptest::proptest! {
        #[test]
        fn spearman_is_pearson_of_ranks(
            pairs in proptest::collection::vec((0u8..6, 0u8..6), 3..40)
        ) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
            let direct = spearman(&x, &y);
            let via = pearson(&fractional_ranks(&x), &fractional_ranks(&y));
            match (direct, via) {
                (Ok(a), Ok(b)) => proptest::prop_assert!((a - b).abs() <= 1e-12),
                (Err(_), Err(_)) => {}
                _ => proptest::prop_assert!(false),
            }
        }

        #[test]
        fn tie_free_fractional_equals_ordinal(v in proptest::collection::hash_set(0u32..10_000, 1..30)) {
            let values: Vec<f64> = v.into_iter().map(f64::from).collect();
            let labels: Vec<String> = (0..values.len()).map(|i| i.to_string()).collect();
            let some: Vec<Option<f64>> = values.iter().copied().map(Some).collect();
            let frac = fractional_ranks(&values);
            let ord = ordinal_ranks(&some, &labels);
            for (f, o) in frac.iter().zip(ord) {
                proptest::prop_assert_eq!(*f, o.unwrap() as f64);
            }
            let total: f64 = frac.iter().sum();
            let n = values.len() as f64;
            proptest::prop_assert_eq!(total, n * (n + 1.0) / 2.0);
        }

        #[test]
        fn fit_slope_ignores_density_scale(scale in 0.01f64..100.0) {
            let counts: Vec<(usize, f64)> = (1..=200usize).map(|k| (k, (k as f64).powf(-2.5))).collect();
            let a = fit_degree_histogram(&counts, 1.0, 1.5).unwrap();
            let b = fit_degree_histogram(&counts, scale, 1.5).unwrap();
            proptest::prop_assert!((a.slope - b.slope).abs() < 1e-9);
        }
    }
}

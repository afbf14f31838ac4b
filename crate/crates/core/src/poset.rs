//! Strict dominance order over five-measure ratings and its Hasse diagram.
//!
//! `A ≻ B` when every rating of `A` is strictly greater than the matching
//! rating of `B`. A tie on any measure leaves the pair incomparable.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::centrality::CentralityTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DominancePoset {
    titles: Vec<String>,
    ratings: Vec<[f64; 5]>,
    averages: Vec<f64>,
    /// Row-major `k × k`; entry `a * k + b` is set when `a ≻ b`.
    above: Vec<bool>,
}

fn dominates(a: &[f64; 5], b: &[f64; 5]) -> bool {
    a.iter().zip(b).all(|(x, y)| x > y)
}

impl DominancePoset {
    /// Builds the order over the given members. `averages` default to the
    /// mean rating when absent.
    pub fn from_ratings(titles: Vec<String>, ratings: Vec<[f64; 5]>, averages: Option<Vec<f64>>) -> Result<Self> {
        if titles.len() != ratings.len() {
            return Err(Error::InvalidParameter(format!(
                "{} titles for {} rating vectors",
                titles.len(),
                ratings.len()
            )));
        }
        if ratings.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("ratings must be finite".into()));
        }
        let averages = match averages {
            Some(a) if a.len() == titles.len() => a,
            Some(a) => {
                return Err(Error::InvalidParameter(format!(
                    "{} averages for {} members",
                    a.len(),
                    titles.len()
                )))
            }
            None => ratings.iter().map(|r| r.iter().sum::<f64>() / 5.0).collect(),
        };
        let k = ratings.len();
        let mut above = vec![false; k * k];
        for a in 0..k {
            for b in 0..k {
                above[a * k + b] = dominates(&ratings[a], &ratings[b]);
            }
        }
        let poset = DominancePoset {
            titles,
            ratings,
            averages,
            above,
        };
        poset.audit()?;
        Ok(poset)
    }

    fn audit(&self) -> Result<()> {
        let k = self.len();
        for a in 0..k {
            if self.is_above(a, a) {
                return Err(Error::InvalidParameter(format!("{} dominates itself", self.titles[a])));
            }
            for b in 0..k {
                if !self.is_above(a, b) {
                    continue;
                }
                for c in 0..k {
                    if self.is_above(b, c) && !self.is_above(a, c) {
                        return Err(Error::InvalidParameter(format!(
                            "dominance not transitive at {}, {}, {}",
                            self.titles[a], self.titles[b], self.titles[c]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.titles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.titles.is_empty()
    }

    pub fn titles(&self) -> &[String] {
        &self.titles
    }

    pub fn ratings(&self) -> &[[f64; 5]] {
        &self.ratings
    }

    pub fn averages(&self) -> &[f64] {
        &self.averages
    }

    /// Whether member `a` dominates member `b`.
    pub fn is_above(&self, a: usize, b: usize) -> bool {
        self.above[a * self.len() + b]
    }

    /// All pairs `(a, b)` with `a ≻ b`, in row-major order.
    pub fn relation(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        (0..k)
            .flat_map(|a| (0..k).map(move |b| (a, b)))
            .filter(|&(a, b)| self.is_above(a, b))
            .collect()
    }

    /// Maximal members, in member order.
    pub fn top_nodes(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&t| !(0..self.len()).any(|a| self.is_above(a, t)))
            .collect()
    }

    /// Longest chain, in edges, from a maximal member down to each member.
    pub fn heights(&self) -> Vec<usize> {
        let k = self.len();
        // a dominator has a strictly larger rating sum, so this is a
        // topological order
        let sums: Vec<f64> = self.ratings.iter().map(|r| r.iter().sum()).collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]).then(a.cmp(&b)));
        let mut height = vec![0usize; k];
        for (i, &x) in order.iter().enumerate() {
            height[x] = order[..i]
                .iter()
                .filter(|&&a| self.is_above(a, x))
                .map(|&a| height[a] + 1)
                .max()
                .unwrap_or(0);
        }
        height
    }

    pub fn transitive_reduction(&self) -> HasseDag {
        let k = self.len();
        let mut edges = Vec::new();
        for (a, c) in self.relation() {
            if !(0..k).any(|b| self.is_above(a, b) && self.is_above(b, c)) {
                edges.push((a, c));
            }
        }
        let heights = self.heights();
        let tops = self.top_nodes();
        let nodes = (0..k)
            .map(|i| HasseNode {
                title: self.titles[i].clone(),
                height: heights[i],
                average: self.averages[i],
                is_top: tops.contains(&i),
            })
            .collect();
        HasseDag { nodes, edges }
    }
}

/// Dominance order over the top `k` members of `table` by average score.
/// Only fully rated rows are eligible; `k` beyond their number takes them all.
pub fn build_poset(table: &CentralityTable, k: usize) -> Result<DominancePoset> {
    if k < 1 {
        return Err(Error::InvalidParameter("poset size k must be at least 1".into()));
    }
    let chosen: Vec<usize> = table
        .by_rank()
        .into_iter()
        .filter(|&i| table.rows[i].rescaled.complete().is_some())
        .take(k)
        .collect();
    let mut titles = Vec::with_capacity(chosen.len());
    let mut ratings = Vec::with_capacity(chosen.len());
    let mut averages = Vec::with_capacity(chosen.len());
    for i in chosen {
        let row = &table.rows[i];
        titles.push(row.title.clone());
        ratings.push(row.rescaled.complete().expect("filtered above"));
        averages.push(row.average.expect("complete rows have an average"));
    }
    DominancePoset::from_ratings(titles, ratings, Some(averages))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HasseNode {
    pub title: String,
    pub height: usize,
    pub average: f64,
    pub is_top: bool,
}

/// Covering pairs of a dominance order. Edges point from the dominating
/// member to the dominated one.
#[derive(Debug, Clone, PartialEq)]
pub struct HasseDag {
    pub nodes: Vec<HasseNode>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct HasseJson {
    nodes: Vec<HasseNode>,
    edges: Vec<[String; 2]>,
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl HasseDag {
    pub fn tops(&self) -> Vec<&str> {
        self.nodes
            .iter()
            .filter(|n| n.is_top)
            .map(|n| n.title.as_str())
            .collect()
    }

    /// Reachability closure of the covering edges, row-major `k × k`.
    pub fn closure(&self) -> Vec<bool> {
        let k = self.nodes.len();
        let mut reach = vec![false; k * k];
        for &(a, b) in &self.edges {
            reach[a * k + b] = true;
        }
        for m in 0..k {
            for a in 0..k {
                if reach[a * k + m] {
                    for b in 0..k {
                        if reach[m * k + b] {
                            reach[a * k + b] = true;
                        }
                    }
                }
            }
        }
        reach
    }

    /// `{nodes: [{title, height, average, is_top}], edges: [[from, to]]}`
    /// with edges given by title.
    pub fn to_json(&self) -> Result<String> {
        let doc = HasseJson {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| [self.nodes[a].title.clone(), self.nodes[b].title.clone()])
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Graphviz digraph. Members of equal height share a rank and the fill
    /// runs from red (highest average) to blue (lowest).
    pub fn to_dot(&self) -> String {
        let (lo, hi) = self
            .nodes
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), n| (lo.min(n.average), hi.max(n.average)));
        let mut out = String::from("digraph hasse {\n  rankdir=TB;\n  node [shape=box, style=filled];\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let t = if hi > lo { (hi - n.average) / (hi - lo) } else { 0.0 };
            let _ = writeln!(
                out,
                "  n{i} [label=\"{}\", rank={}, average=\"{:.2}\", fillcolor=\"{:.3} 0.450 1.000\"{}];",
                dot_escape(&n.title),
                n.height,
                n.average,
                0.667 * t,
                if n.is_top { ", peripheries=2" } else { "" },
            );
        }
        let max_height = self.nodes.iter().map(|n| n.height).max();
        for h in 0..=max_height.unwrap_or(0) {
            let level: Vec<String> = (0..self.nodes.len())
                .filter(|&i| self.nodes[i].height == h)
                .map(|i| format!("n{i};"))
                .collect();
            if !level.is_empty() {
                let _ = writeln!(out, "  {{ rank=same; {} }}", level.join(" "));
            }
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "  n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }
}

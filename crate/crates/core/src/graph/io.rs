//! Tab-separated edge-list and biography-list files.
//!
//! An edge-list line holds two page titles separated by a tab. Blank lines
//! and lines starting with `#` are skipped. A biography list has one title
//! per line and pins the node set, including pages with no links.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::Serialize;

use super::{BuildReport, Graph, GraphBuilder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, Serialize)]
pub struct EdgeListReport {
    #[serde(flatten)]
    pub build: BuildReport,
    /// Lines that did not contain exactly two non-empty titles.
    pub malformed_lines: Vec<usize>,
    /// Edge endpoints absent from a supplied biography list.
    pub unknown_titles: usize,
}

/// Reads an edge list. When `nodes` is given the node set and order come
/// from it and edges naming other titles are dropped and counted.
pub fn read_edge_list<R: Read>(reader: R, nodes: Option<&[String]>) -> Result<(Graph, EdgeListReport)> {
    let mut builder = GraphBuilder::new();
    if let Some(nodes) = nodes {
        for title in nodes {
            builder.add_node(title);
        }
    }
    let mut report = EdgeListReport::default();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            report.malformed_lines.push(i + 1);
            continue;
        };
        let (a, b) = (a.trim(), b.trim());
        if a.is_empty() || b.is_empty() {
            report.malformed_lines.push(i + 1);
            continue;
        }
        let ids = if nodes.is_some() {
            match (builder.node_id(a), builder.node_id(b)) {
                (Some(x), Some(y)) => (x, y),
                _ => {
                    report.unknown_titles += 1;
                    continue;
                }
            }
        } else {
            (builder.add_node(a), builder.add_node(b))
        };
        builder.add_edge(ids.0, ids.1);
    }
    let (graph, build) = builder.build();
    report.build = build;
    Ok((graph, report))
}

pub fn read_title_list<R: Read>(reader: R) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line?;
        let line = line.trim();
        if !line.is_empty() && !line.starts_with('#') {
            out.push(line.to_owned());
        }
    }
    Ok(out)
}

pub fn load_graph(edges: &Path, nodes: Option<&Path>) -> Result<(Graph, EdgeListReport)> {
    let titles = nodes
        .map(|p| fs::File::open(p).map_err(|e| Error::file(p, e)).and_then(read_title_list))
        .transpose()?;
    let file = fs::File::open(edges).map_err(|e| Error::file(edges, e))?;
    read_edge_list(file, titles.as_deref())
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    for (u, v) in g.edges() {
        writeln!(out, "{}\t{}", g.label(u), g.label(v))?;
    }
    Ok(())
}

pub fn write_title_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    for title in g.labels() {
        writeln!(out, "{title}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_malformed_lines() {
        let text = "# header\nA\tB\n\nB\tA\nbroken line\nC\t\nA\tC\n";
        let (g, report) = read_edge_list(text.as_bytes(), None).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(report.malformed_lines, vec![5, 6]);
        assert_eq!(report.build.duplicates, 1);
    }

    #[test]
    fn biography_list_pins_isolated_nodes() {
        let nodes = vec!["A".to_owned(), "B".to_owned(), "Lonely".to_owned()];
        let (g, report) = read_edge_list("A\tB\nA\tStranger\n".as_bytes(), Some(&nodes)).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(report.unknown_titles, 1);
    }

    #[test]
    fn write_then_read_preserves_edges() {
        let (g, _) = Graph::from_edge_list(&[("Isaac Newton", "Euclid"), ("Euclid", "Archimedes")]);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let (h, _) = read_edge_list(buf.as_slice(), Some(g.labels())).unwrap();
        assert_eq!(h.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }
}

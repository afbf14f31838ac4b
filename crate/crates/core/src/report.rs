//! Subcommand drivers and their report files.
//!
//! CSV reports round to the configured precision. JSON sidecars keep full
//! precision, and nothing read back from a report feeds a computation
//! unless the user passes it in explicitly.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::centrality::{analyze, Analysis, CentralityTable, Measure, Scores};
use crate::config::{InputMode, RunConfig};
use crate::error::{Error, Result};
use crate::extract::{biography_titles, build_network, parse_catalogue_source, parse_export, NetworkManifest};
use crate::graph::io::{load_graph, write_edge_list, write_title_list, EdgeListReport};
use crate::graph::Graph;
use crate::noise::{degree_std_regression, degree_theory, run_ensemble, series_name, EnsembleOptions, AVERAGE, SERIES};
use crate::poset::{build_poset, HasseDag};
use crate::stats::{correlation_matrix, degree_distribution_fit, CorrelationMatrix, Population};

/// Network built from catalogue pages and page exports.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub graph: Graph,
    pub manifest: NetworkManifest,
    pub catalogue_entries: usize,
    pub warnings: Vec<String>,
}

fn sorted_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::file(dir, e))? {
        let path = entry.map_err(|e| Error::file(dir, e))?.path();
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'));
        if path.is_file() && !hidden {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::file(path, e))
}

fn file_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

pub fn extract_raw(catalogue_dir: &Path, pages_dir: &Path) -> Result<Extraction> {
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for path in sorted_files(catalogue_dir)? {
        let parsed = parse_catalogue_source(&read_text(&path)?)?;
        let name = file_name(&path);
        warnings.extend(parsed.warnings.into_iter().map(|w| format!("{name}: {w}")));
        entries.extend(parsed.entries);
    }
    let biographies = biography_titles(&entries);
    if biographies.is_empty() {
        return Err(Error::Empty("no biographies parsed from the catalogue"));
    }
    let pages = sorted_files(pages_dir)?;
    let docs: Vec<_> = pages
        .par_iter()
        .map(|path| read_text(path).and_then(|xml| parse_export(&xml)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let (graph, manifest) = build_network(&biographies, &docs)?;
    Ok(Extraction {
        graph,
        manifest,
        catalogue_entries: entries.len(),
        warnings,
    })
}

/// Where an analysed network came from.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InputSummary {
    Raw {
        #[serde(flatten)]
        manifest: NetworkManifest,
        warnings: usize,
    },
    EdgeList {
        #[serde(flatten)]
        report: EdgeListReport,
    },
}

pub fn load_network(cfg: &RunConfig) -> Result<(Graph, InputSummary)> {
    match cfg.input.mode()? {
        InputMode::Raw {
            catalogue_dir,
            pages_dir,
        } => {
            let ex = extract_raw(catalogue_dir, pages_dir)?;
            let summary = InputSummary::Raw {
                manifest: ex.manifest,
                warnings: ex.warnings.len(),
            };
            Ok((ex.graph, summary))
        }
        InputMode::EdgeList { edges, nodes } => {
            let (g, report) = load_graph(edges, nodes)?;
            Ok((g, InputSummary::EdgeList { report }))
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<fs::File>)> {
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(|e| Error::file(&path, e))?;
    Ok((path, BufWriter::new(file)))
}

fn write_json<T: Serialize + ?Sized>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let (path, mut out) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(path)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let (path, mut out) = create(dir, name)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(path)
}

fn csv_writer(dir: &Path, name: &str) -> Result<(PathBuf, csv::Writer<BufWriter<fs::File>>)> {
    let (path, out) = create(dir, name)?;
    Ok((path, csv::Writer::from_writer(out)))
}

fn fmt(v: Option<f64>, precision: usize) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v:.precision$}"),
        _ => String::new(),
    }
}

fn error_json(e: &Error) -> serde_json::Value {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
}

/// Writes `edges.tsv`, `biographies.txt` and `extract_manifest.json`.
pub fn cmd_extract(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let InputMode::Raw {
        catalogue_dir,
        pages_dir,
    } = cfg.input.mode()?
    else {
        return Err(Error::Config("extract needs catalogue_dir and pages_dir".into()));
    };
    let ex = extract_raw(catalogue_dir, pages_dir)?;
    let dir = &cfg.output_dir;
    let (edges_path, mut out) = create(dir, "edges.tsv")?;
    write_edge_list(&ex.graph, &mut out)?;
    out.flush()?;
    let (bio_path, mut out) = create(dir, "biographies.txt")?;
    write_title_list(&ex.graph, &mut out)?;
    out.flush()?;
    let manifest = json!({
        "catalogue_entries": ex.catalogue_entries,
        "network": ex.manifest,
        "warning_count": ex.warnings.len(),
        "warnings": ex.warnings,
    });
    let manifest_path = write_json(dir, "extract_manifest.json", &manifest)?;
    Ok(vec![edges_path, bio_path, manifest_path])
}

pub fn write_scores_csv(table: &CentralityTable, dir: &Path, precision: usize) -> Result<PathBuf> {
    let (path, mut w) = csv_writer(dir, "scores.csv")?;
    w.write_record([
        "title",
        "degree_raw",
        "degree",
        "betweenness",
        "closeness",
        "eigenvector",
        "pagerank",
        "average",
        "rank_by_average",
    ])?;
    let mut order = table.by_rank();
    order.extend((0..table.len()).filter(|&i| table.rows[i].rank_by_average.is_none()));
    for i in order {
        let row = &table.rows[i];
        let mut record = vec![row.title.clone(), fmt(row.raw.degree, 0)];
        for m in Measure::ALL {
            record.push(fmt(row.rescaled.get(m), precision));
        }
        record.push(fmt(row.average, precision));
        record.push(row.rank_by_average.map_or_else(String::new, |r| r.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(path)
}

/// Correlation table in the layout of the published ones: Pearson above
/// the diagonal, Spearman below.
pub fn write_correlation_csv(m: &CorrelationMatrix, dir: &Path, name: &str, precision: usize) -> Result<PathBuf> {
    let (path, mut w) = csv_writer(dir, name)?;
    let mut header = vec![String::new()];
    header.extend(m.labels.iter().cloned());
    w.write_record(&header)?;
    for (i, label) in m.labels.iter().enumerate() {
        let mut record = vec![label.clone()];
        for j in 0..m.labels.len() {
            record.push(match j.cmp(&i) {
                std::cmp::Ordering::Equal => String::new(),
                std::cmp::Ordering::Greater => fmt(m.pearson[i][j], precision),
                std::cmp::Ordering::Less => fmt(m.spearman[i][j], precision),
            });
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(path)
}

/// Writes the score table, network parameters, both correlation tables
/// and the degree-distribution fit.
pub fn write_analysis(cfg: &RunConfig, analysis: &Analysis, input: &InputSummary) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    let table = &analysis.table;
    let mut written = vec![
        write_scores_csv(table, dir, cfg.precision)?,
        write_json(dir, "scores.json", table)?,
        write_json(
            dir,
            "network.json",
            &json!({ "parameters": analysis.parameters, "input": input }),
        )?,
    ];
    for (population, stem) in [
        (Population::LargestComponent, "correlations_lcc"),
        (Population::TopK(cfg.top_k), "correlations_topk"),
    ] {
        let m = correlation_matrix(table, population);
        written.push(write_correlation_csv(&m, dir, &format!("{stem}.csv"), cfg.precision)?);
        written.push(write_json(dir, &format!("{stem}.json"), &m)?);
    }
    Ok(written)
}

fn write_degree_fit(cfg: &RunConfig, g: &Graph) -> Result<PathBuf> {
    let fit = match degree_distribution_fit(g, cfg.bin_ratio) {
        Ok(fit) => serde_json::to_value(fit)?,
        Err(e) => error_json(&e),
    };
    write_json(&cfg.output_dir, "degree_fit.json", &fit)
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let (g, input) = load_network(cfg)?;
    let analysis = analyze(&g, &cfg.centrality)?;
    let mut written = write_analysis(cfg, &analysis, &input)?;
    written.push(write_degree_fit(cfg, &g)?);
    Ok(written)
}

/// Writes ensemble score, sample, rank-box and degree-spread reports.
pub fn cmd_noise(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let (g, _) = load_network(cfg)?;
    let opts = EnsembleOptions {
        centrality: cfg.centrality,
        top_k: cfg.top_k,
        per_measure: cfg.per_measure,
    };
    let ens = run_ensemble(&g, &cfg.noise, &opts)?;
    let dir = &cfg.output_dir;
    let precision = cfg.precision;
    let mut written = Vec::new();

    let ranks = ens.rank_by_mean_average();
    let mut order: Vec<usize> = (0..ens.nodes.len()).filter(|&i| ranks[i].is_some()).collect();
    order.sort_by_key(|&i| ranks[i]);
    order.extend((0..ens.nodes.len()).filter(|&i| ranks[i].is_none()));
    let (path, mut w) = csv_writer(dir, "ensemble_scores.csv")?;
    let mut header = vec!["title".to_owned(), "k_orig".into(), "degree_mean".into(), "degree_std".into()];
    for s in 0..SERIES {
        header.push(format!("{}_mean", series_name(s)));
        header.push(format!("{}_std", series_name(s)));
    }
    header.extend(["rank_mean".into(), "rank_std".into(), "rank_by_mean_average".into()]);
    w.write_record(&header)?;
    for &i in &order {
        let n = &ens.nodes[i];
        let present = |c: usize, v: f64| (c > 0).then_some(v);
        let mut record = vec![
            n.title.clone(),
            n.k_orig.to_string(),
            fmt(present(n.degree.count, n.degree.mean), precision),
            fmt(present(n.degree.count, n.degree.std), precision),
        ];
        for s in &n.scores {
            record.push(fmt(present(s.count, s.mean), precision));
            record.push(fmt(present(s.count, s.std), precision));
        }
        let r = &n.ranks[AVERAGE];
        record.push(fmt(present(r.count, r.mean), precision));
        record.push(fmt(present(r.count, r.std), precision));
        record.push(ranks[i].map_or_else(String::new, |r| r.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    written.push(path);
    written.push(write_json(dir, "ensemble_scores.json", &ens.nodes)?);

    let (path, mut w) = csv_writer(dir, "ensemble_samples.csv")?;
    w.write_record([
        "sample",
        "removed",
        "added",
        "self_loops",
        "duplicates",
        "edges",
        "lcc_nodes",
        "lcc_edges",
        "diameter",
        "avg_path_length",
        "clustering",
        "failure",
    ])?;
    for s in &ens.samples {
        let p = s.parameters.as_ref();
        w.write_record([
            s.index.to_string(),
            s.rewire.removed.to_string(),
            s.rewire.added.to_string(),
            s.rewire.self_loops.to_string(),
            s.rewire.duplicates.to_string(),
            (ens.base_edges - s.rewire.removed + s.rewire.added).to_string(),
            p.map_or_else(String::new, |p| p.lcc_nodes.to_string()),
            p.map_or_else(String::new, |p| p.lcc_edges.to_string()),
            p.map_or_else(String::new, |p| p.diameter.to_string()),
            fmt(p.map(|p| p.avg_path_length), precision.max(4)),
            fmt(p.map(|p| p.clustering), precision.max(4)),
            s.failure.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    written.push(path);

    let boxes: Vec<_> = ens
        .tracked
        .iter()
        .map(|t| {
            let series: serde_json::Map<String, serde_json::Value> = (0..SERIES)
                .map(|s| (series_name(s).to_owned(), json!(t.rank_boxes[s])))
                .collect();
            json!({ "title": t.title, "ranks": series })
        })
        .collect();
    written.push(write_json(
        dir,
        "rank_boxes.json",
        &json!({ "samples": ens.completed, "nodes": boxes }),
    )?);

    let points: Vec<_> = ens
        .nodes
        .iter()
        .filter(|n| n.k_orig >= 1)
        .map(|n| {
            let theory = degree_theory(n.k_orig as f64, ens.config.p, ens.base_edges).map(|t| t.sigma).ok();
            json!({ "title": n.title, "k_orig": n.k_orig, "std": n.degree.std, "theory": theory })
        })
        .collect();
    let fit = match degree_std_regression(&ens) {
        Ok(fit) => serde_json::to_value(fit)?,
        Err(e) => error_json(&e),
    };
    written.push(write_json(
        dir,
        "degree_std.json",
        &json!({ "config": ens.config, "completed": ens.completed, "failed": ens.failed, "fit": fit, "points": points }),
    )?);
    Ok(written)
}

fn column(headers: &csv::StringRecord, names: &[&str]) -> Option<usize> {
    headers
        .iter()
        .position(|h| names.iter().any(|n| h.trim().eq_ignore_ascii_case(n)))
}

/// Reads rescaled scores from a CSV with a `title` (or `name`) column and
/// one column per measure. Other columns are ignored and averages are
/// recomputed.
pub fn read_scores_csv(path: &Path) -> Result<CentralityTable> {
    let file = fs::File::open(path).map_err(|e| Error::file(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers()?.clone();
    let missing = |what: &str| Error::Config(format!("{}: no {what} column", path.display()));
    let title = column(&headers, &["title", "name"]).ok_or_else(|| missing("title"))?;
    let mut cols = Vec::new();
    for m in Measure::ALL {
        cols.push((m, column(&headers, &[m.name()]).ok_or_else(|| missing(m.name()))?));
    }
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record?;
        let mut scores = Scores::default();
        for &(m, c) in &cols {
            let cell = record.get(c).unwrap_or("").trim();
            let value = if cell.is_empty() {
                None
            } else {
                Some(cell.parse::<f64>().map_err(|_| {
                    Error::Config(format!("{}: bad {} value {cell:?}", path.display(), m.name()))
                })?)
            };
            scores.set(m, value);
        }
        entries.push((record.get(title).unwrap_or("").trim().to_owned(), scores));
    }
    Ok(CentralityTable::from_rescaled(entries))
}

/// Reads a score table from `scores.json` or a CSV report.
pub fn read_scores(path: &Path) -> Result<CentralityTable> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        Ok(serde_json::from_str(&read_text(path)?)?)
    } else {
        read_scores_csv(path)
    }
}

pub fn hasse_for(table: &CentralityTable, k: usize) -> Result<HasseDag> {
    Ok(build_poset(table, k)?.transitive_reduction())
}

/// Writes `hasse.dot` and `hasse.json` for the top `top_k` members, from
/// a score file when given and from the configured input otherwise.
pub fn cmd_poset(cfg: &RunConfig, scores: Option<&Path>) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let table = match scores {
        Some(path) => read_scores(path)?,
        None => {
            let (g, _) = load_network(cfg)?;
            analyze(&g, &cfg.centrality)?.table
        }
    };
    let dag = hasse_for(&table, cfg.top_k)?;
    let dir = &cfg.output_dir;
    Ok(vec![
        write_text(dir, "hasse.dot", &dag.to_dot())?,
        write_text(dir, "hasse.json", &(dag.to_json()? + "\n"))?,
    ])
}

//! Run configuration: a single JSON document where every field has a default.
//!
//! ```json
//! {
//!   "input": { "edge_list": "edges.tsv", "nodes": "biographies.txt" },
//!   "output_dir": "out",
//!   "noise": { "p": 0.1, "samples": 1000, "master_seed": 20170620 },
//!   "centrality": { "alpha": 0.85 },
//!   "top_k": 35,
//!   "precision": 2
//! }
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::centrality::CentralityOptions;
use crate::error::{Error, Result};
use crate::noise::NoiseConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    /// Directory of catalogue pages, as wikitext or XML exports.
    pub catalogue_dir: Option<PathBuf>,
    /// Directory of biography page exports.
    pub pages_dir: Option<PathBuf>,
    /// Prebuilt tab-separated edge list.
    pub edge_list: Option<PathBuf>,
    /// Biography list pinning the node set of `edge_list`.
    pub nodes: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputMode<'a> {
    Raw { catalogue_dir: &'a Path, pages_dir: &'a Path },
    EdgeList { edges: &'a Path, nodes: Option<&'a Path> },
}

impl InputConfig {
    pub fn mode(&self) -> Result<InputMode<'_>> {
        let raw = self.catalogue_dir.is_some() || self.pages_dir.is_some();
        match (&self.catalogue_dir, &self.pages_dir, &self.edge_list) {
            (Some(c), Some(p), None) if self.nodes.is_none() => Ok(InputMode::Raw {
                catalogue_dir: c,
                pages_dir: p,
            }),
            (None, None, Some(e)) => Ok(InputMode::EdgeList {
                edges: e,
                nodes: self.nodes.as_deref(),
            }),
            _ if raw && (self.edge_list.is_some() || self.nodes.is_some()) => Err(Error::Config(
                "give either raw wiki input or an edge list, not both".into(),
            )),
            _ if raw => Err(Error::Config("raw input needs both catalogue_dir and pages_dir".into())),
            _ => Err(Error::Config("no input: set catalogue_dir and pages_dir, or edge_list".into())),
        }
    }

    fn resolve(&mut self, base: &Path) {
        for p in [
            &mut self.catalogue_dir,
            &mut self.pages_dir,
            &mut self.edge_list,
            &mut self.nodes,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputConfig,
    pub output_dir: PathBuf,
    pub noise: NoiseConfig,
    pub centrality: CentralityOptions,
    /// Rows in the top-k correlation table and the poset.
    pub top_k: usize,
    /// Top nodes per measure whose rank distribution is kept in noise runs.
    pub per_measure: usize,
    /// Decimal places in CSV reports.
    pub precision: usize,
    /// Edge ratio of degree-distribution bins.
    pub bin_ratio: f64,
    /// Worker threads; all cores when absent.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: InputConfig::default(),
            output_dir: PathBuf::from("out"),
            noise: NoiseConfig::default(),
            centrality: CentralityOptions::default(),
            top_k: 35,
            per_measure: 10,
            precision: 2,
            bin_ratio: 1.5,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file and resolves its relative paths.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.input.resolve(base);
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(0.0..=1.0).contains(&self.noise.p) {
            return bad(format!("noise.p = {} outside [0, 1]", self.noise.p));
        }
        if self.noise.samples < 1 {
            return bad("noise.samples must be at least 1".into());
        }
        let c = &self.centrality;
        if !(c.alpha > 0.0 && c.alpha <= 1.0) {
            return bad(format!("centrality.alpha = {} outside (0, 1]", c.alpha));
        }
        if !(c.eigen_tol > 0.0 && c.pagerank_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if c.eigen_max_iter < 1 || c.pagerank_max_iter < 1 {
            return bad("iteration limits must be at least 1".into());
        }
        if self.top_k < 1 {
            return bad("top_k must be at least 1".into());
        }
        if self.precision > 12 {
            return bad(format!("precision {} above 12", self.precision));
        }
        if !(self.bin_ratio > 1.0) {
            return bad(format!("bin_ratio {} must exceed 1", self.bin_ratio));
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg.noise.p, 0.1);
        assert_eq!(cfg.noise.samples, 1000);
        assert_eq!(cfg.centrality.alpha, 0.85);
        assert_eq!(cfg.top_k, 35);
        assert_eq!(cfg.precision, 2);
        cfg.validate().unwrap();
        assert!(cfg.input.mode().is_err());
    }

    #[test]
    fn partial_sections_keep_defaults() {
        let cfg = RunConfig::from_json(r#"{"noise": {"p": 0.2}, "centrality": {"alpha": 1.0}}"#).unwrap();
        assert_eq!(cfg.noise.p, 0.2);
        assert_eq!(cfg.noise.samples, 1000);
        assert_eq!(cfg.centrality.alpha, 1.0);
        assert_eq!(cfg.centrality.eigen_tol, 1e-10);
    }

    #[test]
    fn exactly_one_input_mode() {
        let edge = RunConfig::from_json(r#"{"input": {"edge_list": "e.tsv"}}"#).unwrap();
        assert!(matches!(edge.input.mode(), Ok(InputMode::EdgeList { nodes: None, .. })));
        let raw = RunConfig::from_json(r#"{"input": {"catalogue_dir": "c", "pages_dir": "p"}}"#).unwrap();
        assert!(matches!(raw.input.mode(), Ok(InputMode::Raw { .. })));
        let both =
            RunConfig::from_json(r#"{"input": {"catalogue_dir": "c", "pages_dir": "p", "edge_list": "e"}}"#).unwrap();
        assert!(both.input.mode().is_err());
        let half = RunConfig::from_json(r#"{"input": {"pages_dir": "p"}}"#).unwrap();
        assert!(half.input.mode().is_err());
    }

    #[test]
    fn ranges_are_checked() {
        for json in [
            r#"{"noise": {"p": 1.5}}"#,
            r#"{"noise": {"samples": 0}}"#,
            r#"{"centrality": {"alpha": 0.0}}"#,
            r#"{"top_k": 0}"#,
            r#"{"bin_ratio": 1.0}"#,
            r#"{"workers": 0}"#,
        ] {
            assert!(RunConfig::from_json(json).unwrap().validate().is_err(), "{json}");
        }
        assert!(RunConfig::from_json(r#"{"nosie": {}}"#).is_err());
    }

    #[test]
    fn relative_paths_follow_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        fs::write(&path, r#"{"input": {"edge_list": "e.tsv"}, "output_dir": "/abs/out"}"#).unwrap();
        let cfg = RunConfig::load(&path).unwrap();
        assert_eq!(cfg.input.edge_list.unwrap(), dir.path().join("e.tsv"));
        assert_eq!(cfg.output_dir, PathBuf::from("/abs/out"));
    }
}

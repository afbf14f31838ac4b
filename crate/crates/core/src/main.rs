use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use wikinet::config::{InputConfig, RunConfig};
use wikinet::report::{cmd_analyze, cmd_extract, cmd_noise, cmd_poset};
use wikinet::{Error, Result};

#[derive(Parser)]
#[command(name = "wikinet", version, about = "Centrality and robustness analysis of biography hyperlink networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the edge list and biography list from catalogue pages and page exports.
    Extract(Common),
    /// Score table, network parameters, correlations and degree-distribution fit.
    Analyze(Common),
    /// Rewiring ensemble statistics.
    Noise(Common),
    /// Dominance poset and Hasse diagram of the top nodes.
    Poset {
        #[command(flatten)]
        common: Common,
        /// Score table (scores.json or a CSV) to use instead of recomputing.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fraction of edges rewired.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// PageRank damping factor.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    top_k: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// Edge list, replacing the configured input.
    #[arg(long, conflicts_with_all = ["catalogue", "pages"])]
    edges: Option<PathBuf>,
    /// Biography list that pins the node set of `--edges`.
    #[arg(long, requires = "edges")]
    nodes: Option<PathBuf>,
    /// Catalogue directory, replacing the configured input.
    #[arg(long, requires = "pages")]
    catalogue: Option<PathBuf>,
    /// Page export directory, replacing the configured input.
    #[arg(long, requires = "catalogue")]
    pages: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if self.edges.is_some() {
            cfg.input = InputConfig {
                edge_list: self.edges.clone(),
                nodes: self.nodes.clone(),
                ..Default::default()
            };
        } else if self.catalogue.is_some() {
            cfg.input = InputConfig {
                catalogue_dir: self.catalogue.clone(),
                pages_dir: self.pages.clone(),
                ..Default::default()
            };
        }
        if let Some(seed) = self.seed {
            cfg.noise.master_seed = seed;
        }
        if let Some(p) = self.p {
            cfg.noise.p = p;
        }
        if let Some(s) = self.samples {
            cfg.noise.samples = s;
        }
        if let Some(a) = self.alpha {
            cfg.centrality.alpha = a;
        }
        if let Some(k) = self.top_k {
            cfg.top_k = k;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let (common, scores) = match &cli.command {
        Command::Extract(c) | Command::Analyze(c) | Command::Noise(c) => (c, None),
        Command::Poset { common, scores } => (common, scores.as_deref()),
    };
    let cfg = common.config()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.workers {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Extract(_) => cmd_extract(&cfg),
        Command::Analyze(_) => cmd_analyze(&cfg),
        Command::Noise(_) => cmd_noise(&cfg),
        Command::Poset { .. } => cmd_poset(&cfg, scores),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let doc = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{doc}");
            ExitCode::FAILURE
        }
    }
}

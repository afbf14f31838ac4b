//! Hyperlink-network analysis of wiki biography pages.
//!
//! The pipeline extracts an undirected link graph from MediaWiki exports,
//! scores every page with five centrality measures rescaled to 0–100,
//! estimates how robust those scores are under random edge rewiring, and
//! combines the measures into a strict dominance order.

pub mod centrality;
pub mod config;
pub mod error;
pub mod extract;
pub mod graph;
pub mod noise;
pub mod poset;
pub mod report;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Graph, GraphBuilder, NodeId};

//! Embedding JSON documents.
//!
//! ```json
//! {
//!   "version": "0.1.0",
//!   "method": "decomposition",
//!   "objective": "min-size",
//!   "status": "optimal",
//!   "k": 16,
//!   "seed": 0,
//!   "size": 13,
//!   "best_bound": 13,
//!   "gap": 0.0,
//!   "reason": null,
//!   "vertex_models": { "0": [0, 4], "1": [1] },
//!   "stats": { "nodes": 0, "iterations": 1, "cuts": 0, "wall_time_ms": 12 }
//! }
//! ```
//!
//! `stats.wall_time_ms` is the only timing field.

use std::collections::BTreeMap;

use minorcast::{EmbedOutcome, Embedding};
use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RunStats {
    #[serde(default)]
    pub nodes: u64,
    #[serde(default)]
    pub propagations: u64,
    #[serde(default)]
    pub conflicts: u64,
    #[serde(default)]
    pub num_vars: usize,
    #[serde(default)]
    pub num_constraints: usize,
    #[serde(default)]
    pub iterations: usize,
    #[serde(default)]
    pub cuts: usize,
    #[serde(default)]
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingDoc {
    pub version: String,
    pub method: String,
    pub objective: String,
    pub status: String,
    pub k: usize,
    pub seed: u64,
    pub size: Option<usize>,
    pub best_bound: i64,
    pub gap: Option<f64>,
    pub reason: Option<String>,
    pub vertex_models: BTreeMap<usize, Vec<usize>>,
    #[serde(default)]
    pub stats: RunStats,
}

impl EmbeddingDoc {
    pub fn from_outcome(out: &EmbedOutcome, method: &str, objective: &str, seed: u64) -> Self {
        let s = &out.stats;
        EmbeddingDoc {
            version: VERSION.to_string(),
            method: method.to_string(),
            objective: objective.to_string(),
            status: out.status.as_str().to_string(),
            k: out.k,
            seed,
            size: out.size(),
            best_bound: out.best_bound,
            gap: out.gap(),
            reason: out.reason.clone(),
            vertex_models: out.embedding.as_ref().map(models_map).unwrap_or_default(),
            stats: RunStats {
                nodes: s.solve.nodes,
                propagations: s.solve.propagations,
                conflicts: s.solve.conflicts,
                num_vars: s.num_vars,
                num_constraints: s.num_constraints,
                iterations: s.iterations,
                cuts: s.cuts,
                wall_time_ms: s.wall_time.as_millis() as u64,
            },
        }
    }

    /// The embedding, with models for `num_source` vertices (missing ones empty).
    pub fn embedding(&self, num_source: usize) -> Embedding {
        let len = num_source.max(self.vertex_models.keys().next_back().map_or(0, |&k| k + 1));
        let mut models = vec![Vec::new(); len];
        for (&y, m) in &self.vertex_models {
            models[y] = m.clone();
        }
        Embedding::new(models)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

pub fn models_map(e: &Embedding) -> BTreeMap<usize, Vec<usize>> {
    e.vertex_models().iter().enumerate().map(|(y, m)| (y, m.clone())).collect()
}

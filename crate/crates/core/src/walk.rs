//! Plain and lazy k-step random walks with per-source random streams.
//!
//! Every walk owns a ChaCha8 stream keyed by `(master seed, run, source id)`,
//! so a batch of walks gives the same answer whatever order, or however many
//! threads, it runs on.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::ReviewerGraph;
use crate::model::{Dataset, Query};

pub const DEFAULT_STAY_PROBABILITY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkMethod {
    Rw,
    Lrw,
}

impl WalkMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            WalkMethod::Rw => "rw",
            WalkMethod::Lrw => "lrw",
        }
    }
}

impl fmt::Display for WalkMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WalkMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rw" => Ok(WalkMethod::Rw),
            "lrw" => Ok(WalkMethod::Lrw),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub method: WalkMethod,
    pub k: usize,
    /// Ignored by [`WalkMethod::Rw`].
    pub stay_probability: f64,
    pub master_seed: u64,
}

impl WalkConfig {
    pub fn new(method: WalkMethod, k: usize, stay_probability: f64, master_seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("walk length k must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&stay_probability) {
            return Err(Error::Domain(format!(
                "stay probability must lie in [0, 1], got {stay_probability}"
            )));
        }
        Ok(WalkConfig {
            method,
            k,
            stay_probability,
            master_seed,
        })
    }

    pub fn lazy(k: usize, master_seed: u64) -> Self {
        WalkConfig::new(WalkMethod::Lrw, k, DEFAULT_STAY_PROBABILITY, master_seed)
            .expect("default lazy config is valid")
    }

    pub fn plain(k: usize, master_seed: u64) -> Self {
        WalkConfig::new(WalkMethod::Rw, k, DEFAULT_STAY_PROBABILITY, master_seed)
            .expect("default plain config is valid")
    }

    /// Probability of staying put at each step under this method.
    pub fn effective_stay(&self) -> f64 {
        match self.method {
            WalkMethod::Rw => 0.0,
            WalkMethod::Lrw => self.stay_probability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkResult {
    pub source: String,
    /// `k + 1` entries, starting at `source`.
    pub path: Vec<String>,
    pub terminal: String,
}

/// The random stream for one walk.
pub fn walk_stream(master_seed: u64, source: &str, run: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(b"localexpert/walk");
    hasher.update(master_seed.to_le_bytes());
    hasher.update(run.to_le_bytes());
    hasher.update(source.as_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// Index-level walk: clears `path` and fills it with `k + 1` node indices.
///
/// A node with no neighbours holds the walk in place without drawing from
/// the stream. The stay coin is only drawn when `stay_probability > 0`, so a
/// zero-laziness walk consumes the stream exactly like a plain walk.
pub fn walk_indices<R: Rng + ?Sized>(
    graph: &ReviewerGraph,
    start: usize,
    k: usize,
    stay_probability: f64,
    rng: &mut R,
    path: &mut Vec<usize>,
) {
    path.clear();
    path.reserve(k + 1);
    let mut current = start;
    path.push(current);
    for _ in 0..k {
        let neighbors = graph.neighbors(current);
        if !neighbors.is_empty() {
            let stay = stay_probability > 0.0 && rng.gen::<f64>() < stay_probability;
            if !stay {
                current = neighbors[rng.gen_range(0..neighbors.len())];
            }
        }
        path.push(current);
    }
}

fn walk<R: Rng + ?Sized>(
    graph: &ReviewerGraph,
    start: &str,
    k: usize,
    stay_probability: f64,
    rng: &mut R,
) -> Result<WalkResult> {
    let index = graph
        .index_of(start)
        .ok_or_else(|| Error::not_found("graph node", start))?;
    let mut path = Vec::new();
    walk_indices(graph, index, k, stay_probability, rng, &mut path);
    let path: Vec<String> = path.into_iter().map(|i| graph.id(i).to_string()).collect();
    Ok(WalkResult {
        source: start.to_string(),
        terminal: path[k].clone(),
        path,
    })
}

/// k steps, each to a uniformly chosen neighbour.
pub fn random_walk<R: Rng + ?Sized>(
    graph: &ReviewerGraph,
    start: &str,
    k: usize,
    rng: &mut R,
) -> Result<WalkResult> {
    walk(graph, start, k, 0.0, rng)
}

/// k steps, each staying put with `stay_probability` and otherwise moving to
/// a uniformly chosen neighbour.
pub fn lazy_random_walk<R: Rng + ?Sized>(
    graph: &ReviewerGraph,
    start: &str,
    k: usize,
    stay_probability: f64,
    rng: &mut R,
) -> Result<WalkResult> {
    if !(0.0..=1.0).contains(&stay_probability) {
        return Err(Error::Domain(format!(
            "stay probability must lie in [0, 1], got {stay_probability}"
        )));
    }
    walk(graph, start, k, stay_probability, rng)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalEntry {
    pub source: String,
    pub terminal: String,
    /// Whether the terminal passes local and topic authority for the query.
    pub valid: bool,
}

/// One walk from every graph node (ascending id) for run 0.
pub fn candidate_terminals(
    graph: &ReviewerGraph,
    dataset: &Dataset,
    query: &Query,
    config: &WalkConfig,
) -> Vec<TerminalEntry> {
    candidate_terminals_for_run(graph, dataset, query, config, 0)
}

/// As [`candidate_terminals`], with streams keyed by `run` as well.
pub fn candidate_terminals_for_run(
    graph: &ReviewerGraph,
    dataset: &Dataset,
    query: &Query,
    config: &WalkConfig,
    run: u64,
) -> Vec<TerminalEntry> {
    let stay = config.effective_stay();
    let terminals: Vec<usize> = (0..graph.len())
        .into_par_iter()
        .map_init(Vec::new, |path, source| {
            let mut rng = walk_stream(config.master_seed, graph.id(source), run);
            walk_indices(graph, source, config.k, stay, &mut rng, path);
            path[config.k]
        })
        .collect();

    // Candidacy is evaluated once per distinct terminal.
    let mut valid = vec![None; graph.len()];
    terminals
        .iter()
        .enumerate()
        .map(|(source, &terminal)| {
            let ok = *valid[terminal].get_or_insert_with(|| {
                dataset
                    .users()
                    .get(graph.id(terminal))
                    .is_some_and(|u| dataset.user_is_candidate(u, query))
            });
            TerminalEntry {
                source: graph.id(source).to_string(),
                terminal: graph.id(terminal).to_string(),
                valid: ok,
            }
        })
        .collect()
}

//! The recommendation pipeline: resolve the query, build the reviewer graph,
//! pick the expert(s) and rank the places they vouch for.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::centrality::{argmax_candidate, CentralityMethod};
use crate::error::{Error, Result};
use crate::graph::{build_global_graph, build_pa_graph, highest_degree_component, ReviewerGraph};
use crate::model::{normalize, Dataset, Mode, Query};
use crate::walk::{candidate_terminals_for_run, WalkConfig, WalkMethod, DEFAULT_STAY_PROBABILITY};

/// Shipped query-text to category pairing.
pub const DEFAULT_QUERY_MAP: [(&str, &str); 6] = [
    ("mall", "shopping mall"),
    ("inexpensive market", "market"),
    ("discount books", "bookstore"),
    ("dress shop", "department store"),
    ("comfortable shopping", "shopping mall"),
    ("complete and inexpensive shopping", "supermarket"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryMap {
    entries: BTreeMap<String, String>,
}

impl Default for QueryMap {
    fn default() -> Self {
        QueryMap::new(DEFAULT_QUERY_MAP).expect("default map is non-empty")
    }
}

impl QueryMap {
    pub fn new(pairs: impl IntoIterator<Item = (impl AsRef<str>, impl AsRef<str>)>) -> Result<Self> {
        let entries: BTreeMap<String, String> = pairs
            .into_iter()
            .map(|(q, c)| (normalize(q.as_ref()), normalize(c.as_ref())))
            .collect();
        if entries.is_empty() {
            return Err(Error::Domain("query map must not be empty".into()));
        }
        Ok(QueryMap { entries })
    }

    pub fn known_queries(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    /// Case-insensitive exact lookup.
    pub fn resolve_category(&self, query_text: &str) -> Result<&str> {
        self.entries
            .get(&normalize(query_text))
            .map(String::as_str)
            .ok_or_else(|| Error::UnknownQuery {
                query: query_text.to_string(),
                known: self.known_queries(),
            })
    }

    /// Resolves `text` and assembles a [`Query`].
    pub fn query(
        &self,
        text: &str,
        city: &str,
        mode: Mode,
        k: usize,
        user_id: Option<String>,
    ) -> Result<Query> {
        let category = self.resolve_category(text)?;
        Query::new(text, category, city, mode, k, user_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Walk(WalkMethod),
    Centrality(CentralityMethod),
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Walk(WalkMethod::Rw),
        Method::Walk(WalkMethod::Lrw),
        Method::Centrality(CentralityMethod::PageRank),
        Method::Centrality(CentralityMethod::Betweenness),
        Method::Centrality(CentralityMethod::Closeness),
        Method::Centrality(CentralityMethod::Degree),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Walk(m) => m.as_str(),
            Method::Centrality(m) => m.as_str(),
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Method::Walk(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// Union of the recommendations of every valid walk terminal.
    #[default]
    Pool,
    /// Only the most frequent valid terminal.
    Modal,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Pool => "pool",
            Aggregation::Modal => "modal",
        }
    }
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pool" => Ok(Aggregation::Pool),
            "modal" => Ok(Aggregation::Modal),
            other => Err(Error::Domain(format!(
                "aggregation must be `pool` or `modal`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    #[default]
    None,
    /// A privacy-aware request from a user without contacts ran globally.
    PaToGlobal,
    /// Nobody in the graph qualified as a local expert.
    NoCandidate,
}

impl Fallback {
    pub fn as_str(self) -> &'static str {
        match self {
            Fallback::None => "none",
            Fallback::PaToGlobal => "pa_to_global",
            Fallback::NoCandidate => "no_candidate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedPlace {
    pub place_id: String,
    pub name: String,
    pub pos: usize,
    pub neg: usize,
}

impl RankedPlace {
    pub fn from_dataset(dataset: &Dataset, place_id: &str) -> Result<Self> {
        let place = dataset.place(place_id)?;
        let (pos, neg) = dataset.pos_neg_counts(place_id)?;
        Ok(RankedPlace {
            place_id: place.id.clone(),
            name: place.name.clone(),
            pos,
            neg,
        })
    }

    fn order(&self, other: &Self) -> std::cmp::Ordering {
        other
            .pos
            .cmp(&self.pos)
            .then(self.neg.cmp(&other.neg))
            .then_with(|| self.place_id.cmp(&other.place_id))
    }
}

/// Stage durations in seconds. `t_total` is the sum of the other three.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TimingReport {
    pub t_graph: f64,
    pub t_algo: f64,
    pub t_other: f64,
    pub t_total: f64,
}

impl TimingReport {
    fn from_marks(start: Instant, graph: Instant, algo: Instant, end: Instant) -> Self {
        let t_graph = graph.duration_since(start).as_secs_f64();
        let t_algo = algo.duration_since(graph).as_secs_f64();
        let t_other = end.duration_since(algo).as_secs_f64();
        TimingReport {
            t_graph,
            t_algo,
            t_other,
            t_total: t_graph + t_algo + t_other,
        }
    }

    pub fn mean(reports: &[TimingReport]) -> TimingReport {
        if reports.is_empty() {
            return TimingReport::default();
        }
        let n = reports.len() as f64;
        let avg = |f: fn(&TimingReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        let (t_graph, t_algo, t_other) = (avg(|t| t.t_graph), avg(|t| t.t_algo), avg(|t| t.t_other));
        TimingReport {
            t_graph,
            t_algo,
            t_other,
            t_total: t_graph + t_algo + t_other,
        }
    }
}

/// Knobs of a single [`recommend`] call beyond the query and method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecommendConfig {
    pub stay_probability: f64,
    /// Required by walk methods, ignored by centrality methods.
    pub seed: Option<u64>,
    pub aggregation: Aggregation,
    /// Repetition index mixed into the walk streams.
    pub run: u64,
}

impl Default for RecommendConfig {
    fn default() -> Self {
        RecommendConfig {
            stay_probability: DEFAULT_STAY_PROBABILITY,
            seed: None,
            aggregation: Aggregation::Pool,
            run: 0,
        }
    }
}

impl RecommendConfig {
    pub fn seeded(seed: u64) -> Self {
        RecommendConfig {
            seed: Some(seed),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecommendationRun {
    pub query: Query,
    pub method: Method,
    pub aggregation: Aggregation,
    pub seed: Option<u64>,
    pub experts: Vec<String>,
    pub ranked: Vec<RankedPlace>,
    pub fallback: Fallback,
    /// Nodes of the searched graph passing local and topic authority.
    pub n_candidates: usize,
    pub timings: TimingReport,
}

/// Places matching the query that `expert` reviewed and whose dataset-wide
/// counts are majority-positive (`pos >= neg`).
pub fn expert_recommendations(
    dataset: &Dataset,
    expert: &str,
    query: &Query,
) -> Result<Vec<RankedPlace>> {
    dataset.user(expert)?;
    let matching: BTreeSet<String> = dataset.matching_places(query).into_iter().collect();
    let reviewed: BTreeSet<&str> = dataset
        .reviews_by_user(expert)
        .map(|r| r.place_id.as_str())
        .filter(|p| matching.contains(*p))
        .collect();
    reviewed
        .into_iter()
        .map(|p| RankedPlace::from_dataset(dataset, p))
        .filter(|r| r.as_ref().map_or(true, |r| r.pos >= r.neg))
        .collect()
}

/// Sorts by positive count descending, negative ascending, then id, merging
/// duplicate ids.
pub fn rank(mut places: Vec<RankedPlace>) -> Result<Vec<RankedPlace>> {
    places.sort_by(|a, b| a.place_id.cmp(&b.place_id));
    let mut merged: Vec<RankedPlace> = Vec::with_capacity(places.len());
    for place in places {
        match merged.last() {
            Some(last) if last.place_id == place.place_id => {
                if (last.pos, last.neg) != (place.pos, place.neg) {
                    return Err(Error::Data(format!(
                        "place `{}` listed with counts ({}, {}) and ({}, {})",
                        place.place_id, last.pos, last.neg, place.pos, place.neg
                    )));
                }
            }
            _ => merged.push(place),
        }
    }
    merged.sort_by(RankedPlace::order);
    Ok(merged)
}

/// Chooses and builds the graph to search, reporting a pa-to-global fallback.
pub fn search_graph(dataset: &Dataset, query: &Query) -> Result<(ReviewerGraph, Fallback)> {
    if query.mode == Mode::Pa {
        let user_id = query
            .user_id
            .as_deref()
            .ok_or_else(|| Error::InvalidQuery("mode `pa` requires a requesting user".into()))?;
        let user = dataset.user(user_id)?;
        if user.contacts.iter().any(|c| c != user_id && dataset.users().contains_key(c)) {
            return Ok((build_pa_graph(dataset, user_id, query)?, Fallback::None));
        }
        let global = highest_degree_component(&build_global_graph(dataset, query));
        return Ok((global, Fallback::PaToGlobal));
    }
    Ok((
        highest_degree_component(&build_global_graph(dataset, query)),
        Fallback::None,
    ))
}

/// Runs the full pipeline once.
pub fn recommend(
    dataset: &Dataset,
    query: &Query,
    method: Method,
    config: &RecommendConfig,
) -> Result<RecommendationRun> {
    if !dataset.vocabulary().contains(&query.category) {
        return Err(Error::InvalidQuery(format!(
            "category `{}` is not in the dataset vocabulary",
            query.category
        )));
    }
    let walk_config = match method {
        Method::Walk(m) => {
            let seed = config
                .seed
                .ok_or_else(|| Error::Domain(format!("method `{m}` needs a seed")))?;
            Some(WalkConfig::new(m, query.k, config.stay_probability, seed)?)
        }
        Method::Centrality(_) => None,
    };

    let start = Instant::now();
    let (graph, mut fallback) = search_graph(dataset, query)?;
    let graph_done = Instant::now();

    enum Picked {
        Walk(Vec<String>),
        Centrality(String, bool),
        Nothing,
    }
    let picked = if graph.is_empty() {
        Picked::Nothing
    } else {
        match (method, &walk_config) {
            (Method::Walk(_), Some(cfg)) => {
                let terminals = candidate_terminals_for_run(&graph, dataset, query, cfg, config.run);
                Picked::Walk(
                    terminals
                        .into_iter()
                        .filter(|t| t.valid)
                        .map(|t| t.terminal)
                        .collect(),
                )
            }
            (Method::Centrality(m), _) => {
                let scores = m.score(&graph)?;
                let pick = argmax_candidate(&scores, dataset, query)?;
                Picked::Centrality(pick.node, pick.is_candidate)
            }
            (Method::Walk(_), None) => unreachable!("walk config built above"),
        }
    };
    let algo_done = Instant::now();

    let n_candidates = graph
        .nodes()
        .iter()
        .filter(|id| {
            dataset
                .users()
                .get(*id)
                .is_some_and(|u| dataset.user_is_candidate(u, query))
        })
        .count();
    let experts: Vec<String> = match picked {
        Picked::Walk(valid) => match config.aggregation {
            Aggregation::Pool => valid
                .into_iter()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
            Aggregation::Modal => {
                let mut freq: BTreeMap<String, usize> = BTreeMap::new();
                for t in valid {
                    *freq.entry(t).or_default() += 1;
                }
                let top = freq.values().copied().max();
                freq.into_iter()
                    .find(|(_, c)| Some(*c) == top)
                    .map(|(id, _)| id)
                    .into_iter()
                    .collect()
            }
        },
        Picked::Centrality(node, true) => vec![node],
        Picked::Centrality(node, false) => {
            fallback = Fallback::NoCandidate;
            vec![node]
        }
        Picked::Nothing => Vec::new(),
    };
    let ranked = if fallback == Fallback::NoCandidate {
        Vec::new()
    } else if experts.is_empty() {
        fallback = Fallback::NoCandidate;
        Vec::new()
    } else {
        let mut pooled = Vec::new();
        for expert in &experts {
            pooled.extend(expert_recommendations(dataset, expert, query)?);
        }
        rank(pooled)?
    };
    let end = Instant::now();

    Ok(RecommendationRun {
        query: query.clone(),
        method,
        aggregation: config.aggregation,
        seed: walk_config.map(|c| c.master_seed),
        experts,
        ranked,
        fallback,
        n_candidates,
        timings: TimingReport::from_marks(start, graph_done, algo_done, end),
    })
}

//! Static expert selectors: PageRank, betweenness, closeness and degree.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::ReviewerGraph;
use crate::model::{Dataset, Query};

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CentralityMethod {
    PageRank,
    Betweenness,
    Closeness,
    Degree,
}

impl CentralityMethod {
    pub const ALL: [CentralityMethod; 4] = [
        CentralityMethod::PageRank,
        CentralityMethod::Betweenness,
        CentralityMethod::Closeness,
        CentralityMethod::Degree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CentralityMethod::PageRank => "pagerank",
            CentralityMethod::Betweenness => "betweenness",
            CentralityMethod::Closeness => "closeness",
            CentralityMethod::Degree => "degree",
        }
    }

    /// Scores with the default parameters.
    pub fn score(self, graph: &ReviewerGraph) -> Result<ScoreMap> {
        match self {
            CentralityMethod::PageRank => {
                pagerank(graph, DEFAULT_DAMPING, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS)
            }
            CentralityMethod::Betweenness => betweenness(graph),
            CentralityMethod::Closeness => closeness(graph),
            CentralityMethod::Degree => Ok(degree(graph)),
        }
    }
}

impl fmt::Display for CentralityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CentralityMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CentralityMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMap {
    pub method: CentralityMethod,
    pub scores: BTreeMap<String, f64>,
}

impl ScoreMap {
    fn from_vec(method: CentralityMethod, graph: &ReviewerGraph, values: Vec<f64>) -> Self {
        ScoreMap {
            method,
            scores: graph.nodes().iter().cloned().zip(values).collect(),
        }
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.scores.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

fn require_nodes(graph: &ReviewerGraph, what: &str) -> Result<()> {
    if graph.is_empty() {
        Err(Error::Domain(format!("{what} of an empty graph")))
    } else {
        Ok(())
    }
}

/// Power iteration over the undirected adjacency. Each node spreads its rank
/// evenly over its neighbours; isolated nodes spread theirs over every node.
/// Stops once the L1 change drops below `tolerance`.
pub fn pagerank(
    graph: &ReviewerGraph,
    damping: f64,
    tolerance: f64,
    max_iterations: usize,
) -> Result<ScoreMap> {
    require_nodes(graph, "pagerank")?;
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::Domain(format!("damping must lie in (0, 1), got {damping}")));
    }
    let n = graph.len();
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..max_iterations {
        let dangling: f64 = (0..n).filter(|&v| graph.degree(v) == 0).map(|v| rank[v]).sum();
        let base = (1.0 - damping) / nf + damping * dangling / nf;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: f64 = graph
                .neighbors(v)
                .iter()
                .map(|&u| rank[u] / graph.degree(u) as f64)
                .sum();
            *slot = base + damping * inflow;
        }
        let change: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if change < tolerance {
            break;
        }
    }
    let total: f64 = rank.iter().sum();
    rank.iter_mut().for_each(|r| *r /= total);
    Ok(ScoreMap::from_vec(CentralityMethod::PageRank, graph, rank))
}

/// Exact shortest-path betweenness (Brandes accumulation), endpoints
/// excluded, each unordered pair counted once.
pub fn betweenness(graph: &ReviewerGraph) -> Result<ScoreMap> {
    require_nodes(graph, "betweenness")?;
    let n = graph.len();
    let mut centrality = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();

    for s in 0..n {
        sigma.iter_mut().for_each(|x| *x = 0.0);
        dist.iter_mut().for_each(|x| *x = usize::MAX);
        delta.iter_mut().for_each(|x| *x = 0.0);
        preds.iter_mut().for_each(Vec::clear);
        order.clear();

        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in graph.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    centrality.iter_mut().for_each(|c| *c /= 2.0);
    Ok(ScoreMap::from_vec(CentralityMethod::Betweenness, graph, centrality))
}

/// Closeness within each node's component: `(reachable - 1) / sum of
/// distances`, zero for isolated nodes.
pub fn closeness(graph: &ReviewerGraph) -> Result<ScoreMap> {
    require_nodes(graph, "closeness")?;
    let n = graph.len();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let scores = (0..n)
        .map(|s| {
            dist.iter_mut().for_each(|x| *x = usize::MAX);
            dist[s] = 0;
            queue.push_back(s);
            let (mut reached, mut total) = (0usize, 0usize);
            while let Some(v) = queue.pop_front() {
                reached += 1;
                total += dist[v];
                for &w in graph.neighbors(v) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            if total == 0 {
                0.0
            } else {
                (reached - 1) as f64 / total as f64
            }
        })
        .collect();
    Ok(ScoreMap::from_vec(CentralityMethod::Closeness, graph, scores))
}

pub fn degree(graph: &ReviewerGraph) -> ScoreMap {
    let scores = (0..graph.len()).map(|v| graph.degree(v) as f64).collect();
    ScoreMap::from_vec(CentralityMethod::Degree, graph, scores)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Argmax {
    pub node: String,
    pub score: f64,
    /// False when no node passed candidacy and the overall maximum was taken.
    pub is_candidate: bool,
}

/// Highest-scoring node passing candidacy, ties to the smaller id. Falls back
/// to the overall maximum when nobody qualifies.
pub fn argmax_candidate(scores: &ScoreMap, dataset: &Dataset, query: &Query) -> Result<Argmax> {
    if scores.is_empty() {
        return Err(Error::Domain("argmax of an empty score map".into()));
    }
    let best = |candidates_only: bool| {
        let mut best: Option<(&String, f64)> = None;
        for (id, &score) in &scores.scores {
            if candidates_only
                && !dataset
                    .users()
                    .get(id)
                    .is_some_and(|u| dataset.user_is_candidate(u, query))
            {
                continue;
            }
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((id, score));
            }
        }
        best
    };
    Ok(match best(true) {
        Some((id, score)) => Argmax {
            node: id.clone(),
            score,
            is_candidate: true,
        },
        None => {
            let (id, score) = best(false).expect("non-empty");
            Argmax {
                node: id.clone(),
                score,
                is_candidate: false,
            }
        }
    })
}

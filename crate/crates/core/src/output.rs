//! Rendering of recommendation runs, shared by the CLI and the HTTP service
//! so both emit the same bytes for the same run.

use std::fmt::Write as _;

use serde::Serialize;

use crate::model::Mode;
use crate::recommend::{Aggregation, Fallback, RecommendationRun, TimingReport};

#[derive(Serialize)]
struct RankedEntry<'a> {
    place: &'a str,
    name: &'a str,
    pos: usize,
    neg: usize,
}

#[derive(Serialize)]
struct RecommendationBody<'a> {
    query: &'a str,
    category: &'a str,
    city: &'a str,
    mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    user: Option<&'a str>,
    k: usize,
    method: &'a str,
    aggregation: Aggregation,
    seed: Option<u64>,
    experts: &'a [String],
    ranked: Vec<RankedEntry<'a>>,
    fallback: Fallback,
    n_candidates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<TimingReport>,
}

/// Keeps only the first `top` ranked places.
pub fn truncate(run: &mut RecommendationRun, top: Option<usize>) {
    if let Some(n) = top {
        run.ranked.truncate(n);
    }
}

/// Single-line JSON document for a run. Timings are wall-clock and only
/// included on request; without them the body is a pure function of the
/// dataset, parameters and seed.
pub fn recommendation_json(run: &RecommendationRun, include_timings: bool) -> String {
    let body = RecommendationBody {
        query: &run.query.text,
        category: &run.query.category,
        city: &run.query.city,
        mode: run.query.mode,
        user: run.query.user_id.as_deref(),
        k: run.query.k,
        method: run.method.as_str(),
        aggregation: run.aggregation,
        seed: run.seed,
        experts: &run.experts,
        ranked: run
            .ranked
            .iter()
            .map(|r| RankedEntry {
                place: &r.place_id,
                name: &r.name,
                pos: r.pos,
                neg: r.neg,
            })
            .collect(),
        fallback: run.fallback,
        n_candidates: run.n_candidates,
        timings: include_timings.then_some(run.timings),
    };
    serde_json::to_string(&body).expect("body serializes")
}

/// `('name',pos,neg)` tuples in rank order.
pub fn tuple_list(run: &RecommendationRun) -> String {
    let items: Vec<String> = run
        .ranked
        .iter()
        .map(|r| format!("('{}',{},{})", r.name.replace('\'', "\\'"), r.pos, r.neg))
        .collect();
    format!("[{}]", items.join(", "))
}

pub fn timing_line(t: &TimingReport) -> String {
    format!(
        "t_graph={:.6}s t_algo={:.6}s t_other={:.6}s t_total={:.6}s",
        t.t_graph, t.t_algo, t.t_other, t.t_total
    )
}

pub fn recommendation_table(run: &RecommendationRun) -> String {
    let q = &run.query;
    let mut out = String::new();
    write!(
        out,
        "query={} category={} city={} mode={} k={} method={}",
        q.text, q.category, q.city, q.mode, q.k, run.method
    )
    .unwrap();
    if let Some(user) = &q.user_id {
        write!(out, " user={user}").unwrap();
    }
    if let Some(seed) = run.seed {
        write!(out, " seed={seed} aggregation={}", run.aggregation.as_str()).unwrap();
    }
    out.push('\n');
    writeln!(out, "experts: {}", run.experts.join(", ")).unwrap();
    writeln!(out, "fallback: {}", run.fallback.as_str()).unwrap();
    writeln!(out, "{}", tuple_list(run)).unwrap();
    writeln!(out, "{}", timing_line(&run.timings)).unwrap();
    out
}

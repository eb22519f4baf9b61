//! Stage-timing benchmark across all methods.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::model::{Dataset, Query};
use crate::recommend::{recommend, Method, RecommendConfig, TimingReport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: String,
    pub timings: TimingReport,
    /// Wall-clock time of the whole `recommend` call, seconds.
    pub wall: f64,
    pub ranked: usize,
    /// Stage shares of `t_total`, percent.
    pub pct_graph: f64,
    pub pct_algo: f64,
    pub pct_other: f64,
}

pub fn bench(
    dataset: &Dataset,
    query: &Query,
    methods: &[Method],
    seed: u64,
    repetitions: usize,
) -> Result<Vec<BenchRow>> {
    let repetitions = repetitions.max(1);
    methods
        .iter()
        .map(|&method| {
            let mut timings = Vec::with_capacity(repetitions);
            let mut walls = 0.0;
            let mut ranked = 0;
            for run in 0..repetitions {
                let config = RecommendConfig {
                    run: run as u64,
                    ..RecommendConfig::seeded(seed)
                };
                let started = std::time::Instant::now();
                let result = recommend(dataset, query, method, &config)?;
                walls += started.elapsed().as_secs_f64();
                ranked = result.ranked.len();
                timings.push(result.timings);
            }
            let t = TimingReport::mean(&timings);
            let pct = |part: f64| if t.t_total > 0.0 { part / t.t_total * 100.0 } else { 0.0 };
            Ok(BenchRow {
                method: method.to_string(),
                wall: walls / repetitions as f64,
                ranked,
                pct_graph: pct(t.t_graph),
                pct_algo: pct(t.t_algo),
                pct_other: pct(t.t_other),
                timings: t,
            })
        })
        .collect()
}

pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<12} {:>10} {:>10} {:>10} {:>10} {:>8} {:>8} {:>8} {:>6}",
        "method", "t_graph", "t_algo", "t_other", "t_total", "%graph", "%algo", "%other", "places"
    )
    .unwrap();
    for r in rows {
        let t = r.timings;
        writeln!(
            out,
            "{:<12} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>8.2} {:>8.2} {:>8.2} {:>6}",
            r.method, t.t_graph, t.t_algo, t.t_other, t.t_total, r.pct_graph, r.pct_algo, r.pct_other, r.ranked
        )
        .unwrap();
    }
    let total = |name: &str| rows.iter().find(|r| r.method == name).map(|r| r.timings.t_total);
    if let (Some(rw), Some(lrw)) = (total("rw"), total("lrw")) {
        writeln!(out, "lrw - rw t_total difference: {:+.6}s", lrw - rw).unwrap();
    }
    out
}

//! Repeated-run evaluation of query lists against the gold standard.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{expected_r, gold_standard, mse, precision_at, r_score, RScore, DEFAULT_CUTOFFS, DEFAULT_REPETITIONS};
use crate::model::{Dataset, Mode};
use crate::recommend::{recommend, Aggregation, Method, QueryMap, RecommendConfig, TimingReport};
use crate::walk::DEFAULT_STAY_PROBABILITY;

/// One line of a query-list file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRow {
    pub query: String,
    pub city: String,
    pub mode: Mode,
    pub method: String,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user: Option<String>,
}

/// Reads a query list, rejecting unknown methods and `k < 3` with the line
/// number of the offending record.
pub fn read_query_list(path: &Path) -> Result<Vec<QueryRow>> {
    let contents = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_query_list(path, &contents)
}

pub fn parse_query_list(path: &Path, contents: &str) -> Result<Vec<QueryRow>> {
    let malformed = |line: usize, message: String| Error::Malformed {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rows = Vec::new();
    for (i, line) in contents.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: QueryRow = serde_json::from_str(line).map_err(|e| malformed(i + 1, e.to_string()))?;
        row.method
            .parse::<Method>()
            .map_err(|e| malformed(i + 1, e.to_string()))?;
        if row.k < 3 {
            return Err(malformed(
                i + 1,
                format!("k = {} is too short to evaluate; k must be at least 3", row.k),
            ));
        }
        if row.mode == Mode::Pa && row.user.is_none() {
            return Err(malformed(i + 1, "mode `pa` needs a `user`".into()));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub m: usize,
    pub x_values: Vec<usize>,
    pub master_seed: u64,
    pub stay_probability: f64,
    pub aggregation: Aggregation,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            m: DEFAULT_REPETITIONS,
            x_values: DEFAULT_CUTOFFS.to_vec(),
            master_seed: 0,
            stay_probability: DEFAULT_STAY_PROBABILITY,
            aggregation: Aggregation::Pool,
        }
    }
}

/// Scores of one query-list row over `m` repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub row: QueryRow,
    pub runs: Vec<RScore>,
    /// Runs with `r_max == 0`, left out of `e_r` and `mse`.
    pub degenerate: usize,
    pub e_r: Option<f64>,
    pub mse: Option<f64>,
    /// Mean precision over the runs, per cutoff.
    pub precision: BTreeMap<usize, f64>,
    pub timings: TimingReport,
}

impl EvalReport {
    pub fn normalized(&self) -> Vec<f64> {
        self.runs.iter().filter_map(RScore::normalized).collect()
    }
}

pub fn evaluate_row(
    dataset: &Dataset,
    queries: &QueryMap,
    row: &QueryRow,
    options: &EvalOptions,
) -> Result<EvalReport> {
    if options.m == 0 {
        return Err(Error::Domain("m must be at least 1".into()));
    }
    let method: Method = row.method.parse()?;
    let query = queries.query(&row.query, &row.city, row.mode, row.k, row.user.clone())?;
    let gold = gold_standard(dataset, &query);

    let mut runs = Vec::with_capacity(options.m);
    let mut timings = Vec::with_capacity(options.m);
    let mut precision: BTreeMap<usize, Vec<f64>> =
        options.x_values.iter().map(|&x| (x, Vec::with_capacity(options.m))).collect();
    for rep in 0..options.m {
        let config = RecommendConfig {
            stay_probability: options.stay_probability,
            seed: Some(options.master_seed),
            aggregation: options.aggregation,
            run: rep as u64,
        };
        let run = recommend(dataset, &query, method, &config)?;
        let score = if run.n_candidates == 0 {
            RScore { r: 0.0, r_max: 0.0 }
        } else {
            r_score(&run.ranked, &gold, row.k, run.n_candidates)?
        };
        runs.push(score);
        for (&x, values) in precision.iter_mut() {
            values.push(precision_at(&run.ranked, &gold, x)?);
        }
        timings.push(run.timings);
    }
    let precision = precision
        .into_iter()
        .map(|(x, values)| (x, expected_r(&values).unwrap_or(0.0)))
        .collect();

    let normalized: Vec<f64> = runs.iter().filter_map(RScore::normalized).collect();
    Ok(EvalReport {
        row: row.clone(),
        degenerate: runs.len() - normalized.len(),
        e_r: expected_r(&normalized),
        mse: if normalized.is_empty() { None } else { Some(mse(&normalized)?) },
        runs,
        precision,
        timings: TimingReport::mean(&timings),
    })
}

/// Evaluates every row; rows may run in parallel but the output keeps input
/// order.
pub fn evaluate(
    dataset: &Dataset,
    queries: &QueryMap,
    rows: &[QueryRow],
    options: &EvalOptions,
) -> Result<Vec<EvalReport>> {
    rows.par_iter()
        .map(|row| evaluate_row(dataset, queries, row, options))
        .collect()
}

#[derive(Serialize)]
struct PrecisionRecord {
    x: usize,
    p: f64,
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    query: &'a str,
    city: &'a str,
    mode: Mode,
    method: &'a str,
    k: usize,
    m: usize,
    degenerate: usize,
    r_scores: Vec<[f64; 2]>,
    e_r: Option<f64>,
    mse: Option<f64>,
    precision: Vec<PrecisionRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<TimingReport>,
}

/// One JSON object per report line. Timings are left out unless asked for, so
/// the output is a pure function of the inputs and seed.
pub fn reports_to_jsonl(reports: &[EvalReport], include_timings: bool) -> String {
    let mut out = String::new();
    for report in reports {
        let record = ReportRecord {
            query: &report.row.query,
            city: &report.row.city,
            mode: report.row.mode,
            method: &report.row.method,
            k: report.row.k,
            m: report.runs.len(),
            degenerate: report.degenerate,
            r_scores: report.runs.iter().map(|s| [s.r, s.r_max]).collect(),
            e_r: report.e_r,
            mse: report.mse,
            precision: report
                .precision
                .iter()
                .map(|(&x, &p)| PrecisionRecord { x, p })
                .collect(),
            timings: include_timings.then_some(report.timings),
        };
        out.push_str(&serde_json::to_string(&record).expect("report serializes"));
        out.push('\n');
    }
    out
}

fn cell(value: Option<f64>) -> String {
    value.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

pub fn reports_to_table(reports: &[EvalReport]) -> String {
    let cutoffs: Vec<usize> = reports
        .first()
        .map(|r| r.precision.keys().copied().collect())
        .unwrap_or_default();
    let mut header = vec![
        "query".to_string(),
        "city".into(),
        "mode".into(),
        "method".into(),
        "k".into(),
        "E_R".into(),
        "MSE".into(),
    ];
    header.extend(cutoffs.iter().map(|x| format!("p@{x}")));
    header.extend(["t_graph", "t_algo", "t_other", "t_total"].map(String::from));

    let mut rows = vec![header];
    for r in reports {
        let mut line = vec![
            r.row.query.clone(),
            r.row.city.clone(),
            r.row.mode.to_string(),
            r.row.method.clone(),
            r.row.k.to_string(),
            cell(r.e_r),
            cell(r.mse),
        ];
        line.extend(cutoffs.iter().map(|x| cell(r.precision.get(x).copied())));
        let t = r.timings;
        line.extend([t.t_graph, t.t_algo, t.t_other, t.t_total].map(|v| format!("{v:.6}")));
        rows.push(line);
    }

    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(v, w)| format!("{v:<w$}"))
            .collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
    }
    out
}

//! Evaluation metrics: gold standard, R-score with its likelihood and utility
//! terms, expected normalised score, MSE and precision@x.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::{Dataset, Query};
use crate::recommend::{rank, RankedPlace};

pub const DEFAULT_REPETITIONS: usize = 10;
pub const DEFAULT_CUTOFFS: [usize; 7] = [1, 3, 5, 10, 15, 20, 30];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    pub m: usize,
    pub x_values: Vec<usize>,
    pub k: usize,
}

impl EvalConfig {
    pub fn new(m: usize, x_values: Vec<usize>, k: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("m must be at least 1".into()));
        }
        if x_values.iter().any(|&x| x == 0) {
            return Err(Error::Domain("precision cutoffs must be at least 1".into()));
        }
        check_k(k)?;
        Ok(EvalConfig { m, x_values, k })
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        Err(Error::Domain(format!(
            "k = {k} leaves the half-life k/2 at or below 1; evaluation needs k >= 3"
        )))
    } else {
        Ok(())
    }
}

/// Every matching place with at least one review, in ranking order.
pub fn gold_standard(dataset: &Dataset, query: &Query) -> Vec<RankedPlace> {
    let places = dataset
        .matching_places(query)
        .into_iter()
        .filter(|p| dataset.reviews_by_place(p).next().is_some())
        .map(|p| RankedPlace::from_dataset(dataset, &p).expect("matching place exists"))
        .collect();
    rank(places).expect("distinct ids")
}

/// `2^(-(j - 1) / (k/2 - 1))` for the 1-based gold position `j`.
pub fn likelihood(j: usize, k: usize) -> Result<f64> {
    check_k(k)?;
    if j == 0 {
        return Err(Error::Domain("gold positions are 1-based".into()));
    }
    let half_life = k as f64 / 2.0;
    Ok((-((j - 1) as f64) / (half_life - 1.0)).exp2())
}

/// `-ln(k / n_candidates)`; negative once the walk is longer than the
/// candidate pool.
pub fn utility(n_candidates: usize, k: usize) -> Result<f64> {
    if n_candidates == 0 {
        return Err(Error::Domain("utility needs at least one candidate".into()));
    }
    Ok(-(k as f64 / n_candidates as f64).ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RScore {
    pub r: f64,
    pub r_max: f64,
}

impl RScore {
    /// `r / r_max`, or `None` for a degenerate run (`r_max == 0`).
    pub fn normalized(&self) -> Option<f64> {
        (self.r_max != 0.0).then(|| self.r / self.r_max)
    }
}

/// R-score of `recs` against `gold`, and the score of the ideal list of the
/// same length (the top gold places in gold order). Places missing from the
/// gold list weigh zero.
pub fn r_score(
    recs: &[RankedPlace],
    gold: &[RankedPlace],
    k: usize,
    n_candidates: usize,
) -> Result<RScore> {
    check_k(k)?;
    let u = utility(n_candidates, k)?;
    let mut r = 0.0;
    for rec in recs {
        if let Some(pos) = gold.iter().position(|g| g.place_id == rec.place_id) {
            r += likelihood(pos + 1, k)? * u;
        }
    }
    let mut r_max = 0.0;
    for j in 1..=recs.len().min(gold.len()) {
        r_max += likelihood(j, k)? * u;
    }
    Ok(RScore { r, r_max })
}

/// Mean of the normalised scores; `None` when every run was degenerate.
pub fn expected_r(normalized_scores: &[f64]) -> Option<f64> {
    // Offsetting by the first score makes the mean of equal scores exact.
    let (&first, rest) = normalized_scores.split_first()?;
    let offset: f64 = rest.iter().map(|s| s - first).sum();
    Some(first + offset / normalized_scores.len() as f64)
}

/// Mean squared deviation of the normalised scores from their mean.
pub fn mse(normalized_scores: &[f64]) -> Result<f64> {
    let mean = expected_r(normalized_scores)
        .ok_or_else(|| Error::Domain("mse of an empty score list".into()))?;
    Ok(normalized_scores
        .iter()
        .map(|s| (s - mean).powi(2))
        .sum::<f64>()
        / normalized_scores.len() as f64)
}

/// `|top-x recs ∩ top-x gold| / x`.
pub fn precision_at(recs: &[RankedPlace], gold: &[RankedPlace], x: usize) -> Result<f64> {
    if x == 0 {
        return Err(Error::Domain("precision cutoff must be at least 1".into()));
    }
    let top_gold: HashSet<&str> = gold.iter().take(x).map(|g| g.place_id.as_str()).collect();
    let hits = recs
        .iter()
        .take(x)
        .filter(|r| top_gold.contains(r.place_id.as_str()))
        .count();
    Ok(hits as f64 / x as f64)
}

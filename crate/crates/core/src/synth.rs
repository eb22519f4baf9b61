//! Deterministic synthetic datasets shaped like a city-level shopping review
//! corpus: skewed place popularity, sparse city-biased friendships.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::write_dataset;
use crate::model::{Dataset, Place, Review, Sentiment, User, DEFAULT_CATEGORIES};

pub const DEFAULT_CITIES: [&str; 5] = ["Jakarta", "Bandung", "Yogyakarta", "Palembang", "Bengkulu"];

/// Share of friendships drawn inside the user's own city.
const SAME_CITY_CONTACTS: f64 = 0.8;
/// Share of reviews written by residents of the place's city.
const LOCAL_REVIEWERS: f64 = 0.85;
/// Split of the non-positive reviews between negative and neutral.
const NEGATIVE_SHARE: f64 = 2.0 / 3.0;

const POSITIVE_TEXT: &[&str] = &[
    "great place, cheap and complete",
    "clean and comfortable",
    "nice shops, recommended",
    "good prices and friendly staff",
];
const NEGATIVE_TEXT: &[&str] = &[
    "crowded and dirty",
    "expensive and noisy",
    "bad service, rude staff",
    "worst parking, too crowded",
];
const NEUTRAL_TEXT: &[&str] = &["visited on the weekend", "went here with family", ""];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub n_users: usize,
    pub n_places: usize,
    pub n_reviews: usize,
    pub n_cities: usize,
    pub categories: Vec<String>,
    pub contact_degree_mean: f64,
    /// Exponent of the rank-based power law over place popularity.
    pub review_skew: f64,
    pub positive_ratio: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_users: 14_309,
            n_places: 176,
            n_reviews: 3_844,
            n_cities: 5,
            categories: DEFAULT_CATEGORIES.iter().map(|c| c.to_string()).collect(),
            contact_degree_mean: 4.0,
            review_skew: 1.0,
            positive_ratio: 0.75,
            seed: 7,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_users", self.n_users),
            ("n_places", self.n_places),
            ("n_reviews", self.n_reviews),
            ("n_cities", self.n_cities),
            ("categories", self.categories.len()),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, n)| *n == 0) {
            return Err(Error::Domain(format!("{name} must be at least 1")));
        }
        if !(0.0..=1.0).contains(&self.positive_ratio) {
            return Err(Error::Domain("positive_ratio must lie in [0, 1]".into()));
        }
        if !(self.contact_degree_mean >= 0.0 && self.review_skew >= 0.0) {
            return Err(Error::Domain(
                "contact_degree_mean and review_skew must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn cities(&self) -> Vec<String> {
        (0..self.n_cities)
            .map(|i| match DEFAULT_CITIES.get(i) {
                Some(name) => name.to_string(),
                None => format!("City {}", i + 1),
            })
            .collect()
    }
}

/// Review counts per popularity rank: a power law over ranks, apportioned to
/// sum exactly to `total` and non-increasing in rank.
pub fn popularity_counts(n_places: usize, total: usize, skew: f64) -> Vec<usize> {
    let weights: Vec<f64> = (1..=n_places).map(|r| (r as f64).powf(-skew)).collect();
    let sum: f64 = weights.iter().sum();
    let shares: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let mut remainder = total - counts.iter().sum::<usize>();
    let mut by_fraction: Vec<usize> = (0..n_places).collect();
    by_fraction.sort_by(|&a, &b| {
        let fa = shares[a] - shares[a].floor();
        let fb = shares[b] - shares[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in by_fraction.iter().cycle() {
        if remainder == 0 {
            break;
        }
        counts[i] += 1;
        remainder -= 1;
    }
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts
}

fn padded(prefix: char, i: usize, n: usize) -> String {
    let width = n.to_string().len();
    format!("{prefix}{:0width$}", i + 1)
}

/// Builds the dataset in memory.
pub fn generate_dataset(params: &SynthParams) -> Result<Dataset> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let cities = params.cities();

    let user_city: Vec<usize> = (0..params.n_users)
        .map(|_| rng.gen_range(0..cities.len()))
        .collect();
    let mut residents: Vec<Vec<usize>> = vec![Vec::new(); cities.len()];
    for (u, &c) in user_city.iter().enumerate() {
        residents[c].push(u);
    }

    let mut contacts: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); params.n_users];
    let n_edges = (params.n_users as f64 * params.contact_degree_mean / 2.0).round() as usize;
    let mut attempts = 0;
    let mut added = 0;
    while added < n_edges && params.n_users > 1 && attempts < n_edges * 20 {
        attempts += 1;
        let a = rng.gen_range(0..params.n_users);
        let local = &residents[user_city[a]];
        let b = if rng.gen_bool(SAME_CITY_CONTACTS) && local.len() > 1 {
            local[rng.gen_range(0..local.len())]
        } else {
            rng.gen_range(0..params.n_users)
        };
        if a != b && contacts[a].insert(b) {
            contacts[b].insert(a);
            added += 1;
        }
    }

    let users: Vec<User> = (0..params.n_users)
        .map(|u| {
            let id = padded('u', u, params.n_users);
            User::new(
                id.clone(),
                format!("User {}", &id[1..]),
                cities[user_city[u]].clone(),
                contacts[u].iter().map(|&c| padded('u', c, params.n_users)),
            )
        })
        .collect();

    let places: Vec<Place> = (0..params.n_places)
        .map(|p| {
            let city = &cities[p % cities.len()];
            let category = &params.categories[(p / cities.len()) % params.categories.len()];
            Place::new(
                padded('p', p, params.n_places),
                format!("{city} {category} {}", p + 1),
                city.clone(),
                category.clone(),
            )
        })
        .collect();

    let counts = popularity_counts(params.n_places, params.n_reviews, params.review_skew);
    let mut by_rank: Vec<usize> = (0..params.n_places).collect();
    by_rank.shuffle(&mut rng);

    let mut reviews = Vec::with_capacity(params.n_reviews);
    for (rank, &place) in by_rank.iter().enumerate() {
        let local = &residents[place % cities.len()];
        let mut reviewers = BTreeSet::new();
        for _ in 0..counts[rank] {
            let mut pick = || {
                if !local.is_empty() && rng.gen_bool(LOCAL_REVIEWERS) {
                    local[rng.gen_range(0..local.len())]
                } else {
                    rng.gen_range(0..params.n_users)
                }
            };
            // prefer distinct reviewers per place, but never loop forever
            let mut user = pick();
            for _ in 0..8 {
                if !reviewers.contains(&user) {
                    break;
                }
                user = pick();
            }
            reviewers.insert(user);

            let label = if rng.gen_bool(params.positive_ratio) {
                Sentiment::Positive
            } else if rng.gen_bool(NEGATIVE_SHARE) {
                Sentiment::Negative
            } else {
                Sentiment::Neutral
            };
            let pool = match label {
                Sentiment::Positive => POSITIVE_TEXT,
                Sentiment::Negative => NEGATIVE_TEXT,
                _ => NEUTRAL_TEXT,
            };
            let text = pool.choose(&mut rng).copied().unwrap_or_default();
            reviews.push(Review::new(
                padded('u', user, params.n_users),
                places[place].id.clone(),
                text,
                label,
            ));
        }
    }

    Ok(Dataset::with_vocabulary(users, places, reviews, &params.categories))
}

/// Generates and writes the dataset directory.
pub fn generate(params: &SynthParams, dir: &Path) -> Result<Dataset> {
    let dataset = generate_dataset(params)?;
    write_dataset(dir, &dataset)?;
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn popularity_is_monotone_and_exact() {
        for (n, total, skew) in [(176, 3844, 1.0), (3, 20, 0.5), (10, 3, 2.0), (5, 0, 1.0)] {
            let counts = popularity_counts(n, total, skew);
            assert_eq!(counts.len(), n);
            assert_eq!(counts.iter().sum::<usize>(), total);
            assert!(counts.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn tiny_dataset() {
        let params = SynthParams {
            n_users: 10,
            n_places: 3,
            n_reviews: 20,
            seed: 1,
            ..Default::default()
        };
        let d = generate_dataset(&params).unwrap();
        assert_eq!((d.users().len(), d.places().len(), d.reviews().len()), (10, 3, 20));
        assert_eq!(d, generate_dataset(&params).unwrap());
    }

    #[test]
    fn all_positive_means_no_negatives() {
        let params = SynthParams {
            n_users: 50,
            n_places: 8,
            n_reviews: 200,
            positive_ratio: 1.0,
            ..Default::default()
        };
        let d = generate_dataset(&params).unwrap();
        for id in d.places().keys() {
            assert_eq!(d.pos_neg_counts(id).unwrap().1, 0);
        }
    }

    #[test]
    fn bad_params_are_rejected() {
        let bad = SynthParams {
            n_places: 0,
            ..Default::default()
        };
        assert!(generate_dataset(&bad).is_err());
        let bad = SynthParams {
            positive_ratio: 1.5,
            ..Default::default()
        };
        assert!(generate_dataset(&bad).is_err());
    }
}

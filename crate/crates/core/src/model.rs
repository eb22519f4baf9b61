//! Domain types and the immutable dataset store.
//!
//! City and category comparisons go through [`normalize`]: trimmed and
//! lowercased, exact otherwise. Identifiers are opaque strings ordered
//! lexicographically, and every derived ordering in the crate falls back to
//! that order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Categories recognised out of the box.
pub const DEFAULT_CATEGORIES: [&str; 5] = [
    "shopping mall",
    "department store",
    "supermarket",
    "bookstore",
    "market",
];

/// Canonical form used for city and category matching.
pub fn normalize(s: &str) -> String {
    s.trim().to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sentiment {
    Positive,
    Negative,
    Neutral,
    /// A label outside the three-value domain. Only reachable through
    /// [`Dataset::from_parts`]; ingestion rejects it.
    Unrecognized(String),
}

impl Sentiment {
    pub fn as_str(&self) -> &str {
        match self {
            Sentiment::Positive => "positive",
            Sentiment::Negative => "negative",
            Sentiment::Neutral => "neutral",
            Sentiment::Unrecognized(s) => s,
        }
    }

    pub fn parse(s: &str) -> Sentiment {
        match s {
            "positive" => Sentiment::Positive,
            "negative" => Sentiment::Negative,
            "neutral" => Sentiment::Neutral,
            other => Sentiment::Unrecognized(other.to_string()),
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct User {
    pub id: String,
    pub name: String,
    /// Empty when the user has no known location.
    pub city: String,
    pub contacts: BTreeSet<String>,
    /// Normalised categories of every place the user reviewed. Filled in by
    /// [`Dataset::from_parts`]; whatever the caller puts here is discarded.
    pub categories: BTreeSet<String>,
}

impl User {
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        city: impl Into<String>,
        contacts: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        User {
            id: id.into(),
            name: name.into(),
            city: city.into(),
            contacts: contacts.into_iter().map(Into::into).collect(),
            categories: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub id: String,
    pub name: String,
    pub city: String,
    pub category: String,
}

impl Place {
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        city: impl Into<String>,
        category: impl Into<String>,
    ) -> Self {
        Place {
            id: id.into(),
            name: name.into(),
            city: city.into(),
            category: category.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Review {
    pub user_id: String,
    pub place_id: String,
    pub text: String,
    pub label: Sentiment,
}

impl Review {
    pub fn new(
        user_id: impl Into<String>,
        place_id: impl Into<String>,
        text: impl Into<String>,
        label: Sentiment,
    ) -> Self {
        Review {
            user_id: user_id.into(),
            place_id: place_id.into(),
            text: text.into(),
            label,
        }
    }
}

impl PartialOrd for Sentiment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sentiment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.as_str().cmp(other.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Global,
    /// Privacy-aware: search the requesting user's own contact network.
    Pa,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Global => "global",
            Mode::Pa => "pa",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(Mode::Global),
            "pa" => Ok(Mode::Pa),
            other => Err(Error::InvalidQuery(format!(
                "mode must be `global` or `pa`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub text: String,
    /// Normalised category the query text resolved to.
    pub category: String,
    pub city: String,
    pub mode: Mode,
    pub k: usize,
    pub user_id: Option<String>,
}

impl Query {
    pub fn new(
        text: impl Into<String>,
        category: &str,
        city: impl Into<String>,
        mode: Mode,
        k: usize,
        user_id: Option<String>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidQuery("k must be at least 1".into()));
        }
        if mode == Mode::Pa && user_id.is_none() {
            return Err(Error::InvalidQuery(
                "mode `pa` requires a requesting user".into(),
            ));
        }
        Ok(Query {
            text: text.into(),
            category: normalize(category),
            city: city.into(),
            mode,
            k,
            user_id,
        })
    }
}

/// Positive/negative/neutral review tallies of one place.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SentimentCounts {
    pub pos: usize,
    pub neg: usize,
    pub neu: usize,
}

impl SentimentCounts {
    pub fn total(&self) -> usize {
        self.pos + self.neg + self.neu
    }
}

/// Immutable store of users, places and reviews with derived indexes.
///
/// Reviews are kept in canonical order, so two datasets built from the same
/// records in any order compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    users: BTreeMap<String, User>,
    places: BTreeMap<String, Place>,
    reviews: Vec<Review>,
    vocabulary: BTreeSet<String>,
    reviews_by_user: BTreeMap<String, Vec<usize>>,
    reviews_by_place: BTreeMap<String, Vec<usize>>,
    counts: BTreeMap<String, SentimentCounts>,
}

impl Dataset {
    /// Builds the store and its indexes with the default category vocabulary.
    ///
    /// Contacts are symmetrised (a listing b makes b list a, when b exists).
    /// No validation happens here; see [`crate::ingest::validate`].
    pub fn from_parts(users: Vec<User>, places: Vec<Place>, reviews: Vec<Review>) -> Self {
        Self::with_vocabulary(users, places, reviews, DEFAULT_CATEGORIES)
    }

    pub fn with_vocabulary(
        users: Vec<User>,
        places: Vec<Place>,
        mut reviews: Vec<Review>,
        vocabulary: impl IntoIterator<Item = impl AsRef<str>>,
    ) -> Self {
        let mut users: BTreeMap<String, User> = users
            .into_iter()
            .map(|mut u| {
                u.categories.clear();
                (u.id.clone(), u)
            })
            .collect();
        let places: BTreeMap<String, Place> =
            places.into_iter().map(|p| (p.id.clone(), p)).collect();
        reviews.sort();

        let mut reverse = Vec::new();
        for user in users.values() {
            for contact in &user.contacts {
                if contact != &user.id && users.contains_key(contact) {
                    reverse.push((contact.clone(), user.id.clone()));
                }
            }
        }
        for (owner, contact) in reverse {
            if let Some(u) = users.get_mut(&owner) {
                u.contacts.insert(contact);
            }
        }

        let mut reviews_by_user: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut reviews_by_place: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut counts: BTreeMap<String, SentimentCounts> =
            places.keys().map(|id| (id.clone(), SentimentCounts::default())).collect();
        for (i, review) in reviews.iter().enumerate() {
            reviews_by_user
                .entry(review.user_id.clone())
                .or_default()
                .push(i);
            reviews_by_place
                .entry(review.place_id.clone())
                .or_default()
                .push(i);
            if let Some(c) = counts.get_mut(&review.place_id) {
                match review.label {
                    Sentiment::Positive => c.pos += 1,
                    Sentiment::Negative => c.neg += 1,
                    Sentiment::Neutral => c.neu += 1,
                    Sentiment::Unrecognized(_) => {}
                }
            }
            if let (Some(user), Some(place)) =
                (users.get_mut(&review.user_id), places.get(&review.place_id))
            {
                user.categories.insert(normalize(&place.category));
            }
        }

        Dataset {
            users,
            places,
            reviews,
            vocabulary: vocabulary
                .into_iter()
                .map(|c| normalize(c.as_ref()))
                .collect(),
            reviews_by_user,
            reviews_by_place,
            counts,
        }
    }

    pub fn users(&self) -> &BTreeMap<String, User> {
        &self.users
    }

    pub fn places(&self) -> &BTreeMap<String, Place> {
        &self.places
    }

    pub fn reviews(&self) -> &[Review] {
        &self.reviews
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn user(&self, id: &str) -> Result<&User> {
        self.users.get(id).ok_or_else(|| Error::not_found("user", id))
    }

    pub fn place(&self, id: &str) -> Result<&Place> {
        self.places.get(id).ok_or_else(|| Error::not_found("place", id))
    }

    pub fn reviews_by_user(&self, user_id: &str) -> impl Iterator<Item = &Review> + '_ {
        self.reviews_by_user
            .get(user_id)
            .into_iter()
            .flatten()
            .map(move |&i| &self.reviews[i])
    }

    pub fn reviews_by_place(&self, place_id: &str) -> impl Iterator<Item = &Review> + '_ {
        self.reviews_by_place
            .get(place_id)
            .into_iter()
            .flatten()
            .map(move |&i| &self.reviews[i])
    }

    pub fn counts(&self, place_id: &str) -> Result<SentimentCounts> {
        self.counts
            .get(place_id)
            .copied()
            .ok_or_else(|| Error::not_found("place", place_id))
    }

    /// `(positive, negative)` review counts; neutral reviews are in neither.
    pub fn pos_neg_counts(&self, place_id: &str) -> Result<(usize, usize)> {
        self.counts(place_id).map(|c| (c.pos, c.neg))
    }

    /// Local authority (same city as the query) and topic authority (at least
    /// one review in the query category).
    pub fn is_candidate(&self, user_id: &str, query: &Query) -> Result<bool> {
        let user = self.user(user_id)?;
        Ok(self.user_is_candidate(user, query))
    }

    pub(crate) fn user_is_candidate(&self, user: &User, query: &Query) -> bool {
        let city = normalize(&user.city);
        !city.is_empty()
            && city == normalize(&query.city)
            && user.categories.contains(&query.category)
    }

    /// Places in the query city and category, ascending by id.
    pub fn matching_places(&self, query: &Query) -> Vec<String> {
        let city = normalize(&query.city);
        self.places
            .values()
            .filter(|p| normalize(&p.city) == city && normalize(&p.category) == query.category)
            .map(|p| p.id.clone())
            .collect()
    }
}

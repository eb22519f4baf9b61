//! Dataset directory loading, lexicon fallback labelling and validation.
//!
//! A dataset directory holds three line-delimited JSON files plus an optional
//! lexicon:
//!
//! ```text
//! users.jsonl    {"id": str, "name": str, "city": str, "contacts": [str, ...]}
//! places.jsonl   {"id": str, "name": str, "city": str, "category": str}
//! reviews.jsonl  {"user_id": str, "place_id": str, "text": str, "label": "positive"|"negative"|"neutral"}
//! lexicon.txt    "+term" / "-term", one per line (optional)
//! categories.txt one category per line, added to the default vocabulary (optional)
//! ```
//!
//! `label` is optional; unlabelled reviews go through [`label_review`].

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{normalize, Dataset, Place, Review, Sentiment, User, DEFAULT_CATEGORIES};

pub const USERS_FILE: &str = "users.jsonl";
pub const PLACES_FILE: &str = "places.jsonl";
pub const REVIEWS_FILE: &str = "reviews.jsonl";
pub const LEXICON_FILE: &str = "lexicon.txt";
pub const CATEGORIES_FILE: &str = "categories.txt";

const DEFAULT_POSITIVE: &[&str] = &[
    "affordable", "best", "cheap", "clean", "comfortable", "complete", "cozy", "friendly",
    "good", "great", "inexpensive", "love", "nice", "recommended", "spacious",
];
const DEFAULT_NEGATIVE: &[&str] = &[
    "bad", "closed", "crowded", "dirty", "disappointing", "expensive", "hate", "noisy",
    "poor", "rude", "slow", "small", "worst",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::new(DEFAULT_POSITIVE.iter().copied(), DEFAULT_NEGATIVE.iter().copied())
            .expect("built-in lexicon is disjoint")
    }
}

impl Lexicon {
    pub fn new(
        positive: impl IntoIterator<Item = impl AsRef<str>>,
        negative: impl IntoIterator<Item = impl AsRef<str>>,
    ) -> Result<Self> {
        let positive: BTreeSet<String> = positive
            .into_iter()
            .map(|t| t.as_ref().to_lowercase())
            .collect();
        let negative: BTreeSet<String> = negative
            .into_iter()
            .map(|t| t.as_ref().to_lowercase())
            .collect();
        if let Some(shared) = positive.intersection(&negative).next() {
            return Err(Error::Domain(format!(
                "lexicon term `{shared}` is both positive and negative"
            )));
        }
        Ok(Lexicon { positive, negative })
    }

    pub fn positive_terms(&self) -> &BTreeSet<String> {
        &self.positive
    }

    pub fn negative_terms(&self) -> &BTreeSet<String> {
        &self.negative
    }

    /// Parses `+term` / `-term` lines. Blank lines and `#` comments are skipped.
    pub fn parse(path: &Path, contents: &str) -> Result<Self> {
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for (i, line) in contents.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (sign, term) = line.split_at(1);
            let term = term.trim();
            if term.is_empty() {
                return Err(malformed(path, i + 1, "empty lexicon term"));
            }
            match sign {
                "+" => positive.push(term.to_string()),
                "-" => negative.push(term.to_string()),
                _ => return Err(malformed(path, i + 1, "lexicon lines start with `+` or `-`")),
            }
        }
        Lexicon::new(positive, negative)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let contents = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Lexicon::parse(path, &contents)
    }
}

/// Lexicon fallback classifier: tokens are maximal runs of letters,
/// lowercased; more positive hits than negative is positive, fewer is
/// negative, a tie (including no hits) is neutral.
pub fn label_review(text: &str, lexicon: &Lexicon) -> Sentiment {
    let (mut pos, mut neg) = (0usize, 0usize);
    for token in text.split(|c: char| !c.is_alphabetic()).filter(|t| !t.is_empty()) {
        let token = token.to_lowercase();
        if lexicon.positive.contains(&token) {
            pos += 1;
        } else if lexicon.negative.contains(&token) {
            neg += 1;
        }
    }
    match pos.cmp(&neg) {
        std::cmp::Ordering::Greater => Sentiment::Positive,
        std::cmp::Ordering::Less => Sentiment::Negative,
        std::cmp::Ordering::Equal => Sentiment::Neutral,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    DuplicateId,
    SelfContact,
    DanglingContact,
    AsymmetricContact,
    DanglingUser,
    DanglingPlace,
    InvalidLabel,
    EmptyCity,
    UnknownCategory,
    IndexMismatch,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::DuplicateId => "duplicate-id",
            Rule::SelfContact => "self-contact",
            Rule::DanglingContact => "dangling-contact",
            Rule::AsymmetricContact => "asymmetric-contact",
            Rule::DanglingUser => "dangling-user",
            Rule::DanglingPlace => "dangling-place",
            Rule::InvalidLabel => "invalid-label",
            Rule::EmptyCity => "empty-city",
            Rule::UnknownCategory => "unknown-category",
            Rule::IndexMismatch => "index-mismatch",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub locator: String,
    pub rule: Rule,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    fn push(&mut self, locator: impl Into<String>, rule: Rule, message: impl Into<String>) {
        self.violations.push(Violation {
            locator: locator.into(),
            rule,
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  {}: [{}] {}", v.locator, v.rule, v.message)?;
        }
        Ok(())
    }
}

/// Checks every model invariant and reports all violations.
pub fn validate(dataset: &Dataset) -> ValidationReport {
    let mut report = ValidationReport::default();
    let users = dataset.users();
    let places = dataset.places();

    for user in users.values() {
        let loc = format!("user `{}`", user.id);
        for contact in &user.contacts {
            if contact == &user.id {
                report.push(&loc, Rule::SelfContact, "contacts include the user's own id");
            } else if let Some(other) = users.get(contact) {
                if !other.contacts.contains(&user.id) {
                    report.push(
                        &loc,
                        Rule::AsymmetricContact,
                        format!("`{contact}` does not list `{}` back", user.id),
                    );
                }
            } else {
                report.push(&loc, Rule::DanglingContact, format!("unknown contact `{contact}`"));
            }
        }
    }

    for place in places.values() {
        let loc = format!("place `{}`", place.id);
        if place.city.trim().is_empty() {
            report.push(&loc, Rule::EmptyCity, "place city is empty");
        }
        if !dataset.vocabulary().contains(&normalize(&place.category)) {
            report.push(
                &loc,
                Rule::UnknownCategory,
                format!("category `{}` is not in the vocabulary", place.category),
            );
        }
        let counts = dataset.counts(&place.id).unwrap_or_default();
        let listed = dataset.reviews_by_place(&place.id).count();
        let labelled = dataset
            .reviews_by_place(&place.id)
            .filter(|r| !matches!(r.label, Sentiment::Unrecognized(_)))
            .count();
        if counts.total() != labelled {
            report.push(
                &loc,
                Rule::IndexMismatch,
                format!("sentiment counts sum to {} but {listed} reviews are indexed", counts.total()),
            );
        }
    }

    for (i, review) in dataset.reviews().iter().enumerate() {
        let loc = format!("review #{i} ({} -> {})", review.user_id, review.place_id);
        if !users.contains_key(&review.user_id) {
            report.push(&loc, Rule::DanglingUser, format!("unknown user `{}`", review.user_id));
        }
        if !places.contains_key(&review.place_id) {
            report.push(&loc, Rule::DanglingPlace, format!("unknown place `{}`", review.place_id));
        }
        if let Sentiment::Unrecognized(label) = &review.label {
            report.push(
                &loc,
                Rule::InvalidLabel,
                format!("label `{label}` is not one of positive, negative, neutral"),
            );
        }
    }

    report
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct UserRecord {
    pub id: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub city: String,
    #[serde(default)]
    pub contacts: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct PlaceRecord {
    pub id: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub city: String,
    pub category: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct ReviewRecord {
    pub user_id: String,
    pub place_id: String,
    #[serde(default)]
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn malformed(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Non-blank lines of a JSONL file with their 1-based line numbers, parsed.
fn read_records<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let contents = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    contents
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map(|r| (i + 1, r))
                .map_err(|e| malformed(path, i + 1, e.to_string()))
        })
        .collect()
}

/// Loads a dataset directory, using `lexicon.txt` from the directory (or the
/// built-in lexicon) for unlabelled reviews.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let lexicon_path = dir.join(LEXICON_FILE);
    let lexicon = if lexicon_path.exists() {
        Lexicon::from_file(&lexicon_path)?
    } else {
        Lexicon::default()
    };
    load_dataset_with_lexicon(dir, &lexicon)
}

pub fn load_dataset_with_lexicon(dir: &Path, lexicon: &Lexicon) -> Result<Dataset> {
    let users_path = dir.join(USERS_FILE);
    let places_path = dir.join(PLACES_FILE);
    let reviews_path = dir.join(REVIEWS_FILE);
    let user_records: Vec<(usize, UserRecord)> = read_records(&users_path)?;
    let place_records: Vec<(usize, PlaceRecord)> = read_records(&places_path)?;
    let review_records: Vec<(usize, ReviewRecord)> = read_records(&reviews_path)?;

    // Problems only visible with line numbers are reported here; the rest is
    // left to `validate` on the assembled dataset.
    let mut report = ValidationReport::default();
    let mut user_ids = HashSet::new();
    for (line, u) in &user_records {
        if !user_ids.insert(u.id.as_str()) {
            report.push(
                format!("{USERS_FILE}:{line}"),
                Rule::DuplicateId,
                format!("user id `{}` appears more than once", u.id),
            );
        }
    }
    let mut place_ids = HashSet::new();
    for (line, p) in &place_records {
        if !place_ids.insert(p.id.as_str()) {
            report.push(
                format!("{PLACES_FILE}:{line}"),
                Rule::DuplicateId,
                format!("place id `{}` appears more than once", p.id),
            );
        }
    }
    for (line, r) in &review_records {
        let loc = format!("{REVIEWS_FILE}:{line}");
        if !user_ids.contains(r.user_id.as_str()) {
            report.push(&loc, Rule::DanglingUser, format!("unknown user `{}`", r.user_id));
        }
        if !place_ids.contains(r.place_id.as_str()) {
            report.push(&loc, Rule::DanglingPlace, format!("unknown place `{}`", r.place_id));
        }
        if let Some(Sentiment::Unrecognized(label)) = r.label.as_deref().map(Sentiment::parse) {
            report.push(
                &loc,
                Rule::InvalidLabel,
                format!("label `{label}` is not one of positive, negative, neutral"),
            );
        }
    }
    if !report.is_empty() {
        return Err(Error::Invalid(report));
    }

    let users = user_records
        .into_iter()
        .map(|(_, u)| User::new(u.id, u.name, u.city, u.contacts))
        .collect();
    let places = place_records
        .into_iter()
        .map(|(_, p)| Place::new(p.id, p.name, p.city, p.category))
        .collect();
    let reviews = review_records
        .into_iter()
        .map(|(_, r)| {
            let label = match r.label.as_deref() {
                Some(l) => Sentiment::parse(l),
                None => label_review(&r.text, lexicon),
            };
            Review::new(r.user_id, r.place_id, r.text, label)
        })
        .collect();
    let mut vocabulary: BTreeSet<String> =
        DEFAULT_CATEGORIES.iter().map(|c| c.to_string()).collect();
    let categories_path = dir.join(CATEGORIES_FILE);
    if categories_path.exists() {
        let contents =
            fs::read_to_string(&categories_path).map_err(|e| Error::io(&categories_path, e))?;
        vocabulary.extend(
            contents
                .lines()
                .map(normalize)
                .filter(|c| !c.is_empty()),
        );
    }
    let dataset = Dataset::with_vocabulary(users, places, reviews, vocabulary);
    let report = validate(&dataset);
    if report.is_empty() {
        Ok(dataset)
    } else {
        Err(Error::Invalid(report))
    }
}

/// Writes `dataset` in the directory format, records sorted by id, labels
/// always present.
pub fn write_dataset(dir: &Path, dataset: &Dataset) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_jsonl(
        &dir.join(USERS_FILE),
        dataset.users().values().map(|u| UserRecord {
            id: u.id.clone(),
            name: u.name.clone(),
            city: u.city.clone(),
            contacts: u.contacts.iter().cloned().collect(),
        }),
    )?;
    write_jsonl(
        &dir.join(PLACES_FILE),
        dataset.places().values().map(|p| PlaceRecord {
            id: p.id.clone(),
            name: p.name.clone(),
            city: p.city.clone(),
            category: p.category.clone(),
        }),
    )?;
    write_jsonl(
        &dir.join(REVIEWS_FILE),
        dataset.reviews().iter().map(|r| ReviewRecord {
            user_id: r.user_id.clone(),
            place_id: r.place_id.clone(),
            text: r.text.clone(),
            label: Some(r.label.to_string()),
        }),
    )?;
    let extra: Vec<&String> = dataset
        .vocabulary()
        .iter()
        .filter(|c| !DEFAULT_CATEGORIES.contains(&c.as_str()))
        .collect();
    if !extra.is_empty() {
        let path = dir.join(CATEGORIES_FILE);
        let body: String = extra.iter().map(|c| format!("{c}\n")).collect();
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn write_jsonl<T: Serialize>(path: &Path, records: impl Iterator<Item = T>) -> Result<()> {
    let mut buf = Vec::new();
    for record in records {
        serde_json::to_writer(&mut buf, &record).expect("records serialize");
        buf.push(b'\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&buf).map_err(|e| Error::io(path, e))
}

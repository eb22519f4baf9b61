#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use localexpert::ingest::load_dataset;
use localexpert::model::DEFAULT_CATEGORIES;
use localexpert::{Dataset, Mode, Place, Query, QueryMap, Review, Sentiment, User};
use proptest::prelude::*;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/bandung")
}

pub fn fixture() -> Dataset {
    load_dataset(&fixture_dir()).expect("fixture loads")
}

pub fn mall_query(k: usize) -> Query {
    QueryMap::default()
        .query("mall", "Bandung", Mode::Global, k, None)
        .unwrap()
}

pub const CITIES: [&str; 3] = ["Bandung", "Jakarta", ""];

fn sentiment(i: u8) -> Sentiment {
    match i % 3 {
        0 => Sentiment::Positive,
        1 => Sentiment::Negative,
        _ => Sentiment::Neutral,
    }
}

prop_compose! {
    pub fn arb_dataset()(
        n_users in 1usize..8,
        n_places in 1usize..6,
    )(
        user_cities in prop::collection::vec(0usize..3, n_users),
        contacts in prop::collection::vec((0..n_users, 0..n_users), 0..12),
        places in prop::collection::vec((0usize..2, 0usize..DEFAULT_CATEGORIES.len()), n_places),
        reviews in prop::collection::vec((0..n_users, 0..n_places, any::<u8>()), 0..30),
    ) -> Dataset {
        let users = user_cities
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let friends: Vec<String> = contacts
                    .iter()
                    .filter(|&&(a, b)| a == i && a != b)
                    .map(|&(_, b)| format!("u{b}"))
                    .collect();
                User::new(format!("u{i}"), format!("User {i}"), CITIES[c], friends)
            })
            .collect();
        let places = places
            .iter()
            .enumerate()
            .map(|(i, &(c, cat))| Place::new(format!("p{i}"), format!("Place {i}"), CITIES[c], DEFAULT_CATEGORIES[cat]))
            .collect();
        // One review per (user, place) pair keeps records distinct.
        let mut seen = BTreeSet::new();
        let reviews = reviews
            .iter()
            .filter(|&&(u, p, _)| seen.insert((u, p)))
            .map(|&(u, p, s)| Review::new(format!("u{u}"), format!("p{p}"), "", sentiment(s)))
            .collect();
        Dataset::from_parts(users, places, reviews)
    }
}

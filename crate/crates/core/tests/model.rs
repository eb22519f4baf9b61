mod common;

use std::collections::BTreeSet;

use common::{arb_dataset, CITIES};
use localexpert::model::DEFAULT_CATEGORIES;
use localexpert::{Mode, Query};
use proptest::prelude::*;

proptest! {
    #[test]
    fn categories_are_the_reviewed_categories(ds in arb_dataset()) {
        for user in ds.users().values() {
            let expected: BTreeSet<String> = ds
                .reviews_by_user(&user.id)
                .map(|r| ds.place(&r.place_id).unwrap().category.clone())
                .collect();
            prop_assert_eq!(&user.categories, &expected);
        }
    }

    #[test]
    fn counts_sum_to_review_totals(ds in arb_dataset()) {
        for place in ds.places().keys() {
            let c = ds.counts(place).unwrap();
            let (pos, neg) = ds.pos_neg_counts(place).unwrap();
            prop_assert_eq!((pos, neg), (c.pos, c.neg));
            prop_assert_eq!(c.pos + c.neg + c.neu, ds.reviews_by_place(place).count());
        }
    }

    #[test]
    fn contacts_are_symmetric_and_loop_free(ds in arb_dataset()) {
        for user in ds.users().values() {
            prop_assert!(!user.contacts.contains(&user.id));
            for friend in &user.contacts {
                prop_assert!(ds.user(friend).unwrap().contacts.contains(&user.id));
            }
        }
    }

    #[test]
    fn matching_places_are_sorted_and_match(ds in arb_dataset(), cat in 0usize..5, city in 0usize..2) {
        let query = Query::new("q", DEFAULT_CATEGORIES[cat], CITIES[city], Mode::Global, 5, None).unwrap();
        let ids = ds.matching_places(&query);
        prop_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        let expected: Vec<String> = ds
            .places()
            .values()
            .filter(|p| p.city == CITIES[city] && p.category == DEFAULT_CATEGORIES[cat])
            .map(|p| p.id.clone())
            .collect();
        prop_assert_eq!(ids, expected);
    }

    #[test]
    fn candidacy_is_local_and_topical(ds in arb_dataset(), cat in 0usize..5) {
        let query = Query::new("q", DEFAULT_CATEGORIES[cat], "Bandung", Mode::Global, 5, None).unwrap();
        for user in ds.users().values() {
            let expected = user.city == "Bandung" && user.categories.contains(DEFAULT_CATEGORIES[cat]);
            prop_assert_eq!(ds.is_candidate(&user.id, &query).unwrap(), expected);
        }
    }
}

#[test]
fn fixture_counts_and_candidacy() {
    let ds = common::fixture();
    assert_eq!(ds.pos_neg_counts("bdg-setiabudhi").unwrap(), (29, 1));
    assert_eq!(ds.pos_neg_counts("bdg-lottemart").unwrap(), (19, 7));
    let query = common::mall_query(5);
    // 16 Bandung mall-category places; the Jakarta malls and the bookstore are left out.
    let matching = ds.matching_places(&query);
    assert_eq!(matching.len(), 16);
    assert!(matching.iter().all(|id| id.starts_with("bdg-") && id != "bdg-books"));
    assert!(!ds.is_candidate("j2", &query).unwrap());
    assert!(!ds.is_candidate("loner", &query).unwrap());
    assert!(ds.is_candidate("u01", &query).unwrap());
}

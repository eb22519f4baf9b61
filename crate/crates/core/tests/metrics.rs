use localexpert::metrics::{expected_r, likelihood, mse, precision_at, r_score, utility};
use localexpert::recommend::RankedPlace;
use proptest::prelude::*;

fn places(ids: &[usize]) -> Vec<RankedPlace> {
    ids.iter()
        .map(|i| RankedPlace {
            place_id: format!("p{i}"),
            name: String::new(),
            pos: 1,
            neg: 0,
        })
        .collect()
}

fn arb_lists() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (
        Just((0..12).collect::<Vec<usize>>()).prop_shuffle(),
        0usize..12,
        Just((0..12).collect::<Vec<usize>>()).prop_shuffle(),
        0usize..12,
    )
        .prop_map(|(gold, g, recs, r)| (gold[..g].to_vec(), recs[..r].to_vec()))
}

#[test]
fn hand_values() {
    assert!((likelihood(4, 5).unwrap() - 0.25).abs() < 1e-12);
    assert!((utility(10, 5).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
    assert!((mse(&[1.0, 0.0]).unwrap() - 0.25).abs() < 1e-12);
    assert!((mse(&[0.9, 0.7, 0.8]).unwrap() - 0.006_666_666_666_7).abs() < 1e-12);
}

proptest! {
    #[test]
    fn likelihood_decreases_from_one(k in 3usize..40, j in 1usize..50) {
        prop_assert_eq!(likelihood(1, k).unwrap(), 1.0);
        prop_assert!(likelihood(j + 1, k).unwrap() < likelihood(j, k).unwrap());
    }

    #[test]
    fn normalized_scores_stay_in_unit_interval((gold, recs) in arb_lists(), k in 3usize..30, n in 1usize..40) {
        let s = r_score(&places(&recs), &places(&gold), k, n).unwrap();
        if n >= k {
            prop_assert!(0.0 <= s.r && s.r <= s.r_max + 1e-12);
        } else {
            prop_assert!(s.r_max - 1e-12 <= s.r && s.r <= 0.0);
        }
        if let Some(v) = s.normalized() {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn gold_recommendations_are_perfect(gold in Just((0..10).collect::<Vec<usize>>()).prop_shuffle(), x in 1usize..12, k in 3usize..20) {
        let g = places(&gold);
        prop_assert_eq!(precision_at(&g, &g, x).unwrap(), gold.len().min(x) as f64 / x as f64);
        let s = r_score(&g, &g, k, 100).unwrap();
        prop_assert_eq!(s.normalized(), Some(1.0));
    }

    #[test]
    fn precision_is_a_fraction((gold, recs) in arb_lists(), x in 1usize..15) {
        let p = precision_at(&places(&recs), &places(&gold), x).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let hits = p * x as f64;
        prop_assert!((hits - hits.round()).abs() < 1e-9);
    }

    #[test]
    fn mse_is_zero_only_for_equal_scores(scores in prop::collection::vec(0.0f64..=1.0, 1..12)) {
        let m = mse(&scores).unwrap();
        prop_assert!(m >= 0.0);
        let equal = scores.iter().all(|&s| s == scores[0]);
        prop_assert_eq!(m == 0.0, equal);
        let mean = expected_r(&scores).unwrap();
        prop_assert!((0.0..=1.0).contains(&mean));
    }
}

use credibility::corpus::{TokenSeq, VocabConfig, Vocabulary};
use credibility::features::{
    burstiness, consistency_features, js_divergence, language_features, names, rating_to_distribution, BurstMode,
    ConsistencyInputs,
};
use credibility::jst::{ItemFacetProfile, ReviewFacetProfile};
use proptest::prelude::*;

fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.001f64..1.0], len)
        .prop_filter("needs mass", |v| v.iter().sum::<f64>() > 0.0)
        .prop_map(|v| {
            let total: f64 = v.iter().sum();
            v.into_iter().map(|x| x / total).collect()
        })
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..12).prop_flat_map(|n| (distribution(n), distribution(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn divergence_is_symmetric_and_bounded((p, q) in pair()) {
        let pq = js_divergence(&p, &q).unwrap();
        let qp = js_divergence(&q, &p).unwrap();
        prop_assert_eq!(pq, qp);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&pq), "JSD {} out of bounds", pq);
        prop_assert_eq!(js_divergence(&p, &p).unwrap(), 0.0);
        let gap = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if gap > 1e-6 {
            prop_assert!(pq > 0.0);
        }
    }
}

proptest! {
    #[test]
    fn burstiness_pairs_sum_to_one(a in -1e4f64..1e4, b in -1e4f64..1e4) {
        let days = [a, b];
        let total = burstiness(a, &days, BurstMode::Signed) + burstiness(b, &days, BurstMode::Signed);
        prop_assert_eq!(total, 1.0);
    }

    #[test]
    fn item_burstiness_totals_half_the_pairs(days in prop::collection::vec(-30.0f64..30.0, 1..40)) {
        let n = days.len() as f64;
        let total: f64 = days.iter().map(|&t| burstiness(t, &days, BurstMode::Signed)).sum();
        prop_assert!((total - n * (n - 1.0) / 2.0).abs() < 1e-9 * n * n);
    }

    #[test]
    fn consistency_block_has_expected_shape(
        (k, l) in (1usize..25, 1usize..4),
        burst in 0.0f64..10.0,
        divergence in any::<bool>(),
    ) {
        let cells = vec![1.0 / (k * l) as f64; k * l];
        let profile = ReviewFacetProfile {
            k,
            l,
            phi_prime: cells.clone(),
            pi_prime: vec![1.0 / l as f64; l],
            raw_phi_prime: cells.clone(),
            raw_pi_prime: vec![1.0; l],
            degenerate: false,
        };
        let item = ItemFacetProfile { k, l, phi_item: cells, n_reviews: 1 };
        let stated = vec![1.0 / l as f64; l];
        let f = consistency_features(ConsistencyInputs {
            profile: &profile,
            item_profile: &item,
            stated_rating: &stated,
            burstiness: burst,
            item_divergence: divergence,
        })
        .unwrap();
        prop_assert_eq!(f.len(), 2 + k * l + 2 * l);
        prop_assert_eq!(f.names().to_vec(), names::consistency(k, l));
        prop_assert_eq!(f.values()[0], burst);
        prop_assert_eq!(f.values()[1], 0.0);
    }

    #[test]
    fn presence_ignores_repetition(reps in 1usize..6, extra in 0usize..5) {
        let mut tokens = vec!["clean".to_string(); reps];
        tokens.extend(std::iter::repeat_n("room".to_string(), extra));
        let doc = TokenSeq { raw_length: tokens.len() + 2, tokens };
        let vocab = Vocabulary::build(std::slice::from_ref(&doc), VocabConfig { min_df: 1, max_vocab: 100 }).unwrap();
        let f = language_features(&doc, &vocab);
        let weight = 1.0 / doc.raw_length as f64;
        prop_assert_eq!(f.get("lang:clean"), Some(weight));
        prop_assert!(f.values().iter().all(|&v| v == weight));
    }
}

#[test]
fn rating_distribution_is_monotone() {
    for max in 2..=10u8 {
        let mut previous = -1.0;
        for r in 1..=max {
            let d = rating_to_distribution(r, max, 2).unwrap();
            assert!(d[0] > previous);
            assert_eq!(d[0] + d[1], 1.0);
            previous = d[0];
        }
        assert_eq!(previous, 1.0);
    }
}

#[test]
fn divergence_of_disjoint_supports_is_one() {
    assert_eq!(js_divergence(&[1.0, 0.0, 0.0], &[0.0, 0.5, 0.5]).unwrap(), 1.0);
}

use credibility::corpus::Label;
use credibility::features::FeatureVector;
use credibility::learn::{
    solve, train_csvm, train_rank, LinearModel, ModelKind, SolverParams, SparseRow, TrainConfig, TrainingSummary,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn vector(values: &[f64]) -> FeatureVector {
    FeatureVector::from_pairs(values.iter().enumerate().map(|(i, &v)| (format!("x{i}"), v))).unwrap()
}

fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Two classes pushed apart along the first coordinate.
fn separable(n: usize, seed: u64) -> Vec<(FeatureVector, Label)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Credible } else { Label::NonCredible };
            let mut x = gaussian(&mut rng, 3);
            x[0] = label.sign() * (2.0 + x[0].abs());
            (vector(&x), label)
        })
        .collect()
}

/// Overlapping classes: the first coordinate is shifted by the label.
fn noisy(n: usize, seed: u64) -> Vec<(FeatureVector, Label)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let label = if i % 3 == 0 { Label::NonCredible } else { Label::Credible };
            let mut x = gaussian(&mut rng, 4);
            x[0] += label.sign();
            (vector(&x), label)
        })
        .collect()
}

proptest! {
    #[test]
    fn score_is_linear_without_bias(
        w in prop::collection::vec(-5.0f64..5.0, 6),
        x in prop::collection::vec(-5.0f64..5.0, 6),
        y in prop::collection::vec(-5.0f64..5.0, 6),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let names: Vec<String> = (0..6).map(|i| format!("x{i}")).collect();
        let model = LinearModel::new(ModelKind::Classifier, names, w, 0.0, TrainConfig::default(), TrainingSummary::default()).unwrap();
        let combined: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = model.score(&vector(&combined));
        let rhs = a * model.score(&vector(&x)) + b * model.score(&vector(&y));
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn unknown_features_are_ignored(x in prop::collection::vec(-5.0f64..5.0, 4), extra in -5.0f64..5.0) {
        let names: Vec<String> = (0..3).map(|i| format!("x{i}")).collect();
        let model = LinearModel::new(ModelKind::Classifier, names, vec![0.5, -1.0, 2.0], 0.25, TrainConfig::default(), TrainingSummary::default()).unwrap();
        let full = FeatureVector::from_pairs(
            x.iter().enumerate().map(|(i, &v)| (format!("x{i}"), v)).chain([("unseen".to_string(), extra)]),
        )
        .unwrap();
        let pruned = vector(&x[..3]);
        prop_assert_eq!(model.score(&full), model.score(&pruned));
    }

    #[test]
    fn weak_duality_on_every_epoch(
        rows in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 2..30),
        seed in any::<u64>(),
    ) {
        let sparse: Vec<SparseRow> = rows
            .iter()
            .map(|r| r.iter().enumerate().map(|(j, &v)| (j as u32, v)).chain([(3, 1.0)]).collect())
            .collect();
        let y: Vec<f64> = (0..rows.len()).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let cost: Vec<f64> = (0..rows.len()).map(|i| 0.5 + i as f64 % 3.0).collect();
        let state = solve(&sparse, &y, &cost, 4, SolverParams { tolerance: 1e-8, max_epochs: 2000, seed });
        for check in &state.trace {
            prop_assert!(check.dual <= check.primal + 1e-9 * check.primal.abs().max(1.0));
        }
        prop_assert!(state.alpha.iter().all(|&a| a >= 0.0));
        if state.converged {
            prop_assert!(state.relative_gap() < 1e-8);
        }
    }
}

#[test]
fn ranking_ignores_item_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let items: Vec<(FeatureVector, f64)> = (0..25)
        .map(|i| (vector(&gaussian(&mut rng, 4)), f64::from(i % 9)))
        .collect();
    let config = TrainConfig::default();
    let reference = train_rank(&items, &config).unwrap();
    for seed in 0..5 {
        let mut shuffled = items.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let model = train_rank(&shuffled, &config).unwrap();
        assert_eq!(model.weights(), reference.weights());
        assert_eq!(model.names(), reference.names());
    }
}

#[test]
fn common_penalty_scale_keeps_separable_labels() {
    let data = separable(60, 9);
    let mut baseline: Option<Vec<Label>> = None;
    for c in [0.1, 1.0, 10.0, 100.0] {
        let config = TrainConfig { c_pos: c, c_neg: c, ..TrainConfig::default() };
        let model = train_csvm(&data, &config).unwrap();
        let labels: Vec<Label> = data.iter().map(|(x, _)| model.predict(x).label).collect();
        match &baseline {
            None => baseline = Some(labels),
            Some(first) => assert_eq!(&labels, first, "labels changed at C = {c}"),
        }
    }
}

#[test]
fn raising_negative_penalty_reduces_negative_violations() {
    let data = noisy(400, 21);
    let mut previous = usize::MAX;
    for c_neg in [0.1, 1.0, 10.0] {
        let config = TrainConfig { c_neg, ..TrainConfig::default() };
        let model = train_csvm(&data, &config).unwrap();
        let violations = data
            .iter()
            .filter(|(x, l)| *l == Label::NonCredible && model.score(x) > -1.0)
            .count();
        assert!(violations <= previous, "C- = {c_neg}: {violations} > {previous}");
        previous = violations;
    }
}

#[test]
fn shuffled_labels_are_unlearnable() {
    let mut total = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let make = |rng: &mut ChaCha8Rng, n: usize| -> Vec<(FeatureVector, Label)> {
            (0..n)
                .map(|_| {
                    let label = if rng.gen_bool(0.5) { Label::Credible } else { Label::NonCredible };
                    (vector(&gaussian(rng, 5)), label)
                })
                .collect()
        };
        let train = make(&mut rng, 200);
        let test = make(&mut rng, 500);
        let model = train_csvm(&train, &TrainConfig::default()).unwrap();
        let hits = test.iter().filter(|(x, l)| model.predict(x).label == *l).count();
        total += hits as f64 / test.len() as f64;
    }
    let mean = total / 20.0;
    assert!((mean - 0.5).abs() <= 0.05, "mean accuracy {mean}");
}

use credibility::corpus::{Label, Tokenizer, VocabConfig};
use credibility::jst::{JstHyperParams, SentimentLexicon};
use credibility::pipeline::{fit_facet_model, FacetTraining, FeaturePipeline, PipelineConfig, ReviewSignals};
use credibility::synth::{generate, Archetype, SynthSpec};

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

#[test]
fn spam_count_follows_the_binomial_bound() {
    for seed in [1, 2, 3] {
        let out = generate(&SynthSpec { seed, ..SynthSpec::default() }).unwrap();
        let n = out.corpus.len() as f64;
        assert!((1800.0..=2200.0).contains(&n), "corpus has {n} reviews");
        let spam = out
            .corpus
            .reviews()
            .iter()
            .filter(|r| r.label == Some(Label::NonCredible))
            .count() as f64;
        let bound = 3.0 * (0.25 * n).sqrt();
        assert!((spam - 0.5 * n).abs() <= bound, "seed {seed}: {spam} of {n}");
    }
}

#[test]
fn planted_archetypes_stand_out() {
    let out = generate(&SynthSpec { seed: 12, ..SynthSpec::default() }).unwrap();
    let corpus = &out.corpus;
    let hyper = JstHyperParams::new(3, 2).with_schedule(200, 100, 20).with_seed(12);
    let file = fit_facet_model(
        corpus,
        &Tokenizer::default(),
        &SentimentLexicon::builtin(),
        FacetTraining { vocab: VocabConfig::default(), hyper },
    )
    .unwrap();
    let pipeline = FeaturePipeline::from_file(Tokenizer::default(), file, PipelineConfig::default()).unwrap();
    let signals = pipeline.extract(corpus).unwrap().signals;
    let archetype_of = |i: usize| out.truth.archetypes.get(&corpus.reviews()[i].review_id).copied();

    let of = |archetype: Option<Archetype>, signal: fn(&ReviewSignals) -> f64| -> Vec<f64> {
        (0..corpus.len()).filter(|&i| archetype_of(i) == archetype).map(|i| signal(&signals[i])).collect()
    };
    let burst = of(Some(Archetype::Burst), |s| s.burstiness);
    let mismatch = of(Some(Archetype::Mismatch), |s| s.rating_deviation_l1);
    assert!(burst.len() > 100 && mismatch.len() > 100);

    let corpus_burst = median(signals.iter().map(|s| s.burstiness).collect());
    let credible_deviation = median(of(None, |s| s.rating_deviation_l1));
    assert!(median(burst) > corpus_burst);
    assert!(median(mismatch) > credible_deviation);
}

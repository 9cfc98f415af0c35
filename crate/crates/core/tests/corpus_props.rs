use std::collections::HashSet;

use credibility::corpus::{
    DEFAULT_STOPWORDS,
    load_corpus, write_jsonl, Corpus, InputFormat, Label, LoadOptions, Review, TokenSeq, Tokenizer,
    UserMeta, VocabConfig, Vocabulary,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;

fn oracle_tokens(text: &str) -> Vec<String> {
    let re = Regex::new(r"[A-Za-z0-9]+(?:['\u{2019}-][A-Za-z0-9]+)*|[!?]+").unwrap();
    re.find_iter(text)
        .map(|m| {
            let word = m.as_str().replace('\u{2019}', "'");
            let letters: Vec<char> = word.chars().filter(char::is_ascii_alphabetic).collect();
            let shouted = word.chars().count() >= 2 && !letters.is_empty() && letters.iter().all(char::is_ascii_uppercase);
            if shouted || word.starts_with(['!', '?']) {
                word
            } else {
                word.to_lowercase()
            }
        })
        .collect()
}

fn text_strategy() -> impl Strategy<Value = String> {
    let alphabet: Vec<char> = "aAbBeEoOzZ019 !?-'\u{2019}.,;:\t".chars().collect();
    prop::collection::vec(prop::sample::select(alphabet), 0..60).prop_map(|cs| cs.into_iter().collect())
}

proptest! {
    #[test]
    fn tokenizer_matches_regex_oracle(text in text_strategy()) {
        let seq = Tokenizer::new(HashSet::new()).tokenize(&text);
        let expected = oracle_tokens(&text);
        prop_assert_eq!(seq.raw_length, expected.len());
        prop_assert_eq!(seq.tokens, expected);
    }

    #[test]
    fn stopwords_only_drop_tokens(text in text_strategy()) {
        let all = Tokenizer::new(HashSet::new()).tokenize(&text);
        let filtered = Tokenizer::default().tokenize(&text);
        let stop: HashSet<&str> = DEFAULT_STOPWORDS.iter().copied().collect();
        let kept: Vec<String> = all.tokens.iter().filter(|t| !stop.contains(t.to_lowercase().as_str())).cloned().collect();
        prop_assert_eq!(filtered.tokens, kept);
        prop_assert_eq!(filtered.raw_length, all.raw_length);
    }

    #[test]
    fn tokenization_is_deterministic(text in text_strategy()) {
        let tokenizer = Tokenizer::default();
        prop_assert_eq!(tokenizer.tokenize(&text), tokenizer.tokenize(&text));
    }

    #[test]
    fn bigram_parts_are_tokens(text in text_strategy()) {
        let seq = Tokenizer::default().tokenize(&text);
        let vocab = Vocabulary::build(std::slice::from_ref(&seq), VocabConfig { min_df: 1, max_vocab: 10_000 }).unwrap();
        for (idx, entry) in vocab.entries().iter().enumerate() {
            if vocab.is_bigram(idx) {
                let pos = seq.bigrams().position(|b| &b == entry);
                prop_assert!(pos.is_some(), "bigram {} not formed from adjacent tokens", entry);
                let i = pos.unwrap();
                prop_assert!(vocab.get(&seq.tokens[i]).is_some());
                prop_assert!(vocab.get(&seq.tokens[i + 1]).is_some());
            }
        }
    }

    #[test]
    fn vocabulary_ignores_document_order(docs in prop::collection::vec(text_strategy(), 1..12), seed in any::<u64>()) {
        let tokenizer = Tokenizer::default();
        let seqs: Vec<TokenSeq> = docs.iter().map(|d| tokenizer.tokenize(d)).collect();
        let mut shuffled = seqs.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let config = VocabConfig { min_df: 1, max_vocab: 50 };
        let a = Vocabulary::build(&seqs, config).unwrap();
        let b = Vocabulary::build(&shuffled, config).unwrap();
        prop_assert_eq!(a.entries(), b.entries());
        prop_assert_eq!(a.fingerprint(), b.fingerprint());
    }
}

fn review(i: usize, item: &str, user: &str, seconds: u32, rating: u8) -> Review {
    Review {
        review_id: format!("r{i}"),
        user_id: user.into(),
        item_id: item.into(),
        timestamp: f64::from(seconds) / 86_400.0,
        rating,
        text: format!("review number {i} is GREAT!!"),
        label: match i % 3 {
            0 => Some(Label::Credible),
            1 => Some(Label::NonCredible),
            _ => None,
        },
        helpful_votes: i.is_multiple_of(2).then_some(i as u32),
        user_meta: UserMeta {
            friends_count: Some(i as u32 * 3),
            checked_in: Some(i % 2 == 1),
            elite: None,
        },
    }
}

#[test]
fn index_round_trips_through_jsonl() {
    let reviews: Vec<Review> = (0..30)
        .map(|i| review(i, &format!("item{}", i % 4), &format!("user{}", i % 7), 1_400_000_000 + 3_600 * i as u32, (i % 5 + 1) as u8))
        .collect();
    let corpus = Corpus::new(reviews, 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    write_jsonl(&corpus, &path).unwrap();
    let back = load_corpus(&path, InputFormat::Jsonl, LoadOptions::default()).unwrap();

    assert_eq!(back.len(), corpus.len());
    assert_eq!(back.items(), corpus.items());
    assert_eq!(back.users(), corpus.users());
    for (a, b) in corpus.reviews().iter().zip(back.reviews()) {
        approx::assert_abs_diff_eq!(a.timestamp, b.timestamp, epsilon = 1e-9);
        assert_eq!((&a.review_id, &a.user_id, &a.item_id), (&b.review_id, &b.user_id, &b.item_id));
        assert_eq!((a.rating, &a.text, a.label, a.helpful_votes), (b.rating, &b.text, b.label, b.helpful_votes));
        assert_eq!(a.user_meta, b.user_meta);
    }
    for (item, positions) in back.items() {
        assert!(positions.iter().all(|&p| &back.reviews()[p].item_id == item));
    }
    let total: usize = back.users().values().map(Vec::len).sum();
    assert_eq!(total, back.len());
}

#[test]
fn duplicate_review_ids_are_rejected() {
    let reviews = vec![review(1, "a", "u", 0, 3), review(1, "b", "v", 0, 4)];
    assert!(Corpus::new(reviews, 5).is_err());
}

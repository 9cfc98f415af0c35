//! Seeded synthetic review corpora with planted facets and injected
//! non-credible reviews.
//!
//! Credible text follows the facet-sentiment generative story: each token
//! draws a sentiment label from a rating-dependent mixture, then either a
//! word from the shared sentiment pool of that label or a word from a facet
//! drawn from the review's facet mixture.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::corpus::load::review_to_json;
use crate::corpus::{Corpus, Label, Review, UserMeta, DEFAULT_MAX_RATING, DEFAULT_STOPWORDS, SECONDS_PER_DAY};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::jst::{JstModel, SentimentLexicon, NEGATIVE, POSITIVE};

/// 2015-01-01T00:00:00Z.
const BASE_SECONDS: i64 = 1_420_070_400;
const SECONDS_PER_YEAR: i64 = 365 * 86_400;
const FILLERS: [&str; 5] = ["the", "was", "and", "very", "it"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Archetype {
    /// Text polarity opposite to the stated rating.
    Mismatch,
    /// Text about an unrelated facet.
    OffFacet,
    /// One of several same-item reviews within a day, all at one extreme.
    Burst,
    /// A few words with a 1 or 5 star rating.
    Extreme,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchetypeWeights {
    pub mismatch: f64,
    pub off_facet: f64,
    pub burst: f64,
    pub extreme: f64,
}

impl Default for ArchetypeWeights {
    fn default() -> Self {
        Self {
            mismatch: 0.25,
            off_facet: 0.25,
            burst: 0.25,
            extreme: 0.25,
        }
    }
}

impl ArchetypeWeights {
    fn as_array(&self) -> [(Archetype, f64); 4] {
        [
            (Archetype::Mismatch, self.mismatch),
            (Archetype::OffFacet, self.off_facet),
            (Archetype::Burst, self.burst),
            (Archetype::Extreme, self.extreme),
        ]
    }

    /// All mass on one archetype.
    pub fn only(archetype: Archetype) -> Self {
        let mut w = Self {
            mismatch: 0.0,
            off_facet: 0.0,
            burst: 0.0,
            extreme: 0.0,
        };
        match archetype {
            Archetype::Mismatch => w.mismatch = 1.0,
            Archetype::OffFacet => w.off_facet = 1.0,
            Archetype::Burst => w.burst = 1.0,
            Archetype::Extreme => w.extreme = 1.0,
        }
        w
    }
}

fn words(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub n_items: usize,
    /// Pool of regular reviewers.
    pub n_users: usize,
    /// Inclusive range.
    pub reviews_per_item: (usize, usize),
    /// One neutral word list per planted facet.
    pub facet_words: Vec<Vec<String>>,
    /// Vocabulary of the unrelated facet used by off-facet reviews.
    pub alien_words: Vec<String>,
    pub positive_words: Vec<String>,
    pub negative_words: Vec<String>,
    /// Probability that a token comes from a sentiment pool.
    pub sentiment_share: f64,
    /// Symmetric Dirichlet parameter of each review's facet mixture.
    pub facet_concentration: f64,
    pub mean_length: f64,
    /// Inclusive token-count range; lengths outside it are redrawn.
    pub length_range: (usize, usize),
    /// Probability of a filler stopword after each content token.
    pub filler_rate: f64,
    /// Standard deviation of credible ratings around item quality.
    pub rating_noise: f64,
    pub spam_rate: f64,
    pub archetypes: ArchetypeWeights,
    /// Share of non-credible reviews written by single-use accounts.
    pub fresh_spammer_rate: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_items: 100,
            n_users: 400,
            reviews_per_item: (3, 37),
            facet_words: vec![
                words(&["room", "bed", "pillow", "shower", "towel", "carpet", "window", "balcony", "closet", "mattress"]),
                words(&["breakfast", "coffee", "buffet", "omelette", "toast", "juice", "pastry", "waffle", "bacon", "cereal"]),
                words(&["reception", "concierge", "manager", "desk", "checkin", "valet", "porter", "housekeeping", "bellboy", "lobby"]),
            ],
            alien_words: words(&["laptop", "battery", "charger", "keyboard", "screen", "printer", "router", "software", "monitor", "cable"]),
            positive_words: words(&[
                "amazing", "awesome", "clean", "comfortable", "delicious", "excellent", "fantastic", "friendly", "great",
                "helpful", "lovely", "nice", "perfect", "pleasant", "quiet", "spacious", "spotless", "superb", "tasty", "wonderful",
            ]),
            negative_words: words(&[
                "awful", "bad", "bland", "broken", "dirty", "disappointing", "filthy", "horrible", "lousy", "mediocre",
                "nasty", "noisy", "overpriced", "poor", "rude", "slow", "smelly", "stained", "terrible", "unhelpful",
            ]),
            sentiment_share: 0.35,
            facet_concentration: 0.3,
            mean_length: 30.0,
            length_range: (5, 100),
            filler_rate: 0.15,
            rating_noise: 0.6,
            spam_rate: 0.5,
            archetypes: ArchetypeWeights::default(),
            fresh_spammer_rate: 0.8,
            seed: 42,
        }
    }
}

impl SynthSpec {
    pub fn k_true(&self) -> usize {
        self.facet_words.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(0.0..=1.0).contains(&self.spam_rate) {
            return bad(format!("spam_rate must lie in [0, 1], got {}", self.spam_rate));
        }
        let w = self.archetypes.as_array();
        if w.iter().any(|(_, x)| !(*x >= 0.0)) || (w.iter().map(|(_, x)| x).sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("archetype weights must be non-negative and sum to 1".into());
        }
        for (name, p) in [
            ("sentiment_share", self.sentiment_share),
            ("filler_rate", self.filler_rate),
            ("fresh_spammer_rate", self.fresh_spammer_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.n_items == 0 || self.n_users == 0 {
            return bad("n_items and n_users must be positive".into());
        }
        let (lo, hi) = self.reviews_per_item;
        if lo == 0 || lo > hi {
            return bad(format!("reviews_per_item ({lo}, {hi}) must satisfy 1 <= lo <= hi"));
        }
        let (lo, hi) = self.length_range;
        if lo == 0 || lo > hi {
            return bad(format!("length_range ({lo}, {hi}) must satisfy 1 <= lo <= hi"));
        }
        if !(self.mean_length > 0.0) || !(self.facet_concentration > 0.0) || !(self.rating_noise >= 0.0) {
            return bad("mean_length and facet_concentration must be positive, rating_noise non-negative".into());
        }
        if self.facet_words.is_empty() || self.facet_words.iter().any(Vec::is_empty) {
            return bad("every planted facet needs at least one word".into());
        }
        if self.alien_words.is_empty() || self.positive_words.is_empty() || self.negative_words.is_empty() {
            return bad("alien and sentiment word lists must be non-empty".into());
        }
        let stop: HashSet<&str> = DEFAULT_STOPWORDS.iter().copied().collect();
        let mut seen = HashSet::new();
        let lists = self
            .facet_words
            .iter()
            .chain([&self.alien_words, &self.positive_words, &self.negative_words]);
        for word in lists.flatten() {
            if word.is_empty() || !word.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit()) {
                return bad(format!("word \"{word}\" must be lowercase alphanumeric"));
            }
            if stop.contains(word.as_str()) {
                return bad(format!("word \"{word}\" is a stopword"));
            }
            if !seen.insert(word.as_str()) {
                return bad(format!("word \"{word}\" appears in more than one list"));
            }
        }
        let lexicon = SentimentLexicon::builtin();
        for (list, polarity) in [(&self.positive_words, POSITIVE), (&self.negative_words, NEGATIVE)] {
            if let Some(w) = list.iter().find(|w| lexicon.polarity(w) != Some(polarity)) {
                return bad(format!("sentiment word \"{w}\" is not in the built-in lexicon with that polarity"));
            }
        }
        Ok(())
    }
}

/// What the generator planted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub k_true: usize,
    /// Word order of `phi_true`'s last axis.
    pub words: Vec<String>,
    /// Facet-label-word distributions, flattened as `(k * 2 + l) * V + w`.
    pub phi_true: Vec<f64>,
    pub facet_words: Vec<Vec<String>>,
    pub positive_words: Vec<String>,
    pub negative_words: Vec<String>,
    pub labels: BTreeMap<String, Label>,
    pub archetypes: BTreeMap<String, Archetype>,
    pub item_quality: BTreeMap<String, f64>,
    /// 1 is best.
    pub reference_ranks: BTreeMap<String, f64>,
}

impl GroundTruth {
    pub fn phi_true(&self, k: usize, l: usize, w: usize) -> f64 {
        self.phi_true[(k * 2 + l) * self.words.len() + w]
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone)]
pub struct Synthesized {
    pub corpus: Corpus,
    pub truth: GroundTruth,
    /// Integer epoch seconds per review, in corpus order.
    pub seconds: Vec<i64>,
}

impl Synthesized {
    /// JSONL with integer epoch-second timestamps.
    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for (review, secs) in self.corpus.reviews().iter().zip(&self.seconds) {
            let line = serde_json::to_string(&review_to_json(review, *secs))?;
            writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

struct Generator<'a> {
    spec: &'a SynthSpec,
    rng: ChaCha8Rng,
    lengths: Poisson<f64>,
    mixture: Option<Dirichlet<f64>>,
}

impl Generator<'_> {
    fn length(&mut self) -> usize {
        let (lo, hi) = self.spec.length_range;
        loop {
            let n = self.lengths.sample(&mut self.rng) as usize;
            if (lo..=hi).contains(&n) {
                return n;
            }
        }
    }

    fn pick<'w>(&mut self, list: &'w [String]) -> &'w str {
        &list[self.rng.gen_range(0..list.len())]
    }

    fn push_word(&mut self, text: &mut Vec<String>, word: &str) {
        text.push(word.to_string());
        if self.rng.gen_bool(self.spec.filler_rate) {
            text.push(FILLERS[self.rng.gen_range(0..FILLERS.len())].to_string());
        }
    }

    /// Text whose sentiment mix follows `rating`; facet words come from
    /// `alien` when set.
    fn text(&mut self, rating: u8, alien: bool) -> String {
        let spec = self.spec;
        let p_pos = 0.05 + 0.9 * f64::from(rating - 1) / f64::from(DEFAULT_MAX_RATING - 1);
        let theta = match &self.mixture {
            Some(d) => d.sample(&mut self.rng),
            None => vec![1.0],
        };
        let n = self.length();
        let mut text = Vec::with_capacity(n * 2);
        for _ in 0..n {
            let positive = self.rng.gen_bool(p_pos);
            let word = if self.rng.gen_bool(spec.sentiment_share) {
                let pool = if positive { &spec.positive_words } else { &spec.negative_words };
                self.pick(pool).to_string()
            } else if alien {
                self.pick(&spec.alien_words).to_string()
            } else {
                let k = sample_index(&theta, self.rng.gen());
                self.pick(&spec.facet_words[k]).to_string()
            };
            self.push_word(&mut text, &word);
        }
        text.join(" ")
    }

    fn short_text(&mut self, rating: u8) -> String {
        let pool = if rating >= 3 { &self.spec.positive_words } else { &self.spec.negative_words };
        let n = self.rng.gen_range(1..=3);
        let mut text: Vec<String> = (0..n).map(|_| self.pick(pool).to_string()).collect();
        if self.rng.gen_bool(0.5) {
            text.push("!!!".into());
        }
        text.join(" ")
    }

    fn credible_rating(&mut self, quality: f64) -> u8 {
        let noise = Normal::new(0.0, self.spec.rating_noise).expect("validated noise");
        (quality + noise.sample(&mut self.rng)).round().clamp(1.0, f64::from(DEFAULT_MAX_RATING)) as u8
    }

    fn archetype(&mut self) -> Archetype {
        let u: f64 = self.rng.gen();
        let mut acc = 0.0;
        let weights = self.spec.archetypes.as_array();
        for (a, w) in weights {
            acc += w;
            if u < acc {
                return a;
            }
        }
        weights.iter().rev().find(|(_, w)| *w > 0.0).map(|(a, _)| *a).expect("weights sum to 1")
    }
}

fn sample_index(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w / total;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

struct UserProfile {
    friends: u32,
    elite: bool,
}

pub fn generate(spec: &SynthSpec) -> Result<Synthesized> {
    spec.validate()?;
    let k_true = spec.k_true();
    let mut g = Generator {
        spec,
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        lengths: Poisson::new(spec.mean_length).map_err(|e| Error::Config(e.to_string()))?,
        mixture: if k_true > 1 {
            Some(Dirichlet::new_with_size(spec.facet_concentration, k_true).map_err(|e| Error::Config(e.to_string()))?)
        } else {
            None
        },
    };
    let friends_regular = Poisson::new(20.0).expect("positive rate");
    let friends_spam = Poisson::new(2.0).expect("positive rate");
    let helpful_regular = Poisson::new(3.0).expect("positive rate");
    let helpful_spam = Poisson::new(0.5).expect("positive rate");

    let users: Vec<UserProfile> = (0..spec.n_users)
        .map(|_| UserProfile {
            friends: friends_regular.sample(&mut g.rng) as u32,
            elite: g.rng.gen_bool(0.15),
        })
        .collect();

    let mut reviews = Vec::new();
    let mut seconds = Vec::new();
    let mut archetypes = BTreeMap::new();
    let mut item_quality = BTreeMap::new();
    let mut fresh = 0usize;
    for i in 0..spec.n_items {
        let item_id = format!("i{i:03}");
        let quality: f64 = g.rng.gen_range(1.0..5.0);
        let start = BASE_SECONDS + g.rng.gen_range(0..SECONDS_PER_YEAR);
        let burst_rating = if quality < 3.0 { DEFAULT_MAX_RATING } else { 1 };
        item_quality.insert(item_id.clone(), quality);
        let n = g.rng.gen_range(spec.reviews_per_item.0..=spec.reviews_per_item.1);
        for _ in 0..n {
            let review_id = format!("r{:05}", reviews.len());
            let spam = g.rng.gen_bool(spec.spam_rate);
            let (rating, text, secs) = if !spam {
                let rating = g.credible_rating(quality);
                (rating, g.text(rating, false), start + g.rng.gen_range(0..SECONDS_PER_YEAR))
            } else {
                let archetype = g.archetype();
                archetypes.insert(review_id.clone(), archetype);
                let later = start + g.rng.gen_range(0..SECONDS_PER_YEAR);
                match archetype {
                    Archetype::Mismatch => {
                        let shown = [1, 2, 4, 5][g.rng.gen_range(0..4)];
                        (DEFAULT_MAX_RATING + 1 - shown, g.text(shown, false), later)
                    }
                    Archetype::OffFacet => {
                        let rating = g.credible_rating(quality);
                        (rating, g.text(rating, true), later)
                    }
                    Archetype::Burst => {
                        let secs = start + g.rng.gen_range(0..86_400);
                        (burst_rating, g.text(burst_rating, false), secs)
                    }
                    Archetype::Extreme => {
                        let rating = if g.rng.gen_bool(0.5) { DEFAULT_MAX_RATING } else { 1 };
                        (rating, g.short_text(rating), later)
                    }
                }
            };
            let (user_id, meta) = if spam && g.rng.gen_bool(spec.fresh_spammer_rate) {
                fresh += 1;
                let meta = UserMeta {
                    friends_count: Some(friends_spam.sample(&mut g.rng) as u32),
                    checked_in: Some(g.rng.gen_bool(0.1)),
                    elite: Some(g.rng.gen_bool(0.01)),
                };
                (format!("s{fresh:05}"), meta)
            } else {
                let u = g.rng.gen_range(0..spec.n_users);
                let meta = UserMeta {
                    friends_count: Some(users[u].friends),
                    checked_in: Some(g.rng.gen_bool(if spam { 0.1 } else { 0.6 })),
                    elite: Some(users[u].elite),
                };
                (format!("u{u:04}"), meta)
            };
            let helpful = if spam { &helpful_spam } else { &helpful_regular };
            let helpful_votes = Some(helpful.sample(&mut g.rng) as u32);
            reviews.push(Review {
                review_id,
                user_id,
                item_id: item_id.clone(),
                timestamp: secs as f64 / SECONDS_PER_DAY,
                rating,
                text,
                label: Some(if spam { Label::NonCredible } else { Label::Credible }),
                helpful_votes,
                user_meta: meta,
            });
            seconds.push(secs);
        }
    }

    let labels = reviews
        .iter()
        .map(|r| (r.review_id.clone(), r.label.expect("generated reviews are labeled")))
        .collect();
    let truth = GroundTruth {
        k_true,
        words: spec
            .facet_words
            .iter()
            .flatten()
            .chain(&spec.positive_words)
            .chain(&spec.negative_words)
            .cloned()
            .collect(),
        phi_true: phi_true(spec),
        facet_words: spec.facet_words.clone(),
        positive_words: spec.positive_words.clone(),
        negative_words: spec.negative_words.clone(),
        labels,
        archetypes,
        reference_ranks: reference_ranks(&item_quality),
        item_quality,
    };
    Ok(Synthesized {
        corpus: Corpus::new(reviews, DEFAULT_MAX_RATING)?,
        truth,
        seconds,
    })
}

fn phi_true(spec: &SynthSpec) -> Vec<f64> {
    let words: Vec<&String> = spec
        .facet_words
        .iter()
        .flatten()
        .chain(&spec.positive_words)
        .chain(&spec.negative_words)
        .collect();
    let s = spec.sentiment_share;
    let mut phi = Vec::with_capacity(spec.k_true() * 2 * words.len());
    for facet in &spec.facet_words {
        for pool in [&spec.positive_words, &spec.negative_words] {
            phi.extend(words.iter().map(|w| {
                if facet.contains(w) {
                    (1.0 - s) / facet.len() as f64
                } else if pool.contains(w) {
                    s / pool.len() as f64
                } else {
                    0.0
                }
            }));
        }
    }
    phi
}

/// Items ordered by quality, best first; ties broken by id.
fn reference_ranks(quality: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let mut items: Vec<(&String, f64)> = quality.iter().map(|(k, v)| (k, *v)).collect();
    items.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(b.0)));
    items
        .into_iter()
        .enumerate()
        .map(|(rank, (id, _))| (id.clone(), (rank + 1) as f64))
        .collect()
}

/// How well a trained facet model recovers the planted facet-label topics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    /// Learned `(facet, label)` cell matched to each planted `(facet, label)`
    /// topic, in planted order `k * 2 + l`.
    pub assignment: Vec<(usize, usize)>,
    /// Probability mass the matched cell puts on the planted topic's words.
    pub mass: Vec<f64>,
    pub mean: f64,
}

/// Planted topic `(k, l)` owns the words of facet `k` and of sentiment pool
/// `l`. Planted topics are matched one-to-one to learned cells so as to
/// maximize the total mass on owned words.
pub fn planted_recovery(model: &JstModel, truth: &GroundTruth) -> Result<Recovery> {
    let (k, l) = (model.k(), model.l());
    let planted = truth.k_true * 2;
    if l != 2 || k * l < planted {
        return Err(Error::invalid(format!(
            "a K={k}, L={l} model cannot host {} planted facets with two labels",
            truth.k_true
        )));
    }
    let pools = [&truth.positive_words, &truth.negative_words];
    let score: Vec<Vec<f64>> = (0..planted)
        .map(|topic| {
            let owned: HashSet<&str> = truth.facet_words[topic / 2]
                .iter()
                .chain(pools[topic % 2].iter())
                .map(String::as_str)
                .collect();
            let ids: Vec<usize> = (0..model.vocab_size())
                .filter(|&w| owned.contains(model.words()[w].as_str()))
                .collect();
            (0..k * l)
                .map(|cell| ids.iter().map(|&w| model.phi(cell / l, cell % l, w)).sum())
                .collect()
        })
        .collect();
    let scaled: Vec<Vec<i64>> = score
        .iter()
        .map(|row| row.iter().map(|v| (v * 1e12).round() as i64).collect())
        .collect();
    let matrix = Matrix::from_rows(scaled).map_err(|e| Error::invalid(e.to_string()))?;
    let (_, cells) = kuhn_munkres(&matrix);
    let mass: Vec<f64> = cells.iter().enumerate().map(|(t, &c)| score[t][c]).collect();
    Ok(Recovery {
        assignment: cells.iter().map(|&c| (c / l, c % l)).collect(),
        mean: mass.iter().sum::<f64>() / planted as f64,
        mass,
    })
}

/// Items whose reference order is a hidden linear function of their
/// features.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRankingSet {
    /// Item features paired with reference rank (1 is best).
    pub items: Vec<(FeatureVector, f64)>,
    pub weights: Vec<f64>,
}

/// `n_items` items with `dim` standard normal features named `x0..`. The
/// hidden utility is `w · x + noise` with `w` standard normal; ranks follow
/// utility, best first.
pub fn linear_ranking(n_items: usize, dim: usize, noise: f64, seed: u64) -> Result<LinearRankingSet> {
    if n_items < 2 || dim == 0 {
        return Err(Error::Config("need at least two items and one feature".into()));
    }
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::Config(format!("noise must be finite and non-negative, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let weights: Vec<f64> = (0..dim).map(|_| normal.sample(&mut rng)).collect();
    let names: Vec<String> = (0..dim).map(|j| format!("x{j}")).collect();
    let mut rows = Vec::with_capacity(n_items);
    for _ in 0..n_items {
        let x: Vec<f64> = (0..dim).map(|_| normal.sample(&mut rng)).collect();
        let utility = x.iter().zip(&weights).map(|(a, b)| a * b).sum::<f64>() + noise * normal.sample(&mut rng);
        rows.push((x, utility));
    }
    let mut order: Vec<usize> = (0..n_items).collect();
    order.sort_by(|&a, &b| rows[b].1.total_cmp(&rows[a].1).then(a.cmp(&b)));
    let mut rank = vec![0.0; n_items];
    for (position, &i) in order.iter().enumerate() {
        rank[i] = (position + 1) as f64;
    }
    let items = rows
        .into_iter()
        .zip(rank)
        .map(|((x, _), r)| FeatureVector::from_pairs(names.iter().cloned().zip(x)).map(|v| (v, r)))
        .collect::<Result<_>>()?;
    Ok(LinearRankingSet { items, weights })
}

//! Review corpora: records, ingestion from JSONL/CSV, tokenization and the
//! unigram+bigram vocabulary.

pub(crate) mod load;
mod stopwords;
mod tokenize;
mod vocab;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use load::{decode_entities, load_corpus, parse_timestamp, write_jsonl, InputFormat, LoadOptions};
pub use stopwords::{load_stopwords, DEFAULT_STOPWORDS};
pub use tokenize::{TokenSeq, Tokenizer};
pub use vocab::{VocabConfig, Vocabulary};

/// Seconds per day; timestamps are stored as real-valued days since the epoch.
pub const SECONDS_PER_DAY: f64 = 86_400.0;

pub const DEFAULT_MAX_RATING: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Credible,
    NonCredible,
}

impl Label {
    /// +1 for credible, -1 for non-credible.
    pub fn sign(self) -> f64 {
        match self {
            Label::Credible => 1.0,
            Label::NonCredible => -1.0,
        }
    }

    pub fn from_sign(value: f64) -> Self {
        if value >= 0.0 {
            Label::Credible
        } else {
            Label::NonCredible
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Credible => "credible",
            Label::NonCredible => "non_credible",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "credible" | "+1" | "1" => Ok(Label::Credible),
            "non_credible" | "non-credible" | "-1" => Ok(Label::NonCredible),
            other => Err(format!("unknown label \"{other}\"")),
        }
    }
}

/// Community metadata only some platforms expose.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UserMeta {
    pub friends_count: Option<u32>,
    pub checked_in: Option<bool>,
    pub elite: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Review {
    pub review_id: String,
    pub user_id: String,
    pub item_id: String,
    /// Days since the Unix epoch.
    pub timestamp: f64,
    pub rating: u8,
    pub text: String,
    pub label: Option<Label>,
    pub helpful_votes: Option<u32>,
    pub user_meta: UserMeta,
}

/// An ordered review collection with exact item and user indexes.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    reviews: Vec<Review>,
    items: BTreeMap<String, Vec<usize>>,
    users: BTreeMap<String, Vec<usize>>,
    max_rating: u8,
}

impl Corpus {
    pub fn new(reviews: Vec<Review>, max_rating: u8) -> Result<Self> {
        if max_rating < 2 {
            return Err(Error::Config(format!("max rating must be at least 2, got {max_rating}")));
        }
        let mut seen = HashSet::with_capacity(reviews.len());
        let mut items: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut users: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (pos, review) in reviews.iter().enumerate() {
            if !seen.insert(review.review_id.as_str()) {
                return Err(Error::DuplicateReview {
                    line: pos + 1,
                    review_id: review.review_id.clone(),
                });
            }
            if review.rating < 1 || review.rating > max_rating {
                return Err(Error::record(
                    pos + 1,
                    "rating",
                    format!("{} outside 1..={max_rating}", review.rating),
                ));
            }
            if !review.timestamp.is_finite() {
                return Err(Error::record(pos + 1, "timestamp", "not finite"));
            }
            items.entry(review.item_id.clone()).or_default().push(pos);
            users.entry(review.user_id.clone()).or_default().push(pos);
        }
        Ok(Self {
            reviews,
            items,
            users,
            max_rating,
        })
    }

    pub fn empty(max_rating: u8) -> Self {
        Self {
            max_rating,
            ..Default::default()
        }
    }

    pub fn reviews(&self) -> &[Review] {
        &self.reviews
    }

    pub fn len(&self) -> usize {
        self.reviews.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reviews.is_empty()
    }

    pub fn max_rating(&self) -> u8 {
        self.max_rating
    }

    /// Item id to review positions, in corpus order.
    pub fn items(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.items
    }

    pub fn users(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.users
    }

    pub fn item_reviews(&self, item_id: &str) -> &[usize] {
        self.items.get(item_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn user_reviews(&self, user_id: &str) -> &[usize] {
        self.users.get(user_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn into_reviews(self) -> Vec<Review> {
        self.reviews
    }
}

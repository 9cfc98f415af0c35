use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::{NEGATIVE, POSITIVE};
use crate::error::{Error, Result};

const BUILTIN_POSITIVE: &[&str] = &[
    "amazing", "awesome", "beautiful", "best", "brilliant", "charming", "clean", "comfortable",
    "cozy", "delicious", "delightful", "excellent", "exceptional", "fabulous", "fantastic",
    "fast", "favorite", "fine", "fresh", "friendly", "generous", "good", "gorgeous", "great",
    "happy", "helpful", "ideal", "impressive", "incredible", "love", "loved", "lovely", "nice",
    "outstanding", "perfect", "pleasant", "polite", "quiet", "recommend", "reliable",
    "spacious", "spotless", "superb", "tasty", "terrific", "welcoming", "wonderful", "worth",
    "attentive", "courteous", "enjoy", "enjoyed", "pleased", "professional", "smooth",
    "stunning", "top", "value", "warm", "affordable",
];

const BUILTIN_NEGATIVE: &[&str] = &[
    "awful", "bad", "bland", "broken", "cold", "dirty", "disappointed", "disappointing",
    "disgusting", "dreadful", "expensive", "filthy", "greasy", "horrible", "inedible",
    "lousy", "mediocre", "mess", "messy", "moldy", "nasty", "noisy", "overpriced", "poor",
    "rude", "slow", "smelly", "stained", "terrible", "unfriendly", "unhelpful", "unpleasant",
    "upset", "useless", "worse", "worst", "wrong", "cramped", "crowded", "damp", "rotten",
    "stale", "tasteless", "ugly", "uncomfortable", "unacceptable", "hate", "hated", "avoid",
    "complaint", "refund", "scam", "ripoff", "shabby", "sticky", "soggy", "loud", "careless",
    "outdated", "rundown",
];

/// Positive and negative polarity word sets used to seed sentiment labels
/// before sampling.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentimentLexicon {
    positive: HashSet<String>,
    negative: HashSet<String>,
}

impl SentimentLexicon {
    pub fn new(positive: HashSet<String>, negative: HashSet<String>) -> Result<Self> {
        if let Some(both) = positive.intersection(&negative).next() {
            return Err(Error::Config(format!("lexicon word \"{both}\" is both positive and negative")));
        }
        Ok(Self { positive, negative })
    }

    pub fn builtin() -> Self {
        Self {
            positive: BUILTIN_POSITIVE.iter().map(|s| s.to_string()).collect(),
            negative: BUILTIN_NEGATIVE.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Reads `positive.txt` and `negative.txt` from `dir`. Lines starting with
    /// `;` or `#` are comments.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let read = |name: &str| -> Result<HashSet<String>> {
            let path = dir.join(name);
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            Ok(text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with(';') && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect())
        };
        Self::new(read("positive.txt")?, read("negative.txt")?)
    }

    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }

    pub fn positive(&self) -> &HashSet<String> {
        &self.positive
    }

    pub fn negative(&self) -> &HashSet<String> {
        &self.negative
    }

    /// Label index for `word` (positive = 0, negative = 1), if listed.
    pub fn polarity(&self, word: &str) -> Option<usize> {
        if self.positive.contains(word) {
            Some(POSITIVE)
        } else if self.negative.contains(word) {
            Some(NEGATIVE)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_is_disjoint() {
        let lex = SentimentLexicon::builtin();
        assert!(lex.positive().is_disjoint(lex.negative()));
        assert_eq!(lex.polarity("good"), Some(POSITIVE));
        assert_eq!(lex.polarity("rude"), Some(NEGATIVE));
        assert_eq!(lex.polarity("room"), None);
    }

    #[test]
    fn overlapping_sets_rejected() {
        let p: HashSet<String> = ["good".to_string()].into();
        assert!(SentimentLexicon::new(p.clone(), p).is_err());
    }

    #[test]
    fn loads_word_lists() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("positive.txt"), "; comment\ngood\nGreat\n").unwrap();
        fs::write(dir.path().join("negative.txt"), "bad\n\n").unwrap();
        let lex = SentimentLexicon::load_dir(dir.path()).unwrap();
        assert_eq!(lex.positive().len(), 2);
        assert_eq!(lex.polarity("great"), Some(POSITIVE));
        assert_eq!(lex.polarity("bad"), Some(NEGATIVE));
    }
}

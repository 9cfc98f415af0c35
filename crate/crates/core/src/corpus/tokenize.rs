use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::stopwords::default_stopwords;

/// Tokens of one review after stopword removal, plus the surface length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSeq {
    pub tokens: Vec<String>,
    /// Token count before stopword removal.
    pub raw_length: usize,
}

impl TokenSeq {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Adjacent-token bigrams joined by `_`.
    pub fn bigrams(&self) -> impl Iterator<Item = String> + '_ {
        self.tokens.windows(2).map(|w| format!("{}_{}", w[0], w[1]))
    }
}

/// Splits review text into word tokens while keeping exaggeration cues:
/// ALL-CAPS words stay verbatim and runs of `!`/`?` become tokens.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    stopwords: HashSet<String>,
    caps_min_len: usize,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Self::new(default_stopwords())
    }
}

impl Tokenizer {
    pub fn new(stopwords: HashSet<String>) -> Self {
        Self {
            stopwords,
            caps_min_len: 2,
        }
    }

    pub fn with_caps_min_len(mut self, len: usize) -> Self {
        self.caps_min_len = len;
        self
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(&word.to_lowercase())
    }

    pub fn tokenize(&self, text: &str) -> TokenSeq {
        let mut seq = TokenSeq::default();
        let mut word = String::new();
        let mut marks = String::new();
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            if c.is_alphanumeric() {
                self.flush_marks(&mut marks, &mut seq);
                word.push(c);
            } else if is_joiner(c) && !word.is_empty() && chars.peek().is_some_and(|n| n.is_alphanumeric()) {
                word.push(if c == '\u{2019}' { '\'' } else { c });
            } else if c == '!' || c == '?' {
                self.flush_word(&mut word, &mut seq);
                marks.push(c);
            } else {
                self.flush_word(&mut word, &mut seq);
                self.flush_marks(&mut marks, &mut seq);
            }
        }
        self.flush_word(&mut word, &mut seq);
        self.flush_marks(&mut marks, &mut seq);
        seq
    }

    fn flush_word(&self, word: &mut String, seq: &mut TokenSeq) {
        if word.is_empty() {
            return;
        }
        let token = if self.is_shouted(word) {
            std::mem::take(word)
        } else {
            let lower = word.to_lowercase();
            word.clear();
            lower
        };
        seq.raw_length += 1;
        if !self.is_stopword(&token) {
            seq.tokens.push(token);
        }
    }

    fn flush_marks(&self, marks: &mut String, seq: &mut TokenSeq) {
        if marks.is_empty() {
            return;
        }
        seq.raw_length += 1;
        seq.tokens.push(std::mem::take(marks));
    }

    fn is_shouted(&self, word: &str) -> bool {
        word.chars().count() >= self.caps_min_len
            && word.chars().any(char::is_alphabetic)
            && word.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase)
    }
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::TokenSeq;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabConfig {
    pub min_df: usize,
    pub max_vocab: usize,
}

impl Default for VocabConfig {
    fn default() -> Self {
        Self {
            min_df: 2,
            max_vocab: 50_000,
        }
    }
}

/// Unigram and bigram types ordered by document frequency (descending), then
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    entries: Vec<String>,
    doc_freq: Vec<usize>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn build(docs: &[TokenSeq], config: VocabConfig) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::invalid("cannot build a vocabulary from an empty corpus"));
        }
        let mut df: HashMap<String, usize> = HashMap::new();
        for doc in docs {
            let terms: BTreeSet<String> = doc.tokens.iter().cloned().chain(doc.bigrams()).collect();
            for term in terms {
                *df.entry(term).or_default() += 1;
            }
        }
        let mut ranked: Vec<(String, usize)> = df
            .into_iter()
            .filter(|(_, n)| *n >= config.min_df)
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(config.max_vocab);
        let (entries, doc_freq) = ranked.into_iter().unzip();
        Ok(Self::from_parts(entries, doc_freq))
    }

    pub fn from_parts(entries: Vec<String>, doc_freq: Vec<usize>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Self {
            entries,
            doc_freq,
            index,
        }
    }

    /// Rebuild the lookup table after deserialization.
    pub fn reindex(mut self) -> Self {
        self.index = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn is_bigram(&self, idx: usize) -> bool {
        self.entries[idx].contains('_')
    }

    /// Sorted, de-duplicated vocabulary positions of every unigram and
    /// bigram present in `doc`.
    pub fn present_terms(&self, doc: &TokenSeq) -> Vec<usize> {
        let mut found: Vec<usize> = doc
            .tokens
            .iter()
            .filter_map(|t| self.get(t))
            .chain(doc.bigrams().filter_map(|b| self.get(&b)))
            .collect();
        found.sort_unstable();
        found.dedup();
        found
    }

    /// SHA-256 over the ordered entries, hex encoded.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for entry in &self.entries {
            hasher.update(entry.as_bytes());
            hasher.update([0u8]);
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

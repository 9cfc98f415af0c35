use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Language,
    Consistency,
    Behavioral,
}

impl Block {
    pub fn prefix(self) -> &'static str {
        match self {
            Block::Language => "lang:",
            Block::Consistency => "cons:",
            Block::Behavioral => "beh:",
        }
    }

    pub fn of_name(name: &str) -> Option<Block> {
        [Block::Language, Block::Consistency, Block::Behavioral]
            .into_iter()
            .find(|b| name.starts_with(b.prefix()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpan {
    pub block: Block,
    pub start: usize,
    pub end: usize,
}

/// Named, ordered feature values. Absent names are implicit zeros.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    names: Vec<String>,
    values: Vec<f64>,
    blocks: Vec<BlockSpan>,
}

impl FeatureVector {
    /// A vector holding a single block.
    pub fn block(block: Block, names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} names but {} values",
                names.len(),
                values.len()
            )));
        }
        let mut seen = HashSet::with_capacity(names.len());
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::invalid(format!("duplicate feature name \"{dup}\"")));
        }
        let end = names.len();
        Ok(Self {
            names,
            values,
            blocks: vec![BlockSpan { block, start: 0, end }],
        })
    }

    /// Unlabelled name/value pairs, e.g. read back from a feature file.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, f64)>) -> Result<Self> {
        let (names, values): (Vec<String>, Vec<f64>) = pairs.into_iter().unzip();
        let mut v = Self::block(Block::Language, names, values)?;
        v.blocks.clear();
        Ok(v)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn blocks(&self) -> &[BlockSpan] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.names.iter().map(String::as_str).zip(self.values.iter().copied())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn block_values(&self, block: Block) -> Option<&[f64]> {
        self.blocks
            .iter()
            .find(|s| s.block == block)
            .map(|s| &self.values[s.start..s.end])
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            names: self.names.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            blocks: self.blocks.clone(),
        }
    }
}

/// Concatenate blocks in the given order, rejecting name collisions.
pub fn assemble(parts: impl IntoIterator<Item = FeatureVector>) -> Result<FeatureVector> {
    let mut out = FeatureVector::default();
    let mut seen: HashSet<String> = HashSet::new();
    for part in parts {
        let offset = out.names.len();
        for name in &part.names {
            if !seen.insert(name.clone()) {
                return Err(Error::invalid(format!("duplicate feature name \"{name}\"")));
            }
        }
        out.names.extend(part.names);
        out.values.extend(part.values);
        out.blocks.extend(part.blocks.into_iter().map(|s| BlockSpan {
            block: s.block,
            start: s.start + offset,
            end: s.end + offset,
        }));
    }
    Ok(out)
}

/// Global name-to-column mapping shared by a feature matrix and the models
/// trained on it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpace {
    names: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl FeatureSpace {
    /// First occurrence wins; later duplicates are ignored.
    pub fn new(names: impl IntoIterator<Item = String>) -> Self {
        let mut space = Self::default();
        for name in names {
            space.insert(name);
        }
        space
    }

    pub fn insert(&mut self, name: String) -> usize {
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        i
    }

    pub fn reindex(mut self) -> Self {
        self.index = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        self
    }

    /// Union of the names of `vectors`, in first-appearance order.
    pub fn from_vectors<'a>(vectors: impl IntoIterator<Item = &'a FeatureVector>) -> Self {
        let mut space = Self::default();
        for v in vectors {
            for name in v.names() {
                space.insert(name.clone());
            }
        }
        space
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Sparse `(column, value)` row sorted by column; unknown names and zero
    /// values are dropped.
    pub fn project(&self, v: &FeatureVector) -> Vec<(u32, f64)> {
        let mut row: Vec<(u32, f64)> = v
            .iter()
            .filter(|(_, x)| *x != 0.0)
            .filter_map(|(n, x)| self.get(n).map(|i| (i as u32, x)))
            .collect();
        row.sort_by_key(|&(i, _)| i);
        row
    }
}

//! Linear learners: class-weighted L2-loss SVM, pairwise ranking SVM and
//! feature-space transfer between domains.

mod io;
mod solver;

use std::collections::{BTreeMap, HashMap, HashSet};

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::{names, FeatureSpace, FeatureVector};

pub use io::{read_linear_model, write_linear_model};
pub use solver::{solve, GapCheck, SolverParams, SolverState, SparseRow};

/// Penalties at or below zero are clamped here so the dual stays bounded.
pub const MIN_PENALTY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Penalty on credible (+1) examples; also the symmetric ranking penalty.
    pub c_pos: f64,
    /// Penalty on non-credible (−1) examples.
    pub c_neg: f64,
    /// Relative duality gap at which training stops.
    pub tolerance: f64,
    /// Epoch limit.
    pub max_iter: usize,
    pub seed: u64,
    #[serde(default)]
    pub scaling: Scaling,
}

/// Column scaling applied before optimization. Stored weights always act on
/// unscaled features.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    None,
    /// Divide each column by its largest absolute training value.
    #[default]
    MaxAbs,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c_pos: 1.0,
            c_neg: 1.0,
            tolerance: 1e-6,
            max_iter: 10_000,
            seed: 0,
            scaling: Scaling::MaxAbs,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_pos > 0.0) || !(self.c_neg >= 0.0) || !self.c_pos.is_finite() || !self.c_neg.is_finite() {
            return Err(Error::Config(format!(
                "penalties must be positive and finite (C+={}, C-={})",
                self.c_pos, self.c_neg
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be >= 1".into()));
        }
        Ok(())
    }

    fn params(&self) -> SolverParams {
        SolverParams {
            tolerance: self.tolerance,
            max_epochs: self.max_iter,
            seed: self.seed,
        }
    }

    fn penalty(&self, label: Label) -> f64 {
        match label {
            Label::Credible => self.c_pos.max(MIN_PENALTY),
            Label::NonCredible => self.c_neg.max(MIN_PENALTY),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Classifier,
    Ranker,
}

/// Summary of the optimization that produced a model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub primal: f64,
    pub dual: f64,
    pub relative_gap: f64,
    pub epochs: usize,
    pub converged: bool,
}

impl From<&SolverState> for TrainingSummary {
    fn from(s: &SolverState) -> Self {
        Self {
            primal: s.primal,
            dual: s.dual,
            relative_gap: s.relative_gap(),
            epochs: s.epochs,
            converged: s.converged,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub score: f64,
    pub label: Label,
}

/// Weights keyed by feature name, plus a bias.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    kind: ModelKind,
    names: Vec<String>,
    weights: Vec<f64>,
    bias: f64,
    config: TrainConfig,
    summary: TrainingSummary,
    /// Free-form provenance (feature tier, facet model path, ...).
    pub meta: BTreeMap<String, String>,
    index: HashMap<String, usize>,
}

impl LinearModel {
    pub fn new(
        kind: ModelKind,
        names: Vec<String>,
        weights: Vec<f64>,
        bias: f64,
        config: TrainConfig,
        summary: TrainingSummary,
    ) -> Result<Self> {
        if names.len() != weights.len() {
            return Err(Error::invalid("weight and name counts differ"));
        }
        if weights.iter().any(|w| !w.is_finite()) || !bias.is_finite() {
            return Err(Error::invalid("model weights must be finite"));
        }
        let index: HashMap<String, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        if index.len() != names.len() {
            return Err(Error::invalid("duplicate feature names in model"));
        }
        Ok(Self {
            kind,
            names,
            weights,
            bias,
            config,
            summary,
            meta: BTreeMap::new(),
            index,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn summary(&self) -> &TrainingSummary {
        &self.summary
    }

    pub fn weight(&self, name: &str) -> f64 {
        self.index.get(name).map_or(0.0, |&i| self.weights[i])
    }

    /// `Σ weight[name] · x[name] + bias`; unknown names contribute nothing.
    pub fn score(&self, x: &FeatureVector) -> f64 {
        x.iter().map(|(n, v)| self.weight(n) * v).sum::<f64>() + self.bias
    }

    /// Score and sign label; a score of exactly 0 is credible.
    pub fn predict(&self, x: &FeatureVector) -> Prediction {
        let score = self.score(x);
        Prediction {
            score,
            label: Label::from_sign(score),
        }
    }

    /// Per-feature `weight × value`, sorted by magnitude (descending).
    pub fn contributions(&self, x: &FeatureVector) -> Vec<(String, f64, f64)> {
        let mut out: Vec<(String, f64, f64)> = x
            .iter()
            .map(|(n, v)| (n.to_string(), self.weight(n), v))
            .filter(|(_, w, v)| w * v != 0.0)
            .collect();
        out.sort_by(|a, b| (b.1 * b.2).abs().total_cmp(&(a.1 * a.2).abs()).then_with(|| a.0.cmp(&b.0)));
        out
    }
}

fn check_finite(x: &FeatureVector) -> Result<()> {
    match x.iter().find(|(_, v)| !v.is_finite()) {
        Some((name, v)) => Err(Error::invalid(format!("feature \"{name}\" is not finite ({v})"))),
        None => Ok(()),
    }
}

/// Train the class-weighted classifier over the union of example feature
/// names (first-appearance order).
pub fn train_csvm(examples: &[(FeatureVector, Label)], config: &TrainConfig) -> Result<LinearModel> {
    let space = FeatureSpace::from_vectors(examples.iter().map(|(x, _)| x));
    train_csvm_in(&space, examples, config)
}

/// Train the classifier with columns fixed by `space`. The bias is learned
/// as the weight of an extra constant-1 column.
pub fn train_csvm_in(space: &FeatureSpace, examples: &[(FeatureVector, Label)], config: &TrainConfig) -> Result<LinearModel> {
    config.validate()?;
    let positives = examples.iter().filter(|(_, l)| *l == Label::Credible).count();
    if positives == 0 || positives == examples.len() {
        return Err(Error::invalid(format!(
            "training needs both classes ({positives} credible of {})",
            examples.len()
        )));
    }
    let dim = space.len();
    let bias_col = dim as u32;
    let mut rows = Vec::with_capacity(examples.len());
    let mut y = Vec::with_capacity(examples.len());
    let mut cost = Vec::with_capacity(examples.len());
    for (x, label) in examples {
        check_finite(x)?;
        let mut row = space.project(x);
        row.push((bias_col, 1.0));
        rows.push(row);
        y.push(label.sign());
        cost.push(config.penalty(*label));
    }
    let scale = column_scale(&mut rows, dim, config.scaling);
    let state = solve(&rows, &y, &cost, dim + 1, config.params());
    report(&state, "classifier");
    let mut weights = unscale(&state.weights, &scale);
    let bias = weights.pop().unwrap_or(0.0);
    LinearModel::new(
        ModelKind::Classifier,
        space.names().to_vec(),
        weights,
        bias,
        *config,
        TrainingSummary::from(&state),
    )
}

/// Rescale the first `dim` columns of `rows` in place and return the
/// divisors (1 for untouched columns).
fn column_scale(rows: &mut [SparseRow], dim: usize, scaling: Scaling) -> Vec<f64> {
    let mut scale = vec![0.0f64; dim];
    if scaling == Scaling::MaxAbs {
        for row in rows.iter() {
            for &(j, v) in row {
                if let Some(s) = scale.get_mut(j as usize) {
                    *s = s.max(v.abs());
                }
            }
        }
    }
    for s in &mut scale {
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    for row in rows.iter_mut() {
        for (j, v) in row.iter_mut() {
            if let Some(s) = scale.get(*j as usize) {
                *v /= s;
            }
        }
    }
    scale
}

fn unscale(weights: &[f64], scale: &[f64]) -> Vec<f64> {
    weights
        .iter()
        .enumerate()
        .map(|(j, w)| scale.get(j).map_or(*w, |s| w / s))
        .collect()
}

fn report(state: &SolverState, what: &str) {
    if state.converged {
        debug!(
            "{what}: converged after {} epochs, relative gap {:.3e}",
            state.epochs,
            state.relative_gap()
        );
    } else {
        warn!(
            "{what}: stopped at {} epochs with relative gap {:.3e}",
            state.epochs,
            state.relative_gap()
        );
    }
}

fn row_cmp(a: &[(u32, f64)], b: &[(u32, f64)]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let ord = x.0.cmp(&y.0).then_with(|| x.1.total_cmp(&y.1));
        if ord.is_ne() {
            return ord;
        }
    }
    a.len().cmp(&b.len())
}

fn difference(better: &[(u32, f64)], worse: &[(u32, f64)]) -> SparseRow {
    let mut out = Vec::with_capacity(better.len() + worse.len());
    let (mut i, mut j) = (0, 0);
    while i < better.len() || j < worse.len() {
        let take_left = j >= worse.len() || (i < better.len() && better[i].0 < worse[j].0);
        let take_right = i >= better.len() || (j < worse.len() && worse[j].0 < better[i].0);
        if take_left {
            out.push(better[i]);
            i += 1;
        } else if take_right {
            out.push((worse[j].0, -worse[j].1));
            j += 1;
        } else {
            let d = better[i].1 - worse[j].1;
            if d != 0.0 {
                out.push((better[i].0, d));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Pairwise ranking SVM. `reference_rank` follows sales-rank orientation:
/// smaller is better. Each unordered pair with distinct ranks contributes
/// one difference vector (better − worse, label +1); no bias is learned.
pub fn train_rank(items: &[(FeatureVector, f64)], config: &TrainConfig) -> Result<LinearModel> {
    config.validate()?;
    if items.len() < 2 {
        return Err(Error::invalid("ranking needs at least two items"));
    }
    for (x, rank) in items {
        check_finite(x)?;
        if !rank.is_finite() {
            return Err(Error::invalid("reference ranks must be finite"));
        }
    }
    let mut all_names: Vec<String> = items
        .iter()
        .flat_map(|(x, _)| x.names().iter().cloned())
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    all_names.sort();
    let space = FeatureSpace::new(all_names);

    let mut ranked: Vec<(SparseRow, f64)> = items.iter().map(|(x, r)| (space.project(x), *r)).collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| row_cmp(&a.0, &b.0)));

    let mut rows = Vec::new();
    for i in 0..ranked.len() {
        for j in i + 1..ranked.len() {
            if ranked[i].1 < ranked[j].1 {
                rows.push(difference(&ranked[i].0, &ranked[j].0));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::invalid("all reference ranks are tied"));
    }
    let y = vec![1.0; rows.len()];
    let cost = vec![config.c_pos; rows.len()];
    let scale = column_scale(&mut rows, space.len(), config.scaling);
    let state = solve(&rows, &y, &cost, space.len(), config.params());
    report(&state, "ranker");
    LinearModel::new(
        ModelKind::Ranker,
        space.names().to_vec(),
        unscale(&state.weights, &scale),
        0.0,
        *config,
        TrainingSummary::from(&state),
    )
}

/// Element-wise mean of review vectors; names missing from a vector count
/// as zero.
pub fn aggregate_item_features(reviews: &[FeatureVector]) -> Result<FeatureVector> {
    if reviews.is_empty() {
        return Err(Error::invalid("cannot aggregate an empty review list"));
    }
    let space = FeatureSpace::from_vectors(reviews);
    let mut sums = vec![0.0; space.len()];
    for v in reviews {
        for (name, value) in v.iter() {
            sums[space.get(name).expect("name collected above")] += value;
        }
    }
    let n = reviews.len() as f64;
    FeatureVector::from_pairs(space.names().iter().cloned().zip(sums.into_iter().map(|s| s / n)))
}

/// Restrict a classifier to the features a target domain can produce.
///
/// Language and behavioral features are shared by exact name. Consistency
/// features are shared by role; facet cells are kept only when the target
/// has exactly the same set of cells (same facet model shape), since facet
/// indices from different topic models do not correspond.
///
/// With `retrain` examples the model is retrained on the shared space;
/// otherwise weights outside it are set to zero.
pub fn transfer_model(
    source: &LinearModel,
    target_names: &HashSet<String>,
    retrain: Option<&[(FeatureVector, Label)]>,
    config: &TrainConfig,
) -> Result<LinearModel> {
    if source.kind() != ModelKind::Classifier {
        return Err(Error::invalid("only classifiers can be transferred"));
    }
    let source_cells: HashSet<&str> = source
        .names()
        .iter()
        .map(String::as_str)
        .filter(|n| names::is_facet_cell(n))
        .collect();
    let target_cells: HashSet<&str> = target_names
        .iter()
        .map(String::as_str)
        .filter(|n| names::is_facet_cell(n))
        .collect();
    let cells_match = source_cells == target_cells;
    let shared: Vec<String> = source
        .names()
        .iter()
        .filter(|n| target_names.contains(*n) && (cells_match || !names::is_facet_cell(n)))
        .cloned()
        .collect();
    if shared.is_empty() {
        return Err(Error::invalid("source and target share no features"));
    }

    let mut model = match retrain {
        Some(examples) => {
            let space = FeatureSpace::new(shared);
            let projected: Vec<(FeatureVector, Label)> = examples
                .iter()
                .map(|(x, l)| {
                    let kept = x.iter().filter(|(n, _)| space.get(n).is_some()).map(|(n, v)| (n.to_string(), v));
                    FeatureVector::from_pairs(kept).map(|v| (v, *l))
                })
                .collect::<Result<_>>()?;
            train_csvm_in(&space, &projected, config)?
        }
        None => {
            let keep: HashSet<&String> = shared.iter().collect();
            let weights = source
                .names()
                .iter()
                .zip(source.weights())
                .map(|(n, &w)| if keep.contains(n) { w } else { 0.0 })
                .collect();
            LinearModel::new(
                ModelKind::Classifier,
                source.names().to_vec(),
                weights,
                source.bias(),
                *source.config(),
                *source.summary(),
            )?
        }
    };
    model.meta = source.meta.clone();
    Ok(model)
}

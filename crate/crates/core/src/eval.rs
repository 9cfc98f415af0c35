//! Rank correlation, cross-validation, item ranking and the C− sweep.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use log::info;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Label};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::learn::{train_csvm, LinearModel, TrainConfig};

/// Pair counts behind a rank correlation.
///
/// `t_x` and `t_y` count pairs tied on exactly one series; `t_xy` counts
/// pairs tied on both. For τ_m, `t_zero` and `t_nonzero` split the x-ties
/// (including those also tied on y) by whether the tied value is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RankCorrelation {
    pub tau: f64,
    pub n_c: u64,
    pub n_d: u64,
    pub t_x: u64,
    pub t_y: u64,
    pub t_xy: u64,
    pub t_zero: u64,
    pub t_nonzero: u64,
    /// Denominator vanished; `tau` is reported as 0.
    pub degenerate: bool,
}

impl RankCorrelation {
    pub fn n_pairs(&self) -> u64 {
        self.n_c + self.n_d + self.t_x + self.t_y + self.t_xy
    }
}

fn check_series(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("series lengths differ ({} vs {})", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::invalid("rank correlation needs at least two observations"));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::invalid("rank correlation input contains NaN"));
    }
    Ok(())
}

fn tied_pairs(sorted: &[f64]) -> u64 {
    let mut total = 0;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Sorts `v` and returns the number of inversions (strictly decreasing
/// pairs).
fn merge_count(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], buf) + merge_count(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            swaps += (mid - i) as u64;
            buf.push(v[j]);
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Concordance counts in O(n log n).
fn pair_counts(x: &[f64], y: &[f64]) -> RankCorrelation {
    let n = x.len() as u64;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();

    let x_ties = tied_pairs(&xs);
    let mut both = 0;
    let mut start = 0;
    for i in 1..=xs.len() {
        if i == xs.len() || xs[i] != xs[start] {
            both += tied_pairs(&ys[start..i]);
            start = i;
        }
    }
    let n_d = merge_count(&mut ys, &mut Vec::with_capacity(x.len()));
    let y_ties = tied_pairs(&ys);
    let total = n * (n - 1) / 2;
    RankCorrelation {
        n_c: total + both - x_ties - y_ties - n_d,
        n_d,
        t_x: x_ties - both,
        t_y: y_ties - both,
        t_xy: both,
        ..Default::default()
    }
}

fn tau_b_of(c: &RankCorrelation) -> (f64, bool) {
    let a = (c.n_c + c.n_d + c.t_x) as f64;
    let b = (c.n_c + c.n_d + c.t_y) as f64;
    let denom = (a * b).sqrt();
    if denom == 0.0 {
        (0.0, true)
    } else {
        ((c.n_c as f64 - c.n_d as f64) / denom, false)
    }
}

/// Kendall's τ_b. Pairs tied on both series enter neither tie term of the
/// denominator.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<RankCorrelation> {
    check_series(x, y)?;
    let mut c = pair_counts(x, y);
    (c.tau, c.degenerate) = tau_b_of(&c);
    Ok(c)
}

/// τ_m: pairs tied on the candidate series `x` count as concordant unless
/// the tied value is zero; zero ties stay neutral but remain in the
/// denominator of all n(n−1)/2 pairs. Ties on `y` are neutral.
pub fn kendall_tau_m(x: &[f64], y: &[f64]) -> Result<RankCorrelation> {
    check_series(x, y)?;
    let mut c = pair_counts(x, y);
    let zeros = x.iter().filter(|&&v| v == 0.0).count() as u64;
    c.t_zero = zeros * zeros.saturating_sub(1) / 2;
    c.t_nonzero = c.t_x + c.t_xy - c.t_zero;
    let total = c.n_pairs() as f64;
    c.tau = (c.n_c as f64 + c.t_nonzero as f64 - c.n_d as f64) / total;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub mean: f64,
    /// Sample standard deviation across folds.
    pub stdev: f64,
    pub folds: Vec<f64>,
}

/// Fold index of every example: each class is shuffled with `seed` and dealt
/// round-robin so that class proportions match across folds.
pub fn stratified_folds(labels: &[Label], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; labels.len()];
    let mut next = 0;
    for class in [Label::Credible, Label::NonCredible] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::invalid(format!(
                "{} {} examples cannot fill {k} folds",
                members.len(),
                class.as_str()
            )));
        }
        members.shuffle(&mut rng);
        for i in members {
            fold[i] = next % k;
            next += 1;
        }
    }
    Ok(fold)
}

pub fn cross_validate(examples: &[(FeatureVector, Label)], k: usize, config: &TrainConfig) -> Result<CvReport> {
    let labels: Vec<Label> = examples.iter().map(|(_, l)| *l).collect();
    let fold = stratified_folds(&labels, k, config.seed)?;
    let folds: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|f| {
            let train: Vec<(FeatureVector, Label)> = examples
                .iter()
                .zip(&fold)
                .filter(|(_, &g)| g != f)
                .map(|(e, _)| e.clone())
                .collect();
            let model = train_csvm(&train, config)?;
            let test: Vec<&(FeatureVector, Label)> = examples.iter().zip(&fold).filter(|(_, &g)| g == f).map(|(e, _)| e).collect();
            let correct = test.iter().filter(|(x, y)| model.predict(x).label == *y).count();
            Ok(correct as f64 / test.len() as f64)
        })
        .collect::<Result<_>>()?;
    let mean = folds.iter().sum::<f64>() / k as f64;
    let stdev = (folds.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt();
    info!("cross-validation: {k} folds, accuracy {mean:.4} ± {stdev:.4}");
    Ok(CvReport { mean, stdev, folds })
}

/// Out-of-fold labels: each example is predicted by the model trained on
/// the folds that exclude it.
pub fn cross_predict(examples: &[(FeatureVector, Label)], k: usize, config: &TrainConfig) -> Result<Vec<Label>> {
    let labels: Vec<Label> = examples.iter().map(|(_, l)| *l).collect();
    let fold = stratified_folds(&labels, k, config.seed)?;
    let per_fold: Vec<Vec<(usize, Label)>> = (0..k)
        .into_par_iter()
        .map(|f| {
            let train: Vec<(FeatureVector, Label)> = examples
                .iter()
                .zip(&fold)
                .filter(|(_, &g)| g != f)
                .map(|(e, _)| e.clone())
                .collect();
            let model = train_csvm(&train, config)?;
            Ok((0..examples.len())
                .filter(|&i| fold[i] == f)
                .map(|i| (i, model.predict(&examples[i].0).label))
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut out = labels;
    for (i, label) in per_fold.into_iter().flatten() {
        out[i] = label;
    }
    Ok(out)
}

/// Item scores keyed by item id. Higher is better.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ItemRanking {
    pub scores: BTreeMap<String, f64>,
    /// Reviews retained per item.
    pub retained: BTreeMap<String, usize>,
}

/// Mean rating over the reviews whose entry in `keep` is credible; items
/// with nothing left score 0.
pub fn filtered_ranking(corpus: &Corpus, keep: &[Label]) -> Result<ItemRanking> {
    if corpus.is_empty() {
        return Err(Error::invalid("cannot rank items of an empty corpus"));
    }
    if keep.len() != corpus.len() {
        return Err(Error::invalid("one prediction per review is required"));
    }
    let mut ranking = ItemRanking::default();
    for (item, positions) in corpus.items() {
        let mut sum = 0.0;
        let mut n = 0;
        for &p in positions {
            if keep[p] == Label::Credible {
                sum += f64::from(corpus.reviews()[p].rating);
                n += 1;
            }
        }
        ranking.scores.insert(item.clone(), if n == 0 { 0.0 } else { sum / n as f64 });
        ranking.retained.insert(item.clone(), n);
    }
    Ok(ranking)
}

pub fn mean_rating_ranking(corpus: &Corpus) -> Result<ItemRanking> {
    filtered_ranking(corpus, &vec![Label::Credible; corpus.len()])
}

/// Rank items after dropping the reviews `classifier` flags. `vectors` holds
/// one feature vector per review, in corpus order.
pub fn rank_items(corpus: &Corpus, classifier: &LinearModel, vectors: &[FeatureVector]) -> Result<ItemRanking> {
    let labels: Vec<Label> = vectors.par_iter().map(|v| classifier.predict(v).label).collect();
    filtered_ranking(corpus, &labels)
}

/// Reference ranks (smaller is better) turned into aligned score series.
fn aligned(ranking: &ItemRanking, reference: &BTreeMap<String, f64>, keep: impl Fn(&str) -> bool) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (item, &score) in &ranking.scores {
        if !keep(item) {
            continue;
        }
        let rank = reference
            .get(item)
            .ok_or_else(|| Error::invalid(format!("item \"{item}\" has no reference rank")))?;
        x.push(score);
        y.push(-rank);
    }
    Ok((x, y))
}

/// τ_b and τ_m of `ranking` against reference ranks.
pub fn correlate(ranking: &ItemRanking, reference: &BTreeMap<String, f64>) -> Result<(RankCorrelation, RankCorrelation)> {
    let (x, y) = aligned(ranking, reference, |_| true)?;
    Ok((kendall_tau_b(&x, &y)?, kendall_tau_m(&x, &y)?))
}

/// Held-out items scored during the C− sweep.
#[derive(Debug, Clone, Copy)]
pub struct Validation<'a> {
    pub corpus: &'a Corpus,
    pub vectors: &'a [FeatureVector],
    pub reference: &'a BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub c_neg: f64,
    pub tau_m: f64,
    pub frac_non_credible: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub best_c_neg: f64,
    pub curve: Vec<SweepPoint>,
}

/// Retrain at every C− on the grid, rank the validation items and score
/// them with τ_m. The best C− is the smallest among those reaching the
/// maximum τ_m.
pub fn sweep_cneg(
    train: &[(FeatureVector, Label)],
    validation: Validation<'_>,
    grid: &[f64],
    config: &TrainConfig,
) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::Config("C- grid is empty".into()));
    }
    if validation.vectors.len() != validation.corpus.len() {
        return Err(Error::invalid("one validation vector per review is required"));
    }
    let curve: Vec<SweepPoint> = grid
        .par_iter()
        .map(|&c_neg| {
            let model = train_csvm(train, &TrainConfig { c_neg, ..*config })?;
            let labels: Vec<Label> = validation.vectors.iter().map(|v| model.predict(v).label).collect();
            let flagged = labels.iter().filter(|&&l| l == Label::NonCredible).count();
            let ranking = filtered_ranking(validation.corpus, &labels)?;
            let (_, tau_m) = correlate(&ranking, validation.reference)?;
            info!("sweep: C-={c_neg} tau_m={:.4} flagged={flagged}", tau_m.tau);
            Ok(SweepPoint {
                c_neg,
                tau_m: tau_m.tau,
                frac_non_credible: flagged as f64 / labels.len() as f64,
            })
        })
        .collect::<Result<_>>()?;
    let best = curve
        .iter()
        .max_by(|a, b| a.tau_m.total_cmp(&b.tau_m).then(b.c_neg.total_cmp(&a.c_neg)))
        .expect("grid is non-empty");
    Ok(SweepResult {
        best_c_neg: best.c_neg,
        curve,
    })
}

/// Parse `lo:hi:step` into an inclusive grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(Error::Config(format!("grid \"{spec}\" is not lo:hi:step")));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("grid bound \"{s}\" is not a number")))
    };
    let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Config(format!("grid \"{spec}\" needs lo <= hi and step > 0")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

pub fn write_curve_csv(path: &Path, curve: &[SweepPoint]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "c_neg,tau_m,frac_non_credible")?;
        for p in curve {
            writeln!(out, "{},{},{}", p.c_neg, p.tau_m, p.frac_non_credible)?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Review-count thresholds of the long-tail breakdown; `None` is unbounded.
pub const LONG_TAIL_THRESHOLDS: [Option<usize>; 7] = [Some(5), Some(10), Some(20), Some(30), Some(40), Some(50), None];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongTailRow {
    pub max_reviews: Option<usize>,
    pub n_items: usize,
    /// Absent when fewer than two items fall under the threshold.
    pub tau_m: Option<f64>,
}

/// τ_m restricted to items with at most `threshold` reviews.
pub fn long_tail_report(
    ranking: &ItemRanking,
    reference: &BTreeMap<String, f64>,
    review_counts: &BTreeMap<String, usize>,
    thresholds: &[Option<usize>],
) -> Result<Vec<LongTailRow>> {
    thresholds
        .iter()
        .map(|&threshold| {
            let within = |item: &str| {
                let n = review_counts.get(item).copied().unwrap_or(0);
                threshold.is_none_or(|t| n <= t)
            };
            let (x, y) = aligned(ranking, reference, within)?;
            let tau_m = if x.len() < 2 { None } else { Some(kendall_tau_m(&x, &y)?.tau) };
            Ok(LongTailRow {
                max_reviews: threshold,
                n_items: x.len(),
                tau_m,
            })
        })
        .collect()
}

pub fn review_counts(corpus: &Corpus) -> BTreeMap<String, usize> {
    corpus.items().iter().map(|(k, v)| (k.clone(), v.len())).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub accuracy: Option<f64>,
    pub accuracy_stdev: Option<f64>,
    pub fold_accuracies: Vec<f64>,
    pub tau_b: Option<f64>,
    pub tau_m: Option<f64>,
    pub long_tail: Vec<LongTailRow>,
    pub sweep: Vec<SweepPoint>,
}

impl EvaluationReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Review;

    #[test]
    fn tau_b_examples() {
        let t = kendall_tau_b(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t.tau, 1.0);
        let t = kendall_tau_b(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(t.tau, -1.0);
        let t = kendall_tau_b(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!((t.n_c, t.n_d), (5, 1));
        assert!((t.tau - 4.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn tau_b_ties_and_errors() {
        let t = kendall_tau_b(&[1.0, 1.0, 2.0], &[1.0, 1.0, 3.0]).unwrap();
        assert_eq!((t.n_c, t.n_d, t.t_x, t.t_y, t.t_xy), (2, 0, 0, 0, 1));
        assert_eq!(t.tau, 1.0);
        let t = kendall_tau_b(&[2.0, 2.0], &[1.0, 5.0]).unwrap();
        assert!(t.degenerate);
        assert_eq!(t.tau, 0.0);
        assert!(kendall_tau_b(&[1.0], &[1.0]).is_err());
        assert!(kendall_tau_b(&[1.0, 2.0], &[1.0]).is_err());
        assert!(kendall_tau_b(&[1.0, f64::NAN], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn jointly_tied_series() {
        let t = kendall_tau_b(&[1.0, 1.0, 1.0, 2.0], &[4.0, 4.0, 4.0, 3.0]).unwrap();
        assert_eq!((t.n_c, t.n_d, t.t_x, t.t_y, t.t_xy), (0, 3, 0, 0, 3));
        assert_eq!(t.tau, -1.0);
        let t = kendall_tau_b(&[7.0; 5], &[7.0; 5]).unwrap();
        assert_eq!((t.n_c, t.t_xy), (0, 10));
        assert!(t.degenerate);
    }

    #[test]
    fn tau_m_examples() {
        let t = kendall_tau_m(&[5.0, 5.0, 5.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t.t_nonzero, 3);
        assert_eq!(t.tau, 1.0);
        let t = kendall_tau_m(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        assert_eq!((t.t_zero, t.tau), (1, 0.0));
        let x = [3.0, 1.0, 4.0, 2.0];
        assert_eq!(kendall_tau_m(&x, &x).unwrap().tau, 1.0);
        // One zero tie, one non-zero tie and four concordant pairs out of 6.
        let t = kendall_tau_m(&[0.0, 0.0, 2.0, 2.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((t.n_c, t.t_zero, t.t_nonzero), (4, 1, 1));
        assert!((t.tau - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn folds_are_stratified() {
        let labels: Vec<Label> = (0..30)
            .map(|i| if i % 3 == 0 { Label::NonCredible } else { Label::Credible })
            .collect();
        let fold = stratified_folds(&labels, 5, 7).unwrap();
        for f in 0..5 {
            let neg = (0..30).filter(|&i| fold[i] == f && labels[i] == Label::NonCredible).count();
            let all = fold.iter().filter(|&&g| g == f).count();
            assert_eq!((neg, all), (2, 6));
        }
        assert_eq!(fold, stratified_folds(&labels, 5, 7).unwrap());
        assert!(stratified_folds(&labels[..4], 5, 7).is_err());
        assert!(stratified_folds(&labels, 1, 7).is_err());
    }

    fn fv(x: f64) -> FeatureVector {
        FeatureVector::from_pairs([("x".to_string(), x)]).unwrap()
    }

    #[test]
    fn separable_cross_validation() {
        let examples: Vec<(FeatureVector, Label)> = (0..40)
            .map(|i| {
                let label = if i % 2 == 0 { Label::Credible } else { Label::NonCredible };
                (fv(label.sign() * (1.0 + i as f64 / 40.0)), label)
            })
            .collect();
        let report = cross_validate(&examples, 10, &TrainConfig::default()).unwrap();
        assert_eq!(report.mean, 1.0);
        assert_eq!(report.stdev, 0.0);
        assert_eq!(report.folds.len(), 10);
    }

    fn corpus(ratings: &[(&str, u8)]) -> Corpus {
        let reviews = ratings
            .iter()
            .enumerate()
            .map(|(i, (item, rating))| Review {
                review_id: format!("r{i}"),
                user_id: format!("u{i}"),
                item_id: item.to_string(),
                timestamp: i as f64,
                rating: *rating,
                text: String::new(),
                label: None,
                helpful_votes: None,
                user_meta: Default::default(),
            })
            .collect();
        Corpus::new(reviews, 5).unwrap()
    }

    #[test]
    fn filtering() {
        let c = corpus(&[("a", 2), ("a", 5), ("b", 4)]);
        let base = mean_rating_ranking(&c).unwrap();
        assert_eq!(base.scores["a"], 3.5);
        let none = filtered_ranking(&c, &[Label::NonCredible; 3]).unwrap();
        assert!(none.scores.values().all(|&s| s == 0.0));
        let some = filtered_ranking(&c, &[Label::Credible, Label::NonCredible, Label::Credible]).unwrap();
        assert_eq!(some.scores["a"], 2.0);
        assert_eq!(some.retained["a"], 1);
        assert!(filtered_ranking(&c, &[Label::Credible]).is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0:150:5").unwrap();
        assert_eq!(g.len(), 31);
        assert_eq!((g[0], g[30]), (0.0, 150.0));
        assert_eq!(parse_grid("1:1:1").unwrap(), vec![1.0]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn long_tail_strata() {
        let ranking = ItemRanking {
            scores: [("a", 3.0), ("b", 2.0), ("c", 1.0)].iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            retained: BTreeMap::new(),
        };
        let reference: BTreeMap<String, f64> = [("a", 1.0), ("b", 2.0), ("c", 3.0)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let counts: BTreeMap<String, usize> = [("a", 2), ("b", 3), ("c", 60)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let rows = long_tail_report(&ranking, &reference, &counts, &LONG_TAIL_THRESHOLDS).unwrap();
        assert_eq!(rows.len(), 7);
        assert_eq!((rows[0].n_items, rows[0].tau_m), (2, Some(1.0)));
        assert_eq!((rows[6].n_items, rows[6].tau_m), (3, Some(1.0)));

        let small: BTreeMap<String, usize> = counts.keys().map(|k| (k.clone(), 1)).collect();
        let rows = long_tail_report(&ranking, &reference, &small, &LONG_TAIL_THRESHOLDS).unwrap();
        assert!(rows.iter().all(|r| r.tau_m == rows[6].tau_m));

        let rows = long_tail_report(&ranking, &reference, &counts, &[Some(0)]).unwrap();
        assert_eq!(rows[0].tau_m, None);
    }

    #[test]
    fn single_point_sweep() {
        let c = corpus(&[("a", 5), ("a", 4), ("b", 1), ("b", 2)]);
        let vectors: Vec<FeatureVector> = c.reviews().iter().map(|r| fv(f64::from(r.rating) - 3.0)).collect();
        let train: Vec<(FeatureVector, Label)> = vec![(fv(1.0), Label::Credible), (fv(-1.0), Label::NonCredible)];
        let reference: BTreeMap<String, f64> = [("a".to_string(), 1.0), ("b".to_string(), 2.0)].into();
        let v = Validation { corpus: &c, vectors: &vectors, reference: &reference };
        let out = sweep_cneg(&train, v, &[7.0], &TrainConfig::default()).unwrap();
        assert_eq!(out.best_c_neg, 7.0);
        assert_eq!(out.curve.len(), 1);
        assert!(sweep_cneg(&train, v, &[], &TrainConfig::default()).is_err());
    }
}

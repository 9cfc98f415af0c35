//! Per-review feature blocks: language (F^L), consistency (F^T) and
//! behavioral (F^B).

mod export;
mod stats;
mod vector;

use serde::{Deserialize, Serialize};

use crate::corpus::{Review, TokenSeq, Vocabulary};
use crate::error::{Error, Result};
use crate::jst::{ItemFacetProfile, ReviewFacetProfile};

pub use export::{names_path, read_names, read_sparse, write_names, write_sparse, SparseRow};
pub use stats::RatingStats;
pub use vector::{assemble, Block, BlockSpan, FeatureSpace, FeatureVector};

/// Feature names of the consistency block, in block order.
pub mod names {
    pub const BURSTINESS: &str = "cons:burstiness";
    pub const ITEM_DIVERGENCE: &str = "cons:item_jsd";

    pub fn facet_cell(k: usize, l: usize) -> String {
        format!("cons:facet_k{k}_l{l}")
    }

    pub fn rating_deviation(l: usize) -> String {
        format!("cons:rating_dev_l{l}")
    }

    pub fn inferred_rating(l: usize) -> String {
        format!("cons:inferred_rating_l{l}")
    }

    pub fn is_facet_cell(name: &str) -> bool {
        name.starts_with("cons:facet_k")
    }

    pub fn language(term: &str) -> String {
        format!("lang:{term}")
    }

    pub const ACTIVITY_MINUS: [&str; 12] = [
        "beh:user_posts",
        "beh:review_length",
        "beh:user_mean_dev",
        "beh:user_median_dev",
        "beh:user_rating_mean",
        "beh:user_rating_variance",
        "beh:user_rating_skewness",
        "beh:item_mean_dev",
        "beh:item_median_dev",
        "beh:item_rating_mean",
        "beh:item_rating_variance",
        "beh:item_rating_skewness",
    ];

    pub const ACTIVITY_PLUS_EXTRA: [&str; 4] = [
        "beh:friends_count",
        "beh:checked_in",
        "beh:elite",
        "beh:helpful_votes",
    ];

    pub fn consistency(k: usize, l: usize) -> Vec<String> {
        let mut out = vec![BURSTINESS.to_string(), ITEM_DIVERGENCE.to_string()];
        for kk in 0..k {
            for ll in 0..l {
                out.push(facet_cell(kk, ll));
            }
        }
        out.extend((0..l).map(rating_deviation));
        out.extend((0..l).map(inferred_rating));
        out
    }

    pub fn behavioral(tier: super::ActivityTier) -> Vec<String> {
        let mut out: Vec<String> = ACTIVITY_MINUS.iter().map(|s| s.to_string()).collect();
        if tier == super::ActivityTier::Plus {
            out.extend(ACTIVITY_PLUS_EXTRA.iter().map(|s| s.to_string()));
        }
        out
    }
}

/// Behavioral tiers: `Minus` uses only the review tuple, `Plus` adds
/// community metadata.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityTier {
    #[default]
    Minus,
    Plus,
}

impl std::str::FromStr for ActivityTier {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "minus" | "activity_minus" => Ok(ActivityTier::Minus),
            "plus" | "activity_plus" => Ok(ActivityTier::Plus),
            other => Err(format!("unknown tier \"{other}\" (expected minus or plus)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BurstMode {
    /// Sum of 1 / (1 + e^(t_i - t_j)): later peers weigh close to 1.
    #[default]
    Signed,
    /// Sum of 1 / (1 + e^|t_i - t_j|): only proximity matters.
    Symmetric,
}

/// Length-normalized presence of every vocabulary unigram and bigram in the
/// review, in vocabulary order. The normalizer is the pre-stopword length.
pub fn language_features(tokens: &TokenSeq, vocab: &Vocabulary) -> FeatureVector {
    let present = if tokens.raw_length == 0 {
        Vec::new()
    } else {
        vocab.present_terms(tokens)
    };
    let weight = 1.0 / tokens.raw_length.max(1) as f64;
    let names = present.iter().map(|&i| names::language(&vocab.entries()[i])).collect();
    let values = vec![weight; present.len()];
    FeatureVector::block(Block::Language, names, values).expect("vocabulary entries are unique")
}

/// Map a star rating onto (positive, negative) mass.
pub fn rating_to_distribution(rating: u8, max_rating: u8, labels: usize) -> Result<Vec<f64>> {
    if labels != 2 {
        return Err(Error::Config(format!("rating distribution needs L = 2, got L = {labels}")));
    }
    if max_rating < 2 || rating < 1 || rating > max_rating {
        return Err(Error::invalid(format!("rating {rating} outside 1..={max_rating}")));
    }
    let positive = f64::from(rating - 1) / f64::from(max_rating - 1);
    Ok(vec![positive, 1.0 - positive])
}

pub fn rating_deviation(stated: &[f64], inferred: &[f64]) -> Result<Vec<f64>> {
    if stated.len() != inferred.len() {
        return Err(Error::invalid(format!(
            "rating distributions differ in length ({} vs {})",
            stated.len(),
            inferred.len()
        )));
    }
    Ok(stated.iter().zip(inferred).map(|(a, b)| (a - b).abs()).collect())
}

/// Temporal burstiness of a review posted at `t_i` among `item_timestamps`
/// (days). One occurrence equal to `t_i` is skipped as the review itself.
pub fn burstiness(t_i: f64, item_timestamps: &[f64], mode: BurstMode) -> f64 {
    let mut skipped_self = false;
    let mut total = 0.0;
    for &t_j in item_timestamps {
        if !skipped_self && t_j == t_i {
            skipped_self = true;
            continue;
        }
        total += match mode {
            BurstMode::Signed => decay(t_i - t_j),
            BurstMode::Symmetric => decay((t_i - t_j).abs()),
        };
    }
    total
}

/// `1 / (1 + e^delta)`. Positive deltas are taken as the complement of the
/// mirrored term so that `decay(d) + decay(-d) == 1` holds bit for bit.
fn decay(delta: f64) -> f64 {
    if delta > 0.0 {
        1.0 - 1.0 / (1.0 + (-delta).exp())
    } else {
        1.0 / (1.0 + delta.exp())
    }
}

/// Jensen-Shannon divergence in bits.
pub fn js_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::invalid(format!(
            "distributions differ in length ({} vs {})",
            p.len(),
            q.len()
        )));
    }
    for (name, d) in [("P", p), ("Q", q)] {
        if d.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::invalid(format!("{name} has negative or non-finite entries")));
        }
        let total: f64 = d.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!("{name} sums to {total}, not 1")));
        }
    }
    let kl_to_mid = |x: f64, m: f64| if x > 0.0 { x * (x / m).log2() } else { 0.0 };
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let m = 0.5 * (a + b);
        total += 0.5 * kl_to_mid(a, m) + 0.5 * kl_to_mid(b, m);
    }
    Ok(total.max(0.0))
}

/// Inputs to the consistency block for one review.
#[derive(Debug, Clone, Copy)]
pub struct ConsistencyInputs<'a> {
    pub profile: &'a ReviewFacetProfile,
    pub item_profile: &'a ItemFacetProfile,
    /// Distribution implied by the stated rating.
    pub stated_rating: &'a [f64],
    pub burstiness: f64,
    /// When false the item divergence slot is fixed at 0.
    pub item_divergence: bool,
}

/// `[burstiness, JSD(review facets || item facets), facet cells (K*L),
/// |stated - inferred| (L), inferred rating (L)]`.
pub fn consistency_features(inputs: ConsistencyInputs<'_>) -> Result<FeatureVector> {
    let profile = inputs.profile;
    let (k, l) = (profile.k, profile.l);
    if (inputs.item_profile.k, inputs.item_profile.l) != (k, l) {
        return Err(Error::invalid("item profile shape differs from review profile"));
    }
    let divergence = if inputs.item_divergence {
        js_divergence(&profile.phi_prime, &inputs.item_profile.phi_item)?
    } else {
        0.0
    };
    let deviation = rating_deviation(inputs.stated_rating, &profile.pi_prime)?;
    let mut values = Vec::with_capacity(2 + k * l + 2 * l);
    values.push(inputs.burstiness);
    values.push(divergence);
    values.extend_from_slice(&profile.phi_prime);
    values.extend(deviation);
    values.extend_from_slice(&profile.pi_prime);
    FeatureVector::block(Block::Consistency, names::consistency(k, l), values)
}

/// Rating behavior of the review's author.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserContext {
    pub post_count: usize,
    pub ratings: RatingStats,
}

/// Rating pattern and timeline of the reviewed item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemContext {
    pub ratings: RatingStats,
    /// Sorted ascending, in days.
    pub timestamps: Vec<f64>,
    pub profile: Option<ItemFacetProfile>,
}

impl ItemContext {
    pub fn new(ratings: &[f64], mut timestamps: Vec<f64>, profile: Option<ItemFacetProfile>) -> Self {
        timestamps.sort_by(f64::total_cmp);
        Self {
            ratings: RatingStats::from_ratings(ratings),
            timestamps,
            profile,
        }
    }
}

pub fn behavioral_features(
    review: &Review,
    raw_length: usize,
    user: &UserContext,
    item: &ItemContext,
    tier: ActivityTier,
) -> Result<FeatureVector> {
    let r = f64::from(review.rating);
    let u = &user.ratings;
    let i = &item.ratings;
    let mut values = vec![
        user.post_count as f64,
        raw_length as f64,
        (r - u.mean).abs(),
        (r - u.median).abs(),
        u.mean,
        u.variance,
        u.skewness,
        (r - i.mean).abs(),
        (r - i.median).abs(),
        i.mean,
        i.variance,
        i.skewness,
    ];
    if tier == ActivityTier::Plus {
        let meta = &review.user_meta;
        let friends = meta.friends_count.ok_or_else(|| Error::MissingField("friends_count".into()))?;
        let checked_in = meta.checked_in.ok_or_else(|| Error::MissingField("checked_in".into()))?;
        let elite = meta.elite.ok_or_else(|| Error::MissingField("elite".into()))?;
        let helpful = review.helpful_votes.ok_or_else(|| Error::MissingField("helpful_votes".into()))?;
        values.extend([
            f64::from(friends),
            f64::from(u8::from(checked_in)),
            f64::from(u8::from(elite)),
            f64::from(helpful),
        ]);
    }
    FeatureVector::block(Block::Behavioral, names::behavioral(tier), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Tokenizer, UserMeta, VocabConfig};

    #[test]
    fn language_presence_normalized_by_raw_length() {
        let tok = Tokenizer::default();
        let doc = tok.tokenize("good food");
        let vocab = Vocabulary::build(std::slice::from_ref(&doc), VocabConfig { min_df: 1, max_vocab: 10 }).unwrap();
        let f = language_features(&doc, &vocab);
        assert_eq!(f.len(), 3);
        assert!(f.values().iter().all(|&v| v == 0.5));
        assert_eq!(f.get("lang:good_food"), Some(0.5));

        let repeated = tok.tokenize("good good good");
        assert_eq!(language_features(&repeated, &vocab).get("lang:good"), Some(1.0 / 3.0));

        let empty = language_features(&tok.tokenize(""), &vocab);
        assert!(empty.is_empty());
    }

    #[test]
    fn rating_distribution_bounds() {
        assert_eq!(rating_to_distribution(5, 5, 2).unwrap(), vec![1.0, 0.0]);
        assert_eq!(rating_to_distribution(1, 5, 2).unwrap(), vec![0.0, 1.0]);
        assert_eq!(rating_to_distribution(3, 5, 2).unwrap(), vec![0.5, 0.5]);
        assert!(rating_to_distribution(6, 5, 2).is_err());
        assert!(rating_to_distribution(0, 5, 2).is_err());
        assert!(rating_to_distribution(3, 5, 3).is_err());
    }

    #[test]
    fn deviation_cases() {
        assert_eq!(rating_deviation(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(rating_deviation(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), vec![1.0, 1.0]);
        let d = rating_deviation(&[0.8, 0.2], &[0.3, 0.7]).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-15 && (d[1] - 0.5).abs() < 1e-15);
        assert!(rating_deviation(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn burstiness_cases() {
        assert_eq!(burstiness(3.0, &[3.0], BurstMode::Signed), 0.0);
        assert_eq!(burstiness(3.0, &[3.0, 3.0], BurstMode::Signed), 0.5);
        let b = burstiness(0.0, &[0.0, 1.0], BurstMode::Signed);
        assert!((b - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        assert!((b - 0.731_058_578_630_004_9).abs() < 1e-12);
        let late = burstiness(1.0, &[0.0, 1.0], BurstMode::Signed);
        assert!((b + late - 1.0).abs() < 1e-15);
        assert!((burstiness(1.0, &[0.0, 1.0], BurstMode::Symmetric) - late).abs() < 1e-15);
        assert!((burstiness(0.0, &[0.0, 1.0], BurstMode::Symmetric) - late).abs() < 1e-15);
    }

    #[test]
    fn js_divergence_cases() {
        assert_eq!(js_divergence(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 0.0);
        assert!((js_divergence(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        // Value from an independent 50-digit evaluation.
        let v = js_divergence(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert!((v - 0.311_278_124_459_132_8).abs() < 1e-12, "{v}");
        assert!(js_divergence(&[0.5, 0.5], &[1.0]).is_err());
        assert!(js_divergence(&[0.5, 0.6], &[0.5, 0.5]).is_err());
        assert!(js_divergence(&[1.5, -0.5], &[0.5, 0.5]).is_err());
    }

    fn review(rating: u8) -> Review {
        Review {
            review_id: "r".into(),
            user_id: "u".into(),
            item_id: "i".into(),
            timestamp: 0.0,
            rating,
            text: String::new(),
            label: None,
            helpful_votes: None,
            user_meta: UserMeta::default(),
        }
    }

    #[test]
    fn behavioral_singleton() {
        let user = UserContext {
            post_count: 1,
            ratings: RatingStats::from_ratings(&[5.0]),
        };
        let item = ItemContext::new(&[5.0], vec![0.0], None);
        let f = behavioral_features(&review(5), 7, &user, &item, ActivityTier::Minus).unwrap();
        assert_eq!(f.len(), 12);
        assert_eq!(f.values(), &[1.0, 7.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0]);
    }

    #[test]
    fn behavioral_user_moments() {
        let user = UserContext {
            post_count: 3,
            ratings: RatingStats::from_ratings(&[1.0, 3.0, 5.0]),
        };
        let item = ItemContext::new(&[5.0], vec![0.0], None);
        let f = behavioral_features(&review(5), 4, &user, &item, ActivityTier::Minus).unwrap();
        assert_eq!(f.get("beh:user_mean_dev"), Some(2.0));
        assert_eq!(f.get("beh:user_median_dev"), Some(2.0));
        assert_eq!(f.get("beh:user_rating_mean"), Some(3.0));
        assert!((f.get("beh:user_rating_variance").unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.get("beh:user_rating_skewness"), Some(0.0));
    }

    #[test]
    fn activity_plus_requires_metadata() {
        let user = UserContext {
            post_count: 1,
            ratings: RatingStats::from_ratings(&[4.0]),
        };
        let item = ItemContext::new(&[4.0], vec![0.0], None);
        let err = behavioral_features(&review(4), 1, &user, &item, ActivityTier::Plus).unwrap_err();
        assert_eq!(err.to_string(), "friends_count required");

        let mut r = review(4);
        r.user_meta = UserMeta {
            friends_count: Some(12),
            checked_in: Some(true),
            elite: Some(false),
        };
        r.helpful_votes = Some(3);
        let f = behavioral_features(&r, 1, &user, &item, ActivityTier::Plus).unwrap();
        assert_eq!(f.len(), 16);
        assert_eq!(&f.values()[12..], &[12.0, 1.0, 0.0, 3.0]);
    }

    #[test]
    fn consistency_block_layout() {
        for (k, l) in [(1, 1), (2, 2), (20, 2), (50, 2)] {
            assert_eq!(names::consistency(k, l).len(), 2 + k * l + 2 * l);
        }
    }
}

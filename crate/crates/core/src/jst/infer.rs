use serde::{Deserialize, Serialize};

use super::JstModel;
use crate::corpus::TokenSeq;
use crate::error::{Error, Result};

/// How a token contributes to the inferred rating distribution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatingAggregation {
    /// One contribution per token, at the jointly most likely (facet, label).
    #[default]
    JointArgmax,
    /// One contribution per token and facet, at that facet's best label.
    PerFacet,
}

/// Facet-label and rating distributions read off a single review.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewFacetProfile {
    pub k: usize,
    pub l: usize,
    /// K x L, row-major, L1-normalized.
    pub phi_prime: Vec<f64>,
    /// Length L, L1-normalized.
    pub pi_prime: Vec<f64>,
    pub raw_phi_prime: Vec<f64>,
    pub raw_pi_prime: Vec<f64>,
    /// Set when no token was in vocabulary; the distributions are uniform.
    pub degenerate: bool,
}

impl ReviewFacetProfile {
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.phi_prime[k * self.l + l]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemFacetProfile {
    pub k: usize,
    pub l: usize,
    /// K x L, row-major, L1-normalized.
    pub phi_item: Vec<f64>,
    pub n_reviews: usize,
}

impl ItemFacetProfile {
    /// Sum the raw per-review aggregates, then normalize.
    pub fn from_profiles<'a>(profiles: impl IntoIterator<Item = &'a ReviewFacetProfile>) -> Result<Self> {
        let mut iter = profiles.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::invalid("item facet profile needs at least one review"))?;
        let (k, l) = (first.k, first.l);
        let mut sum = first.raw_phi_prime.clone();
        let mut n_reviews = 1;
        for p in iter {
            if (p.k, p.l) != (k, l) {
                return Err(Error::invalid("review profiles have mismatched shapes"));
            }
            for (s, x) in sum.iter_mut().zip(&p.raw_phi_prime) {
                *s += x;
            }
            n_reviews += 1;
        }
        Ok(Self {
            k,
            l,
            phi_item: normalize_or_uniform(&sum).0,
            n_reviews,
        })
    }
}

fn normalize_or_uniform(raw: &[f64]) -> (Vec<f64>, bool) {
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        (raw.iter().map(|x| x / total).collect(), false)
    } else {
        (vec![1.0 / raw.len() as f64; raw.len()], true)
    }
}

impl JstModel {
    /// Label maximizing `phi[k][.][w]`; ties go to the lower label.
    fn best_label(&self, k: usize, w: usize) -> usize {
        let mut best = 0;
        for l in 1..self.l() {
            if self.phi(k, l, w) > self.phi(k, best, w) {
                best = l;
            }
        }
        best
    }

    /// (facet, label) maximizing `phi[.][.][w]`, scanning facets then labels.
    fn best_cell(&self, w: usize) -> (usize, usize) {
        let mut best = (0, 0);
        for k in 0..self.k() {
            for l in 0..self.l() {
                if self.phi(k, l, w) > self.phi(best.0, best.1, w) {
                    best = (k, l);
                }
            }
        }
        best
    }

    pub fn infer_review_facets(&self, review: &TokenSeq, mode: RatingAggregation) -> ReviewFacetProfile {
        let (k_n, l_n) = (self.k(), self.l());
        let mut raw_phi = vec![0.0; k_n * l_n];
        let mut raw_pi = vec![0.0; l_n];
        for token in &review.tokens {
            let Some(w) = self.word_id(token) else { continue };
            for k in 0..k_n {
                let l = self.best_label(k, w);
                let p = self.phi(k, l, w);
                raw_phi[k * l_n + l] += p;
                if mode == RatingAggregation::PerFacet {
                    raw_pi[l] += p;
                }
            }
            if mode == RatingAggregation::JointArgmax {
                let (k, l) = self.best_cell(w);
                raw_pi[l] += self.phi(k, l, w);
            }
        }
        let (phi_prime, degenerate) = normalize_or_uniform(&raw_phi);
        let (pi_prime, _) = normalize_or_uniform(&raw_pi);
        ReviewFacetProfile {
            k: k_n,
            l: l_n,
            phi_prime,
            pi_prime,
            raw_phi_prime: raw_phi,
            raw_pi_prime: raw_pi,
            degenerate,
        }
    }

    pub fn item_facet_profile(&self, reviews: &[TokenSeq], mode: RatingAggregation) -> Result<ItemFacetProfile> {
        let profiles: Vec<_> = reviews.iter().map(|r| self.infer_review_facets(r, mode)).collect();
        ItemFacetProfile::from_profiles(&profiles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jst::JstHyperParams;

    fn seq(tokens: &[&str]) -> TokenSeq {
        TokenSeq {
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            raw_length: tokens.len(),
        }
    }

    /// K=2, L=2 over words {a, b}. Rows are (k, l) pairs.
    fn toy_model() -> JstModel {
        let phi = vec![
            0.7, 0.3, // k0 l0
            0.2, 0.8, // k0 l1
            0.4, 0.6, // k1 l0
            0.9, 0.1, // k1 l1
        ];
        JstModel::from_parts(
            JstHyperParams::new(2, 2),
            vec!["a".into(), "b".into()],
            1,
            vec![0.25; 4],
            phi,
            vec![0.5; 2],
            "toy".into(),
        )
        .unwrap()
    }

    /// Direct evaluation of the per-facet and joint argmax aggregation.
    fn oracle(phi: &[[[f64; 2]; 2]; 2], words: &[usize]) -> ([f64; 4], [f64; 2]) {
        let mut fl = [0.0; 4];
        let mut pl = [0.0; 2];
        for &w in words {
            for (k, rows) in phi.iter().enumerate() {
                let l = if rows[1][w] > rows[0][w] { 1 } else { 0 };
                fl[k * 2 + l] += rows[l][w];
            }
            let mut best = (0, 0, f64::MIN);
            for (k, rows) in phi.iter().enumerate() {
                for (l, row) in rows.iter().enumerate() {
                    if row[w] > best.2 {
                        best = (k, l, row[w]);
                    }
                }
            }
            pl[best.1] += best.2;
        }
        (fl, pl)
    }

    const TOY: [[[f64; 2]; 2]; 2] = [[[0.7, 0.3], [0.2, 0.8]], [[0.4, 0.6], [0.9, 0.1]]];

    #[test]
    fn single_token_matches_direct_evaluation() {
        let model = toy_model();
        let profile = model.infer_review_facets(&seq(&["a"]), RatingAggregation::JointArgmax);
        let (fl, pl) = oracle(&TOY, &[0]);
        assert_eq!(profile.raw_phi_prime, fl.to_vec());
        assert_eq!(profile.raw_pi_prime, pl.to_vec());
        // word a: k0 -> l0 (0.7), k1 -> l1 (0.9); joint best (k1, l1).
        let total = 0.7 + 0.9;
        assert!((profile.get(0, 0) - 0.7 / total).abs() < 1e-15);
        assert!((profile.get(1, 1) - 0.9 / total).abs() < 1e-15);
        assert_eq!(profile.pi_prime, vec![0.0, 1.0]);
        assert!(!profile.degenerate);
    }

    #[test]
    fn multi_token_and_oov() {
        let model = toy_model();
        let profile = model.infer_review_facets(&seq(&["a", "b", "zzz", "b"]), RatingAggregation::JointArgmax);
        let (fl, pl) = oracle(&TOY, &[0, 1, 1]);
        for (x, y) in profile.raw_phi_prime.iter().zip(fl) {
            assert!((x - y).abs() < 1e-15);
        }
        for (x, y) in profile.raw_pi_prime.iter().zip(pl) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn per_facet_rating_aggregation() {
        let model = toy_model();
        let profile = model.infer_review_facets(&seq(&["a"]), RatingAggregation::PerFacet);
        assert_eq!(profile.raw_pi_prime, vec![0.7, 0.9]);
    }

    #[test]
    fn empty_review_is_uniform() {
        let model = toy_model();
        let profile = model.infer_review_facets(&seq(&[]), RatingAggregation::JointArgmax);
        assert!(profile.degenerate);
        assert_eq!(profile.phi_prime, vec![0.25; 4]);
        assert_eq!(profile.pi_prime, vec![0.5; 2]);
    }

    #[test]
    fn single_cell_model_normalizes_to_one() {
        let model = JstModel::from_parts(
            JstHyperParams::new(1, 1),
            vec!["a".into(), "b".into()],
            1,
            vec![1.0],
            vec![0.3, 0.7],
            vec![1.0],
            "x".into(),
        )
        .unwrap();
        let profile = model.infer_review_facets(&seq(&["b", "a"]), RatingAggregation::JointArgmax);
        assert_eq!(profile.phi_prime, vec![1.0]);
    }

    #[test]
    fn ties_pick_lower_label() {
        let model = JstModel::from_parts(
            JstHyperParams::new(1, 2),
            vec!["a".into()],
            1,
            vec![0.5, 0.5],
            vec![1.0, 1.0],
            vec![0.5, 0.5],
            "x".into(),
        )
        .unwrap();
        let profile = model.infer_review_facets(&seq(&["a"]), RatingAggregation::JointArgmax);
        assert_eq!(profile.raw_phi_prime, vec![1.0, 0.0]);
        assert_eq!(profile.raw_pi_prime, vec![1.0, 0.0]);
    }

    #[test]
    fn item_profile_aggregation() {
        let model = toy_model();
        let one = model.item_facet_profile(&[seq(&["a", "b"])], RatingAggregation::JointArgmax).unwrap();
        let review = model.infer_review_facets(&seq(&["a", "b"]), RatingAggregation::JointArgmax);
        assert_eq!(one.phi_item, review.phi_prime);
        assert_eq!(one.n_reviews, 1);

        let two = model
            .item_facet_profile(&[seq(&["a", "b"]), seq(&["a", "b"])], RatingAggregation::JointArgmax)
            .unwrap();
        for (x, y) in two.phi_item.iter().zip(&one.phi_item) {
            assert!((x - y).abs() < 1e-15);
        }

        // Two distinct reviews: raw sums a -> (0.7, 0, 0, 0.9), b -> (0, 0.8, 0.6, 0).
        let mixed = model
            .item_facet_profile(&[seq(&["a"]), seq(&["b"])], RatingAggregation::JointArgmax)
            .unwrap();
        let total = 0.7 + 0.9 + 0.8 + 0.6;
        let expected = [0.7 / total, 0.8 / total, 0.6 / total, 0.9 / total];
        for (x, y) in mixed.phi_item.iter().zip(expected) {
            assert!((x - y).abs() < 1e-15);
        }

        assert!(model.item_facet_profile(&[], RatingAggregation::JointArgmax).is_err());
    }
}

//! Joint sentiment-topic (JST) model: every token carries a (facet, sentiment
//! label) pair. Training is collapsed Gibbs sampling; inference maps a review
//! onto the learned facet-label-word tensor.

mod infer;
pub(crate) mod io;
mod lexicon;
mod model;
mod sampler;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use infer::{ItemFacetProfile, RatingAggregation, ReviewFacetProfile};
pub use io::{read_model, write_model, FacetModelFile};
pub use lexicon::SentimentLexicon;
pub use model::{train, JstModel};
pub use sampler::{init_model, JstCorpus, JstState};

pub const POSITIVE: usize = 0;
pub const NEGATIVE: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JstHyperParams {
    /// Facet count.
    pub k: usize,
    /// Sentiment-label count.
    pub l: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub sample_lag: usize,
    pub seed: u64,
}

impl JstHyperParams {
    /// Symmetric priors alpha = 50/K, beta = 0.01, gamma = 0.1.
    pub fn new(k: usize, l: usize) -> Self {
        Self {
            k,
            l,
            alpha: 50.0 / k.max(1) as f64,
            beta: 0.01,
            gamma: 0.1,
            iterations: 1000,
            burn_in: 200,
            sample_lag: 50,
            seed: 0,
        }
    }

    pub fn with_schedule(mut self, iterations: usize, burn_in: usize, sample_lag: usize) -> Self {
        self.iterations = iterations;
        self.burn_in = burn_in;
        self.sample_lag = sample_lag;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.l == 0 {
            return Err(Error::Config(format!("K and L must be >= 1 (K={}, L={})", self.k, self.l)));
        }
        if self.k > u16::MAX as usize || self.l > u8::MAX as usize {
            return Err(Error::Config("K or L too large".into()));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn_in ({}) must be below iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.sample_lag == 0 {
            return Err(Error::Config("sample_lag must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for JstHyperParams {
    fn default() -> Self {
        Self::new(20, 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_priors() {
        let h = JstHyperParams::new(20, 2);
        assert_eq!(h.alpha, 2.5);
        assert_eq!(h.beta, 0.01);
        assert_eq!(h.gamma, 0.1);
        h.validate().unwrap();
    }

    #[test]
    fn invalid_hyper_rejected() {
        assert!(JstHyperParams::new(0, 2).validate().is_err());
        assert!(JstHyperParams::new(2, 2).with_schedule(10, 10, 1).validate().is_err());
        assert!(JstHyperParams::new(2, 2).with_schedule(10, 5, 0).validate().is_err());
        let mut h = JstHyperParams::new(2, 2);
        h.beta = 0.0;
        assert!(h.validate().is_err());
    }
}

use std::collections::HashMap;

use log::debug;

use super::sampler::{init_model, JstCorpus, JstState};
use super::{JstHyperParams, SentimentLexicon};
use crate::error::{Error, Result};

/// Estimated JST distributions.
///
/// Layouts: `theta[(d * L + l) * K + k]`, `phi[(k * L + l) * V + w]`,
/// `pi[d * L + l]`.
#[derive(Debug, Clone)]
pub struct JstModel {
    hyper: JstHyperParams,
    words: Vec<String>,
    n_docs: usize,
    theta: Vec<f64>,
    phi: Vec<f64>,
    pi: Vec<f64>,
    vocab_fingerprint: String,
    word_ids: HashMap<String, usize>,
}

impl JstModel {
    pub fn from_parts(
        hyper: JstHyperParams,
        words: Vec<String>,
        n_docs: usize,
        theta: Vec<f64>,
        phi: Vec<f64>,
        pi: Vec<f64>,
        vocab_fingerprint: String,
    ) -> Result<Self> {
        let (k, l, v) = (hyper.k, hyper.l, words.len());
        if theta.len() != n_docs * l * k || phi.len() != k * l * v || pi.len() != n_docs * l {
            return Err(Error::Format(format!(
                "tensor sizes (theta {}, phi {}, pi {}) do not match D={n_docs} K={k} L={l} V={v}",
                theta.len(),
                phi.len(),
                pi.len()
            )));
        }
        let word_ids = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Ok(Self {
            hyper,
            words,
            n_docs,
            theta,
            phi,
            pi,
            vocab_fingerprint,
            word_ids,
        })
    }

    pub fn hyper(&self) -> &JstHyperParams {
        &self.hyper
    }

    pub fn k(&self) -> usize {
        self.hyper.k
    }

    pub fn l(&self) -> usize {
        self.hyper.l
    }

    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word_id(&self, word: &str) -> Option<usize> {
        self.word_ids.get(word).copied()
    }

    pub fn vocab_fingerprint(&self) -> &str {
        &self.vocab_fingerprint
    }

    pub fn theta(&self, d: usize, l: usize, k: usize) -> f64 {
        self.theta[(d * self.hyper.l + l) * self.hyper.k + k]
    }

    pub fn phi(&self, k: usize, l: usize, w: usize) -> f64 {
        self.phi[(k * self.hyper.l + l) * self.words.len() + w]
    }

    pub fn pi(&self, d: usize, l: usize) -> f64 {
        self.pi[d * self.hyper.l + l]
    }

    pub fn theta_raw(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi_raw(&self) -> &[f64] {
        &self.phi
    }

    pub fn pi_raw(&self) -> &[f64] {
        &self.pi
    }

    /// Word distribution of facet `k` under label `l`.
    pub fn phi_row(&self, k: usize, l: usize) -> &[f64] {
        let v = self.words.len();
        let start = (k * self.hyper.l + l) * v;
        &self.phi[start..start + v]
    }
}

/// Running sums of the smoothed count ratios over retained samples.
struct Estimates {
    theta: Vec<f64>,
    phi: Vec<f64>,
    pi: Vec<f64>,
    samples: usize,
}

impl Estimates {
    fn new(state: &JstState) -> Self {
        let (k, l, v, d) = (state.hyper().k, state.hyper().l, state.vocab_size(), state.n_docs());
        Self {
            theta: vec![0.0; d * l * k],
            phi: vec![0.0; k * l * v],
            pi: vec![0.0; d * l],
            samples: 0,
        }
    }

    fn accumulate(&mut self, state: &JstState) {
        let h = state.hyper();
        let (k_n, l_n, v) = (h.k, h.l, state.vocab_size());
        let (alpha, beta, gamma) = (h.alpha, h.beta, h.gamma);
        for d in 0..state.n_docs() {
            let doc_len = state.docs()[d].len() as f64;
            for l in 0..l_n {
                let n_dl = state.n_dl[d * l_n + l] as f64;
                for k in 0..k_n {
                    let idx = (d * l_n + l) * k_n + k;
                    self.theta[idx] += (state.n_dlk[idx] as f64 + alpha) / (n_dl + k_n as f64 * alpha);
                }
                self.pi[d * l_n + l] += (n_dl + gamma) / (doc_len + l_n as f64 * gamma);
            }
        }
        for kl in 0..k_n * l_n {
            let denom = state.n_kl[kl] as f64 + v as f64 * beta;
            let row = &state.n_klw[kl * v..(kl + 1) * v];
            for (w, &n) in row.iter().enumerate() {
                self.phi[kl * v + w] += (n as f64 + beta) / denom;
            }
        }
        self.samples += 1;
    }

    fn finish(mut self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let scale = 1.0 / self.samples as f64;
        for x in self.theta.iter_mut().chain(self.phi.iter_mut()).chain(self.pi.iter_mut()) {
            *x *= scale;
        }
        (self.theta, self.phi, self.pi)
    }
}

/// Run the sampler for `hyper.iterations` sweeps and average the smoothed
/// estimates over every `sample_lag`-th sweep after burn-in. When the
/// schedule retains no sample, the final state is used.
pub fn train(
    corpus: &JstCorpus,
    lexicon: &SentimentLexicon,
    hyper: JstHyperParams,
    vocab_fingerprint: impl Into<String>,
) -> Result<JstModel> {
    let mut state = init_model(corpus, lexicon, hyper)?;
    let mut estimates = Estimates::new(&state);
    for sweep in 1..=hyper.iterations {
        state.sweep();
        if sweep > hyper.burn_in && (sweep - hyper.burn_in).is_multiple_of(hyper.sample_lag) {
            estimates.accumulate(&state);
            debug!("jst: retained sample at sweep {sweep}");
        }
    }
    if estimates.samples == 0 {
        estimates.accumulate(&state);
    }
    let (theta, phi, pi) = estimates.finish();
    JstModel::from_parts(
        hyper,
        corpus.words.clone(),
        corpus.docs.len(),
        theta,
        phi,
        pi,
        vocab_fingerprint.into(),
    )
}

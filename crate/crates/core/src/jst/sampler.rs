use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{JstHyperParams, SentimentLexicon};
use crate::corpus::{TokenSeq, Vocabulary};
use crate::error::{Error, Result};

/// Documents encoded as word ids over the unigram entries of a vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JstCorpus {
    pub docs: Vec<Vec<u32>>,
    pub words: Vec<String>,
}

impl JstCorpus {
    /// Keeps in-vocabulary unigrams only; bigram entries are not part of the
    /// topic model's word space.
    pub fn encode(tokens: &[TokenSeq], vocab: &Vocabulary) -> Self {
        let words: Vec<String> = vocab
            .entries()
            .iter()
            .enumerate()
            .filter(|(i, _)| !vocab.is_bigram(*i))
            .map(|(_, w)| w.clone())
            .collect();
        let ids: HashMap<&str, u32> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.as_str(), i as u32))
            .collect();
        let docs = tokens
            .iter()
            .map(|seq| seq.tokens.iter().filter_map(|t| ids.get(t.as_str()).copied()).collect())
            .collect();
        Self { docs, words }
    }

    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn n_tokens(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }
}

/// Token assignments plus the count tensors they imply.
///
/// Layouts: `n_dlk[(d * L + l) * K + k]`, `n_dl[d * L + l]`,
/// `n_klw[(k * L + l) * V + w]`, `n_kl[k * L + l]`.
#[derive(Debug, Clone)]
pub struct JstState {
    hyper: JstHyperParams,
    vocab_size: usize,
    docs: Vec<Vec<u32>>,
    pub(crate) z_assign: Vec<Vec<u16>>,
    pub(crate) l_assign: Vec<Vec<u8>>,
    pub(crate) n_dlk: Vec<u32>,
    pub(crate) n_dl: Vec<u32>,
    pub(crate) n_klw: Vec<u32>,
    pub(crate) n_kl: Vec<u32>,
    rng: ChaCha8Rng,
    scratch: Vec<f64>,
}

/// Random initial assignments. Tokens listed in the lexicon start on their
/// polarity label (positive = 0, negative = 1) and are free to move later.
pub fn init_model(corpus: &JstCorpus, lexicon: &SentimentLexicon, hyper: JstHyperParams) -> Result<JstState> {
    JstState::init(&corpus.docs, corpus.vocab_size(), &lexicon_seeds(corpus, lexicon), hyper)
}

fn lexicon_seeds(corpus: &JstCorpus, lexicon: &SentimentLexicon) -> Vec<Option<u8>> {
    corpus
        .words
        .iter()
        .map(|w| lexicon.polarity(w).map(|l| l as u8))
        .collect()
}

impl JstState {
    /// `seeds[w]` optionally fixes the initial label of word id `w`.
    pub fn init(docs: &[Vec<u32>], vocab_size: usize, seeds: &[Option<u8>], hyper: JstHyperParams) -> Result<Self> {
        hyper.validate()?;
        let (k, l) = (hyper.k, hyper.l);
        if seeds.iter().any(Option::is_some) && l != 2 {
            return Err(Error::Config(format!("lexicon seeding needs L = 2, got L = {l}")));
        }
        for (d, doc) in docs.iter().enumerate() {
            if let Some(&w) = doc.iter().find(|&&w| w as usize >= vocab_size) {
                return Err(Error::invalid(format!(
                    "document {d} has word id {w} outside vocabulary of size {vocab_size}"
                )));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
        let n_docs = docs.len();
        let mut state = Self {
            hyper,
            vocab_size,
            docs: docs.to_vec(),
            z_assign: Vec::with_capacity(n_docs),
            l_assign: Vec::with_capacity(n_docs),
            n_dlk: vec![0; n_docs * l * k],
            n_dl: vec![0; n_docs * l],
            n_klw: vec![0; k * l * vocab_size],
            n_kl: vec![0; k * l],
            rng: ChaCha8Rng::seed_from_u64(0),
            scratch: vec![0.0; k * l],
        };
        for doc in docs {
            let mut zs = Vec::with_capacity(doc.len());
            let mut ls = Vec::with_capacity(doc.len());
            for &w in doc {
                let z = rng.gen_range(0..k) as u16;
                let lab = match seeds.get(w as usize).copied().flatten() {
                    Some(seed) => seed,
                    None => rng.gen_range(0..l) as u8,
                };
                zs.push(z);
                ls.push(lab);
            }
            state.z_assign.push(zs);
            state.l_assign.push(ls);
        }
        state.rng = rng;
        state.retally();
        Ok(state)
    }

    pub fn hyper(&self) -> &JstHyperParams {
        &self.hyper
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn docs(&self) -> &[Vec<u32>] {
        &self.docs
    }

    pub fn z_assign(&self) -> &[Vec<u16>] {
        &self.z_assign
    }

    pub fn l_assign(&self) -> &[Vec<u8>] {
        &self.l_assign
    }

    /// Recompute every count tensor from the assignments.
    fn retally(&mut self) {
        let counts = self.tally();
        self.n_dlk = counts.0;
        self.n_dl = counts.1;
        self.n_klw = counts.2;
        self.n_kl = counts.3;
    }

    #[allow(clippy::type_complexity)]
    fn tally(&self) -> (Vec<u32>, Vec<u32>, Vec<u32>, Vec<u32>) {
        let (k, l, v) = (self.hyper.k, self.hyper.l, self.vocab_size);
        let n = self.docs.len();
        let mut n_dlk = vec![0; n * l * k];
        let mut n_dl = vec![0; n * l];
        let mut n_klw = vec![0; k * l * v];
        let mut n_kl = vec![0; k * l];
        for (d, doc) in self.docs.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let z = self.z_assign[d][i] as usize;
                let lab = self.l_assign[d][i] as usize;
                n_dlk[(d * l + lab) * k + z] += 1;
                n_dl[d * l + lab] += 1;
                n_klw[(z * l + lab) * v + w as usize] += 1;
                n_kl[z * l + lab] += 1;
            }
        }
        (n_dlk, n_dl, n_klw, n_kl)
    }

    /// True when the stored counts equal a fresh tally of the assignments.
    pub fn counts_consistent(&self) -> bool {
        let (n_dlk, n_dl, n_klw, n_kl) = self.tally();
        n_dlk == self.n_dlk && n_dl == self.n_dl && n_klw == self.n_klw && n_kl == self.n_kl
    }

    /// Resample every token once, in document order, from its full
    /// conditional with the token's own contribution removed.
    pub fn sweep(&mut self) {
        let (k_n, l_n, v) = (self.hyper.k, self.hyper.l, self.vocab_size);
        let (alpha, beta, gamma) = (self.hyper.alpha, self.hyper.beta, self.hyper.gamma);
        let k_alpha = k_n as f64 * alpha;
        let v_beta = v as f64 * beta;
        let l_gamma = l_n as f64 * gamma;
        if k_n * l_n == 1 {
            return;
        }
        for d in 0..self.docs.len() {
            let doc_len = self.docs[d].len();
            // Constant over (k, l); kept so each weight is the literal product.
            let doc_norm = (doc_len as f64 - 1.0) + l_gamma;
            for i in 0..doc_len {
                let w = self.docs[d][i] as usize;
                let z_old = self.z_assign[d][i] as usize;
                let l_old = self.l_assign[d][i] as usize;
                self.n_dlk[(d * l_n + l_old) * k_n + z_old] -= 1;
                self.n_dl[d * l_n + l_old] -= 1;
                self.n_klw[(z_old * l_n + l_old) * v + w] -= 1;
                self.n_kl[z_old * l_n + l_old] -= 1;

                let mut total = 0.0;
                for k in 0..k_n {
                    for j in 0..l_n {
                        let n_dj = self.n_dl[d * l_n + j] as f64;
                        let facet = (self.n_dlk[(d * l_n + j) * k_n + k] as f64 + alpha) / (n_dj + k_alpha);
                        let word = (self.n_klw[(k * l_n + j) * v + w] as f64 + beta)
                            / (self.n_kl[k * l_n + j] as f64 + v_beta);
                        let label = (n_dj + gamma) / doc_norm;
                        total += facet * word * label;
                        self.scratch[k * l_n + j] = total;
                    }
                }
                let u = self.rng.gen::<f64>() * total;
                let cell = self
                    .scratch
                    .iter()
                    .position(|&c| u < c)
                    .unwrap_or(k_n * l_n - 1);
                let (z_new, l_new) = (cell / l_n, cell % l_n);

                self.z_assign[d][i] = z_new as u16;
                self.l_assign[d][i] = l_new as u8;
                self.n_dlk[(d * l_n + l_new) * k_n + z_new] += 1;
                self.n_dl[d * l_n + l_new] += 1;
                self.n_klw[(z_new * l_n + l_new) * v + w] += 1;
                self.n_kl[z_new * l_n + l_new] += 1;
            }
        }
    }
}

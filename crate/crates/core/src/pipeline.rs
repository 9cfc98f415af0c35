//! End-to-end feature extraction over a corpus: tokenization, facet
//! inference, per-user and per-item context, and block assembly.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{load_stopwords, Corpus, Label, TokenSeq, Tokenizer, VocabConfig, Vocabulary};
use crate::error::{Error, Result};
use crate::features::{
    assemble, behavioral_features, burstiness, consistency_features, language_features, rating_to_distribution,
    ActivityTier, BurstMode, ConsistencyInputs, FeatureVector, ItemContext, RatingStats, UserContext,
};
use crate::learn::LinearModel;
use crate::jst::{self, FacetModelFile, ItemFacetProfile, JstCorpus, JstHyperParams, JstModel, RatingAggregation, ReviewFacetProfile, SentimentLexicon};

const META_PIPELINE: &str = "pipeline";
const META_FACET_MODEL: &str = "facet_model";
const META_STOPWORDS: &str = "stopwords";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub tier: ActivityTier,
    pub burst_mode: BurstMode,
    pub aggregation: RatingAggregation,
    /// Exclude the review itself from its item's facet profile.
    pub leave_one_out: bool,
    /// Emit the review-to-item divergence; when off the slot is 0.
    pub item_divergence: bool,
    pub language: bool,
    pub consistency: bool,
    pub behavioral: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tier: ActivityTier::Minus,
            burst_mode: BurstMode::Signed,
            aggregation: RatingAggregation::JointArgmax,
            leave_one_out: false,
            item_divergence: true,
            language: true,
            consistency: true,
            behavioral: true,
        }
    }
}

/// Per-review signals kept alongside the assembled vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ReviewSignals {
    pub tokens: TokenSeq,
    pub profile: ReviewFacetProfile,
    pub burstiness: f64,
    pub item_divergence: f64,
    pub rating_deviation_l1: f64,
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub vectors: Vec<FeatureVector>,
    pub signals: Vec<ReviewSignals>,
}

impl Extraction {
    /// Vectors paired with gold labels; unlabeled reviews are skipped.
    pub fn labeled(&self, corpus: &Corpus) -> Vec<(FeatureVector, Label)> {
        corpus
            .reviews()
            .iter()
            .zip(&self.vectors)
            .filter_map(|(r, v)| r.label.map(|l| (v.clone(), l)))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct FeaturePipeline {
    tokenizer: Tokenizer,
    vocab: Vocabulary,
    model: JstModel,
    config: PipelineConfig,
}

impl FeaturePipeline {
    pub fn new(tokenizer: Tokenizer, vocab: Vocabulary, model: JstModel, config: PipelineConfig) -> Result<Self> {
        if vocab.fingerprint() != model.vocab_fingerprint() {
            return Err(Error::Config("facet model was trained on a different vocabulary".into()));
        }
        Ok(Self {
            tokenizer,
            vocab,
            model,
            config,
        })
    }

    pub fn from_file(tokenizer: Tokenizer, file: FacetModelFile, config: PipelineConfig) -> Result<Self> {
        let vocab = file
            .vocabulary
            .ok_or_else(|| Error::Config("facet model file carries no vocabulary".into()))?;
        Self::new(tokenizer, vocab, file.model, config)
    }

    /// Rebuild the pipeline recorded in a trained model's metadata. The
    /// arguments override the recorded facet model and stopword paths.
    pub fn for_model(model: &LinearModel, facet_model: Option<&Path>, stopwords: Option<&Path>) -> Result<Self> {
        let config: PipelineConfig = match model.meta.get(META_PIPELINE) {
            Some(json) => serde_json::from_str(json)?,
            None => return Err(Error::Format("model carries no pipeline settings".into())),
        };
        let facet_model = match (facet_model, model.meta.get(META_FACET_MODEL)) {
            (Some(path), _) => path.to_path_buf(),
            (None, Some(path)) => PathBuf::from(path),
            (None, None) => return Err(Error::Config("model does not name its facet model".into())),
        };
        let stopwords = stopwords
            .map(Path::to_path_buf)
            .or_else(|| model.meta.get(META_STOPWORDS).map(PathBuf::from));
        let tokenizer = match stopwords {
            Some(path) => Tokenizer::new(load_stopwords(&path)?),
            None => Tokenizer::default(),
        };
        Self::from_file(tokenizer, jst::read_model(&facet_model)?, config)
    }

    /// Store what [`FeaturePipeline::for_model`] needs in `model`.
    pub fn record_in(&self, model: &mut LinearModel, facet_model: &Path, stopwords: Option<&Path>) -> Result<()> {
        model.meta.insert(META_PIPELINE.into(), serde_json::to_string(&self.config)?);
        model.meta.insert(META_FACET_MODEL.into(), facet_model.display().to_string());
        match stopwords {
            Some(path) => model.meta.insert(META_STOPWORDS.into(), path.display().to_string()),
            None => model.meta.remove(META_STOPWORDS),
        };
        Ok(())
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn model(&self) -> &JstModel {
        &self.model
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    /// Feature vectors for every review, in corpus order. The output does not
    /// depend on the number of worker threads.
    pub fn extract(&self, corpus: &Corpus) -> Result<Extraction> {
        if corpus.is_empty() {
            return Err(Error::invalid("cannot extract features from an empty corpus"));
        }
        let reviews = corpus.reviews();
        let (k, l) = (self.model.k(), self.model.l());
        let mode = self.config.aggregation;

        let tokens: Vec<TokenSeq> = reviews.par_iter().map(|r| self.tokenizer.tokenize(&r.text)).collect();
        let profiles: Vec<ReviewFacetProfile> = tokens
            .par_iter()
            .map(|t| self.model.infer_review_facets(t, mode))
            .collect();

        let ratings: Vec<f64> = reviews.iter().map(|r| f64::from(r.rating)).collect();
        let users: HashMap<&str, UserContext> = corpus
            .users()
            .iter()
            .map(|(id, pos)| {
                let rs: Vec<f64> = pos.iter().map(|&p| ratings[p]).collect();
                let ctx = UserContext {
                    post_count: pos.len(),
                    ratings: RatingStats::from_ratings(&rs),
                };
                (id.as_str(), ctx)
            })
            .collect();
        let items: HashMap<&str, ItemContext> = corpus
            .items()
            .iter()
            .map(|(id, pos)| {
                let rs: Vec<f64> = pos.iter().map(|&p| ratings[p]).collect();
                let ts = pos.iter().map(|&p| reviews[p].timestamp).collect();
                let profile = ItemFacetProfile::from_profiles(pos.iter().map(|&p| &profiles[p]))?;
                Ok((id.as_str(), ItemContext::new(&rs, ts, Some(profile))))
            })
            .collect::<Result<_>>()?;

        let results: Vec<Result<(FeatureVector, ReviewSignals)>> = (0..reviews.len())
            .into_par_iter()
            .map(|d| {
                let review = &reviews[d];
                let item = &items[review.item_id.as_str()];
                let user = &users[review.user_id.as_str()];
                let profile = &profiles[d];
                let item_profile = match self.config.leave_one_out {
                    true => self.leave_one_out(corpus, &profiles, d)?,
                    false => item.profile.clone().expect("item profile is always built"),
                };
                let stated = rating_to_distribution(review.rating, corpus.max_rating(), l)?;
                let burst = burstiness(review.timestamp, &item.timestamps, self.config.burst_mode);
                let consistency = consistency_features(ConsistencyInputs {
                    profile,
                    item_profile: &item_profile,
                    stated_rating: &stated,
                    burstiness: burst,
                    item_divergence: self.config.item_divergence,
                })?;
                let cons = consistency.values();
                let signals = ReviewSignals {
                    tokens: tokens[d].clone(),
                    profile: profile.clone(),
                    burstiness: burst,
                    item_divergence: cons[1],
                    rating_deviation_l1: cons[2 + k * l..2 + k * l + l].iter().sum(),
                };
                let mut parts = Vec::with_capacity(3);
                if self.config.language {
                    parts.push(language_features(&tokens[d], &self.vocab));
                }
                if self.config.consistency {
                    parts.push(consistency);
                }
                if self.config.behavioral {
                    parts.push(
                        behavioral_features(review, tokens[d].raw_length, user, item, self.config.tier)
                            .map_err(|e| Error::InvalidInput(format!("review {}: {e}", review.review_id)))?,
                    );
                }
                Ok((assemble(parts)?, signals))
            })
            .collect();

        let mut vectors = Vec::with_capacity(results.len());
        let mut signals = Vec::with_capacity(results.len());
        for r in results {
            let (v, s) = r?;
            vectors.push(v);
            signals.push(s);
        }
        Ok(Extraction { vectors, signals })
    }

    fn leave_one_out(&self, corpus: &Corpus, profiles: &[ReviewFacetProfile], d: usize) -> Result<ItemFacetProfile> {
        let positions = corpus.item_reviews(&corpus.reviews()[d].item_id);
        let others: Vec<&ReviewFacetProfile> = positions.iter().filter(|&&p| p != d).map(|&p| &profiles[p]).collect();
        if others.is_empty() {
            ItemFacetProfile::from_profiles([&profiles[d]])
        } else {
            ItemFacetProfile::from_profiles(others)
        }
    }
}

/// Settings for fitting the vocabulary and facet model on a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FacetTraining {
    pub vocab: VocabConfig,
    pub hyper: JstHyperParams,
}

/// Tokenize, build the vocabulary and train the facet model.
pub fn fit_facet_model(
    corpus: &Corpus,
    tokenizer: &Tokenizer,
    lexicon: &SentimentLexicon,
    settings: FacetTraining,
) -> Result<FacetModelFile> {
    let tokens: Vec<TokenSeq> = corpus.reviews().par_iter().map(|r| tokenizer.tokenize(&r.text)).collect();
    let vocab = Vocabulary::build(&tokens, settings.vocab)?;
    let encoded = JstCorpus::encode(&tokens, &vocab);
    info!(
        "facet model: {} documents, {} tokens, {} word types, K={} L={}",
        encoded.docs.len(),
        encoded.n_tokens(),
        encoded.vocab_size(),
        settings.hyper.k,
        settings.hyper.l
    );
    let model = jst::train(&encoded, lexicon, settings.hyper, vocab.fingerprint())?;
    Ok(FacetModelFile {
        model,
        vocabulary: Some(vocab),
    })
}

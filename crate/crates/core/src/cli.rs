//! Command-line driver. Every subcommand reads and writes the file formats of
//! the library modules; exit codes are 0 on success, 1 on usage errors and 2
//! on data errors.

use std::collections::{BTreeMap, HashSet};
use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Deserialize;
use serde_json::Value;

use crate::corpus::{load_corpus, load_stopwords, write_jsonl, Corpus, InputFormat, Label, LoadOptions, Tokenizer, VocabConfig};
use crate::error::Error;
use crate::eval::{self, EvaluationReport, Validation, LONG_TAIL_THRESHOLDS};
use crate::explain::{explain, write_reports_jsonl};
use crate::features::{write_sparse, ActivityTier, FeatureSpace, FeatureVector, SparseRow};
use crate::jst::{read_model, write_model, JstHyperParams, SentimentLexicon};
use crate::learn::{self, read_linear_model, write_linear_model, LinearModel, ModelKind, TrainConfig};
use crate::pipeline::{fit_facet_model, Extraction, FacetTraining, FeaturePipeline, PipelineConfig};
use crate::synth::{self, SynthSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

const DEFAULT_GRID: &str = "0:150:5";
const DEFAULT_FOLDS: usize = 10;
const DEFAULT_FACETS: usize = 20;
const DEFAULT_LABELS: usize = 2;

#[derive(Debug, Parser)]
#[command(name = "credibility", version, about = "Review credibility analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and validate a corpus, then print its size.
    Ingest {
        #[arg(value_name = "CORPUS")]
        input: Option<PathBuf>,
    },
    /// Build the vocabulary and fit the facet-sentiment model.
    TrainFacets,
    /// Write the sparse feature matrix of a corpus.
    Features,
    /// Train the review classifier, or an item ranker with --ranker.
    Train,
    /// Label every review of a corpus.
    Classify,
    /// Rank items by the mean rating of their credible reviews.
    RankItems,
    /// Cross-validated accuracy and ranking correlation.
    Evaluate,
    /// Retrain across a grid of non-credible penalties.
    SweepCneg,
    /// Move a classifier onto the feature space of another corpus.
    Transfer,
    /// Generate a synthetic labeled corpus.
    Synth,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct Opts {
    /// JSON file supplying any flag; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Corpus format (jsonl or csv); guessed from the extension by default.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    #[arg(long, global = true)]
    facet_model: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Facet count for train-facets, fold count for evaluate.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Sentiment-label count for train-facets.
    #[arg(long, global = true)]
    labels: Option<usize>,
    #[arg(long, global = true)]
    tier: Option<ActivityTier>,
    /// C- grid as lo:hi:step.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Emit an evidence report per review.
    #[arg(long, global = true)]
    explain: bool,

    /// Item reference ranks (smaller is better): CSV item_id,rank, a JSON
    /// object, or a synth ground-truth file.
    #[arg(long, global = true)]
    reference: Option<PathBuf>,
    /// Held-out corpus for sweep-cneg and evaluate.
    #[arg(long, global = true)]
    validation: Option<PathBuf>,
    /// Synth spec JSON.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Ground-truth sidecar path for synth.
    #[arg(long, global = true)]
    truth: Option<PathBuf>,
    /// Source corpus to retrain on during transfer.
    #[arg(long, global = true)]
    source_corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    source_facet_model: Option<PathBuf>,
    #[arg(long, global = true)]
    c_pos: Option<f64>,
    #[arg(long, global = true)]
    c_neg: Option<f64>,
    /// Train a pairwise item ranker instead of the review classifier.
    #[arg(long, global = true)]
    ranker: bool,
    #[arg(long, global = true)]
    iterations: Option<usize>,
    #[arg(long, global = true)]
    burn_in: Option<usize>,
    #[arg(long, global = true)]
    lag: Option<usize>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    min_df: Option<usize>,
    #[arg(long, global = true)]
    max_vocab: Option<usize>,
    /// Directory holding positive.txt and negative.txt.
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Stopword file, one word per line.
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
    #[arg(long, global = true)]
    max_rating: Option<u8>,
    /// Comma-separated feature blocks: language, consistency, behavioral.
    #[arg(long, global = true)]
    blocks: Option<String>,
    /// Full pipeline settings; config file only.
    #[arg(skip)]
    pipeline: Option<PipelineConfig>,
}

macro_rules! fill {
    ($dst:ident, $src:ident; $($field:ident),* $(,)?) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field.take(); } )*
    };
}

impl Opts {
    fn merge(&mut self, mut file: Opts) {
        fill!(self, file; corpus, format, model, facet_model, out, seed, jobs, k, labels, tier, grid,
            reference, validation, spec, truth, source_corpus, source_facet_model, c_pos, c_neg,
            iterations, burn_in, lag, alpha, beta, gamma, min_df, max_vocab, lexicon, stopwords,
            max_rating, blocks, pipeline);
        self.explain |= file.explain;
        self.ranker |= file.ranker;
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage<T>(message: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(message.into()))
}

fn required<'a, T>(value: &'a Option<T>, flag: &str) -> Outcome<&'a T> {
    value.as_ref().ok_or_else(|| Failure::Usage(format!("--{flag} is required")))
}

/// Parse `args` (program name first), run the subcommand and return the
/// exit code. Messages go to stdout and errors to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn execute(cli: Cli) -> Outcome<()> {
    let Cli { command, mut opts } = cli;
    if let Some(path) = opts.config.clone() {
        opts.merge(read_config(&path)?);
    }
    let jobs = opts.jobs.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start {jobs} workers: {e}")))?;
    pool.install(|| dispatch(command, &opts))
}

fn read_config(path: &Path) -> Outcome<Opts> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return usage(format!("{}: config must be a JSON object", path.display()));
    };
    let map: serde_json::Map<String, Value> = map.into_iter().map(|(k, v)| (k.replace('_', "-"), v)).collect();
    serde_json::from_value(Value::Object(map)).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn dispatch(command: Command, opts: &Opts) -> Outcome<()> {
    match command {
        Command::Ingest { input } => ingest(input.as_ref().or(opts.corpus.as_ref()), opts),
        Command::TrainFacets => train_facets(opts),
        Command::Features => features(opts),
        Command::Train => train(opts),
        Command::Classify => classify(opts),
        Command::RankItems => rank_items(opts),
        Command::Evaluate => evaluate(opts),
        Command::SweepCneg => sweep_cneg(opts),
        Command::Transfer => transfer(opts),
        Command::Synth => synthesize(opts),
    }
}

fn load(path: &Path, opts: &Opts) -> Outcome<Corpus> {
    let format = match &opts.format {
        Some(f) => f.parse::<InputFormat>().map_err(Failure::Usage)?,
        None => InputFormat::from_path(path),
    };
    let mut options = LoadOptions::default();
    if let Some(max) = opts.max_rating {
        options.max_rating = max;
    }
    let corpus = load_corpus(path, format, options)?;
    info!("{}: {} reviews", path.display(), corpus.len());
    Ok(corpus)
}

fn tokenizer(stopwords: Option<&Path>) -> Outcome<Tokenizer> {
    Ok(match stopwords {
        Some(path) => Tokenizer::new(load_stopwords(path)?),
        None => Tokenizer::default(),
    })
}

fn pipeline_config(opts: &Opts) -> Outcome<PipelineConfig> {
    let mut config = opts.pipeline.unwrap_or_default();
    if let Some(tier) = opts.tier {
        config.tier = tier;
    }
    if let Some(blocks) = &opts.blocks {
        config.language = false;
        config.consistency = false;
        config.behavioral = false;
        for block in blocks.split(',').map(str::trim).filter(|b| !b.is_empty()) {
            match block {
                "language" => config.language = true,
                "consistency" => config.consistency = true,
                "behavioral" => config.behavioral = true,
                other => return usage(format!("unknown feature block \"{other}\"")),
            }
        }
    }
    if !(config.language || config.consistency || config.behavioral) {
        return usage("at least one feature block is required");
    }
    Ok(config)
}

fn train_config(opts: &Opts) -> TrainConfig {
    let mut config = TrainConfig {
        seed: opts.seed.unwrap_or(0),
        ..TrainConfig::default()
    };
    if let Some(c) = opts.c_pos {
        config.c_pos = c;
    }
    if let Some(c) = opts.c_neg {
        config.c_neg = c;
    }
    config
}

fn build_pipeline(facet_model: &Path, stopwords: Option<&Path>, config: PipelineConfig) -> Outcome<FeaturePipeline> {
    let file = read_model(facet_model)?;
    Ok(FeaturePipeline::from_file(tokenizer(stopwords)?, file, config)?)
}

/// The feature pipeline a trained model expects. `--facet-model` and
/// `--stopwords` override the recorded paths.
fn model_pipeline(model: &LinearModel, opts: &Opts) -> Outcome<FeaturePipeline> {
    let pipeline = FeaturePipeline::for_model(model, opts.facet_model.as_deref(), opts.stopwords.as_deref())?;
    if let Some(tier) = opts.tier {
        if tier != pipeline.config().tier {
            return usage(format!("model was trained with tier {:?}", pipeline.config().tier).to_lowercase());
        }
    }
    Ok(pipeline)
}

fn require_labels(corpus: &Corpus, extraction: &Extraction) -> Outcome<Vec<(FeatureVector, Label)>> {
    if let Some(r) = corpus.reviews().iter().find(|r| r.label.is_none()) {
        return Err(Error::MissingField(format!("review {}: label", r.review_id)).into());
    }
    Ok(extraction.labeled(corpus))
}

/// Reference ranks from CSV (`item_id,rank`), a JSON object of ranks, or a
/// JSON object with a `reference_ranks` member.
pub fn load_reference(path: &Path) -> crate::Result<BTreeMap<String, f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('{') {
        let value: Value = serde_json::from_str(&text)?;
        let ranks = value.get("reference_ranks").cloned().unwrap_or(value);
        return Ok(serde_json::from_value(ranks)?);
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
        let line = i + 2;
        let item = row.get(0).ok_or_else(|| Error::record(line, "item_id", "missing"))?;
        let rank: f64 = row
            .get(1)
            .and_then(|r| r.trim().parse().ok())
            .filter(|r: &f64| r.is_finite())
            .ok_or_else(|| Error::record(line, "rank", "not a finite number"))?;
        out.insert(item.to_string(), rank);
    }
    Ok(out)
}

fn output(opts: &Opts) -> Outcome<&PathBuf> {
    required(&opts.out, "out")
}

fn ingest(input: Option<&PathBuf>, opts: &Opts) -> Outcome<()> {
    let Some(path) = input else {
        return usage("a corpus path is required");
    };
    let corpus = load(path, opts)?;
    let labeled = corpus.reviews().iter().filter(|r| r.label.is_some()).count();
    println!("reviews: {}", corpus.len());
    println!("items: {}", corpus.items().len());
    println!("users: {}", corpus.users().len());
    println!("labeled: {labeled}");
    if let Some(out) = &opts.out {
        write_jsonl(&corpus, out)?;
    }
    Ok(())
}

fn train_facets(opts: &Opts) -> Outcome<()> {
    let corpus = load(required(&opts.corpus, "corpus")?, opts)?;
    let out = output(opts)?;
    let mut hyper = JstHyperParams::new(opts.k.unwrap_or(DEFAULT_FACETS), opts.labels.unwrap_or(DEFAULT_LABELS));
    hyper.seed = opts.seed.unwrap_or(0);
    if let Some(v) = opts.alpha {
        hyper.alpha = v;
    }
    if let Some(v) = opts.beta {
        hyper.beta = v;
    }
    if let Some(v) = opts.gamma {
        hyper.gamma = v;
    }
    if let Some(v) = opts.iterations {
        hyper.iterations = v;
    }
    if let Some(v) = opts.burn_in {
        hyper.burn_in = v;
    }
    if let Some(v) = opts.lag {
        hyper.sample_lag = v;
    }
    let mut vocab = VocabConfig::default();
    if let Some(v) = opts.min_df {
        vocab.min_df = v;
    }
    if let Some(v) = opts.max_vocab {
        vocab.max_vocab = v;
    }
    let lexicon = match &opts.lexicon {
        Some(dir) => SentimentLexicon::load_dir(dir)?,
        None => SentimentLexicon::builtin(),
    };
    let file = fit_facet_model(&corpus, &tokenizer(opts.stopwords.as_deref())?, &lexicon, FacetTraining { vocab, hyper })?;
    write_model(out, &file)?;
    println!(
        "facet model: K={} L={} vocabulary {} -> {}",
        hyper.k,
        hyper.l,
        file.model.vocab_size(),
        out.display()
    );
    Ok(())
}

fn features(opts: &Opts) -> Outcome<()> {
    let corpus = load(required(&opts.corpus, "corpus")?, opts)?;
    let out = output(opts)?;
    let facet_model = required(&opts.facet_model, "facet-model")?;
    let pipeline = build_pipeline(facet_model, opts.stopwords.as_deref(), pipeline_config(opts)?)?;
    let extraction = pipeline.extract(&corpus)?;
    let space = FeatureSpace::from_vectors(&extraction.vectors);
    let rows: Vec<SparseRow> = corpus
        .reviews()
        .iter()
        .zip(extraction.vectors)
        .map(|(r, features)| SparseRow {
            review_id: r.review_id.clone(),
            label: r.label,
            features,
        })
        .collect();
    write_sparse(out, &space, &rows)?;
    println!("features: {} reviews x {} columns -> {}", rows.len(), space.len(), out.display());
    Ok(())
}

/// Element-wise mean review vector of every item, keyed by item id.
fn item_features(corpus: &Corpus, vectors: &[FeatureVector]) -> Outcome<BTreeMap<String, FeatureVector>> {
    corpus
        .items()
        .iter()
        .map(|(item, positions)| {
            let reviews: Vec<FeatureVector> = positions.iter().map(|&p| vectors[p].clone()).collect();
            Ok((item.clone(), learn::aggregate_item_features(&reviews)?))
        })
        .collect()
}

fn train(opts: &Opts) -> Outcome<()> {
    let corpus = load(required(&opts.corpus, "corpus")?, opts)?;
    let out = output(opts)?;
    let facet_model = required(&opts.facet_model, "facet-model")?;
    let pipeline = build_pipeline(facet_model, opts.stopwords.as_deref(), pipeline_config(opts)?)?;
    let extraction = pipeline.extract(&corpus)?;
    let config = train_config(opts);
    let mut model = if opts.ranker {
        let reference = load_reference(required(&opts.reference, "reference")?)?;
        let items = item_features(&corpus, &extraction.vectors)?;
        let mut ranked = Vec::with_capacity(items.len());
        for (item, x) in items {
            match reference.get(&item) {
                Some(&rank) => ranked.push((x, rank)),
                None => return Err(Error::invalid(format!("item \"{item}\" has no reference rank")).into()),
            }
        }
        learn::train_rank(&ranked, &config)?
    } else {
        learn::train_csvm(&require_labels(&corpus, &extraction)?, &config)?
    };
    pipeline.record_in(&mut model, facet_model, opts.stopwords.as_deref())?;
    write_linear_model(out, &model)?;
    let summary = model.summary();
    println!(
        "{} model: {} features, {} epochs, relative gap {:.3e} -> {}",
        if opts.ranker { "ranking" } else { "classification" },
        model.names().len(),
        summary.epochs,
        summary.relative_gap,
        out.display()
    );
    Ok(())
}

fn classifier(opts: &Opts) -> Outcome<LinearModel> {
    let model = read_linear_model(required(&opts.model, "model")?)?;
    if model.kind() != ModelKind::Classifier {
        return usage("--model must be a review classifier");
    }
    Ok(model)
}

fn classify(opts: &Opts) -> Outcome<()> {
    let model = classifier(opts)?;
    let corpus = load(required(&opts.corpus, "corpus")?, opts)?;
    let pipeline = model_pipeline(&model, opts)?;
    let extraction = pipeline.extract(&corpus)?;
    let flagged;
    if opts.explain {
        let reports = explain(&corpus, &extraction, &model)?;
        flagged = reports.iter().filter(|r| r.label == Label::NonCredible).count();
        match &opts.out {
            Some(out) => write_reports_jsonl(out, &reports)?,
            None => {
                for r in &reports {
                    println!("{}", serde_json::to_string(r).map_err(Error::from)?);
                }
            }
        }
    } else {
        let mut lines = Vec::with_capacity(corpus.len());
        let mut count = 0;
        for (review, x) in corpus.reviews().iter().zip(&extraction.vectors) {
            let p = model.predict(x);
            count += usize::from(p.label == Label::NonCredible);
            let line = serde_json::json!({ "review_id": review.review_id, "label": p.label, "score": p.score });
            lines.push(line.to_string());
        }
        flagged = count;
        write_lines(opts.out.as_deref(), &lines)?;
    }
    eprintln!("classified {} reviews, {flagged} non-credible", corpus.len());
    Ok(())
}

fn write_lines(out: Option<&Path>, lines: &[String]) -> Outcome<()> {
    match out {
        Some(path) => {
            let mut text = lines.join("\n");
            if !lines.is_empty() {
                text.push('\n');
            }
            std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
        }
        None => lines.iter().for_each(|l| println!("{l}")),
    }
    Ok(())
}

fn rank_items(opts: &Opts) -> Outcome<()> {
    let model = read_linear_model(required(&opts.model, "model")?)?;
    let corpus = load(required(&opts.corpus, "corpus")?, opts)?;
    let pipeline = model_pipeline(&model, opts)?;
    let extraction = pipeline.extract(&corpus)?;
    let baseline = eval::mean_rating_ranking(&corpus)?;
    let ranking = match model.kind() {
        ModelKind::Classifier => eval::rank_items(&corpus, &model, &extraction.vectors)?,
        ModelKind::Ranker => {
            let items = item_features(&corpus, &extraction.vectors)?;
            let mut ranking = eval::ItemRanking::default();
            for (item, x) in items {
                ranking.scores.insert(item.clone(), model.score(&x));
                ranking.retained.insert(item.clone(), corpus.item_reviews(&item).len());
            }
            ranking
        }
    };
    let counts = eval::review_counts(&corpus);
    let mut rows = Vec::new();
    for (item, score) in &ranking.scores {
        rows.push((item.as_str(), *score, baseline.scores[item], ranking.retained[item], counts[item]));
    }
    rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut writer: csv::Writer<Box<dyn Write>> = match &opts.out {
        Some(path) => csv::Writer::from_writer(Box::new(File::create(path).map_err(|e| Error::io(path, e))?)),
        None => csv::Writer::from_writer(Box::new(std::io::stdout())),
    };
    let csv_err = |e: csv::Error| Failure::Data(Error::invalid(e.to_string()));
    writer
        .write_record(["rank", "item_id", "score", "baseline", "retained", "reviews"])
        .map_err(csv_err)?;
    for (i, (item, score, base, kept, n)) in rows.iter().enumerate() {
        writer
            .write_record([(i + 1).to_string(), item.to_string(), score.to_string(), base.to_string(), kept.to_string(), n.to_string()])
            .map_err(csv_err)?;
    }
    writer.flush().map_err(|e| Failure::Data(Error::invalid(e.to_string())))?;
    if let Some(path) = &opts.reference {
        let reference = load_reference(path)?;
        let (tb, tm) = eval::correlate(&ranking, &reference)?;
        let (bb, bm) = eval::correlate(&baseline, &reference)?;
        eprintln!("model:    tau_b {:.4}  tau_m {:.4}", tb.tau, tm.tau);
        eprintln!("baseline: tau_b {:.4}  tau_m {:.4}", bb.tau, bm.tau);
    }
    Ok(())
}

fn grid(opts: &Opts) -> Outcome<Vec<f64>> {
    eval::parse_grid(opts.grid.as_deref().unwrap_or(DEFAULT_GRID)).map_err(|e| Failure::Usage(e.to_string()))
}

fn validation_set(
    opts: &Opts,
    pipeline: &FeaturePipeline,
) -> Outcome<(Corpus, Vec<FeatureVector>, BTreeMap<String, f64>)> {
    let corpus = load(required(&opts.validation, "validation")?, opts)?;
    let reference = load_reference(required(&opts.reference, "reference")?)?;
    let vectors = pipeline.extract(&corpus)?.vectors;
    Ok((corpus, vectors, reference))
}

fn evaluate(opts: &Opts) -> Outcome<()> {
    let corpus = load(required(&opts.corpus, "corpus")?, opts)?;
    let facet_model = required(&opts.facet_model, "facet-model")?;
    let pipeline = build_pipeline(facet_model, opts.stopwords.as_deref(), pipeline_config(opts)?)?;
    let extraction = pipeline.extract(&corpus)?;
    let examples = require_labels(&corpus, &extraction)?;
    let config = train_config(opts);
    let folds = opts.k.unwrap_or(DEFAULT_FOLDS);

    let cv = eval::cross_validate(&examples, folds, &config)?;
    let mut report = EvaluationReport {
        accuracy: Some(cv.mean),
        accuracy_stdev: Some(cv.stdev),
        fold_accuracies: cv.folds,
        ..EvaluationReport::default()
    };
    if opts.validation.is_some() {
        let (val_corpus, vectors, reference) = validation_set(opts, &pipeline)?;
        let validation = Validation {
            corpus: &val_corpus,
            vectors: &vectors,
            reference: &reference,
        };
        let model = learn::train_csvm(&examples, &config)?;
        let ranking = eval::rank_items(&val_corpus, &model, &vectors)?;
        fill_ranking(&mut report, &ranking, &reference, &val_corpus)?;
        if opts.grid.is_some() {
            report.sweep = eval::sweep_cneg(&examples, validation, &grid(opts)?, &config)?.curve;
        }
    } else if let Some(path) = &opts.reference {
        let reference = load_reference(path)?;
        let predicted = eval::cross_predict(&examples, folds, &config)?;
        let ranking = eval::filtered_ranking(&corpus, &predicted)?;
        fill_ranking(&mut report, &ranking, &reference, &corpus)?;
    } else if opts.grid.is_some() {
        return usage("--grid needs --validation and --reference");
    }
    match &opts.out {
        Some(path) => report.write_json(path)?,
        None => println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?),
    }
    eprintln!("accuracy {:.4} over {folds} folds", cv.mean);
    Ok(())
}

fn fill_ranking(
    report: &mut EvaluationReport,
    ranking: &eval::ItemRanking,
    reference: &BTreeMap<String, f64>,
    corpus: &Corpus,
) -> Outcome<()> {
    let (tb, tm) = eval::correlate(ranking, reference)?;
    report.tau_b = Some(tb.tau);
    report.tau_m = Some(tm.tau);
    report.long_tail = eval::long_tail_report(ranking, reference, &eval::review_counts(corpus), &LONG_TAIL_THRESHOLDS)?;
    Ok(())
}

fn sweep_cneg(opts: &Opts) -> Outcome<()> {
    let grid = grid(opts)?;
    let corpus = load(required(&opts.corpus, "corpus")?, opts)?;
    let out = output(opts)?;
    let facet_model = required(&opts.facet_model, "facet-model")?;
    let pipeline = build_pipeline(facet_model, opts.stopwords.as_deref(), pipeline_config(opts)?)?;
    let extraction = pipeline.extract(&corpus)?;
    let examples = require_labels(&corpus, &extraction)?;
    let (val_corpus, vectors, reference) = validation_set(opts, &pipeline)?;
    let validation = Validation {
        corpus: &val_corpus,
        vectors: &vectors,
        reference: &reference,
    };
    let result = eval::sweep_cneg(&examples, validation, &grid, &train_config(opts))?;
    eval::write_curve_csv(out, &result.curve)?;
    println!("best C- {} over {} grid points -> {}", result.best_c_neg, result.curve.len(), out.display());
    Ok(())
}

fn transfer(opts: &Opts) -> Outcome<()> {
    let source = classifier(opts)?;
    let corpus = load(required(&opts.corpus, "corpus")?, opts)?;
    let out = output(opts)?;
    let facet_model = required(&opts.facet_model, "facet-model")?;
    let config: PipelineConfig = match source.meta.get("pipeline") {
        Some(json) => serde_json::from_str(json).map_err(Error::from)?,
        None => pipeline_config(opts)?,
    };
    let target = build_pipeline(facet_model, opts.stopwords.as_deref(), config)?;
    let target_vectors = target.extract(&corpus)?.vectors;
    let target_names: HashSet<String> = FeatureSpace::from_vectors(&target_vectors).names().iter().cloned().collect();

    let retrain = match &opts.source_corpus {
        Some(path) => {
            let source_corpus = load(path, opts)?;
            let source_facets = match (&opts.source_facet_model, source.meta.get("facet_model")) {
                (Some(p), _) => p.clone(),
                (None, Some(p)) => PathBuf::from(p),
                (None, None) => return usage("--source-facet-model is required"),
            };
            let pipeline = build_pipeline(&source_facets, opts.stopwords.as_deref(), config)?;
            let extraction = pipeline.extract(&source_corpus)?;
            Some(require_labels(&source_corpus, &extraction)?)
        }
        None => None,
    };
    let mut config_train = *source.config();
    if let Some(c) = opts.c_pos {
        config_train.c_pos = c;
    }
    if let Some(c) = opts.c_neg {
        config_train.c_neg = c;
    }
    let mut model = learn::transfer_model(&source, &target_names, retrain.as_deref(), &config_train)?;
    target.record_in(&mut model, facet_model, opts.stopwords.as_deref())?;
    write_linear_model(out, &model)?;
    let active = model.weights().iter().filter(|w| **w != 0.0).count();
    println!("transferred model: {active} active weights -> {}", out.display());
    Ok(())
}

fn synthesize(opts: &Opts) -> Outcome<()> {
    let out = output(opts)?;
    let mut spec: SynthSpec = match &opts.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text).map_err(Error::from)?
        }
        None => SynthSpec::default(),
    };
    if let Some(seed) = opts.seed {
        spec.seed = seed;
    }
    let data = synth::generate(&spec)?;
    data.write_jsonl(out)?;
    let truth = opts.truth.clone().unwrap_or_else(|| truth_path(out));
    data.truth.write_json(&truth)?;
    let flagged = data.truth.labels.values().filter(|l| **l == Label::NonCredible).count();
    println!(
        "synthesized {} reviews ({flagged} non-credible) over {} items -> {}",
        data.corpus.len(),
        data.corpus.items().len(),
        out.display()
    );
    if flagged == 0 && spec.spam_rate > 0.0 {
        warn!("no non-credible reviews were drawn");
    }
    Ok(())
}

/// `corpus.jsonl` → `corpus.truth.json`.
pub fn truth_path(corpus: &Path) -> PathBuf {
    corpus.with_extension("truth.json")
}

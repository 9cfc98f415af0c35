//! C ABI over the credibility library.
//!
//! Every fallible function returns a [`CredStatus`]. On failure the message
//! is kept per thread and read with [`cred_last_error`]. Handles are opaque
//! and must be released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::ptr;

use credibility::corpus::{load_corpus, InputFormat, Label, LoadOptions};
use credibility::eval::{kendall_tau_b, kendall_tau_m};
use credibility::features::{burstiness, js_divergence, BurstMode};
use credibility::learn::{read_linear_model, LinearModel, ModelKind};
use credibility::pipeline::FeaturePipeline;
use credibility::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CredStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    Format = 4,
    Data = 5,
    Panic = 6,
}

/// A review classifier together with the feature pipeline it was trained on.
pub struct CredClassifier {
    model: LinearModel,
    pipeline: FeaturePipeline,
}

/// Labels and scores of a classified corpus, in corpus order.
pub struct CredResults {
    review_ids: Vec<CString>,
    scores: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CredStatus {
    match e {
        Error::Io { .. } => CredStatus::Io,
        Error::Format(_) | Error::Json(_) => CredStatus::Format,
        Error::Config(_) => CredStatus::InvalidArgument,
        _ => CredStatus::Data,
    }
}

/// Run `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (CredStatus, String)>) -> CredStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CredStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CredStatus::Panic
        }
    }
}

fn fail(e: Error) -> (CredStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (CredStatus, String) {
    (CredStatus::NullArgument, format!("{name} is null"))
}

/// # Safety
/// `p` must be null or point to `n` readable doubles.
unsafe fn slice<'a>(p: *const f64, n: usize, name: &str) -> Result<&'a [f64], (CredStatus, String)> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

/// # Safety
/// `p` must be null or a NUL-terminated string.
unsafe fn path_arg(p: *const c_char, name: &str) -> Result<Option<PathBuf>, (CredStatus, String)> {
    if p.is_null() {
        return Ok(None);
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CredStatus::InvalidArgument, format!("{name} is not UTF-8")))?;
    Ok(Some(PathBuf::from(s)))
}

fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), (CredStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    unsafe { out.write(value) };
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cred_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cred_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Kendall's tau-b of two series of length `n`.
///
/// # Safety
/// `x` and `y` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cred_kendall_tau_b(x: *const f64, y: *const f64, n: usize, out: *mut f64) -> CredStatus {
    guard(|| {
        let (x, y) = (slice(x, n, "x")?, slice(y, n, "y")?);
        let tau = kendall_tau_b(x, y).map_err(fail)?.tau;
        write_out(out, tau, "out")
    })
}

/// Kendall's tau-m of candidate scores `x` against reference scores `y`.
///
/// # Safety
/// `x` and `y` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cred_kendall_tau_m(x: *const f64, y: *const f64, n: usize, out: *mut f64) -> CredStatus {
    guard(|| {
        let (x, y) = (slice(x, n, "x")?, slice(y, n, "y")?);
        let tau = kendall_tau_m(x, y).map_err(fail)?.tau;
        write_out(out, tau, "out")
    })
}

/// Base-2 Jensen-Shannon divergence of two distributions of length `n`.
///
/// # Safety
/// `p` and `q` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cred_js_divergence(p: *const f64, q: *const f64, n: usize, out: *mut f64) -> CredStatus {
    guard(|| {
        let (p, q) = (slice(p, n, "p")?, slice(q, n, "q")?);
        let d = js_divergence(p, q).map_err(fail)?;
        write_out(out, d, "out")
    })
}

/// Burstiness of a review posted at day `t` among its item's `n` review
/// days (which include `t` itself).
///
/// # Safety
/// `days` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cred_burstiness(t: f64, days: *const f64, n: usize, out: *mut f64) -> CredStatus {
    guard(|| {
        let days = slice(days, n, "days")?;
        write_out(out, burstiness(t, days, BurstMode::Signed), "out")
    })
}

/// Load a classifier. `facet_model_path` may be null to use the path
/// recorded in the model.
///
/// # Safety
/// Paths must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cred_classifier_load(
    model_path: *const c_char,
    facet_model_path: *const c_char,
    out: *mut *mut CredClassifier,
) -> CredStatus {
    guard(|| {
        let model_path = path_arg(model_path, "model_path")?.ok_or_else(|| null("model_path"))?;
        let facet = path_arg(facet_model_path, "facet_model_path")?;
        let model = read_linear_model(&model_path).map_err(fail)?;
        if model.kind() != ModelKind::Classifier {
            return Err((CredStatus::InvalidArgument, "model is not a review classifier".into()));
        }
        let pipeline = FeaturePipeline::for_model(&model, facet.as_deref(), None).map_err(fail)?;
        let handle = Box::into_raw(Box::new(CredClassifier { model, pipeline }));
        if out.is_null() {
            drop(Box::from_raw(handle));
            return Err(null("out"));
        }
        out.write(handle);
        Ok(())
    })
}

/// Number of weights of the classifier, or 0 for a null handle.
///
/// # Safety
/// `classifier` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cred_classifier_num_features(classifier: *const CredClassifier) -> usize {
    classifier.as_ref().map_or(0, |c| c.model.names().len())
}

/// # Safety
/// `classifier` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cred_classifier_free(classifier: *mut CredClassifier) {
    if !classifier.is_null() {
        drop(Box::from_raw(classifier));
    }
}

fn classify_path(classifier: &CredClassifier, path: &Path) -> Result<CredResults, (CredStatus, String)> {
    let corpus = load_corpus(path, InputFormat::from_path(path), LoadOptions::default()).map_err(fail)?;
    let extraction = classifier.pipeline.extract(&corpus).map_err(fail)?;
    let mut review_ids = Vec::with_capacity(corpus.len());
    let mut scores = Vec::with_capacity(corpus.len());
    for (review, x) in corpus.reviews().iter().zip(&extraction.vectors) {
        let id = CString::new(review.review_id.as_str())
            .map_err(|_| (CredStatus::Data, format!("review id {:?} contains NUL", review.review_id)))?;
        review_ids.push(id);
        scores.push(classifier.model.score(x));
    }
    Ok(CredResults { review_ids, scores })
}

/// Classify every review of a JSONL or CSV corpus.
///
/// # Safety
/// `classifier` must be a live handle, `corpus_path` NUL-terminated and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cred_classify_corpus(
    classifier: *const CredClassifier,
    corpus_path: *const c_char,
    out: *mut *mut CredResults,
) -> CredStatus {
    guard(|| {
        let classifier = classifier.as_ref().ok_or_else(|| null("classifier"))?;
        let path = path_arg(corpus_path, "corpus_path")?.ok_or_else(|| null("corpus_path"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let results = classify_path(classifier, &path)?;
        out.write(Box::into_raw(Box::new(results)));
        Ok(())
    })
}

/// Number of classified reviews, or 0 for a null handle.
///
/// # Safety
/// `results` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cred_results_len(results: *const CredResults) -> usize {
    results.as_ref().map_or(0, |r| r.scores.len())
}

/// Score and label of review `index`: `label` is 1 for credible and -1 for
/// non-credible. Either output pointer may be null.
///
/// # Safety
/// `results` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn cred_results_get(results: *const CredResults, index: usize, score: *mut f64, label: *mut i32) -> CredStatus {
    guard(|| {
        let results = results.as_ref().ok_or_else(|| null("results"))?;
        let s = *results.scores.get(index).ok_or_else(|| {
            (CredStatus::InvalidArgument, format!("index {index} out of range ({})", results.scores.len()))
        })?;
        if !score.is_null() {
            score.write(s);
        }
        if !label.is_null() {
            label.write(if Label::from_sign(s) == Label::Credible { 1 } else { -1 });
        }
        Ok(())
    })
}

/// Review id of entry `index`, or null when out of range. The string lives
/// as long as `results`.
///
/// # Safety
/// `results` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cred_results_review_id(results: *const CredResults, index: usize) -> *const c_char {
    results
        .as_ref()
        .and_then(|r| r.review_ids.get(index))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// # Safety
/// `results` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cred_results_free(results: *mut CredResults) {
    if !results.is_null() {
        drop(Box::from_raw(results));
    }
}

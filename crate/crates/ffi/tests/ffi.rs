use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use credibility::corpus::{load_corpus, InputFormat, LoadOptions, Tokenizer, VocabConfig};
use credibility::jst::{write_model, JstHyperParams, SentimentLexicon};
use credibility::learn::{train_csvm, write_linear_model, TrainConfig};
use credibility::pipeline::{fit_facet_model, FacetTraining, FeaturePipeline, PipelineConfig};
use credibility::synth::{generate, SynthSpec};
use credibility_ffi::*;

fn last_error() -> String {
    let p = cred_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn tau_and_divergence() {
    let x = [1.0, 2.0, 3.0, 4.0];
    let y = [1.0, 3.0, 2.0, 4.0];
    let mut out = f64::NAN;
    let status = unsafe { cred_kendall_tau_b(x.as_ptr(), y.as_ptr(), 4, &mut out) };
    assert_eq!(status, CredStatus::Ok);
    assert!((out - 4.0 / 6.0).abs() < 1e-15);

    let status = unsafe { cred_kendall_tau_m(x.as_ptr(), x.as_ptr(), 4, &mut out) };
    assert_eq!((status, out), (CredStatus::Ok, 1.0));

    let (p, q) = ([1.0, 0.0], [0.0, 1.0]);
    let status = unsafe { cred_js_divergence(p.as_ptr(), q.as_ptr(), 2, &mut out) };
    assert_eq!((status, out), (CredStatus::Ok, 1.0));

    let days = [0.0, 1.0];
    let status = unsafe { cred_burstiness(0.0, days.as_ptr(), 2, &mut out) };
    assert_eq!(status, CredStatus::Ok);
    assert!((out - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-15);
}

#[test]
fn errors_are_reported() {
    let x = [1.0, 2.0];
    let mut out = 0.0;
    let status = unsafe { cred_kendall_tau_b(ptr::null(), x.as_ptr(), 2, &mut out) };
    assert_eq!(status, CredStatus::NullArgument);
    assert!(last_error().contains("x is null"));

    let status = unsafe { cred_kendall_tau_b(x.as_ptr(), x.as_ptr(), 1, &mut out) };
    assert_eq!(status, CredStatus::Data);
    assert!(last_error().contains("two observations"));

    let unnormalized = [0.7, 0.7];
    let status = unsafe { cred_js_divergence(unnormalized.as_ptr(), x.as_ptr(), 2, &mut out) };
    assert_eq!(status, CredStatus::Data);

    let status = unsafe { cred_kendall_tau_b(x.as_ptr(), x.as_ptr(), 2, ptr::null_mut()) };
    assert_eq!(status, CredStatus::NullArgument);

    let missing = CString::new("/nonexistent/model.bin").unwrap();
    let mut handle = ptr::null_mut();
    let status = unsafe { cred_classifier_load(missing.as_ptr(), ptr::null(), &mut handle) };
    assert_eq!(status, CredStatus::Io);
    assert!(handle.is_null());
    assert!(last_error().contains("/nonexistent/model.bin"));
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        cred_classifier_free(ptr::null_mut());
        cred_results_free(ptr::null_mut());
        assert_eq!(cred_results_len(ptr::null()), 0);
        assert_eq!(cred_classifier_num_features(ptr::null()), 0);
        assert!(cred_results_review_id(ptr::null(), 0).is_null());
    }
    let version = unsafe { CStr::from_ptr(cred_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn classify_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("corpus.jsonl");
    let data = generate(&SynthSpec {
        n_items: 12,
        n_users: 40,
        seed: 4,
        ..SynthSpec::default()
    })
    .unwrap();
    data.write_jsonl(&corpus_path).unwrap();
    let corpus = load_corpus(&corpus_path, InputFormat::Jsonl, LoadOptions::default()).unwrap();

    let hyper = JstHyperParams::new(3, 2).with_schedule(60, 20, 20).with_seed(4);
    let file = fit_facet_model(
        &corpus,
        &Tokenizer::default(),
        &SentimentLexicon::builtin(),
        FacetTraining {
            vocab: VocabConfig::default(),
            hyper,
        },
    )
    .unwrap();
    let facet_path = dir.path().join("facets.bin");
    write_model(&facet_path, &file).unwrap();
    let pipeline = FeaturePipeline::from_file(Tokenizer::default(), file, PipelineConfig::default()).unwrap();
    let extraction = pipeline.extract(&corpus).unwrap();
    let mut model = train_csvm(&extraction.labeled(&corpus), &TrainConfig::default()).unwrap();
    pipeline.record_in(&mut model, &facet_path, None).unwrap();
    let model_path = dir.path().join("model.bin");
    write_linear_model(&model_path, &model).unwrap();

    let c_model = CString::new(model_path.to_str().unwrap()).unwrap();
    let c_corpus = CString::new(corpus_path.to_str().unwrap()).unwrap();
    let mut classifier = ptr::null_mut();
    unsafe {
        assert_eq!(cred_classifier_load(c_model.as_ptr(), ptr::null(), &mut classifier), CredStatus::Ok);
        assert_eq!(cred_classifier_num_features(classifier), model.names().len());
        let mut results = ptr::null_mut();
        assert_eq!(cred_classify_corpus(classifier, c_corpus.as_ptr(), &mut results), CredStatus::Ok);
        assert_eq!(cred_results_len(results), corpus.len());
        for (i, (review, x)) in corpus.reviews().iter().zip(&extraction.vectors).enumerate() {
            let (mut score, mut label) = (0.0, 0);
            assert_eq!(cred_results_get(results, i, &mut score, &mut label), CredStatus::Ok);
            let expected = model.predict(x);
            assert_eq!(score, expected.score);
            assert_eq!(f64::from(label), expected.label.sign());
            let id = CStr::from_ptr(cred_results_review_id(results, i));
            assert_eq!(id.to_str().unwrap(), review.review_id);
        }
        assert_eq!(
            cred_results_get(results, corpus.len(), ptr::null_mut(), ptr::null_mut()),
            CredStatus::InvalidArgument
        );
        cred_results_free(results);
        cred_classifier_free(classifier);
    }
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(header_dir.join("credibility.h").exists(), "generated header missing");
    let lib = target_dir().join("libcredibility_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let source = dir.path().join("main.c");
    std::fs::write(
        &source,
        r#"
#include <stdio.h>
#include "credibility.h"

int main(void) {
    double x[4] = {1, 2, 3, 4};
    double y[4] = {1, 3, 2, 4};
    double tau = 0;
    if (cred_kendall_tau_b(x, y, 4, &tau) != CRED_STATUS_OK) return 1;
    if (cred_kendall_tau_b(NULL, y, 4, &tau) != CRED_STATUS_NULL_ARGUMENT) return 2;
    if (cred_last_error() == NULL) return 3;
    CredClassifier *handle = NULL;
    if (cred_classifier_load("/nonexistent", NULL, &handle) != CRED_STATUS_IO) return 4;
    printf("%.6f %s\n", tau, cred_version());
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&source)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C program failed to compile");
    let output = Command::new(&exe).output().unwrap();
    assert!(output.status.success(), "C program exited with {:?}", output.status);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(stdout.trim(), format!("0.666667 {}", env!("CARGO_PKG_VERSION")));
}

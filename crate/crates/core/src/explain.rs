//! Per-review evidence: the classifier's decision alongside the raw
//! consistency signals, ranked against the scored corpus.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Label};
use crate::error::{Error, Result};
use crate::learn::LinearModel;
use crate::pipeline::Extraction;

pub const TOP_CONTRIBUTIONS: usize = 5;
const HIGH_PERCENTILE: f64 = 90.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub value: f64,
    pub percentile: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub name: String,
    pub weight: f64,
    pub value: f64,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceReport {
    pub review_id: String,
    pub label: Label,
    pub score: f64,
    pub burstiness: Signal,
    pub rating_deviation: Signal,
    pub item_divergence: Signal,
    pub contributions: Vec<Contribution>,
    pub reasons: Vec<String>,
}

/// Mid-rank percentile of each value within `values`, in [0, 100].
pub fn percentiles(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    values
        .iter()
        .map(|v| {
            let below = sorted.partition_point(|s| s.total_cmp(v).is_lt());
            let upto = sorted.partition_point(|s| s.total_cmp(v).is_le());
            let mid = below as f64 + 0.5 * (upto - below) as f64;
            (100.0 * mid / n as f64).clamp(0.0, 100.0)
        })
        .collect()
}

/// One report per review, in corpus order.
pub fn explain(corpus: &Corpus, extraction: &Extraction, model: &LinearModel) -> Result<Vec<EvidenceReport>> {
    let n = corpus.len();
    if extraction.vectors.len() != n || extraction.signals.len() != n {
        return Err(Error::invalid(format!(
            "extraction covers {} reviews, corpus has {n}",
            extraction.vectors.len()
        )));
    }
    let column = |f: fn(&crate::pipeline::ReviewSignals) -> f64| -> Vec<f64> { extraction.signals.iter().map(f).collect() };
    let burst = column(|s| s.burstiness);
    let deviation = column(|s| s.rating_deviation_l1);
    let divergence = column(|s| s.item_divergence);
    let (burst_pct, deviation_pct, divergence_pct) = (percentiles(&burst), percentiles(&deviation), percentiles(&divergence));

    let reports = corpus
        .reviews()
        .iter()
        .zip(&extraction.vectors)
        .enumerate()
        .map(|(i, (review, x))| {
            let prediction = model.predict(x);
            let contributions: Vec<Contribution> = model
                .contributions(x)
                .into_iter()
                .take(TOP_CONTRIBUTIONS)
                .map(|(name, weight, value)| Contribution {
                    name,
                    weight,
                    value,
                    contribution: weight * value,
                })
                .collect();
            let burstiness = Signal {
                value: burst[i],
                percentile: burst_pct[i],
            };
            let rating_deviation = Signal {
                value: deviation[i],
                percentile: deviation_pct[i],
            };
            let item_divergence = Signal {
                value: divergence[i],
                percentile: divergence_pct[i],
            };
            let reasons = reasons(prediction.label, &burstiness, &rating_deviation, &item_divergence, &contributions);
            EvidenceReport {
                review_id: review.review_id.clone(),
                label: prediction.label,
                score: prediction.score,
                burstiness,
                rating_deviation,
                item_divergence,
                contributions,
                reasons,
            }
        })
        .collect();
    Ok(reports)
}

fn reasons(label: Label, burst: &Signal, deviation: &Signal, divergence: &Signal, top: &[Contribution]) -> Vec<String> {
    let mut out = Vec::new();
    if burst.percentile >= HIGH_PERCENTILE {
        out.push(format!(
            "posted in a burst of reviews on the same item (burstiness {:.3}, percentile {:.0})",
            burst.value, burst.percentile
        ));
    }
    if deviation.percentile >= HIGH_PERCENTILE {
        out.push(format!(
            "stated rating disagrees with the sentiment of the text (deviation {:.3}, percentile {:.0})",
            deviation.value, deviation.percentile
        ));
    }
    if divergence.percentile >= HIGH_PERCENTILE {
        out.push(format!(
            "discusses different facets than other reviews of the item (divergence {:.3}, percentile {:.0})",
            divergence.value, divergence.percentile
        ));
    }
    let toward = label.sign();
    if let Some(c) = top.iter().find(|c| c.contribution * toward > 0.0) {
        out.push(format!(
            "strongest evidence for {label}: {} ({:+.3})",
            c.name, c.contribution
        ));
    }
    out
}

pub fn write_reports_jsonl(path: &Path, reports: &[EvidenceReport]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for report in reports {
        serde_json::to_writer(&mut out, report)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles_use_mid_ranks() {
        let p = percentiles(&[3.0, 1.0, 2.0, 2.0]);
        assert_eq!(p, vec![87.5, 12.5, 50.0, 50.0]);
        assert_eq!(percentiles(&[7.0]), vec![50.0]);
        assert!(percentiles(&[]).is_empty());
    }

    #[test]
    fn percentiles_stay_in_range() {
        let values: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64).collect();
        assert!(percentiles(&values).iter().all(|p| (0.0..=100.0).contains(p)));
    }

    #[test]
    fn reasons_flag_high_signals() {
        let high = Signal {
            value: 0.9,
            percentile: 95.0,
        };
        let low = Signal {
            value: 0.1,
            percentile: 10.0,
        };
        let top = vec![Contribution {
            name: "beh:burst".into(),
            weight: -2.0,
            value: 1.0,
            contribution: -2.0,
        }];
        let r = reasons(Label::NonCredible, &high, &low, &low, &top);
        assert_eq!(r.len(), 2);
        assert!(r[0].contains("burst"));
        assert!(r[1].contains("beh:burst"));
        assert!(reasons(Label::Credible, &low, &low, &low, &top).is_empty());
    }
}

//! Ranking and score-prediction evaluation metrics.
//!
//! The ranking-similarity metric is a mean prefix-Jaccard over depths
//! 1..n, which front-loads the penalty for early misrankings. Spearman and
//! Kendall are provided as comparison baselines only.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationReport};

/// Predicted vs labeled per-dimension scores for a test batch.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorePredictionBatch {
    predictions: Vec<Vec<f64>>,
    labels: Vec<Vec<f64>>,
}

impl ScorePredictionBatch {
    pub fn new(predictions: Vec<Vec<f64>>, labels: Vec<Vec<f64>>) -> Result<Self> {
        let mut report = ValidationReport::new();
        if predictions.len() != labels.len() {
            report.push(
                "batch",
                format!(
                    "{} prediction rows vs {} label rows",
                    predictions.len(),
                    labels.len()
                ),
            );
        }
        for (i, (p, l)) in predictions.iter().zip(&labels).enumerate() {
            if p.len() != l.len() {
                report.push(format!("row {i}"), "prediction/label width mismatch");
            }
            for &x in p.iter().chain(l.iter()) {
                if !x.is_finite() {
                    report.push(format!("row {i}"), format!("non-finite entry {x}"));
                    break;
                }
            }
        }
        report.into_result(Self {
            predictions,
            labels,
        })
    }

    pub fn entry_count(&self) -> usize {
        self.predictions.iter().map(Vec::len).sum()
    }
}

/// A predicted ranking paired with its human reference ranking.
///
/// Both sides must be permutations of the same id set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingPair {
    predicted: Vec<String>,
    reference: Vec<String>,
}

impl RankingPair {
    pub fn new(predicted: Vec<String>, reference: Vec<String>) -> Result<Self> {
        let mut report = ValidationReport::new();
        if predicted.is_empty() {
            report.push("ranking pair", "sequences must be non-empty");
        }
        let pset: HashSet<&String> = predicted.iter().collect();
        let rset: HashSet<&String> = reference.iter().collect();
        if pset.len() != predicted.len() {
            report.push("predicted", "duplicate ids");
        }
        if rset.len() != reference.len() {
            report.push("reference", "duplicate ids");
        }
        if pset != rset {
            report.push(
                "ranking pair",
                "predicted and reference are not permutations of the same id set",
            );
        }
        report.into_result(Self {
            predicted,
            reference,
        })
    }

    pub fn predicted(&self) -> &[String] {
        &self.predicted
    }

    pub fn reference(&self) -> &[String] {
        &self.reference
    }

    pub fn len(&self) -> usize {
        self.predicted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicted.is_empty()
    }
}

/// Fraction of entries with `|prediction - label| < t` (strictly less:
/// a difference exactly equal to the threshold counts as incorrect).
pub fn avg_acc(batch: &ScorePredictionBatch, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Config(format!("threshold must be positive, got {t}")));
    }
    let total = batch.entry_count();
    if total == 0 {
        return Err(Error::EmptyMetric("avg_acc"));
    }
    let hits: usize = batch
        .predictions
        .iter()
        .zip(&batch.labels)
        .flat_map(|(p, l)| p.iter().zip(l))
        .filter(|(a, b)| (*a - *b).abs() < t)
        .count();
    Ok(hits as f64 / total as f64)
}

/// Mean absolute error over every entry of the batch.
pub fn mae(batch: &ScorePredictionBatch) -> Result<f64> {
    let total = batch.entry_count();
    if total == 0 {
        return Err(Error::EmptyMetric("mae"));
    }
    let sum: f64 = batch
        .predictions
        .iter()
        .zip(&batch.labels)
        .flat_map(|(p, l)| p.iter().zip(l))
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(sum / total as f64)
}

/// Order-sensitive similarity: mean over depths d of
/// `|prefix_d(predicted) ∩ prefix_d(reference)| / d`.
pub fn os_sim(pair: &RankingPair) -> f64 {
    let n = pair.len();
    let mut sum = 0.0;
    let mut pset: HashSet<&String> = HashSet::with_capacity(n);
    let mut rset: HashSet<&String> = HashSet::with_capacity(n);
    let mut overlap = 0usize;
    for d in 1..=n {
        let p = &pair.predicted[d - 1];
        let r = &pair.reference[d - 1];
        if p == r {
            overlap += 1;
        } else {
            if rset.contains(p) {
                overlap += 1;
            }
            if pset.contains(r) {
                overlap += 1;
            }
        }
        pset.insert(p);
        rset.insert(r);
        sum += overlap as f64 / d as f64;
    }
    sum / n as f64
}

/// Fraction of pairs whose top-ranked ids match.
pub fn first_acc(pairs: &[RankingPair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyMetric("first_acc"));
    }
    let hits = pairs
        .iter()
        .filter(|p| p.predicted[0] == p.reference[0])
        .count();
    Ok(hits as f64 / pairs.len() as f64)
}

/// Arithmetic mean of per-pair [`os_sim`].
pub fn mean_os_sim(pairs: &[RankingPair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyMetric("mean_os_sim"));
    }
    Ok(pairs.iter().map(os_sim).sum::<f64>() / pairs.len() as f64)
}

/// Sample standard deviation (n - 1 divisor); 0 for fewer than two values.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;
    var.sqrt()
}

/// Spearman rank correlation between the two orders of a pair.
/// Baseline for comparison tables only.
pub fn spearman_rho(pair: &RankingPair) -> f64 {
    let n = pair.len();
    if n < 2 {
        return 1.0;
    }
    let d2: f64 = pair
        .predicted
        .iter()
        .enumerate()
        .map(|(rank_p, id)| {
            let rank_r = pair.reference.iter().position(|r| r == id).unwrap();
            let d = rank_p as f64 - rank_r as f64;
            d * d
        })
        .sum();
    1.0 - 6.0 * d2 / (n as f64 * (n as f64 * n as f64 - 1.0))
}

/// Kendall rank correlation between the two orders of a pair.
/// Baseline for comparison tables only.
pub fn kendall_tau(pair: &RankingPair) -> f64 {
    let n = pair.len();
    if n < 2 {
        return 1.0;
    }
    let rank_r: Vec<usize> = pair
        .predicted
        .iter()
        .map(|id| pair.reference.iter().position(|r| r == id).unwrap())
        .collect();
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..n {
        for k in (i + 1)..n {
            if rank_r[i] < rank_r[k] {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    (concordant - discordant) as f64 / (n as f64 * (n as f64 - 1.0) / 2.0)
}

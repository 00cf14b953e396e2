//! Recognition metrics, confusion matrices, top-N accuracy and rejection sweeps.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dtw::KnnResult;
use crate::error::{Error, Result};
use crate::hmm::RecognitionResult;
use crate::trajectory::GestureType;

/// Classifier output for one test sample.
///
/// `ranked` holds `(label, score)` with the prediction first; higher scores
/// are better. `margin` is the score gap between the first two entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub truth: String,
    pub gesture_type: GestureType,
    pub ranked: Vec<(String, f64)>,
    pub margin: f64,
    pub rejected: bool,
}

impl Prediction {
    pub fn from_recognition(
        id: &str,
        truth: &str,
        gesture_type: GestureType,
        result: &RecognitionResult<f64>,
    ) -> Self {
        Self {
            id: id.to_string(),
            truth: truth.to_string(),
            gesture_type,
            ranked: result.ranked.clone(),
            margin: result.margin,
            rejected: result.rejected,
        }
    }

    /// Ranks labels by their nearest training distance, with the vote winner first.
    pub fn from_knn(id: &str, truth: &str, gesture_type: GestureType, knn: &KnnResult<f64>) -> Self {
        let mut best: BTreeMap<&str, f64> = BTreeMap::new();
        for nb in &knn.neighbors {
            best.entry(nb.label.as_str()).or_insert(nb.distance);
        }
        let mut others: Vec<(String, f64)> = best
            .iter()
            .filter(|(l, _)| **l != knn.label)
            .map(|(l, d)| (l.to_string(), -d))
            .collect();
        others.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let top = -best[knn.label.as_str()];
        let margin = others
            .first()
            .map_or(0.0, |(_, s)| if top.is_finite() { (top - s).max(0.0) } else { 0.0 });
        let mut ranked = vec![(knn.label.clone(), top)];
        ranked.extend(others);
        Self {
            id: id.to_string(),
            truth: truth.to_string(),
            gesture_type,
            ranked,
            margin,
            rejected: false,
        }
    }

    pub fn predicted(&self) -> &str {
        self.ranked.first().map_or("", |(l, _)| l.as_str())
    }

    /// Rejected at `threshold`: margin below it with at least two candidates.
    pub fn rejected_at(&self, threshold: f64) -> bool {
        self.ranked.len() >= 2 && self.margin < threshold
    }
}

/// Correct, wrong and rejected counts. `total` is always their sum.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounts {
    pub correct: usize,
    pub error: usize,
    pub rejected: usize,
    pub total: usize,
}

impl EvalCounts {
    pub fn new(correct: usize, error: usize, rejected: usize) -> Self {
        Self {
            correct,
            error,
            rejected,
            total: correct + error + rejected,
        }
    }

    /// Counts at a rejection threshold; rejected samples are not errors.
    pub fn from_predictions<'a, I: IntoIterator<Item = &'a Prediction>>(preds: I, threshold: f64) -> Self {
        let (mut c, mut e, mut r) = (0, 0, 0);
        for p in preds {
            if p.rejected_at(threshold) {
                r += 1;
            } else if p.predicted() == p.truth {
                c += 1;
            } else {
                e += 1;
            }
        }
        Self::new(c, e, r)
    }

    pub fn merge(self, other: Self) -> Self {
        Self::new(
            self.correct + other.correct,
            self.error + other.error,
            self.rejected + other.rejected,
        )
    }
}

/// Percentages; `reliability` is absent when nothing was accepted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub recognition: f64,
    pub error: f64,
    pub reject: f64,
    pub reliability: Option<f64>,
}

pub fn compute_metrics(counts: &EvalCounts) -> Result<Metrics> {
    if counts.total == 0 {
        return Err(Error::Empty("evaluation set"));
    }
    if counts.total != counts.correct + counts.error + counts.rejected {
        return Err(Error::Validation {
            index: 0,
            message: "total differs from correct + error + rejected".into(),
        });
    }
    let t = counts.total as f64;
    let accepted = counts.correct + counts.error;
    Ok(Metrics {
        recognition: counts.correct as f64 * 100.0 / t,
        error: counts.error as f64 * 100.0 / t,
        reject: counts.rejected as f64 * 100.0 / t,
        reliability: (accepted > 0).then(|| counts.correct as f64 * 100.0 / accepted as f64),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfusedPair {
    pub truth: String,
    pub predicted: String,
    pub count: usize,
    /// Share of the true class's accepted samples, percent.
    pub rate: f64,
}

/// Row = true label, column = predicted label; rejected samples are left out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
    pub rejected: usize,
}

impl ConfusionMatrix {
    pub fn get(&self, truth: &str, predicted: &str) -> usize {
        let i = self.labels.iter().position(|l| l == truth);
        let j = self.labels.iter().position(|l| l == predicted);
        match (i, j) {
            (Some(i), Some(j)) => self.counts[i][j],
            _ => 0,
        }
    }

    /// Off-diagonal cells, most frequent first.
    pub fn most_confused(&self) -> Vec<ConfusedPair> {
        let mut pairs = Vec::new();
        for (i, row) in self.counts.iter().enumerate() {
            let row_total: usize = row.iter().sum();
            for (j, &c) in row.iter().enumerate() {
                if i != j && c > 0 {
                    pairs.push(ConfusedPair {
                        truth: self.labels[i].clone(),
                        predicted: self.labels[j].clone(),
                        count: c,
                        rate: c as f64 * 100.0 / row_total as f64,
                    });
                }
            }
        }
        pairs.sort_by(|a, b| {
            b.count
                .cmp(&a.count)
                .then(b.rate.total_cmp(&a.rate))
                .then_with(|| (&a.truth, &a.predicted).cmp(&(&b.truth, &b.predicted)))
        });
        pairs
    }
}

/// Confusion matrix over every label seen as truth or prediction.
pub fn confusion(preds: &[Prediction], threshold: f64) -> ConfusionMatrix {
    let labels: Vec<String> = preds
        .iter()
        .flat_map(|p| [p.truth.as_str(), p.predicted()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_string)
        .collect();
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut counts = vec![vec![0; labels.len()]; labels.len()];
    let mut rejected = 0;
    for p in preds {
        if p.rejected_at(threshold) {
            rejected += 1;
        } else {
            counts[index[p.truth.as_str()]][index[p.predicted()]] += 1;
        }
    }
    ConfusionMatrix {
        labels,
        counts,
        rejected,
    }
}

/// Percentage of samples whose true label is among the first `n` ranked labels.
pub fn top_n_accuracy(preds: &[Prediction], n: usize) -> f64 {
    if preds.is_empty() {
        return 0.0;
    }
    let hits = preds
        .iter()
        .filter(|p| p.ranked.iter().take(n).any(|(l, _)| *l == p.truth))
        .count();
    hits as f64 * 100.0 / preds.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub counts: EvalCounts,
    pub metrics: Metrics,
}

/// Metrics at each threshold, in ascending threshold order.
pub fn rejection_sweep(preds: &[Prediction], thresholds: &[f64]) -> Result<Vec<SweepPoint>> {
    let mut ts = thresholds.to_vec();
    if ts.iter().any(|t| t.is_nan() || *t < 0.0) {
        return Err(Error::Config("rejection thresholds must be nonnegative".into()));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts.into_iter()
        .map(|threshold| {
            let counts = EvalCounts::from_predictions(preds, threshold);
            Ok(SweepPoint {
                threshold,
                counts,
                metrics: compute_metrics(&counts)?,
            })
        })
        .collect()
}

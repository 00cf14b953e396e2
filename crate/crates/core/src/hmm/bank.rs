//! Per-class model banks, ranked recognition and persistence.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forward::forward_log_likelihood;
use super::train::{init_model, train_model, TrainConfig};
use super::HmmModel;
use crate::error::{Error, Result};
use crate::features::{FeatureDim, FeatureSequence};
use crate::scalar::Scalar;
use crate::trajectory::GestureType;

/// Tag written at the top of every bank file.
pub const BANK_FORMAT: &str = "gesture-hmm-bank";
pub const BANK_VERSION: u32 = 1;

/// Largest number of classes one bank may hold.
pub const MAX_BANK_LABELS: usize = 36;

/// Hyper-parameters a bank was trained with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingSnapshot {
    pub states: usize,
    pub gaussians: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub variance_floor: f64,
    pub seed: u64,
}

impl Default for TrainingSnapshot {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            states: 7,
            gaussians: 8,
            max_iter: t.max_iter,
            tol: t.tol,
            variance_floor: t.variance_floor,
            seed: 0,
        }
    }
}

impl TrainingSnapshot {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            max_iter: self.max_iter,
            tol: self.tol,
            variance_floor: self.variance_floor,
        }
    }
}

/// One trained model per label, all over the same feature set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ClassifierBank<T> {
    pub dim: FeatureDim,
    #[serde(default)]
    pub gesture_type: Option<GestureType>,
    pub config: TrainingSnapshot,
    pub models: BTreeMap<String, HmmModel<T>>,
}

/// FNV-1a, used to give every class its own seed independent of the other classes.
fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl<T: Scalar> ClassifierBank<T> {
    pub fn new(dim: FeatureDim, config: TrainingSnapshot) -> Self {
        Self {
            dim,
            gesture_type: None,
            config,
            models: BTreeMap::new(),
        }
    }

    pub fn with_gesture_type(mut self, gesture_type: GestureType) -> Self {
        self.gesture_type = Some(gesture_type);
        self
    }

    /// Trains one model per label. Classes are trained in parallel; the result
    /// only depends on the data and `config.seed`.
    ///
    /// Returns the bank together with any initialisation warnings.
    pub fn train(
        data: &BTreeMap<String, Vec<FeatureSequence<T>>>,
        config: TrainingSnapshot,
    ) -> Result<(Self, Vec<String>)> {
        let dim = data
            .values()
            .flatten()
            .next()
            .map(|s| s.dim)
            .ok_or(Error::Empty("training set"))?;
        if data.len() > MAX_BANK_LABELS {
            return Err(Error::Config(format!(
                "{} classes exceed the bank limit of {MAX_BANK_LABELS}",
                data.len()
            )));
        }
        let train_cfg = config.train_config();
        let trained: Vec<(String, HmmModel<T>, Vec<String>)> = data
            .par_iter()
            .map(|(label, seqs)| {
                let seed = config.seed ^ label_hash(label);
                let init = init_model(seqs, config.states, config.gaussians, seed)?;
                let report = train_model(init.model, seqs, &train_cfg)?;
                let warnings = init
                    .warnings
                    .into_iter()
                    .map(|w| format!("{label}: {w}"))
                    .collect();
                Ok((label.clone(), report.model, warnings))
            })
            .collect::<Result<_>>()?;
        let mut bank = Self::new(dim, config);
        let mut warnings = Vec::new();
        for (label, model, w) in trained {
            bank.models.insert(label, model);
            warnings.extend(w);
        }
        Ok((bank, warnings))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.len() > MAX_BANK_LABELS {
            return Err(Error::Corrupt(format!("{} models in one bank", self.models.len())));
        }
        for (label, m) in &self.models {
            if m.dim != self.dim {
                return Err(Error::Corrupt(format!("model {label} has feature set {:?}", m.dim)));
            }
            m.validate()
                .map_err(|e| Error::Corrupt(format!("model {label}: {e}")))?;
        }
        Ok(())
    }
}

/// Ranked scores for one observation sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RecognitionResult<T> {
    /// `(label, log-likelihood)`, best first.
    pub ranked: Vec<(String, T)>,
    /// Best minus second-best log-likelihood; zero with a single candidate.
    pub margin: T,
    pub rejected: bool,
}

impl<T: Scalar> RecognitionResult<T> {
    /// Builds a result from unordered scores, ranking them descending with ties
    /// broken by label.
    pub fn from_scores(mut scores: Vec<(String, T)>) -> Self {
        scores.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
        let margin = match scores.as_slice() {
            [(_, a), (_, b), ..] if a.is_finite() || b.is_finite() => *a - *b,
            _ => T::zero(),
        };
        Self {
            ranked: scores,
            margin,
            rejected: false,
        }
    }

    pub fn best(&self) -> Option<&str> {
        self.ranked.first().map(|(l, _)| l.as_str())
    }

    pub fn top(&self, n: usize) -> impl Iterator<Item = &str> {
        self.ranked.iter().take(n).map(|(l, _)| l.as_str())
    }
}

/// Scores `obs` against every model in the bank.
pub fn recognize<T: Scalar>(
    obs: &FeatureSequence<T>,
    bank: &ClassifierBank<T>,
) -> Result<RecognitionResult<T>> {
    if bank.is_empty() {
        return Err(Error::Empty("classifier bank"));
    }
    let scores = bank
        .models
        .iter()
        .map(|(label, model)| Ok((label.clone(), forward_log_likelihood(obs, model)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RecognitionResult::from_scores(scores))
}

/// Flags results whose margin falls below `threshold`. A lone candidate is never rejected.
pub fn apply_rejection<T: Scalar>(mut result: RecognitionResult<T>, threshold: T) -> RecognitionResult<T> {
    result.rejected = result.ranked.len() >= 2 && result.margin < threshold;
    result
}

#[derive(Serialize)]
#[serde(bound = "T: Scalar")]
struct EnvelopeRef<'a, T> {
    format: &'static str,
    version: u32,
    bank: &'a ClassifierBank<T>,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

/// Writes the bank as a versioned JSON document.
pub fn save_bank<T: Scalar, W: Write>(bank: &ClassifierBank<T>, mut writer: W) -> Result<()> {
    let env = EnvelopeRef {
        format: BANK_FORMAT,
        version: BANK_VERSION,
        bank,
    };
    serde_json::to_writer_pretty(&mut writer, &env).map_err(|e| Error::Corrupt(e.to_string()))?;
    writer.write_all(b"\n")?;
    Ok(())
}

/// Reads a bank written by [`save_bank`].
pub fn load_bank<T: Scalar, R: Read>(mut reader: R) -> Result<ClassifierBank<T>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Corrupt(e.to_string()))?;
    let header: Header =
        serde_json::from_value(value.clone()).map_err(|e| Error::Corrupt(e.to_string()))?;
    if header.format != BANK_FORMAT {
        return Err(Error::Corrupt(format!("unexpected format tag {:?}", header.format)));
    }
    if header.version != BANK_VERSION {
        return Err(Error::Version {
            found: header.version,
            expected: BANK_VERSION,
        });
    }
    let bank_value = value
        .get_mut("bank")
        .map(serde_json::Value::take)
        .ok_or_else(|| Error::Corrupt("missing bank".into()))?;
    let bank: ClassifierBank<T> =
        serde_json::from_value(bank_value).map_err(|e| Error::Corrupt(e.to_string()))?;
    bank.validate()?;
    Ok(bank)
}

//! A trained classifier for both gesture families, ready to label new recordings.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::HmmParams;
use crate::hmm::{apply_rejection, load_bank, recognize, save_bank, ClassifierBank};
use crate::pipeline::{sample_features, FeatureSet, PipelineConfig};
use crate::synth::derive_seed;
use crate::trajectory::{spot_gestures, Frame, GestureSample, GestureType, Recording, Source, MIN_TRAJECTORY_LEN};

pub const RECOGNIZER_FORMAT: &str = "gesture-recognizer";
pub const RECOGNIZER_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Recognizer {
    pub name: String,
    pub pipeline: PipelineConfig,
    pub single: Option<ClassifierBank<f64>>,
    pub multi: Option<ClassifierBank<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyOptions {
    /// Margin (log-likelihood gap) below which the result is rejected.
    pub rejection_threshold: f64,
    /// Keep only the first `top_n` ranked labels.
    pub top_n: Option<usize>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            rejection_threshold: 0.0,
            top_n: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelScore {
    pub label: String,
    /// Log-likelihood of the gesture under the label's model.
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub gesture_type: GestureType,
    /// Best first.
    pub ranked: Vec<LabelScore>,
    pub margin: f64,
    pub rejected: bool,
}

impl Classification {
    pub fn best(&self) -> Option<&str> {
        self.ranked.first().map(|s| s.label.as_str())
    }
}

#[derive(Serialize, Deserialize)]
struct Document {
    format: String,
    version: u32,
    name: String,
    pipeline: PipelineConfig,
    /// Bank files are embedded as their own versioned documents.
    banks: BTreeMap<String, serde_json::Value>,
}

impl Recognizer {
    /// Trains one bank per gesture family found in `samples`.
    pub fn train(
        name: &str,
        samples: &[GestureSample<f64>],
        pipeline: PipelineConfig,
        hmm: &HmmParams,
        seed: u64,
    ) -> Result<(Self, Vec<String>)> {
        if samples.is_empty() {
            return Err(Error::Empty("training set"));
        }
        let mut out = Self {
            name: name.to_string(),
            pipeline,
            single: None,
            multi: None,
        };
        let mut warnings = Vec::new();
        for gt in [GestureType::Single, GestureType::Multi] {
            let mut data: BTreeMap<String, Vec<_>> = BTreeMap::new();
            for s in samples.iter().filter(|s| s.gesture_type == gt) {
                let label = s
                    .label
                    .clone()
                    .ok_or_else(|| Error::Config(format!("sample {} has no label", s.id)))?;
                data.entry(label).or_default().push(sample_features(s, &pipeline)?);
            }
            if data.is_empty() {
                continue;
            }
            let mut snap = hmm.snapshot(gt, derive_seed(seed, gt as u64));
            if pipeline.features == FeatureSet::Moments6 {
                snap.states = 1;
            }
            let (bank, w) = ClassifierBank::train(&data, snap)?;
            warnings.extend(w.into_iter().map(|w| format!("{gt}: {w}")));
            let bank = bank.with_gesture_type(gt);
            match gt {
                GestureType::Single => out.single = Some(bank),
                GestureType::Multi => out.multi = Some(bank),
            }
        }
        Ok((out, warnings))
    }

    pub fn bank(&self, gesture_type: GestureType) -> Option<&ClassifierBank<f64>> {
        match gesture_type {
            GestureType::Single => self.single.as_ref(),
            GestureType::Multi => self.multi.as_ref(),
        }
    }

    /// Every label with its family, single-finger ones first.
    pub fn labels(&self) -> Vec<(String, GestureType)> {
        [GestureType::Single, GestureType::Multi]
            .into_iter()
            .filter_map(|gt| self.bank(gt).map(|b| (gt, b)))
            .flat_map(|(gt, b)| b.labels().map(move |l| (l.to_string(), gt)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.single.as_ref().map_or(0, ClassifierBank::len) + self.multi.as_ref().map_or(0, ClassifierBank::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn classify_sample(&self, sample: &GestureSample<f64>, options: &ClassifyOptions) -> Result<Classification> {
        let bank = self.bank(sample.gesture_type).ok_or_else(|| {
            Error::Config(format!("no {} gesture classes are loaded", sample.gesture_type))
        })?;
        let feats = sample_features(sample, &self.pipeline)?;
        let result = apply_rejection(recognize(&feats, bank)?, options.rejection_threshold);
        let keep = options.top_n.unwrap_or(usize::MAX);
        Ok(Classification {
            gesture_type: sample.gesture_type,
            ranked: result
                .ranked
                .into_iter()
                .take(keep)
                .map(|(label, score)| LabelScore { label, score })
                .collect(),
            margin: result.margin,
            rejected: result.rejected,
        })
    }

    /// Spots the longest gesture in `frames` and classifies it.
    pub fn spot_longest(frames: Vec<Frame<f64>>) -> Result<GestureSample<f64>> {
        if frames.len() < MIN_TRAJECTORY_LEN {
            return Err(Error::TooShort {
                needed: MIN_TRAJECTORY_LEN,
                got: frames.len(),
            });
        }
        let rec = Recording {
            frames,
            source: Source::Live,
            user_id: String::new(),
        };
        rec.validate()?;
        spot_gestures(&rec)
            .into_iter()
            .max_by_key(|s| s.trajectory.len())
            .ok_or(Error::Empty("spotted gesture"))
    }

    pub fn classify_frames(&self, frames: Vec<Frame<f64>>, options: &ClassifyOptions) -> Result<Classification> {
        self.classify_sample(&Self::spot_longest(frames)?, options)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut banks = BTreeMap::new();
        for (key, bank) in [("single", &self.single), ("multi", &self.multi)] {
            if let Some(b) = bank {
                let mut buf = Vec::new();
                save_bank(b, &mut buf)?;
                let v = serde_json::from_slice(&buf).map_err(|e| Error::Corrupt(e.to_string()))?;
                banks.insert(key.to_string(), v);
            }
        }
        let doc = Document {
            format: RECOGNIZER_FORMAT.into(),
            version: RECOGNIZER_VERSION,
            name: self.name.clone(),
            pipeline: self.pipeline,
            banks,
        };
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Corrupt(e.to_string()))?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let doc: Document = serde_json::from_reader(BufReader::new(fs::File::open(path)?))
            .map_err(|e| Error::Corrupt(e.to_string()))?;
        if doc.format != RECOGNIZER_FORMAT {
            return Err(Error::Corrupt(format!("unexpected format tag {:?}", doc.format)));
        }
        if doc.version != RECOGNIZER_VERSION {
            return Err(Error::Version {
                found: doc.version,
                expected: RECOGNIZER_VERSION,
            });
        }
        let bank = |key: &str, gt: GestureType| -> Result<Option<ClassifierBank<f64>>> {
            let Some(v) = doc.banks.get(key) else {
                return Ok(None);
            };
            let b: ClassifierBank<f64> = load_bank(v.to_string().as_bytes())?;
            if b.gesture_type != Some(gt) {
                return Err(Error::Corrupt(format!("{key} bank holds the wrong gesture family")));
            }
            Ok(Some(b))
        };
        let out = Self {
            name: doc.name.clone(),
            pipeline: doc.pipeline,
            single: bank("single", GestureType::Single)?,
            multi: bank("multi", GestureType::Multi)?,
        };
        if out.is_empty() {
            return Err(Error::Empty("recognizer"));
        }
        Ok(out)
    }
}

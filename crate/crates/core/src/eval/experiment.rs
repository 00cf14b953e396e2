//! Config-driven cross-validation experiments.
//!
//! Each gesture family gets its own classifier: single-finger test samples
//! are only scored against single-finger classes and likewise for
//! multi-finger ones. Metrics are pooled over both families.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{group_kfold_split, kfold_split, Fold, SplitMode};
use super::metrics::{
    compute_metrics, confusion, rejection_sweep, top_n_accuracy, ConfusedPair, ConfusionMatrix,
    EvalCounts, Metrics, Prediction, SweepPoint,
};
use crate::dataset::{labeled_segment, load_samples};
use crate::dtw::{knn_classify, DtwConfig};
use crate::error::{Error, Result};
use crate::features::FeatureSequence;
use crate::hmm::{recognize, ClassifierBank, TrainingSnapshot, DEFAULT_VARIANCE_FLOOR};
use crate::pipeline::{sample_features, FeatureSet, PipelineConfig};
use crate::synth::{derive_seed, generate_dataset, SynthConfig};
use crate::trajectory::{GestureSample, GestureType, DEFAULT_RESAMPLE_LEN};

/// Version of the report layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classifier {
    Hmm,
    DtwKnn,
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classifier::Hmm => "hmm",
            Classifier::DtwKnn => "dtw-knn",
        })
    }
}

/// HMM sizes per gesture family and the training stopping rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HmmParams {
    pub states_single: usize,
    pub states_multi: usize,
    pub gaussians_single: usize,
    pub gaussians_multi: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub variance_floor: f64,
}

impl Default for HmmParams {
    fn default() -> Self {
        Self {
            states_single: 7,
            states_multi: 8,
            gaussians_single: 8,
            gaussians_multi: 8,
            max_iter: 20,
            tol: 1e-4,
            variance_floor: DEFAULT_VARIANCE_FLOOR,
        }
    }
}

impl HmmParams {
    pub fn snapshot(&self, gesture_type: GestureType, seed: u64) -> TrainingSnapshot {
        let (states, gaussians) = match gesture_type {
            GestureType::Single => (self.states_single, self.gaussians_single),
            GestureType::Multi => (self.states_multi, self.gaussians_multi),
        };
        TrainingSnapshot {
            states,
            gaussians,
            max_iter: self.max_iter,
            tol: self.tol,
            variance_floor: self.variance_floor,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub name: String,
    pub classifier: Classifier,
    pub features: FeatureSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Cap on training samples per class within each fold.
    TrainingPerClass,
    States,
    Gaussians,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Name of the run whose settings are varied.
    pub run: String,
    pub axis: SweepAxis,
    pub values: Vec<usize>,
}

fn default_folds() -> usize {
    5
}

fn default_resample() -> usize {
    DEFAULT_RESAMPLE_LEN
}

fn default_thresholds() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0]
}

fn default_top_n() -> Vec<usize> {
    vec![1, 2, 3, 5]
}

/// Experiment description, normally read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Dataset manifest, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    /// Generate the dataset in memory instead of reading a manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub split: SplitMode,
    #[serde(default = "default_resample")]
    pub resample_len: usize,
    /// Margin below which a result counts as rejected in the headline metrics.
    #[serde(default)]
    pub rejection_threshold: f64,
    #[serde(default = "default_thresholds")]
    pub rejection_sweep: Vec<f64>,
    #[serde(default = "default_top_n")]
    pub top_n: Vec<usize>,
    #[serde(default)]
    pub hmm: HmmParams,
    #[serde(default)]
    pub dtw: DtwConfig,
    pub runs: Vec<RunSpec>,
    #[serde(default)]
    pub sweeps: Vec<SweepSpec>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    /// Rejects inconsistent settings before any data is touched.
    pub fn validate(&self) -> Result<()> {
        match (&self.manifest, &self.synth) {
            (Some(_), Some(_)) => return Err(Error::Config("give either manifest or synth, not both".into())),
            (None, None) => return Err(Error::Config("no dataset: set manifest or synth".into())),
            (None, Some(s)) => s.validate()?,
            _ => {}
        }
        if self.folds < 2 {
            return Err(Error::Config("at least 2 folds are needed".into()));
        }
        if self.resample_len < crate::trajectory::MIN_TRAJECTORY_LEN {
            return Err(Error::Config("resample_len must be at least 7".into()));
        }
        if self.runs.is_empty() {
            return Err(Error::Config("no runs configured".into()));
        }
        let mut names = BTreeSet::new();
        for r in &self.runs {
            if !names.insert(r.name.as_str()) {
                return Err(Error::Config(format!("duplicate run name `{}`", r.name)));
            }
        }
        let h = &self.hmm;
        if [h.states_single, h.states_multi, h.gaussians_single, h.gaussians_multi].contains(&0) {
            return Err(Error::Config("HMM states and gaussians must be at least 1".into()));
        }
        if !(h.variance_floor > 0.0) || !(h.tol >= 0.0) {
            return Err(Error::Config("variance_floor must be positive and tol nonnegative".into()));
        }
        self.dtw.validate()?;
        if self.rejection_threshold < 0.0 || self.rejection_sweep.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::Config("rejection thresholds must be nonnegative".into()));
        }
        if self.top_n.contains(&0) {
            return Err(Error::Config("top_n entries must be at least 1".into()));
        }
        for s in &self.sweeps {
            let run = self
                .runs
                .iter()
                .find(|r| r.name == s.run)
                .ok_or_else(|| Error::Config(format!("sweep refers to unknown run `{}`", s.run)))?;
            if s.values.is_empty() || s.values.contains(&0) {
                return Err(Error::Config("sweep values must be positive".into()));
            }
            if s.axis != SweepAxis::TrainingPerClass && run.classifier != Classifier::Hmm {
                return Err(Error::Config(format!("run `{}` has no HMM parameters to sweep", s.run)));
            }
        }
        Ok(())
    }
}

/// Labeled samples an experiment runs on. `base` resolves a relative manifest path.
pub fn experiment_samples(config: &ExperimentConfig, base: &Path) -> Result<Vec<GestureSample<f64>>> {
    if let Some(m) = &config.manifest {
        return load_samples(&base.join(m));
    }
    let synth = config.synth.as_ref().ok_or_else(|| Error::Config("no dataset".into()))?;
    generate_dataset(synth)?
        .par_iter()
        .map(|s| labeled_segment(&s.recording, &s.id, &s.label, s.gesture_type))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub counts: EvalCounts,
    pub metrics: Metrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopN {
    pub n: usize,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub classifier: Classifier,
    pub features: FeatureSet,
    pub counts: EvalCounts,
    pub metrics: Metrics,
    /// Recognition rate averaged over folds.
    pub mean_fold_recognition: f64,
    pub folds: Vec<FoldReport>,
    /// Per gesture family (`single` / `multi`).
    pub by_type: BTreeMap<String, FoldReport>,
    pub confusion: ConfusionMatrix,
    pub most_confused: Vec<ConfusedPair>,
    pub top_n: Vec<TopN>,
    pub rejection_sweep: Vec<SweepPoint>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepValue {
    pub value: usize,
    pub recognition: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub run: String,
    pub axis: SweepAxis,
    pub points: Vec<SweepValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub samples: usize,
    pub classes: usize,
    pub single: usize,
    pub multi: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub name: String,
    pub config: ExperimentConfig,
    pub dataset: DatasetSummary,
    pub runs: Vec<RunReport>,
    pub sweeps: Vec<SweepReport>,
}

impl ExperimentReport {
    pub fn run(&self, name: &str) -> Option<&RunReport> {
        self.runs.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Overrides applied to a run for one sweep point.
#[derive(Clone, Copy, Debug, Default)]
struct Overrides {
    per_class: Option<usize>,
    states: Option<usize>,
    gaussians: Option<usize>,
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    samples: &'a [GestureSample<f64>],
    folds: Vec<Fold>,
}

fn features_for(
    samples: &[GestureSample<f64>],
    set: FeatureSet,
    resample_len: usize,
) -> Result<Vec<FeatureSequence<f64>>> {
    let cfg = PipelineConfig {
        resample_len,
        features: set,
    };
    samples.par_iter().map(|s| sample_features(s, &cfg)).collect()
}

fn label_of(s: &GestureSample<f64>) -> &str {
    s.label.as_deref().unwrap_or("")
}

/// Training indices of one family, keeping at most `cap` per class in index order.
fn training_subset(ctx: &Context, fold: &Fold, gt: GestureType, cap: Option<usize>) -> Vec<usize> {
    let mut taken: BTreeMap<&str, usize> = BTreeMap::new();
    fold.train
        .iter()
        .copied()
        .filter(|&i| ctx.samples[i].gesture_type == gt)
        .filter(|&i| {
            let n = taken.entry(label_of(&ctx.samples[i])).or_insert(0);
            *n += 1;
            cap.is_none_or(|c| *n <= c)
        })
        .collect()
}

fn evaluate_fold(
    ctx: &Context,
    run: &RunSpec,
    feats: &[FeatureSequence<f64>],
    fold_index: usize,
    ov: Overrides,
) -> Result<(Vec<Prediction>, Vec<String>)> {
    let fold = &ctx.folds[fold_index];
    let mut preds = Vec::with_capacity(fold.test.len());
    let mut warnings = Vec::new();
    for gt in [GestureType::Single, GestureType::Multi] {
        let test: Vec<usize> = fold
            .test
            .iter()
            .copied()
            .filter(|&i| ctx.samples[i].gesture_type == gt)
            .collect();
        if test.is_empty() {
            continue;
        }
        let train = training_subset(ctx, fold, gt, ov.per_class);
        if train.is_empty() {
            return Err(Error::Config(format!("fold {fold_index} has no {gt} training samples")));
        }
        match run.classifier {
            Classifier::Hmm => {
                let mut data: BTreeMap<String, Vec<FeatureSequence<f64>>> = BTreeMap::new();
                for &i in &train {
                    data.entry(label_of(&ctx.samples[i]).to_string())
                        .or_default()
                        .push(feats[i].clone());
                }
                let seed = derive_seed(ctx.config.seed, (fold_index * 2 + gt as usize) as u64);
                let mut snap = ctx.config.hmm.snapshot(gt, seed);
                if let Some(s) = ov.states {
                    snap.states = s;
                }
                if let Some(g) = ov.gaussians {
                    snap.gaussians = g;
                }
                if run.features == FeatureSet::Moments6 && snap.states > 1 {
                    warnings.push(format!("{gt}: moments6 is one vector per sample, using 1 state"));
                    snap.states = 1;
                }
                let (bank, w) = ClassifierBank::train(&data, snap)?;
                warnings.extend(w.into_iter().map(|w| format!("{gt}: {w}")));
                let scored = test
                    .par_iter()
                    .map(|&i| {
                        let s = &ctx.samples[i];
                        let r = recognize(&feats[i], &bank)?;
                        Ok(Prediction::from_recognition(&s.id, label_of(s), gt, &r))
                    })
                    .collect::<Result<Vec<_>>>()?;
                preds.extend(scored);
            }
            Classifier::DtwKnn => {
                let train_set: Vec<(String, Vec<Vec<f64>>)> = train
                    .iter()
                    .map(|&i| (label_of(&ctx.samples[i]).to_string(), feats[i].rows.clone()))
                    .collect();
                let mut dtw = ctx.config.dtw;
                dtw.k = dtw.k.min(train_set.len());
                let scored = test
                    .par_iter()
                    .map(|&i| {
                        let s = &ctx.samples[i];
                        let r = knn_classify(&feats[i].rows, &train_set, &dtw)?;
                        Ok(Prediction::from_knn(&s.id, label_of(s), gt, &r))
                    })
                    .collect::<Result<Vec<_>>>()?;
                preds.extend(scored);
            }
        }
    }
    Ok((preds, warnings))
}

fn evaluate_run(
    ctx: &Context,
    run: &RunSpec,
    feats: &[FeatureSequence<f64>],
    ov: Overrides,
) -> Result<Vec<(Vec<Prediction>, Vec<String>)>> {
    (0..ctx.folds.len())
        .into_par_iter()
        .map(|f| evaluate_fold(ctx, run, feats, f, ov))
        .collect()
}

fn summarize(ctx: &Context, run: &RunSpec, outcome: Vec<(Vec<Prediction>, Vec<String>)>) -> Result<RunReport> {
    let thr = ctx.config.rejection_threshold;
    let mut folds = Vec::with_capacity(outcome.len());
    let mut all = Vec::new();
    let mut warnings = BTreeSet::new();
    for (f, (preds, w)) in outcome.into_iter().enumerate() {
        let counts = EvalCounts::from_predictions(&preds, thr);
        folds.push(FoldReport {
            fold: f,
            counts,
            metrics: compute_metrics(&counts)?,
        });
        all.extend(preds);
        warnings.extend(w);
    }
    let counts = EvalCounts::from_predictions(&all, thr);
    let mut by_type = BTreeMap::new();
    for gt in [GestureType::Single, GestureType::Multi] {
        let c = EvalCounts::from_predictions(all.iter().filter(|p| p.gesture_type == gt), thr);
        if c.total > 0 {
            by_type.insert(
                gt.as_str().to_string(),
                FoldReport {
                    fold: 0,
                    counts: c,
                    metrics: compute_metrics(&c)?,
                },
            );
        }
    }
    let conf = confusion(&all, thr);
    let mut most_confused = conf.most_confused();
    most_confused.truncate(10);
    let mean_fold_recognition =
        folds.iter().map(|f| f.metrics.recognition).sum::<f64>() / folds.len() as f64;
    let top_n = ctx
        .config
        .top_n
        .iter()
        .map(|&n| TopN {
            n,
            accuracy: top_n_accuracy(&all, n),
        })
        .collect();
    Ok(RunReport {
        name: run.name.clone(),
        classifier: run.classifier,
        features: run.features,
        counts,
        metrics: compute_metrics(&counts)?,
        mean_fold_recognition,
        folds,
        by_type,
        confusion: conf,
        most_confused,
        top_n,
        rejection_sweep: rejection_sweep(&all, &ctx.config.rejection_sweep)?,
        warnings: warnings.into_iter().collect(),
    })
}

/// Runs every configured classifier and sweep over the same folds.
pub fn run_experiment(config: &ExperimentConfig, samples: &[GestureSample<f64>]) -> Result<ExperimentReport> {
    config.validate()?;
    if samples.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    if let Some(s) = samples.iter().find(|s| s.label.is_none()) {
        return Err(Error::Config(format!("sample {} has no label", s.id)));
    }
    let folds = match config.split {
        SplitMode::Stratified => {
            let labels: Vec<&str> = samples.iter().map(label_of).collect();
            kfold_split(&labels, config.folds, config.seed)?
        }
        SplitMode::User => {
            let users: Vec<&str> = samples.iter().map(|s| s.user_id.as_str()).collect();
            group_kfold_split(&users, config.folds, config.seed)?
        }
    };
    let ctx = Context {
        config,
        samples,
        folds,
    };

    let mut cache: BTreeMap<FeatureSet, Vec<FeatureSequence<f64>>> = BTreeMap::new();
    for r in &config.runs {
        if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(r.features) {
            e.insert(features_for(samples, r.features, config.resample_len)?);
        }
    }

    let mut runs = Vec::with_capacity(config.runs.len());
    for r in &config.runs {
        let outcome = evaluate_run(&ctx, r, &cache[&r.features], Overrides::default())?;
        runs.push(summarize(&ctx, r, outcome)?);
    }

    let mut sweeps = Vec::with_capacity(config.sweeps.len());
    for s in &config.sweeps {
        let run = config.runs.iter().find(|r| r.name == s.run).expect("validated");
        let mut points = Vec::with_capacity(s.values.len());
        for &value in &s.values {
            let ov = match s.axis {
                SweepAxis::TrainingPerClass => Overrides {
                    per_class: Some(value),
                    ..Overrides::default()
                },
                SweepAxis::States => Overrides {
                    states: Some(value),
                    ..Overrides::default()
                },
                SweepAxis::Gaussians => Overrides {
                    gaussians: Some(value),
                    ..Overrides::default()
                },
            };
            let outcome = evaluate_run(&ctx, run, &cache[&run.features], ov)?;
            let preds: Vec<Prediction> = outcome.into_iter().flat_map(|(p, _)| p).collect();
            let counts = EvalCounts::from_predictions(&preds, config.rejection_threshold);
            points.push(SweepValue {
                value,
                recognition: compute_metrics(&counts)?.recognition,
            });
        }
        sweeps.push(SweepReport {
            run: s.run.clone(),
            axis: s.axis,
            points,
        });
    }

    let classes: BTreeSet<&str> = samples.iter().map(label_of).collect();
    Ok(ExperimentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        name: config.name.clone(),
        config: config.clone(),
        dataset: DatasetSummary {
            samples: samples.len(),
            classes: classes.len(),
            single: samples.iter().filter(|s| s.gesture_type == GestureType::Single).count(),
            multi: samples.iter().filter(|s| s.gesture_type == GestureType::Multi).count(),
        },
        runs,
        sweeps,
    })
}

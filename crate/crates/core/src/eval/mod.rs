//! Cross-validated evaluation of the classifiers.

pub mod experiment;
pub mod folds;
pub mod metrics;
pub mod plot;

pub use experiment::{
    experiment_samples, run_experiment, Classifier, ExperimentConfig, ExperimentReport, HmmParams, RunReport,
    RunSpec, SweepAxis, SweepSpec, REPORT_SCHEMA_VERSION,
};
pub use folds::{group_kfold_split, kfold_split, Fold, SplitMode};
pub use metrics::{
    compute_metrics, confusion, rejection_sweep, top_n_accuracy, ConfusionMatrix, EvalCounts, Metrics, Prediction,
    SweepPoint,
};

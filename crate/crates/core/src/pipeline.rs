//! From spotted samples to classifier input.
//!
//! Every trajectory is resampled to a fixed number of equally spaced points.
//! Raw coordinates stay in millimetres; the other feature sets work on the
//! normalised trajectory.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    curvature_moments, extract_f12, extract_f7, raw_sequence, FeatureDim, FeatureSequence,
};
use crate::scalar::Scalar;
use crate::trajectory::{normalize, resample, GestureSample, GestureType, Trajectory, DEFAULT_RESAMPLE_LEN};

/// Feature set selectable in experiments and at classification time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Raw,
    F7,
    F12,
    Moments6,
    /// `f7` for single-finger gestures, `f12` for multi-finger ones.
    Npen,
}

impl FeatureSet {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSet::Raw => "raw",
            FeatureSet::F7 => "f7",
            FeatureSet::F12 => "f12",
            FeatureSet::Moments6 => "moments6",
            FeatureSet::Npen => "npen",
        }
    }

    /// Concrete layout used for a gesture family.
    pub fn dim_for(self, gesture_type: GestureType) -> FeatureDim {
        match self {
            FeatureSet::Raw => FeatureDim::Raw3,
            FeatureSet::F7 => FeatureDim::F7,
            FeatureSet::F12 => FeatureDim::F12,
            FeatureSet::Moments6 => FeatureDim::Moments6,
            FeatureSet::Npen => match gesture_type {
                GestureType::Single => FeatureDim::F7,
                GestureType::Multi => FeatureDim::F12,
            },
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(FeatureSet::Raw),
            "f7" => Ok(FeatureSet::F7),
            "f12" => Ok(FeatureSet::F12),
            "moments6" => Ok(FeatureSet::Moments6),
            "npen" => Ok(FeatureSet::Npen),
            other => Err(Error::Config(format!("unknown feature set `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub resample_len: usize,
    pub features: FeatureSet,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            resample_len: DEFAULT_RESAMPLE_LEN,
            features: FeatureSet::Npen,
        }
    }
}

/// Feature sequence of a trajectory for the given gesture family.
pub fn trajectory_features<T: Scalar>(
    trajectory: &Trajectory<T>,
    gesture_type: GestureType,
    config: &PipelineConfig,
) -> Result<FeatureSequence<T>> {
    let resampled = resample(trajectory, config.resample_len)?;
    match config.features.dim_for(gesture_type) {
        FeatureDim::Raw3 => Ok(raw_sequence(&resampled)),
        FeatureDim::F7 => extract_f7(&normalize(&resampled)?),
        FeatureDim::F12 => extract_f12(&normalize(&resampled)?),
        FeatureDim::Moments6 => {
            let v = curvature_moments(&normalize(&resampled)?)?;
            FeatureSequence::from_rows(FeatureDim::Moments6, vec![v.values])
        }
    }
}

/// Feature sequence of a spotted sample, tagged with the sample id.
pub fn sample_features<T: Scalar>(
    sample: &GestureSample<T>,
    config: &PipelineConfig,
) -> Result<FeatureSequence<T>> {
    Ok(trajectory_features(&sample.trajectory, sample.gesture_type, config)?.with_source(sample.id.clone()))
}

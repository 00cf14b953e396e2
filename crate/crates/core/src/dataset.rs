//! Dataset manifests and labeled sample loading.
//!
//! A manifest is a JSON document listing recording files (paths relative to
//! the manifest) with their label, user and gesture type.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::shapes;
use crate::trajectory::{load_recording, spot_gestures, GestureSample, GestureType, Recording};

pub const MANIFEST_VERSION: u32 = 1;

/// Reference measurements known for generated samples, in millimetres.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub height_mm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diameter_mm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: String,
    pub label: String,
    pub user: String,
    #[serde(rename = "type")]
    pub gesture_type: GestureType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<GroundTruth>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    /// Parameters of whatever produced the files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<serde_json::Value>,
    pub samples: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        if m.version != MANIFEST_VERSION {
            return Err(Error::Version {
                found: m.version,
                expected: MANIFEST_VERSION,
            });
        }
        for (index, e) in m.samples.iter().enumerate() {
            let entry = shapes::lookup(&e.label).ok_or_else(|| Error::UnknownLabel(e.label.clone()))?;
            if entry.gesture_type != e.gesture_type {
                return Err(Error::Validation {
                    index,
                    message: format!("{} is a {} gesture", e.label, entry.gesture_type),
                });
            }
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

/// The labeled gesture in a recording: the longest spotted segment of the
/// expected type.
pub fn labeled_segment<T: Scalar>(
    recording: &Recording<T>,
    id: &str,
    label: &str,
    gesture_type: GestureType,
) -> Result<GestureSample<T>> {
    let mut best = spot_gestures(recording)
        .into_iter()
        .filter(|s| s.gesture_type == gesture_type)
        .max_by_key(|s| s.trajectory.len())
        .ok_or(Error::Empty("spotted gesture"))?;
    best.id = id.to_string();
    best.label = Some(label.to_string());
    Ok(best)
}

/// Loads, spots and labels every recording in a manifest, in manifest order.
pub fn load_samples<T: Scalar>(manifest_path: &Path) -> Result<Vec<GestureSample<T>>> {
    let manifest = Manifest::load(manifest_path)?;
    let base: PathBuf = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
    manifest
        .samples
        .par_iter()
        .map(|e| {
            let file = fs::File::open(base.join(&e.path))?;
            let mut rec: Recording<T> = load_recording(BufReader::new(file))?;
            rec.user_id = e.user.clone();
            labeled_segment(&rec, &e.id, &e.label, e.gesture_type)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_dataset, write_dataset, SynthConfig};

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = SynthConfig {
            per_class: 2,
            labels: vec!["circle".into(), "cylinder".into()],
            ..SynthConfig::default()
        };
        let data = generate_dataset(&cfg).unwrap();
        let manifest = write_dataset(&data, &cfg, dir.path()).unwrap();
        assert_eq!(manifest.samples.len(), 4);
        let back = Manifest::load(&dir.path().join("manifest.json")).unwrap();
        assert_eq!(back, manifest);
        let samples: Vec<GestureSample<f64>> = load_samples(&dir.path().join("manifest.json")).unwrap();
        assert_eq!(samples.len(), 4);
        assert_eq!(samples[0].label.as_deref(), Some("circle"));
        assert_eq!(samples[3].gesture_type, GestureType::Multi);
    }

    #[test]
    fn mismatched_type_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let m = Manifest {
            version: 1,
            generator: None,
            samples: vec![ManifestEntry {
                id: "a".into(),
                path: "a.jsonl".into(),
                label: "cube".into(),
                user: "u".into(),
                gesture_type: GestureType::Single,
                truth: None,
            }],
        };
        let p = dir.path().join("m.json");
        m.save(&p).unwrap();
        assert!(matches!(Manifest::load(&p), Err(Error::Validation { .. })));
    }
}

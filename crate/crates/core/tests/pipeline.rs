use std::collections::BTreeMap;

use gesture_core::dataset::{load_samples, Manifest};
use gesture_core::eval::{ExperimentConfig, HmmParams};
use gesture_core::hmm::{load_bank, save_bank, ClassifierBank};
use gesture_core::pipeline::{sample_features, FeatureSet, PipelineConfig};
use gesture_core::recognizer::{ClassifyOptions, Recognizer};
use gesture_core::render::{render, RenderParams, RenderSpec, SizeThresholds};
use gesture_core::shapes::{OutputKind, SHAPES};
use gesture_core::synth::{generate_dataset, write_dataset, SynthConfig};
use gesture_core::trajectory::{load_recording, spot_gestures, write_recording, GestureType};
use gesture_core::{GestureSample, Recording};

fn small_set(dir: &std::path::Path) -> Vec<GestureSample> {
    let cfg = SynthConfig {
        per_class: 5,
        labels: vec!["circle".into(), "star".into(), "moon".into(), "cone".into(), "sphere".into()],
        seed: 17,
        ..SynthConfig::default()
    };
    let data = generate_dataset(&cfg).unwrap();
    write_dataset(&data, &cfg, dir).unwrap();
    load_samples(&dir.join("manifest.json")).unwrap()
}

#[test]
fn recording_files_round_trip() {
    let cfg = SynthConfig {
        per_class: 1,
        labels: vec!["cube".into()],
        ..SynthConfig::default()
    };
    let rec = &generate_dataset(&cfg).unwrap()[0].recording;
    let mut buf = Vec::new();
    write_recording(&mut buf, rec).unwrap();
    let back: Recording = load_recording(buf.as_slice()).unwrap();
    assert_eq!(back.frames, rec.frames);
    let spotted = spot_gestures(&back);
    assert_eq!(spotted.len(), 1);
    assert_eq!(spotted[0].gesture_type, GestureType::Multi);
}

#[test]
fn manifest_dataset_trains_and_recognizes() {
    let dir = tempfile::tempdir().unwrap();
    let samples = small_set(dir.path());
    assert_eq!(samples.len(), 25);
    let manifest = Manifest::load(&dir.path().join("manifest.json")).unwrap();
    assert!(manifest.generator.is_some());

    let hmm = HmmParams {
        states_single: 5,
        states_multi: 5,
        gaussians_single: 2,
        gaussians_multi: 2,
        max_iter: 10,
        ..HmmParams::default()
    };
    let (rec, _) = Recognizer::train("small", &samples, PipelineConfig::default(), &hmm, 3).unwrap();
    assert_eq!(rec.len(), 5);
    let hits = samples
        .iter()
        .filter(|s| {
            let c = rec.classify_sample(s, &ClassifyOptions::default()).unwrap();
            c.best() == s.label.as_deref()
        })
        .count();
    assert!(hits >= 23, "{hits} of 25 training samples recognised");
}

#[test]
fn bank_file_round_trip_keeps_scores() {
    let dir = tempfile::tempdir().unwrap();
    let samples = small_set(dir.path());
    let cfg = PipelineConfig::default();
    let mut data: BTreeMap<String, Vec<_>> = BTreeMap::new();
    for s in samples.iter().filter(|s| s.gesture_type == GestureType::Single) {
        data.entry(s.label.clone().unwrap()).or_default().push(sample_features(s, &cfg).unwrap());
    }
    let snap = HmmParams::default().snapshot(GestureType::Single, 1);
    let (bank, _) = ClassifierBank::train(&data, snap).unwrap();
    assert_eq!(bank.len(), 3);
    let mut buf = Vec::new();
    save_bank(&bank, &mut buf).unwrap();
    let back: ClassifierBank<f64> = load_bank(buf.as_slice()).unwrap();
    assert_eq!(back, bank);
}

#[test]
fn every_class_renders() {
    let p = RenderParams::new(100.0, 70.0, &SizeThresholds::default()).unwrap();
    for e in SHAPES {
        let art = render(&RenderSpec {
            label: e.label.into(),
            params: p,
            output: Some(e.output),
        })
        .unwrap_or_else(|err| panic!("{}: {err}", e.label));
        match e.output {
            OutputKind::Mesh3D => assert!(art.body.contains("\nf ")),
            OutputKind::Vector2D => assert!(art.body.contains("viewBox=\"0 0 70 100\"")),
        }
    }
}

#[test]
fn experiment_config_rejects_unknown_keys() {
    let err = ExperimentConfig::from_toml("name = \"x\"\nfolds = 3\nbogus = 1\n[synth]\n[[runs]]\nname=\"a\"\nclassifier=\"hmm\"\nfeatures=\"npen\"\n");
    assert!(err.is_err());
    let ok = ExperimentConfig::from_toml("name = \"x\"\n[synth]\n[[runs]]\nname=\"a\"\nclassifier=\"hmm\"\nfeatures=\"moments6\"\n").unwrap();
    assert_eq!(ok.runs[0].features, FeatureSet::Moments6);
    assert_eq!(ok.folds, 5);
}

mod common;

use std::fs;

use common::{gesture, ok, trained};
use gesture_core::dataset::Manifest;
use gesture_core::recognizer::Recognizer;
use gesture_core::render::{Mesh, Sidecar};

#[test]
fn synth_train_classify_render() {
    let dir = tempfile::tempdir().unwrap();
    let (data, bank) = trained(dir.path());

    let rec = Recognizer::load(&bank).unwrap();
    assert_eq!(rec.len(), 6);

    let manifest = Manifest::load(&data.join("manifest.json")).unwrap();
    assert_eq!(manifest.samples.len(), 48);
    for entry in manifest.samples.iter().step_by(8) {
        let input = data.join(&entry.path);
        let out = ok(&["classify", "--bank", bank.to_str().unwrap(), "--input", input.to_str().unwrap()]);
        let resp: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(resp["ranked"][0]["label"], entry.label.as_str(), "{}", entry.id);
        assert_eq!(resp["type"], entry.gesture_type.as_str());
    }

    let cyl = manifest.samples.iter().find(|e| e.label == "cylinder").unwrap();
    let art = dir.path().join("art");
    ok(&[
        "render",
        "--label",
        "cylinder",
        "--input",
        data.join(&cyl.path).to_str().unwrap(),
        "--out",
        art.to_str().unwrap(),
        "--id",
        &cyl.id,
    ]);
    let body = fs::read_to_string(art.join(format!("{}.cylinder.mesh", cyl.id))).unwrap();
    let mesh = Mesh::from_obj(&body).unwrap();
    mesh.check_closed_manifold().unwrap();
    let side: Sidecar =
        serde_json::from_str(&fs::read_to_string(art.join(format!("{}.cylinder.params.json", cyl.id))).unwrap())
            .unwrap();
    let truth = cyl.truth.unwrap();
    assert!((side.params.diameter - truth.diameter_mm.unwrap()).abs() < 10.0);

    ok(&["render", "--label", "star", "--height", "90", "--diameter", "120", "--out", art.to_str().unwrap()]);
    assert!(fs::read_to_string(art.join("shape.star.vec")).unwrap().contains("<svg"));
}

#[test]
fn evaluate_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        r#"
name = "repro"
folds = 3
seed = 9

[synth]
per_class = 6
labels = ["circle", "triangle", "cylinder"]

[hmm]
states_single = 3
states_multi = 3
gaussians_single = 1
gaussians_multi = 1
max_iter = 4

[[runs]]
name = "hmm"
classifier = "hmm"
features = "npen"

[[runs]]
name = "dtw"
classifier = "dtw-knn"
features = "raw"
"#,
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    ok(&["evaluate", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    ok(&["evaluate", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    let ra = fs::read(a.join("report.json")).unwrap();
    assert_eq!(ra, fs::read(b.join("report.json")).unwrap());
    assert!(a.join("hmm.confusion.svg").exists());
    let report: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(report["config"]["seed"], 9);
}

#[test]
fn usage_and_io_errors() {
    let out = gesture(&["train", "--out", "x.json"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--manifest"));
    let out = gesture(&["classify", "--bank", "/nonexistent/bank.json", "--input", "/nonexistent/r.jsonl"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bank.json"));
    let out = gesture(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

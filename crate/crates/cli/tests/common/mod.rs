#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const LABELS: &str = "circle,triangle,star,heart,cylinder,cube";

pub fn gesture(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_gesture"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs");
    out
}

pub fn ok(args: &[&str]) -> Output {
    let out = gesture(args);
    assert!(
        out.status.success(),
        "gesture {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Synthetic 6-class dataset and a recognizer trained on it.
pub fn trained(dir: &Path) -> (PathBuf, PathBuf) {
    let data = dir.join("data");
    ok(&[
        "synth",
        "--out",
        data.to_str().unwrap(),
        "--per-class",
        "8",
        "--labels",
        LABELS,
        "--seed",
        "3",
    ]);
    let bank = dir.join("bank.json");
    ok(&[
        "train",
        "--manifest",
        data.join("manifest.json").to_str().unwrap(),
        "--out",
        bank.to_str().unwrap(),
        "--states-single",
        "5",
        "--states-multi",
        "5",
        "--gaussians",
        "2",
        "--max-iter",
        "8",
    ]);
    (data, bank)
}

mod common;

use std::path::PathBuf;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use tower::ServiceExt;

use gesture_cli::service::{router, AppState};
use gesture_core::recognizer::Recognizer;
use gesture_core::render::{ExtractConfig, Mesh};
use gesture_core::synth::{generate_sample, NoiseSpec, SynthConfig};

fn app(bank: &std::path::Path, static_dir: Option<PathBuf>) -> Router {
    router(
        AppState {
            recognizer: Recognizer::load(bank).unwrap(),
            extract: ExtractConfig::default(),
        },
        static_dir,
    )
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<serde_json::Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => req
            .header("content-type", "application/json")
            .body(Body::from(v.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

fn stroke_frames(label: &str, seed: u64) -> serde_json::Value {
    let cfg = SynthConfig {
        noise: NoiseSpec::default(),
        ..SynthConfig::default()
    };
    let s = generate_sample(label, &cfg, seed, "req", "u").unwrap();
    serde_json::to_value(&s.recording.frames).unwrap()
}

#[tokio::test(flavor = "multi_thread")]
async fn endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let (_, bank) = common::trained(dir.path());
    let assets = dir.path().join("ui");
    std::fs::create_dir_all(&assets).unwrap();
    std::fs::write(assets.join("index.html"), "<html>ui</html>").unwrap();
    let app = app(&bank, Some(assets));

    let (st, body) = call(&app, "GET", "/healthz", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(json(&body)["status"], "ok");

    let (st, body) = call(&app, "GET", "/labels", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(json(&body)["labels"].as_array().unwrap().len(), 6);

    let (st, body) = call(&app, "GET", "/index.html", None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(body, b"<html>ui</html>");

    // fresh samples, not from the training set
    let (st, body) = call(&app, "POST", "/classify", Some(serde_json::json!({ "frames": stroke_frames("circle", 777) }))).await;
    assert_eq!(st, StatusCode::OK, "{}", String::from_utf8_lossy(&body));
    let resp = json(&body);
    let top2: Vec<&str> = resp["ranked"].as_array().unwrap()[..2].iter().map(|r| r["label"].as_str().unwrap()).collect();
    assert!(top2.contains(&"circle"), "{top2:?}");
    assert_eq!(resp["type"], "single");

    let (st, body) = call(&app, "POST", "/classify", Some(serde_json::json!({ "frames": stroke_frames("cube", 778) }))).await;
    assert_eq!(st, StatusCode::OK);
    let resp = json(&body);
    assert_eq!(resp["type"], "multi");
    let spec = resp["render"].clone();
    assert!(spec.is_object());

    let (st, body) = call(&app, "POST", "/render", Some(spec)).await;
    assert_eq!(st, StatusCode::OK);
    Mesh::from_obj(std::str::from_utf8(&body).unwrap()).unwrap().check_closed_manifold().unwrap();

    let short = serde_json::json!({ "trajectory": [[0,0,0],[1,1,1],[2,2,2]], "type": "single" });
    let (st, body) = call(&app, "POST", "/classify", Some(short)).await;
    assert!(st.is_client_error());
    assert!(json(&body)["error"].as_str().unwrap().contains("at least 7"));

    let mut frames = stroke_frames("circle", 5);
    frames.as_array_mut().unwrap().truncate(4);
    let (st, _) = call(&app, "POST", "/classify", Some(serde_json::json!({ "frames": frames }))).await;
    assert!(st.is_client_error());

    let (st, _) = call(&app, "POST", "/classify", Some(serde_json::json!({ "nonsense": 1 }))).await;
    assert!(st.is_client_error());
    let bad_feat = serde_json::json!({ "frames": stroke_frames("circle", 6), "options": { "features": "raw" } });
    let (st, _) = call(&app, "POST", "/classify", Some(bad_feat)).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    let bad_render = serde_json::json!({ "label": "blob", "params": { "height": 1.0, "diameter": 1.0, "width": 1.0, "depth": 1.0, "length": 1.0, "size_class": "small" } });
    let (st, _) = call(&app, "POST", "/render", Some(bad_render)).await;
    assert!(st.is_client_error());
}

#[tokio::test(flavor = "multi_thread")]
async fn concurrent_requests_match_serial() {
    let dir = tempfile::tempdir().unwrap();
    let (_, bank) = common::trained(dir.path());
    let app = app(&bank, None);
    let labels = ["circle", "triangle", "star", "heart", "cylinder", "cube"];
    let bodies: Vec<serde_json::Value> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| serde_json::json!({ "frames": stroke_frames(l, 100 + i as u64) }))
        .collect();
    let mut serial = Vec::new();
    for b in &bodies {
        serial.push(call(&app, "POST", "/classify", Some(b.clone())).await);
    }
    let handles: Vec<_> = bodies
        .iter()
        .cloned()
        .map(|b| {
            let app = app.clone();
            tokio::spawn(async move { call(&app, "POST", "/classify", Some(b)).await })
        })
        .collect();
    for (h, s) in handles.into_iter().zip(serial) {
        assert_eq!(h.await.unwrap(), s);
    }
}

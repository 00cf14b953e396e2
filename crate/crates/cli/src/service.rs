//! HTTP endpoints over a loaded recognizer.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use gesture_core::pipeline::FeatureSet;
use gesture_core::recognizer::{ClassifyOptions, LabelScore, Recognizer};
use gesture_core::render::{extract_params, render, ExtractConfig, RenderSpec};
use gesture_core::shapes;
use gesture_core::trajectory::{GestureSample, GestureType};
use gesture_core::{Error, Frame, Trajectory};

pub struct AppState {
    pub recognizer: Recognizer,
    pub extract: ExtractConfig,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct RequestOptions {
    /// Must match the loaded recognizer when given.
    pub features: Option<FeatureSet>,
    pub bank: Option<String>,
    pub rejection_threshold: Option<f64>,
    pub top_n: Option<usize>,
}

/// Either raw frames in the recording schema or an already spotted trajectory.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyRequest {
    pub frames: Option<Vec<Frame>>,
    pub trajectory: Option<Vec<[f64; 3]>>,
    /// Required with `trajectory`.
    #[serde(rename = "type")]
    pub gesture_type: Option<GestureType>,
    pub options: RequestOptions,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ClassifyResponse {
    pub bank: String,
    #[serde(rename = "type")]
    pub gesture_type: GestureType,
    pub ranked: Vec<LabelScore>,
    pub margin: f64,
    pub rejected: bool,
    /// Body for `POST /render` drawing the best label at the measured size.
    pub render: Option<RenderSpec>,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
}

pub struct ApiError(StatusCode, String);

impl ApiError {
    fn bad(msg: impl Into<String>) -> Self {
        Self(StatusCode::BAD_REQUEST, msg.into())
    }

    pub fn status(&self) -> StatusCode {
        self.0
    }

    pub fn message(&self) -> &str {
        &self.1
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io(_) | Error::Underflow { .. } | Error::Corrupt(_) | Error::Version { .. } => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(ErrorBody { error: self.1 })).into_response()
    }
}

type Shared = Arc<AppState>;

pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let app = Router::new()
        .route("/healthz", get(healthz))
        .route("/labels", get(labels))
        .route("/classify", post(classify))
        .route("/render", post(render_handler))
        .with_state(Arc::new(state));
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

async fn healthz(State(s): State<Shared>) -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok", "bank": s.recognizer.name, "classes": s.recognizer.len() }))
}

#[derive(Serialize)]
struct LabelInfo {
    label: String,
    #[serde(rename = "type")]
    gesture_type: GestureType,
    output: shapes::OutputKind,
}

async fn labels(State(s): State<Shared>) -> Json<serde_json::Value> {
    let labels: Vec<LabelInfo> = s
        .recognizer
        .labels()
        .into_iter()
        .map(|(label, gesture_type)| LabelInfo {
            output: shapes::lookup(&label).map_or(shapes::OutputKind::Vector2D, |e| e.output),
            label,
            gesture_type,
        })
        .collect();
    Json(serde_json::json!({ "bank": s.recognizer.name, "labels": labels }))
}

/// Runs one request against the recognizer; used by the handler and the CLI.
pub fn classify_request(state: &AppState, req: ClassifyRequest) -> Result<ClassifyResponse, ApiError> {
    let r = &state.recognizer;
    if let Some(f) = req.options.features {
        if f != r.pipeline.features {
            return Err(ApiError::bad(format!(
                "loaded bank uses {} features, not {f}",
                r.pipeline.features
            )));
        }
    }
    if let Some(b) = &req.options.bank {
        if *b != r.name {
            return Err(ApiError::bad(format!("bank `{b}` is not loaded")));
        }
    }
    if req.options.top_n == Some(0) {
        return Err(ApiError::bad("top_n must be at least 1"));
    }
    let threshold = req.options.rejection_threshold.unwrap_or(0.0);
    if !(threshold >= 0.0) {
        return Err(ApiError::bad("rejection_threshold must be nonnegative"));
    }
    let sample = match (req.frames, req.trajectory) {
        (Some(frames), None) => Recognizer::spot_longest(frames)?,
        (None, Some(points)) => {
            let gesture_type = req
                .gesture_type
                .ok_or_else(|| ApiError::bad("`type` is required with `trajectory`"))?;
            if points.len() < gesture_core::trajectory::MIN_TRAJECTORY_LEN {
                return Err(Error::TooShort {
                    needed: gesture_core::trajectory::MIN_TRAJECTORY_LEN,
                    got: points.len(),
                }
                .into());
            }
            GestureSample {
                id: "request".into(),
                label: None,
                gesture_type,
                trajectory: Trajectory::from_xyz(points)?,
                user_id: String::new(),
                frames: Vec::new(),
            }
        }
        _ => return Err(ApiError::bad("give exactly one of `frames` or `trajectory`")),
    };
    let options = ClassifyOptions {
        rejection_threshold: threshold,
        top_n: req.options.top_n,
    };
    let c = r.classify_sample(&sample, &options)?;
    let render = match (c.best(), extract_params(&sample, &state.extract)) {
        (Some(label), Ok(params)) => Some(RenderSpec {
            label: label.to_string(),
            params,
            output: None,
        }),
        _ => None,
    };
    Ok(ClassifyResponse {
        bank: r.name.clone(),
        gesture_type: c.gesture_type,
        ranked: c.ranked,
        margin: c.margin,
        rejected: c.rejected,
        render,
    })
}

async fn classify(
    State(s): State<Shared>,
    Json(req): Json<ClassifyRequest>,
) -> Result<Json<ClassifyResponse>, ApiError> {
    let out = tokio::task::spawn_blocking(move || classify_request(&s, req))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(out))
}

async fn render_handler(Json(spec): Json<RenderSpec>) -> Result<Response, ApiError> {
    let art = tokio::task::spawn_blocking(move || render(&spec))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(([(header::CONTENT_TYPE, art.media_type())], art.body).into_response())
}

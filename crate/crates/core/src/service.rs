//! HTTP inference endpoint: upload a micro-photo, receive its stage.
//!
//! * `POST /classify[?binary=true]`: `multipart/form-data` with one image
//!   part (PNG or JPEG). Returns [`ClassifyResponse`] as JSON. Status 400
//!   for a malformed, unsupported or oversized upload, 422 when the image is
//!   degenerate (e.g. a constant color, whose correlation is undefined), 503
//!   when no model is loaded.
//! * `GET /health`: 200 with the model version and feature fingerprint, or
//!   503 without a model.
//!
//! Error bodies are `{"error": "<kind>", "message": "<detail>"}`.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::multipart::MultipartRejection;
use axum::extract::{DefaultBodyLimit, Multipart, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::glcm::FeatureVector;
use crate::knn::Model;
use crate::pipeline::{extract_bytes, verdict_for};

pub const DEFAULT_MAX_UPLOAD_BYTES: usize = 10 * 1024 * 1024;

// room for multipart boundaries and part headers on top of the image cap
const MULTIPART_OVERHEAD: usize = 64 * 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResponse {
    pub stage: String,
    pub phrase: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary: Option<String>,
    pub features: FeatureVector,
    pub model_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

struct Loaded {
    model: Model,
    version: String,
}

#[derive(Clone)]
pub struct AppState {
    model: Option<Arc<Loaded>>,
    max_upload_bytes: usize,
}

impl AppState {
    pub fn new(model: Option<Model>, max_upload_bytes: usize) -> Self {
        AppState {
            model: model.map(|model| {
                let version = model.version_id();
                Arc::new(Loaded { model, version })
            }),
            max_upload_bytes,
        }
    }
}

pub fn router(state: AppState) -> Router {
    let limit = state.max_upload_bytes.saturating_add(MULTIPART_OVERHEAD);
    Router::new()
        .route("/health", get(health))
        .route("/classify", post(classify))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

pub async fn serve(model: Model, port: u16, max_upload_bytes: usize) -> std::io::Result<()> {
    let app = router(AppState::new(Some(model), max_upload_bytes));
    let addr = SocketAddr::from(([0, 0, 0, 0], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await
}

struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            kind: "bad-request",
            message: message.into(),
        }
    }

    fn no_model() -> Self {
        ApiError {
            status: StatusCode::SERVICE_UNAVAILABLE,
            kind: "model-not-loaded",
            message: "no model is loaded".into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, kind) = match e.root() {
            Error::UndefinedCorrelation | Error::Degenerate(_) => {
                (StatusCode::UNPROCESSABLE_ENTITY, "degenerate-image")
            }
            Error::UnsupportedImage(_) | Error::InvalidInput(_) => (StatusCode::BAD_REQUEST, "bad-image"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        ApiError {
            status,
            kind,
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": self.kind, "message": self.message });
        (self.status, Json(body)).into_response()
    }
}

async fn health(State(state): State<AppState>) -> Response {
    match &state.model {
        Some(l) => Json(HealthResponse {
            status: "ok".into(),
            model_version: Some(l.version.clone()),
            fingerprint: Some(l.model.fingerprint().to_string()),
        })
        .into_response(),
        None => (
            StatusCode::SERVICE_UNAVAILABLE,
            Json(HealthResponse {
                status: "no model loaded".into(),
                model_version: None,
                fingerprint: None,
            }),
        )
            .into_response(),
    }
}

#[derive(Debug, Deserialize)]
struct ClassifyParams {
    #[serde(default)]
    binary: bool,
}

async fn classify(
    State(state): State<AppState>,
    Query(params): Query<ClassifyParams>,
    multipart: Result<Multipart, MultipartRejection>,
) -> Result<Json<ClassifyResponse>, ApiError> {
    let loaded = state.model.clone().ok_or_else(ApiError::no_model)?;
    let mut multipart = multipart.map_err(|e| ApiError::bad_request(e.body_text()))?;

    let mut image = None;
    while let Some(field) = multipart
        .next_field()
        .await
        .map_err(|e| ApiError::bad_request(format!("malformed multipart body: {}", e.body_text())))?
    {
        let is_image = field.file_name().is_some() || matches!(field.name(), Some("image" | "file"));
        if !is_image {
            continue;
        }
        let bytes = field
            .bytes()
            .await
            .map_err(|e| ApiError::bad_request(format!("upload failed: {}", e.body_text())))?;
        image = Some(bytes);
        break;
    }
    let bytes = image.ok_or_else(|| ApiError::bad_request("no image part in upload"))?;
    if bytes.len() > state.max_upload_bytes {
        return Err(ApiError::bad_request(format!(
            "upload of {} bytes exceeds the {}-byte limit",
            bytes.len(),
            state.max_upload_bytes
        )));
    }

    let binary = params.binary;
    let response = tokio::task::spawn_blocking(move || -> Result<ClassifyResponse, Error> {
        let model = &loaded.model;
        let x = extract_bytes(&bytes, model.feature_config())?;
        let (v, _) = verdict_for(model, &x, binary)?;
        Ok(ClassifyResponse {
            stage: v.stage.code().to_string(),
            phrase: v.stage.phrase().to_string(),
            binary: v.binary.map(|b| b.phrase().to_string()),
            features: v.features,
            model_version: loaded.version.clone(),
        })
    })
    .await
    .map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        kind: "internal",
        message: e.to_string(),
    })??;
    Ok(Json(response))
}

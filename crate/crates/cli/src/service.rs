//! HTTP evaluation service.
//!
//! | route            | body                                          |
//! |------------------|-----------------------------------------------|
//! | `POST /evaluate` | [`EvaluateRequest`] → [`EvaluateResponse`]     |
//! | `GET /examples`  | bundled layouts with their TOML and JSON form |
//! | `GET /schema`    | JSON Schema of the layout document            |
//! | `GET /healthz`   | `ok`                                          |
//!
//! Errors come back as `{"error": {"kind", "message", "path"}}` with status
//! 400 for invalid input, 422 when no trajectory can be planned and 500
//! otherwise.

use std::collections::BTreeMap;

use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine;
use serde::Serialize;
use serde_json::Value;

use fallrisk::pipeline::evaluate_modes;
use fallrisk::room::{parse_document, LayoutDocument};
use fallrisk::{examples, Error};

use crate::output::render_images;
use crate::request::{check_limits, EvaluateRequest};

pub const LAYOUT_SCHEMA: &str = include_str!("../../../docs/schema/layout.schema.json");

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    pub path: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn bad_request(message: String, path: Option<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody {
                kind: "validation",
                message,
                path,
            },
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let path = e.field_path().map(str::to_owned);
        let (status, kind) = if e.is_validation() || matches!(e, Error::Sampling { .. }) {
            (StatusCode::BAD_REQUEST, "validation")
        } else if matches!(e, Error::Infeasible(_)) {
            (StatusCode::UNPROCESSABLE_ENTITY, "infeasible")
        } else {
            (StatusCode::INTERNAL_SERVER_ERROR, "internal")
        };
        Self {
            status,
            body: ErrorBody {
                kind,
                message: e.to_string(),
                path,
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.body }))).into_response()
    }
}

#[derive(Debug, Serialize)]
pub struct EvaluateResponse {
    /// Keyed by mode (`day`, `night`).
    pub results: BTreeMap<String, Value>,
    /// Layout parsing warnings (unknown fields in lenient mode).
    pub warnings: Vec<String>,
    /// Keyed by mode, then image name; base64 PPM. Empty unless requested.
    pub images: BTreeMap<String, BTreeMap<String, String>>,
}

/// Evaluate a request synchronously. Shared by the HTTP handler and tests.
pub fn evaluate(request: &EvaluateRequest) -> Result<EvaluateResponse, ApiError> {
    let parsed = request.parse_layout()?;
    let settings = request.settings();
    settings.validate()?;
    check_limits(&parsed, &settings)?;
    let results = evaluate_modes(&parsed.layout, &settings, request.mode.modes())?;

    let mut response = EvaluateResponse {
        results: BTreeMap::new(),
        warnings: parsed.warnings.clone(),
        images: BTreeMap::new(),
    };
    let engine = base64::engine::general_purpose::STANDARD;
    for result in &results {
        let mode = result.mode.as_str().to_owned();
        if request.include.images {
            let images = render_images(result, &parsed.layout)?
                .into_iter()
                .map(|(name, bytes)| (name, engine.encode(bytes)))
                .collect();
            response.images.insert(mode.clone(), images);
        }
        let mut value = serde_json::to_value(result).map_err(Error::from)?;
        if let Value::Object(map) = &mut value {
            if !request.include.fields {
                map.remove("factor_fields");
                map.remove("baseline");
            }
            if !request.include.trajectories {
                map.remove("trajectories");
            }
        }
        response.results.insert(mode, value);
    }
    Ok(response)
}

async fn evaluate_handler(
    payload: Result<Json<EvaluateRequest>, JsonRejection>,
) -> Result<Json<EvaluateResponse>, ApiError> {
    let Json(request) = payload.map_err(|e| ApiError::bad_request(e.body_text(), None))?;
    tokio::task::spawn_blocking(move || evaluate(&request))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            body: ErrorBody {
                kind: "internal",
                message: e.to_string(),
                path: None,
            },
        })?
        .map(Json)
}

#[derive(Debug, Serialize)]
pub struct ExampleEntry {
    pub name: &'static str,
    pub toml: &'static str,
    pub layout: LayoutDocument,
}

pub fn example_list() -> Vec<ExampleEntry> {
    examples::BUNDLED
        .iter()
        .map(|&(name, toml)| ExampleEntry {
            name,
            toml,
            layout: parse_document(toml).expect("bundled layouts are valid"),
        })
        .collect()
}

async fn examples_handler() -> Json<Vec<ExampleEntry>> {
    Json(example_list())
}

async fn schema_handler() -> Response {
    ([("content-type", "application/schema+json")], LAYOUT_SCHEMA).into_response()
}

async fn healthz() -> &'static str {
    "ok"
}

pub fn router() -> Router {
    Router::new()
        .route("/evaluate", post(evaluate_handler))
        .route("/examples", get(examples_handler))
        .route("/schema", get(schema_handler))
        .route("/healthz", get(healthz))
}

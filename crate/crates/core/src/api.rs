//! HTTP/JSON service over the library, used by the model editor.
//!
//! Models and suites live in bounded in-memory LRU stores keyed by random
//! ids. Stored entries are immutable snapshots behind `Arc`, so concurrent
//! requests never observe partial state. Every response carries the
//! `X-Schema-Version` header and JSON bodies also carry `schema_version`.
//! `GET /models/{id}` reports the upload time in Unix seconds as `X-Created-At`.

use std::num::NonZeroUsize;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path, Query, State};
use axum::http::header::CONTENT_TYPE;
use axum::http::{HeaderMap, HeaderName, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use lru::LruCache;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use crate::coverage::AnnotatedSuite;
use crate::generate::{GenerateError, GenerationConfig, TestSuite};
use crate::io::{
    emit_model_document, export_suite, parse_model_document, render_dot, Format, IoError, ModelDocument,
};
use crate::lcz::{compute_lczs, Threshold};
use crate::model::{validate, ValidationReport};
use crate::pipeline::{run_generation, PipelineError};
use crate::SCHEMA_VERSION;

pub const SCHEMA_HEADER: &str = "x-schema-version";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Maximum number of stored models; suites get ten times as many slots.
    pub capacity: usize,
    /// Origins allowed by CORS. Empty means any origin.
    pub cors_origins: Vec<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            capacity: 100,
            cors_origins: Vec::new(),
        }
    }
}

struct StoredModel {
    document: ModelDocument,
    created_at: u64,
}

struct StoredSuite {
    model_id: String,
    suite: TestSuite,
    annotated: AnnotatedSuite,
}

struct Store {
    models: Mutex<LruCache<String, Arc<StoredModel>>>,
    suites: Mutex<LruCache<String, Arc<StoredSuite>>>,
}

#[derive(Clone)]
pub struct AppState(Arc<Store>);

impl AppState {
    pub fn new(capacity: usize) -> Self {
        let cap = NonZeroUsize::new(capacity.max(1)).expect("non-zero");
        let suite_cap = cap.saturating_mul(NonZeroUsize::new(10).expect("non-zero"));
        AppState(Arc::new(Store {
            models: Mutex::new(LruCache::new(cap)),
            suites: Mutex::new(LruCache::new(suite_cap)),
        }))
    }

    fn model(&self, id: &str) -> Result<Arc<StoredModel>, ApiError> {
        self.0
            .models
            .lock()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("MODEL_NOT_FOUND", format!("no model with id '{id}'")))
    }

    fn suite(&self, id: &str) -> Result<Arc<StoredSuite>, ApiError> {
        self.0
            .suites
            .lock()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("SUITE_NOT_FOUND", format!("no suite with id '{id}'")))
    }
}

fn new_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

/// Error response: `{schema_version, error: {code, message}, validation?}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
    validation: Option<ValidationReport>,
}

impl ApiError {
    fn new(status: StatusCode, code: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.into(),
            message: message.into(),
            validation: None,
        }
    }

    fn not_found(code: &str, message: String) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, code, message)
    }

    fn bad_request(code: &str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, code, message)
    }
}

impl From<IoError> for ApiError {
    fn from(e: IoError) -> Self {
        ApiError::bad_request(e.code(), e.to_string())
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::InvalidModel(report) => ApiError {
                status: StatusCode::BAD_REQUEST,
                code: "INVALID_MODEL".into(),
                message: "the model has validation errors".into(),
                validation: Some(report),
            },
            PipelineError::Generate(GenerateError::InvalidConfig(msg)) => {
                ApiError::bad_request("INVALID_CONFIG", msg)
            }
            other => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, other.code(), other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({
            "schema_version": SCHEMA_VERSION,
            "error": { "code": self.code, "message": self.message },
        });
        if let Some(v) = self.validation {
            body["validation"] = serde_json::to_value(v).expect("reports serialize");
        }
        (self.status, axum::Json(body)).into_response()
    }
}

fn json_body(value: &impl Serialize) -> Response {
    let text = serde_json::to_string(value).expect("responses serialize");
    ([(CONTENT_TYPE, "application/json")], text).into_response()
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, ApiError> {
    serde_json::from_str(text).map_err(|e| IoError::from_json(e).into())
}

#[derive(Serialize)]
pub struct ModelCreated {
    pub schema_version: &'static str,
    pub id: String,
    pub created_at: u64,
    pub validation: ValidationReport,
}

async fn create_model(State(state): State<AppState>, headers: HeaderMap, body: String) -> Result<Response, ApiError> {
    let format = match headers.get(CONTENT_TYPE).and_then(|v| v.to_str().ok()) {
        Some(ct) if ct.contains("xml") => Format::Xml,
        _ => Format::Json,
    };
    let document = parse_model_document(&body, format)?;
    let validation = validate(&document.model);
    if !validation.is_ok() {
        return Err(PipelineError::InvalidModel(validation).into());
    }
    let id = new_id();
    let created_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    state
        .0
        .models
        .lock()
        .put(id.clone(), Arc::new(StoredModel { document, created_at }));
    Ok(json_body(&ModelCreated {
        schema_version: SCHEMA_VERSION,
        id,
        created_at,
        validation,
    }))
}

async fn get_model(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let stored = state.model(&id)?;
    let text = emit_model_document(&stored.document, Format::Json)?;
    let created = HeaderValue::from(stored.created_at);
    Ok((
        [(CONTENT_TYPE, HeaderValue::from_static("application/json")), (HeaderName::from_static("x-created-at"), created)],
        text,
    )
        .into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LczRequest {
    threshold: Threshold,
}

async fn model_lcz(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: String,
) -> Result<Response, ApiError> {
    let stored = state.model(&id)?;
    let request: LczRequest = parse_json(&body)?;
    let report = compute_lczs(&stored.document.model, request.threshold);
    Ok(json_body(&json!({ "schema_version": SCHEMA_VERSION, "report": report })))
}

async fn model_generate(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: String,
) -> Result<Response, ApiError> {
    let stored = state.model(&id)?;
    let config: GenerationConfig = parse_json(&body)?;
    let snapshot = Arc::clone(&stored);
    let output = tokio::task::spawn_blocking(move || run_generation(&snapshot.document.model, &config))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL_ERROR", e.to_string()))??;

    let suite_id = new_id();
    let mut body = json!({
        "schema_version": SCHEMA_VERSION,
        "suite_id": suite_id,
        "suite": output.suite,
    });
    if let Some(code) = output.suite.warning_code() {
        body["warning"] = json!(code);
    }
    if let Some(p) = &output.portfolio {
        body["portfolio"] = serde_json::to_value(p).expect("reports serialize");
    }
    state.0.suites.lock().put(
        suite_id,
        Arc::new(StoredSuite {
            model_id: id,
            suite: output.suite,
            annotated: output.annotated,
        }),
    );
    Ok(json_body(&body))
}

#[derive(Deserialize)]
struct SuiteQuery {
    format: Option<String>,
}

async fn get_suite(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<SuiteQuery>,
) -> Result<Response, ApiError> {
    let stored = state.suite(&id)?;
    let format = match query.format.as_deref() {
        None => Format::Json,
        Some(f) => Format::parse(f)
            .ok_or_else(|| ApiError::bad_request("UNSUPPORTED_FORMAT", format!("unknown format '{f}'")))?,
    };
    let export = export_suite(&stored.annotated, format);
    Ok(([(CONTENT_TYPE, format.mime())], export.payload).into_response())
}

#[derive(Deserialize)]
struct DotQuery {
    threshold: Option<f64>,
    suite: Option<String>,
}

async fn model_dot(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<DotQuery>,
) -> Result<Response, ApiError> {
    let stored = state.model(&id)?;
    let raw = query
        .threshold
        .ok_or_else(|| ApiError::bad_request("SCHEMA_ERROR", "query parameter 'threshold' is required"))?;
    let threshold = Threshold::new(raw).map_err(|e| ApiError::bad_request("SCHEMA_ERROR", e.to_string()))?;
    let suite = match &query.suite {
        Some(sid) => {
            let s = state.suite(sid)?;
            if s.model_id != id {
                return Err(ApiError::new(
                    StatusCode::UNPROCESSABLE_ENTITY,
                    "SUITE_MODEL_MISMATCH",
                    format!("suite '{sid}' was generated for another model"),
                ));
            }
            Some(s)
        }
        None => None,
    };
    let report = compute_lczs(&stored.document.model, threshold);
    let dot = render_dot(&stored.document.model, &report, suite.as_ref().map(|s| &s.suite));
    Ok(([(CONTENT_TYPE, "text/vnd.graphviz")], dot).into_response())
}

async fn add_schema_header(mut response: Response) -> Response {
    response.headers_mut().insert(
        HeaderName::from_static(SCHEMA_HEADER),
        HeaderValue::from_static(SCHEMA_VERSION),
    );
    response
}

fn cors(origins: &[String]) -> CorsLayer {
    let layer = CorsLayer::new()
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([CONTENT_TYPE])
        .expose_headers([HeaderName::from_static(SCHEMA_HEADER)]);
    if origins.is_empty() {
        layer.allow_origin(Any)
    } else {
        let list: Vec<HeaderValue> = origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
        layer.allow_origin(AllowOrigin::list(list))
    }
}

/// Builds the router with a fresh store.
pub fn router(config: &ServiceConfig) -> Router {
    router_with_state(AppState::new(config.capacity), config)
}

pub fn router_with_state(state: AppState, config: &ServiceConfig) -> Router {
    Router::new()
        .route("/models", post(create_model))
        .route("/models/{id}", get(get_model))
        .route("/models/{id}/lcz", post(model_lcz))
        .route("/models/{id}/generate", post(model_generate))
        .route("/models/{id}/dot", get(model_dot))
        .route("/suites/{id}", get(get_suite))
        .with_state(state)
        .layer(axum::middleware::map_response(add_schema_header))
        .layer(cors(&config.cors_origins))
}

/// Serves until Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    axum::serve(listener, router(&config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

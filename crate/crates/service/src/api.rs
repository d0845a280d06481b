use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use kinetiq::query::{evaluate_document, parse_query, render_document, Diagnostic, QueryDocument, RunError};
use kinetiq::render::{encode_apng, layout, ChartGeometry};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use tower_http::cors::{Any, CorsLayer};

use crate::store::{Entry, Store};

/// Upper bound on frames per evaluate or render request.
pub const MAX_FRAMES: usize = 240;
pub const DEFAULT_UPLOAD_LIMIT: usize = 64 * 1024 * 1024;
const REQUEST_LIMIT: usize = 16 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub upload_limit: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { upload_limit: DEFAULT_UPLOAD_LIMIT }
    }
}

#[derive(Clone)]
pub struct AppState {
    store: Arc<Store>,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        AppState { store: Arc::new(store) }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }
}

pub fn router(state: AppState, config: &ServiceConfig) -> Router {
    let cors = CorsLayer::new().allow_origin(Any).allow_methods(Any).allow_headers(Any);
    Router::new()
        .route("/api/health", get(health))
        .route(
            "/api/datasets",
            post(upload).get(list).layer(DefaultBodyLimit::max(config.upload_limit)),
        )
        .route("/api/datasets/{id}/parameters", get(parameters))
        .route("/api/evaluate", post(evaluate).layer(DefaultBodyLimit::max(REQUEST_LIMIT)))
        .route("/api/render", post(render).layer(DefaultBodyLimit::max(REQUEST_LIMIT)))
        .layer(cors)
        .with_state(state)
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, body: json!({ "error": message.into() }) }
    }

    fn diagnostics(message: impl Into<String>, diagnostics: Vec<Diagnostic>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, body: json!({ "error": message.into(), "diagnostics": diagnostics }) }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<RunError> for ApiError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Invalid(q) => ApiError::diagnostics("query does not fit the dataset", under_query(q.diagnostics)),
            RunError::Render(e) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        }
    }
}

/// Re-root document paths under the request's `query` field.
fn under_query(diagnostics: Vec<Diagnostic>) -> Vec<Diagnostic> {
    diagnostics.into_iter().map(|d| Diagnostic { path: format!("/query{}", d.path), ..d }).collect()
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

async fn upload(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let store = state.store.clone();
    let result = tokio::task::spawn_blocking(move || store.insert(&body))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    match result {
        Ok((entry, created)) => {
            let status = if created { StatusCode::CREATED } else { StatusCode::OK };
            Ok((status, Json(json!({ "dataset_id": entry.id, "summary": entry.summary }))).into_response())
        }
        Err(e) => {
            let mut d = json!({ "severity": "error", "message": e.to_string() });
            if let Some(line) = e.line() {
                d["line"] = json!(line);
            }
            Err(ApiError { status: StatusCode::BAD_REQUEST, body: json!({ "error": "dataset rejected", "diagnostics": [d] }) })
        }
    }
}

async fn list(State(state): State<AppState>) -> Json<Value> {
    let items: Vec<Value> = state
        .store
        .list()
        .iter()
        .map(|e| json!({ "dataset_id": e.id, "summary": e.summary }))
        .collect();
    Json(json!({ "datasets": items }))
}

fn lookup(state: &AppState, id: &str) -> Result<Arc<Entry>, ApiError> {
    state
        .store
        .get(id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown dataset {id}")))
}

async fn parameters(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    Ok(Json(lookup(&state, &id)?.registry.to_json()))
}

#[derive(Debug, Deserialize)]
struct EvaluateRequest {
    dataset_id: String,
    query: Value,
    #[serde(default)]
    n_frames: Option<usize>,
    #[serde(default)]
    include_geometry: bool,
    /// Render-block fields used for geometry only.
    #[serde(default)]
    viewport: Option<Map<String, Value>>,
    /// Render-block fields overriding the document's.
    #[serde(default)]
    render: Option<Map<String, Value>>,
}

/// Merge request-level overrides into the document and parse it.
fn build_document(req: &EvaluateRequest) -> Result<(QueryDocument, Vec<Diagnostic>), ApiError> {
    let Value::Object(mut doc) = req.query.clone() else {
        return Err(ApiError::diagnostics("invalid query", vec![Diagnostic::error("/query", "expected a query document object")]));
    };
    let mut render = match doc.remove("render") {
        Some(Value::Object(m)) => m,
        Some(other) => {
            doc.insert("render".into(), other);
            Map::new()
        }
        None => Map::new(),
    };
    for (k, v) in req.viewport.iter().chain(&req.render).flatten() {
        render.insert(k.clone(), v.clone());
    }
    if let Some(n) = req.n_frames {
        if !(1..=MAX_FRAMES).contains(&n) {
            return Err(ApiError::diagnostics(
                "invalid request",
                vec![Diagnostic::error("/n_frames", format!("must be in 1..={MAX_FRAMES}, got {n}"))],
            ));
        }
        render.insert("n_frames".into(), json!(n));
    }
    if !doc.contains_key("render") {
        doc.insert("render".into(), Value::Object(render));
    }
    let text = Value::Object(doc).to_string();
    let (doc, warnings) = parse_query(&text).map_err(|e| {
        ApiError::diagnostics("invalid query", under_query(e.diagnostics))
    })?;
    if doc.render.n_frames > MAX_FRAMES {
        return Err(ApiError::diagnostics(
            "invalid request",
            vec![Diagnostic::error("/query/render/n_frames", format!("must be at most {MAX_FRAMES}, got {}", doc.render.n_frames))],
        ));
    }
    Ok((doc, warnings))
}

fn parse_request(body: &[u8]) -> Result<EvaluateRequest, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::diagnostics("invalid request", vec![Diagnostic::error("", e.to_string())]))
}

fn quantize(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

#[derive(Serialize)]
struct EvaluateResponse {
    dataset_id: String,
    n_frames: usize,
    times: Vec<f64>,
    point_index: Vec<(usize, u32)>,
    frames: Vec<Vec<[f64; 4]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    geometry: Option<ChartGeometry>,
    warnings: Vec<String>,
    diagnostics: Vec<Diagnostic>,
}

async fn evaluate(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req = parse_request(&body)?;
    let entry = lookup(&state, &req.dataset_id)?;
    let (doc, diagnostics) = build_document(&req)?;
    let include_geometry = req.include_geometry;
    let response = tokio::task::spawn_blocking(move || -> Result<Vec<u8>, ApiError> {
        let run = evaluate_document(&doc, &entry.dataset, &entry.registry, doc.render.n_frames)?;
        let frames = run.output;
        let resp = EvaluateResponse {
            dataset_id: entry.id.clone(),
            n_frames: frames.n_frames(),
            times: frames.times(),
            point_index: entry.dataset.points().into_iter().map(|p| (p.playthrough, p.turn_index)).collect(),
            frames: frames
                .buffers
                .iter()
                .map(|b| b.colors.iter().map(|c| c.to_array().map(quantize)).collect())
                .collect(),
            geometry: include_geometry.then(|| layout(&entry.dataset, &doc.render)),
            warnings: run.warnings,
            diagnostics: under_query(diagnostics),
        };
        serde_json::to_vec(&resp).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(([(header::CONTENT_TYPE, "application/json")], response).into_response())
}

async fn render(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req = parse_request(&body)?;
    let entry = lookup(&state, &req.dataset_id)?;
    let (doc, _) = build_document(&req)?;
    let bytes = tokio::task::spawn_blocking(move || -> Result<Vec<u8>, ApiError> {
        let run = render_document(&doc, &entry.dataset, &entry.registry)?;
        encode_apng(&run.output, doc.render.fps).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(([(header::CONTENT_TYPE, "image/png")], bytes).into_response())
}

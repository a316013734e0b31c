//! HTTP and WebSocket server over the workbench core.

pub mod compute;
pub mod config;
pub mod error;
pub mod jobs;
pub mod models;
pub mod sessions;
pub mod ws;

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State, WebSocketUpgrade};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use workbench_core::layout::{force_layout, LayoutGraph, LayoutParams};
use workbench_core::net::{export_pnml, Coord};

pub use compute::{check_document, prepare_formula, result_document, synthesis_document, ComputeError};
pub use config::{Config, ConfigError};
pub use error::ApiError;

use jobs::{JobInput, JobRegistry};
use models::ModelStore;
use sessions::{SessionMode, SessionRegistry, StepRequest};

pub struct AppState {
    pub models: ModelStore,
    pub jobs: JobRegistry,
    pub sessions: SessionRegistry,
}

impl AppState {
    pub fn new(config: &Config) -> Self {
        Self {
            models: ModelStore::default(),
            jobs: JobRegistry::new(
                config.max_jobs,
                config.cache_dir.clone(),
                config.check_cap(),
                config.game_cap(),
            ),
            sessions: SessionRegistry::new(config.game_cap()),
        }
    }
}

type Shared = State<Arc<AppState>>;
type Body<T> = Result<Json<T>, JsonRejection>;

fn body<T>(b: Body<T>) -> Result<T, ApiError> {
    Ok(b?.0)
}

#[derive(Deserialize)]
struct ModelRequest {
    text: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CheckRequest {
    model_id: String,
    formula: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct SynthesizeRequest {
    model_id: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct SessionRequest {
    model_id: String,
    mode: SessionMode,
}

#[derive(Deserialize)]
struct LayoutRequest {
    graph: LayoutGraph,
    #[serde(default)]
    params: LayoutParams,
    #[serde(default)]
    pinned: BTreeMap<String, Coord>,
}

async fn add_model(State(app): Shared, req: Body<ModelRequest>) -> Result<Json<Value>, ApiError> {
    let req = body(req)?;
    let model = app.models.insert(&req.text)?;
    Ok(Json(model.summary()))
}

async fn get_model(State(app): Shared, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let model = app.models.get(&id)?;
    let mut v = model.summary();
    v["text"] = json!(model.text);
    Ok(Json(v))
}

async fn model_pnml(State(app): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let model = app.models.get(&id)?;
    Ok(([(header::CONTENT_TYPE, "application/xml")], export_pnml(model.net())).into_response())
}

fn accepted(job: &jobs::Job) -> Response {
    (
        StatusCode::ACCEPTED,
        Json(json!({"jobId": job.id, "status": job.status()})),
    )
        .into_response()
}

async fn submit_check(State(app): Shared, req: Body<CheckRequest>) -> Result<Response, ApiError> {
    let req = body(req)?;
    let model = app.models.get(&req.model_id)?;
    let formula = prepare_formula(&model.transit_net, &req.formula).map_err(ApiError::invalid)?;
    let job = app.jobs.submit(JobInput::Check { model, formula });
    Ok(accepted(&job))
}

async fn submit_synthesis(State(app): Shared, req: Body<SynthesizeRequest>) -> Result<Response, ApiError> {
    let req = body(req)?;
    let model = app.models.get(&req.model_id)?;
    if model.game.is_none() {
        return Err(ApiError::invalid("model is not a Petri game: it has no environment place"));
    }
    let job = app.jobs.submit(JobInput::Synthesize { model });
    Ok(accepted(&job))
}

async fn get_job(State(app): Shared, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    Ok(Json(app.jobs.get(&id)?.view()))
}

async fn cancel_job(State(app): Shared, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let job = app.jobs.cancel(&id)?;
    Ok(Json(job.view()))
}

async fn job_result(State(app): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let job = app.jobs.get(&id)?;
    let result = job
        .result()
        .ok_or_else(|| ApiError::Conflict(format!("job {id} has no result ({:?})", job.status())))?;
    Ok((
        [(header::CONTENT_TYPE, "application/json")],
        result_document(&result),
    )
        .into_response())
}

async fn create_session(State(app): Shared, req: Body<SessionRequest>) -> Result<Response, ApiError> {
    let req = body(req)?;
    let model = app.models.get(&req.model_id)?;
    let registry = app.clone();
    let (session, writer) =
        tokio::task::spawn_blocking(move || registry.sessions.create(model, req.mode))
            .await
            .map_err(|e| ApiError::invalid(e.to_string()))??;
    let v = json!({
        "sessionId": session.id,
        "writer": writer,
        "snapshot": session.snapshot(),
    });
    Ok((StatusCode::CREATED, Json(v)).into_response())
}

async fn get_session(State(app): Shared, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    Ok(Json(app.sessions.get(&id)?.snapshot()))
}

async fn step_session(
    State(app): Shared,
    Path(id): Path<String>,
    req: Body<StepRequest>,
) -> Result<Json<Value>, ApiError> {
    let req = body(req)?;
    let session = app.sessions.get(&id)?;
    let snapshot = tokio::task::spawn_blocking(move || session.step(&req.writer, &req.action))
        .await
        .map_err(|e| ApiError::invalid(e.to_string()))??;
    Ok(Json(snapshot))
}

async fn layout(req: Body<LayoutRequest>) -> Result<Json<Value>, ApiError> {
    let req = body(req)?;
    req.params.validate().map_err(ApiError::invalid)?;
    if let Some((id, _)) = req.pinned.iter().find(|(_, c)| !c.x.is_finite() || !c.y.is_finite()) {
        return Err(ApiError::invalid(format!("pinned coordinate of {id} is not finite")));
    }
    let result = tokio::task::spawn_blocking(move || force_layout(&req.graph, &req.params, &req.pinned))
        .await
        .map_err(|e| ApiError::invalid(e.to_string()))?;
    Ok(Json(serde_json::to_value(result).expect("layout results serialize")))
}

async fn ws_job(State(app): Shared, Path(id): Path<String>, upgrade: WebSocketUpgrade) -> Response {
    let job = app.jobs.get(&id);
    upgrade.on_upgrade(move |socket| async move {
        match job {
            Ok(job) => ws::job_stream(socket, job).await,
            Err(e) => ws::reject(socket, e).await,
        }
    })
}

async fn ws_session(State(app): Shared, Path(id): Path<String>, upgrade: WebSocketUpgrade) -> Response {
    let session = app.sessions.get(&id);
    upgrade.on_upgrade(move |socket| async move {
        match session {
            Ok(s) => ws::session_stream(socket, s).await,
            Err(e) => ws::reject(socket, e).await,
        }
    })
}

async fn fallback() -> ApiError {
    ApiError::NotFound("route".into())
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/models", post(add_model))
        .route("/api/models/{id}", get(get_model))
        .route("/api/models/{id}/pnml", get(model_pnml))
        .route("/api/check", post(submit_check))
        .route("/api/synthesize", post(submit_synthesis))
        .route("/api/jobs/{id}", get(get_job).delete(cancel_job))
        .route("/api/jobs/{id}/result", get(job_result))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/step", post(step_session))
        .route("/api/layout", post(layout))
        .route("/ws/jobs/{id}", get(ws_job))
        .route("/ws/sessions/{id}", get(ws_session))
        .fallback(fallback)
        .with_state(state)
}

/// Binds `0.0.0.0:{port}` and serves until the process ends.
pub async fn serve(config: Config) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", config.port)).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    let app = router(Arc::new(AppState::new(&config)));
    axum::serve(listener, app).await
}

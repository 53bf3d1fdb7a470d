//! HTTP API over interactive disambiguation sessions.
//!
//! | method | path                          | success | errors        |
//! |--------|-------------------------------|---------|---------------|
//! | GET    | `/api/health`                 | 200     |               |
//! | POST   | `/api/sessions`               | 201     | 400, 500      |
//! | GET    | `/api/sessions/{id}`          | 200     | 404           |
//! | POST   | `/api/sessions/{id}/decisions`| 200     | 400, 404, 409 |
//!
//! Session bodies are [`ApiSessionView`]; errors are `{"error": "..."}`.
//! Sessions live in memory and, when a snapshot directory is configured,
//! are also written there as JSON after every change and reloaded on start.

mod view;

use std::collections::HashMap;
use std::fs;
use std::future::Future;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use log::{info, warn};
use namediss_core::{parse_name, Checkpoint, Engine, Session, SessionError, SessionState};
use serde::Deserialize;
use thiserror::Error;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

pub use view::{ApiSessionView, OptionView, RecordSummary};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("snapshot directory {path}: {source}")]
    SnapshotDir { path: PathBuf, source: io::Error },
    #[error("snapshot {path}: {source}")]
    Snapshot { path: PathBuf, source: serde_json::Error },
    #[error("invalid CORS origin {0:?}")]
    CorsOrigin(String),
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("no session {0:?}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Conflict(_) => StatusCode::CONFLICT,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(serde_json::json!({ "error": self.to_string() }))).into_response()
    }
}

struct Inner {
    engine: Engine,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    snapshot_dir: Option<PathBuf>,
}

/// Shared server state: the engine plus every live session. Each session
/// has its own lock, so decisions on one session are serialized while
/// different sessions proceed independently.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    pub fn new(engine: Engine) -> Self {
        Self { inner: Arc::new(Inner { engine, sessions: RwLock::default(), snapshot_dir: None }) }
    }

    /// Persists sessions under `dir`, creating it if needed, and resumes
    /// any sessions already snapshotted there.
    pub fn with_snapshot_dir(engine: Engine, dir: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let dir = dir.into();
        let io_err = |source| ServiceError::SnapshotDir { path: dir.clone(), source };
        fs::create_dir_all(&dir).map_err(io_err)?;
        let mut sessions = HashMap::new();
        for entry in fs::read_dir(&dir).map_err(io_err)? {
            let path = entry.map_err(io_err)?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let text = fs::read_to_string(&path)
                    .map_err(|source| ServiceError::SnapshotDir { path: path.clone(), source })?;
                let session: Session = serde_json::from_str(&text)
                    .map_err(|source| ServiceError::Snapshot { path: path.clone(), source })?;
                sessions.insert(session.id.clone(), Arc::new(Mutex::new(session)));
            }
        }
        info!("resumed {} sessions from {}", sessions.len(), dir.display());
        Ok(Self { inner: Arc::new(Inner { engine, sessions: RwLock::new(sessions), snapshot_dir: Some(dir) }) })
    }

    pub fn engine(&self) -> &Engine {
        &self.inner.engine
    }

    /// A copy of the session's current state.
    pub fn session(&self, id: &str) -> Option<Session> {
        let handle = self.handle(id)?;
        let session = handle.lock().expect("session lock poisoned");
        Some(session.clone())
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.inner.sessions.read().expect("session map poisoned").keys().cloned().collect();
        ids.sort();
        ids
    }

    fn handle(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.inner.sessions.read().expect("session map poisoned").get(id).cloned()
    }

    fn view(&self, session: &Session) -> ApiSessionView {
        ApiSessionView::new(session, self.inner.engine.corpus())
    }

    fn persist(&self, session: &Session) {
        let Some(dir) = &self.inner.snapshot_dir else { return };
        let path = snapshot_path(dir, &session.id);
        let text = serde_json::to_string_pretty(session).expect("sessions serialize");
        if let Err(e) = fs::write(&path, text) {
            warn!("could not write snapshot {}: {e}", path.display());
        }
    }
}

fn snapshot_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.json"))
}

#[derive(Deserialize)]
struct CreateRequest {
    query: String,
}

/// `checkpoint` is optional; when given, the decision is rejected with 409
/// unless the session is still at that checkpoint. A client resubmitting a
/// stale choice can't then land it on the next checkpoint by accident.
#[derive(Deserialize)]
struct DecisionRequest {
    cluster_id: String,
    #[serde(default)]
    checkpoint: Option<Checkpoint>,
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(format!("invalid request body: {e}")))
}

async fn health() -> &'static str {
    "ok"
}

async fn create_session(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<ApiSessionView>), ApiError> {
    let req: CreateRequest = parse_body(&body)?;
    let query = parse_name(&req.query).map_err(|e| ApiError::BadRequest(format!("query {:?}: {e}", req.query)))?;
    let session = state.engine().start(uuid::Uuid::new_v4().to_string(), query);
    if session.state == SessionState::Failed {
        return Err(ApiError::Internal(session.error.unwrap_or_else(|| "session failed to start".into())));
    }
    state.persist(&session);
    let view = state.view(&session);
    state
        .inner
        .sessions
        .write()
        .expect("session map poisoned")
        .insert(session.id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<ApiSessionView>, ApiError> {
    let handle = state.handle(&id).ok_or(ApiError::NotFound(id))?;
    let session = handle.lock().expect("session lock poisoned");
    Ok(Json(state.view(&session)))
}

async fn submit_decision(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Json<ApiSessionView>, ApiError> {
    let handle = state.handle(&id).ok_or(ApiError::NotFound(id))?;
    let req: DecisionRequest = parse_body(&body)?;
    let mut session = handle.lock().expect("session lock poisoned");
    if let Some(expected) = req.checkpoint {
        if session.checkpoint() != Some(expected) {
            return Err(ApiError::Conflict(format!(
                "decision for the {expected} checkpoint, but the session is {}",
                session.state
            )));
        }
    }
    state.engine().submit_decision(&mut session, &req.cluster_id).map_err(|e| match e {
        SessionError::UnknownCluster { .. } | SessionError::NotAwaiting(_) => ApiError::Conflict(e.to_string()),
    })?;
    state.persist(&session);
    Ok(Json(state.view(&session)))
}

/// CORS for the review UI: `None` allows any origin.
pub fn cors_layer(origin: Option<&str>) -> Result<CorsLayer, ServiceError> {
    let allow = match origin {
        None => AllowOrigin::any(),
        Some(o) => AllowOrigin::exact(HeaderValue::from_str(o).map_err(|_| ServiceError::CorsOrigin(o.to_string()))?),
    };
    Ok(CorsLayer::new().allow_origin(allow).allow_methods(Any).allow_headers(Any))
}

pub fn router(state: AppState, cors: CorsLayer) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/decisions", post(submit_decision))
        .layer(cors)
        .with_state(state)
}

/// Serves `router` on `listener` until `shutdown` resolves, then lets
/// in-flight requests finish.
pub async fn serve(
    listener: TcpListener,
    router: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> io::Result<()> {
    axum::serve(listener, router).with_graceful_shutdown(shutdown).await
}

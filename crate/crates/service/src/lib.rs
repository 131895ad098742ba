//! HTTP service for authoring conflicting norms.
//!
//! Annotators fetch a random norm from the contract corpus, edit a copy so
//! that it conflicts with the original, tag the conflict type and submit it.
//! Each accepted submission is appended to a dataset file.
//!
//! | method | path               | success                      |
//! |--------|--------------------|------------------------------|
//! | GET    | `/api/norm/random` | 200 `{norm_id, contract_id, text}` |
//! | POST   | `/api/conflict`    | 201 stored record            |
//! | GET    | `/api/stats`       | 200 per-type counts          |
//! | GET    | `/healthz`         | 200 `ok`                     |
//!
//! There is no authentication; the `annotator` field is taken on trust.

mod store;

pub use store::AnnotationStore;

use std::collections::HashMap;
use std::future::Future;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use log::{info, warn};
use normconflict_core::corpus::{pair_to_line, Contract, CorpusError, NormPair, Provenance};
use normconflict_core::extract::{extract_norms, ModalLexicon};
use normconflict_core::rng::{mix, reduce, GOLDEN_GAMMA};
use normconflict_core::{ConflictLabel, Norm};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("cannot bind {addr}: {source}")]
    BindFailure { addr: String, source: std::io::Error },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Norms of every `*.txt` contract in `dir`, in file-name order.
pub fn load_norms(dir: &Path, lexicon: &ModalLexicon) -> Result<Vec<Norm>, ServiceError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "txt"));
    paths.sort();
    let mut norms = Vec::new();
    for path in paths {
        let contract = Contract::from_file(&path)?;
        norms.extend(extract_norms(&contract, lexicon));
    }
    Ok(norms)
}

/// Shared service state. The norm list is immutable; random draws are a
/// lock-free SplitMix64 stream; appends go through one mutex-guarded writer.
#[derive(Debug)]
pub struct AppState {
    norms: Vec<Norm>,
    by_id: HashMap<String, usize>,
    draws: AtomicU64,
    store: Mutex<AnnotationStore>,
}

impl AppState {
    pub fn new(norms: Vec<Norm>, store: AnnotationStore, seed: u64) -> Self {
        let by_id = norms.iter().enumerate().map(|(i, n)| (n.id.clone(), i)).collect();
        Self { norms, by_id, draws: AtomicU64::new(seed), store: Mutex::new(store) }
    }

    pub fn norms(&self) -> &[Norm] {
        &self.norms
    }

    /// The next norm of the seeded stream. Draw `i` (0-based) equals the
    /// `i`-th output of `SplitMix64::new(seed)` reduced to the corpus size,
    /// whichever request receives it.
    pub fn random_norm(&self) -> Option<&Norm> {
        if self.norms.is_empty() {
            return None;
        }
        let state = self.draws.fetch_add(GOLDEN_GAMMA, Ordering::Relaxed).wrapping_add(GOLDEN_GAMMA);
        Some(&self.norms[reduce(mix(state), self.norms.len())])
    }

    fn store(&self) -> std::sync::MutexGuard<'_, AnnotationStore> {
        // A panic while holding the lock cannot leave a half-written line
        // visible to later appends, so the poison flag carries no information.
        self.store.lock().unwrap_or_else(|e| e.into_inner())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomNorm {
    pub norm_id: String,
    pub contract_id: String,
    pub text: String,
}

/// Body of `POST /api/conflict`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationSubmission {
    pub original_norm_id: String,
    pub original_text: String,
    pub edited_text: String,
    pub conflict_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotator: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    UnknownNorm(String),
    Invalid(String),
}

impl AnnotationSubmission {
    /// Structural checks only; the conflict itself is taken on trust.
    pub fn validate(&self, state: &AppState) -> Result<ConflictLabel, Rejection> {
        let label: ConflictLabel =
            self.conflict_type.parse().map_err(|_| Rejection::Invalid(format!("unknown conflict type {:?}", self.conflict_type)))?;
        if !label.is_conflict() {
            return Err(Rejection::Invalid("conflict type must be one of the four conflict types".into()));
        }
        if self.edited_text.trim().is_empty() {
            return Err(Rejection::Invalid("edited text is empty".into()));
        }
        if self.edited_text.trim() == self.original_text.trim() {
            return Err(Rejection::Invalid("edited text is identical to the original".into()));
        }
        let idx = *state
            .by_id
            .get(&self.original_norm_id)
            .ok_or_else(|| Rejection::UnknownNorm(self.original_norm_id.clone()))?;
        if state.norms[idx].text != self.original_text {
            return Err(Rejection::Invalid("original text does not match the stored norm".into()));
        }
        Ok(label)
    }
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    let body = serde_json::json!({ "error": message.into() }).to_string();
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn json_record(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn random_norm(State(state): State<Arc<AppState>>) -> Response {
    match state.random_norm() {
        Some(n) => {
            let body = RandomNorm { norm_id: n.id.clone(), contract_id: n.contract_id.clone(), text: n.text.clone() };
            json_record(StatusCode::OK, serde_json::to_string(&body).expect("serializable"))
        }
        None => error(StatusCode::SERVICE_UNAVAILABLE, "the contract corpus has no norms"),
    }
}

async fn submit_conflict(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let value: serde_json::Value = match serde_json::from_slice(&body) {
        Ok(v) => v,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed JSON: {e}")),
    };
    let submission: AnnotationSubmission = match serde_json::from_value(value) {
        Ok(s) => s,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, format!("invalid submission: {e}")),
    };
    let label = match submission.validate(&state) {
        Ok(l) => l,
        Err(Rejection::UnknownNorm(id)) => return error(StatusCode::NOT_FOUND, format!("unknown norm {id:?}")),
        Err(Rejection::Invalid(msg)) => return error(StatusCode::UNPROCESSABLE_ENTITY, msg),
    };
    let mut pair =
        NormPair::new("", submission.original_text, submission.edited_text, label, Provenance::Authored);
    pair.annotator = submission.annotator;

    let result = tokio::task::spawn_blocking(move || state.store().append(pair)).await;
    match result {
        Ok(Ok(stored)) => {
            info!("stored {} ({})", stored.id, stored.label);
            json_record(StatusCode::CREATED, pair_to_line(&stored))
        }
        Ok(Err(e)) => {
            warn!("append failed: {e}");
            error(StatusCode::INTERNAL_SERVER_ERROR, "could not store the submission")
        }
        Err(e) => {
            warn!("append task failed: {e}");
            error(StatusCode::INTERNAL_SERVER_ERROR, "could not store the submission")
        }
    }
}

async fn stats(State(state): State<Arc<AppState>>) -> Response {
    json_record(StatusCode::OK, state.store().stats().to_json())
}

async fn healthz() -> &'static str {
    "ok"
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/norm/random", get(random_norm))
        .route("/api/conflict", post(submit_conflict))
        .route("/api/stats", get(stats))
        .route("/healthz", get(healthz))
        .with_state(state)
}

/// Binds a listener. Failure maps to [`ServiceError::BindFailure`].
pub fn bind(addr: &str) -> Result<std::net::TcpListener, ServiceError> {
    let listener = std::net::TcpListener::bind(addr)
        .map_err(|source| ServiceError::BindFailure { addr: addr.to_string(), source })?;
    listener.set_nonblocking(true)?;
    Ok(listener)
}

/// Serves until `shutdown` resolves, then drains in-flight requests. Appends
/// are synced before their response, so nothing is pending afterwards.
pub async fn serve(
    listener: std::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    let listener = tokio::net::TcpListener::from_std(listener)?;
    let addr: SocketAddr = listener.local_addr()?;
    info!("listening on {addr}");
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await?;
    info!("shut down");
    Ok(())
}

/// Resolves on Ctrl-C or SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        if let Err(e) = tokio::signal::ctrl_c().await {
            warn!("cannot listen for interrupts: {e}");
            std::future::pending::<()>().await;
        }
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}

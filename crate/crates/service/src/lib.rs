//! HTTP front end for grid-password accounts.
//!
//! Routes:
//! - `GET /api/grid?username=U` grid configuration and cell colors for `U`
//! - `POST /api/register` `{username, tagged_password}`
//! - `POST /api/login` `{username, tagged_password}`
//!
//! Passwords travel in tagged form and are hashed server-side. The
//! credential store is an append-only file; nothing else is persisted.

use std::collections::{HashMap, VecDeque};
use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use spartan_core::color::colorize;
use spartan_core::credential::{
    check_username, CredentialError, CredentialRecord, CredentialStore,
};
use spartan_core::grid::{Coord, Dims, Direction, GridSpec};
use spartan_core::kdf::{hash_password, KdfParams, Salt};
use spartan_core::Placement;
use tokio::net::TcpListener;

/// Shortest accepted password, in characters.
pub const MIN_PASSWORD_CHARS: usize = 8;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub store: PathBuf,
    pub dims: Dims,
    pub palette_size: u8,
    pub kdf: KdfParams,
    /// Login attempts allowed per username in any 60 second window.
    pub attempts_per_minute: usize,
}

impl ServiceConfig {
    pub fn new(store: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            store: store.into(),
            dims: Dims::new(12, 12).expect("12x12 is valid"),
            palette_size: 6,
            kdf: KdfParams::INTERACTIVE,
            attempts_per_minute: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfigResponse {
    pub rows: usize,
    pub cols: usize,
    pub palette_size: u8,
    pub color_seed: u64,
    pub cell_colors: Vec<u8>,
    pub default_start: Coord,
    pub default_direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Credentials {
    pub username: String,
    pub tagged_password: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthResult {
    pub outcome: Outcome,
    pub attempt_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    Conflict(String),
    Unprocessable(String),
    TooManyAttempts,
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, error) = match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::Conflict(m) => (StatusCode::CONFLICT, m),
            ApiError::Unprocessable(m) => (StatusCode::UNPROCESSABLE_ENTITY, m),
            ApiError::TooManyAttempts => (
                StatusCode::TOO_MANY_REQUESTS,
                "too many attempts".to_string(),
            ),
            ApiError::Internal(m) => {
                tracing::error!(error = %m, "internal error");
                (
                    StatusCode::INTERNAL_SERVER_ERROR,
                    "internal error".to_string(),
                )
            }
        };
        (status, Json(ErrorBody { error })).into_response()
    }
}

#[derive(Default)]
struct Attempts {
    total: u64,
    recent: VecDeque<Instant>,
}

pub struct AppState {
    config: ServiceConfig,
    store: Mutex<CredentialStore>,
    attempts: Mutex<HashMap<String, Attempts>>,
}

impl AppState {
    pub fn open(config: ServiceConfig) -> Result<Arc<Self>, CredentialError> {
        let store = CredentialStore::open(&config.store)?;
        Ok(Arc::new(AppState {
            config,
            store: Mutex::new(store),
            attempts: Mutex::new(HashMap::new()),
        }))
    }

    fn grid_for(&self, username: &str) -> Result<GridSpec, ApiError> {
        if username.is_empty() {
            return Err(ApiError::BadRequest("username must not be empty".into()));
        }
        GridSpec::for_user(username, self.config.dims, self.config.palette_size)
            .map_err(|e| ApiError::BadRequest(e.to_string()))
    }

    /// Counts a login attempt, refusing it once the window is full.
    fn record_attempt(&self, username: &str) -> Result<u64, ApiError> {
        let now = Instant::now();
        let mut all = self.attempts.lock().expect("attempt table poisoned");
        let a = all.entry(username.to_string()).or_default();
        while a
            .recent
            .front()
            .is_some_and(|t| now.duration_since(*t) >= Duration::from_secs(60))
        {
            a.recent.pop_front();
        }
        if a.recent.len() >= self.config.attempts_per_minute {
            return Err(ApiError::TooManyAttempts);
        }
        a.recent.push_back(now);
        a.total += 1;
        Ok(a.total)
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/grid", get(grid_config))
        .route("/api/register", post(register))
        .route("/api/login", post(login))
        .with_state(state)
}

#[derive(Deserialize)]
struct GridQuery {
    #[serde(default)]
    username: String,
}

async fn grid_config(
    State(state): State<Arc<AppState>>,
    Query(q): Query<GridQuery>,
) -> Result<Json<GridConfigResponse>, ApiError> {
    let grid = state.grid_for(&q.username)?;
    Ok(Json(GridConfigResponse {
        rows: grid.rows(),
        cols: grid.cols(),
        palette_size: grid.palette_size(),
        color_seed: grid.color_seed(),
        cell_colors: colorize(&grid).colors().to_vec(),
        default_start: Coord::new(0, 0),
        default_direction: Direction::E,
    }))
}

fn parse_password(grid: &GridSpec, tagged: &str) -> Result<Placement, ApiError> {
    let p =
        Placement::from_tagged(grid, tagged).map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    if p.len() < MIN_PASSWORD_CHARS {
        return Err(ApiError::Unprocessable(format!(
            "password must have at least {MIN_PASSWORD_CHARS} characters"
        )));
    }
    Ok(p)
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> T + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))
}

async fn register(
    State(state): State<Arc<AppState>>,
    Json(body): Json<Credentials>,
) -> Result<StatusCode, ApiError> {
    let grid = state.grid_for(&body.username)?;
    check_username(&body.username).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let p = parse_password(&grid, &body.tagged_password)?;
    if state
        .store
        .lock()
        .expect("store poisoned")
        .contains(&body.username)
    {
        return Err(ApiError::Conflict("username already registered".into()));
    }
    let params = state.config.kdf;
    let username = body.username.clone();
    let rec = blocking(move || CredentialRecord::register(&username, &p, &grid, params))
        .await?
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    let mut store = state.store.lock().expect("store poisoned");
    match store.append(rec) {
        Ok(()) => {
            tracing::info!(username = %body.username, "registered");
            Ok(StatusCode::CREATED)
        }
        Err(CredentialError::Duplicate(_)) => {
            Err(ApiError::Conflict("username already registered".into()))
        }
        Err(e) => Err(ApiError::Internal(e.to_string())),
    }
}

async fn login(
    State(state): State<Arc<AppState>>,
    Json(body): Json<Credentials>,
) -> Result<Response, ApiError> {
    let record = state
        .store
        .lock()
        .expect("store poisoned")
        .get(&body.username)
        .cloned();
    let grid = match &record {
        Some(r) => r.grid.grid(),
        None => state.grid_for(&body.username)?,
    };
    let p = parse_password(&grid, &body.tagged_password)?;
    let attempt_count = state.record_attempt(&body.username)?;
    let params = state.config.kdf;
    let ok = blocking(move || match record {
        Some(r) => r.verify(&p),
        None => {
            // same work as a real check so unknown names are not faster
            let _ = hash_password(&p, &Salt([0; 16]), &params);
            false
        }
    })
    .await?;
    tracing::info!(username = %body.username, success = ok, "login");
    let (status, outcome) = if ok {
        (StatusCode::OK, Outcome::Success)
    } else {
        (StatusCode::UNAUTHORIZED, Outcome::Failure)
    };
    Ok((
        status,
        Json(AuthResult {
            outcome,
            attempt_count,
        }),
    )
        .into_response())
}

/// A running server bound to a local address.
pub struct Server {
    pub addr: SocketAddr,
    shutdown: tokio::sync::oneshot::Sender<()>,
    task: tokio::task::JoinHandle<std::io::Result<()>>,
}

impl Server {
    pub async fn stop(self) -> std::io::Result<()> {
        let _ = self.shutdown.send(());
        self.task.await.map_err(std::io::Error::other)?
    }
}

/// Binds `config.listen` (port 0 picks a free port) and serves in the
/// background.
pub async fn spawn(
    config: ServiceConfig,
) -> Result<Server, Box<dyn std::error::Error + Send + Sync>> {
    let listener = TcpListener::bind(config.listen).await?;
    let addr = listener.local_addr()?;
    let app = router(AppState::open(config)?);
    let (tx, rx) = tokio::sync::oneshot::channel::<()>();
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = rx.await;
            })
            .await
    });
    Ok(Server {
        addr,
        shutdown: tx,
        task,
    })
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    config: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let listener = TcpListener::bind(config.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, store = %config.store.display(), "listening");
    let app = router(AppState::open(config)?);
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(())
}

//! Local HTTP front end for the shader pipeline.
//!
//! Routes:
//!
//! | method | path | |
//! |---|---|---|
//! | POST | `/api/generate` | `{intent}` → 202 `{job_id}` |
//! | GET | `/api/jobs/{id}` | job snapshot |
//! | GET | `/api/jobs/{id}/events` | SSE, one `status` event per transition |
//! | GET | `/api/shaders` | artifact summaries, newest first |
//! | GET/DELETE | `/api/shaders/{id}` | artifact with source / remove |
//! | POST | `/api/shaders/{id}/save` | mark as saved |
//! | POST | `/api/validate` | `{source}` → `{diagnostics}` |
//! | POST | `/api/render` | multipart `shader_id` or `source`, `image`, `time` → PNG |
//! | POST | `/api/transcribe` | multipart WAV → `{text}` |
//!
//! Every non-2xx response body is an [`ApiError`]. Anything else is served
//! from the configured static directory.

pub mod codec;
mod error;
mod routes;

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::Router;
use shaderlens_pipeline::{generator_from_config, Config, GenerationError, JobQueue, LlmClient, Store, StoreError};
use tokio::net::TcpListener;

pub use error::ApiError;

/// Longest accepted shader source, in bytes.
pub const SOURCE_LIMIT: usize = 256 * 1024;
/// Largest multipart upload (render and transcribe).
pub const MULTIPART_LIMIT: usize = 64 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct AppState {
    pub queue: JobQueue,
    pub store: Arc<Store>,
    pub client: LlmClient,
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error(transparent)]
    Generator(#[from] GenerationError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("binding {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
}

impl AppState {
    pub fn from_config(cfg: &Config) -> Result<Self, ServerError> {
        let generator = Arc::new(generator_from_config(cfg)?);
        let store = Arc::new(Store::open(&cfg.store)?);
        let client = generator.client().clone();
        let queue = JobQueue::new(generator, store.clone(), cfg.workers, cfg.queue_limit);
        Ok(AppState { queue, store, client, static_dir: cfg.static_dir.clone() })
    }
}

pub fn router(state: AppState) -> Router {
    routes::router(state)
}

#[derive(Debug)]
pub struct Server {
    listener: TcpListener,
    app: Router,
}

impl Server {
    pub async fn bind(cfg: &Config) -> Result<Server, ServerError> {
        let state = AppState::from_config(cfg)?;
        let listener = TcpListener::bind(cfg.bind).await.map_err(|source| ServerError::Bind { addr: cfg.bind, source })?;
        Ok(Server { listener, app: router(state) })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener.local_addr().expect("bound listener has an address")
    }

    pub async fn run(self) -> std::io::Result<()> {
        axum::serve(self.listener, self.app).await
    }

    pub async fn run_until(self, shutdown: impl Future<Output = ()> + Send + 'static) -> std::io::Result<()> {
        axum::serve(self.listener, self.app).with_graceful_shutdown(shutdown).await
    }
}

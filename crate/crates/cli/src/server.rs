//! JSON-over-HTTP linking service: `POST /link`, `GET /health`.
//!
//! The index loads in a background thread; both endpoints answer 503 until
//! it is ready. Requests are stateless: per-request configuration
//! overrides derive a throwaway `Linker` over the shared immutable bundle.

use std::sync::{Arc, OnceLock};
use std::time::Instant;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;

use kblink::api::{Document, LinkRequest};
use kblink::config::{resolve, PartialLinkerConfig};
use kblink::index::IndexBundle;
use kblink::pipeline::Linker;

use crate::commands::{error_code, load_service_bundle};
use crate::ServeArgs;

/// Configuration layers fixed at startup. CLI flags outrank per-request
/// overrides, which outrank the config file.
#[derive(Debug, Default)]
pub struct ConfigLayers {
    pub file: PartialLinkerConfig,
    pub cli: PartialLinkerConfig,
}

type LoadSlot = OnceLock<Result<Arc<IndexBundle>, String>>;

#[derive(Clone)]
pub struct AppState {
    slot: Arc<LoadSlot>,
    layers: Arc<ConfigLayers>,
}

impl AppState {
    /// State whose index is still loading (or will be set later).
    pub fn loading(layers: ConfigLayers) -> AppState {
        AppState {
            slot: Arc::new(OnceLock::new()),
            layers: Arc::new(layers),
        }
    }

    /// State over an already-loaded bundle (tests, mostly).
    pub fn with_bundle(bundle: IndexBundle, layers: ConfigLayers) -> AppState {
        let state = Self::loading(layers);
        state.finish_load(Ok(Arc::new(bundle)));
        state
    }

    pub fn finish_load(&self, outcome: Result<Arc<IndexBundle>, String>) {
        let _ = self.slot.set(outcome);
    }

    #[allow(clippy::result_large_err)] // Err is the ready-to-send Response
    fn bundle(&self) -> Result<&Arc<IndexBundle>, Response> {
        match self.slot.get() {
            None => Err(error_response(
                StatusCode::SERVICE_UNAVAILABLE,
                "INDEX_LOADING",
                "index is still loading",
            )),
            Some(Err(message)) => Err(error_response(
                StatusCode::SERVICE_UNAVAILABLE,
                "INDEX_FAILED",
                message,
            )),
            Some(Ok(bundle)) => Ok(bundle),
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: &'a str,
}

fn error_response(status: StatusCode, code: &str, message: &str) -> Response {
    (status, Json(ErrorBody { code, message })).into_response()
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct HealthBody<'a> {
    status: &'a str,
    index_version: &'a str,
    resource_count: u64,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/link", post(handle_link))
        .route("/health", get(handle_health))
        .with_state(state)
}

async fn handle_health(State(state): State<AppState>) -> Response {
    match state.bundle() {
        Err(resp) => resp,
        Ok(bundle) => Json(HealthBody {
            status: "ready",
            index_version: &bundle.manifest().index_version,
            resource_count: bundle.manifest().counts.resources,
        })
        .into_response(),
    }
}

async fn handle_link(
    State(state): State<AppState>,
    payload: Result<Json<LinkRequest>, JsonRejection>,
) -> Response {
    let started = Instant::now();
    let bundle = match state.bundle() {
        Ok(bundle) => Arc::clone(bundle),
        Err(resp) => return resp,
    };
    let Json(request) = match payload {
        Ok(json) => json,
        Err(rejection) => {
            return error_response(StatusCode::BAD_REQUEST, "BAD_JSON", &rejection.to_string())
        }
    };

    let document = match Document::from_request(&request) {
        Ok(doc) => doc,
        Err(err) => {
            return error_response(StatusCode::BAD_REQUEST, error_code(&err), &err.to_string())
        }
    };

    // The request's language tag is a request-layer setting, same
    // precedence as configOverrides (an explicit override wins).
    let mut overrides = request.config_overrides.clone().unwrap_or_default();
    if overrides.language.is_none() {
        overrides.language = request.language.clone();
    }
    let config = resolve(&[&state.layers.file, &overrides, &state.layers.cli]);
    if let Err(err) = config.validate() {
        return error_response(StatusCode::BAD_REQUEST, "CONFIG_INVALID", &err.to_string());
    }
    let linker = match Linker::from_shared(bundle, config) {
        Ok(linker) => linker,
        Err(err) => {
            return error_response(StatusCode::BAD_REQUEST, "CONFIG_INVALID", &err.to_string())
        }
    };

    let mut response = linker.respond(&document);
    response.timing_ms = Some(started.elapsed().as_millis() as u64);
    Json(response).into_response()
}

/// Binds the listener, kicks off the index load in the background, and
/// serves until the process is stopped.
pub fn run_serve(args: &ServeArgs) -> anyhow::Result<()> {
    let layers = ConfigLayers {
        file: args.config.file_layer()?,
        cli: args.config.cli_layer(),
    };
    // Fail fast on an unusable flag combination before going async.
    resolve(&[&layers.file, &layers.cli]).validate()?;

    let state = AppState::loading(layers);
    let loader_state = state.clone();
    let index_dir = args.index.clone();
    std::thread::spawn(move || {
        let outcome = load_service_bundle(&index_dir)
            .map(Arc::new)
            .map_err(|e| e.to_string());
        loader_state.finish_load(outcome);
    });

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&args.addr).await?;
        eprintln!("listening on {}", listener.local_addr()?);
        axum::serve(listener, router(state)).await?;
        Ok(())
    })
}

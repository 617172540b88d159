//! Read-only HTTP API over a store snapshot, plus a loopback-only reload.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, RwLock};

use axum::extract::rejection::ExtensionRejection;
use axum::extract::{ConnectInfo, Path, RawQuery, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dpe_core::card::{generate_card, render_markdown};
use dpe_core::filter::{apply_filter, FilterCriteria};
use serde_json::{json, Value};

use crate::report::{self, split_pairs, Page, ParamError, StatKind, StatOptions};
use crate::snapshot::{LoadOptions, Snapshot, SnapshotError};

pub struct AppState {
    snapshot: RwLock<Arc<Snapshot>>,
    sources: LoadOptions,
    reloading: AtomicBool,
}

/// Held for the duration of a reload; requests are refused meanwhile.
pub struct ReloadGuard<'a>(&'a AtomicBool);

impl Drop for ReloadGuard<'_> {
    fn drop(&mut self) {
        self.0.store(false, Ordering::Release);
    }
}

impl AppState {
    pub fn new(snapshot: Snapshot, sources: LoadOptions) -> Arc<AppState> {
        Arc::new(AppState {
            snapshot: RwLock::new(Arc::new(snapshot)),
            sources,
            reloading: AtomicBool::new(false),
        })
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    pub fn is_reloading(&self) -> bool {
        self.reloading.load(Ordering::Acquire)
    }

    /// `None` when a reload is already running.
    pub fn try_begin_reload(&self) -> Option<ReloadGuard<'_>> {
        self.reloading
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .ok()
            .map(|_| ReloadGuard(&self.reloading))
    }

    /// Rebuilds the snapshot from the original sources. On failure the old
    /// snapshot stays in place.
    pub fn reload(&self) -> Result<Arc<Snapshot>, SnapshotError> {
        let fresh = Arc::new(Snapshot::load(&self.sources)?);
        *self.snapshot.write().expect("snapshot lock") = fresh.clone();
        Ok(fresh)
    }
}

type Shared = Arc<AppState>;

pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, body: json!({ "error": message.into() }) }
    }
}

impl From<ParamError> for ApiError {
    fn from(e: ParamError) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: json!({ "error": e.message, "param": e.param }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

fn pairs(query: Option<String>) -> Vec<(String, String)> {
    url::form_urlencoded::parse(query.unwrap_or_default().as_bytes())
        .map(|(k, v)| (k.into_owned(), v.into_owned()))
        .collect()
}

fn parse(query: Option<String>, own: &[&str]) -> Result<(FilterCriteria, BTreeMap<String, String>), ApiError> {
    Ok(split_pairs(&pairs(query), own)?)
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/v1/datasets", get(list_datasets))
        .route("/v1/datasets/{*id}", get(get_dataset))
        .route("/v1/summary", get(summary))
        .route("/v1/card", get(card))
        .route("/v1/analytics/{kind}", get(analytics))
        .route("/v1/meta/taxonomies", get(taxonomies))
        .route("/v1/meta/registry", get(registry))
        .route("/v1/meta/version", get(version))
        .route("/v1/admin/reload", post(reload))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "no such endpoint") })
        .layer(middleware::from_fn_with_state(state.clone(), refuse_while_reloading))
        .with_state(state)
}

async fn refuse_while_reloading(State(state): State<Shared>, req: Request, next: Next) -> Response {
    if state.is_reloading() {
        let mut resp = ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "store is reloading").into_response();
        resp.headers_mut().insert(header::RETRY_AFTER, header::HeaderValue::from_static("1"));
        return resp;
    }
    next.run(req).await
}

async fn list_datasets(State(state): State<Shared>, RawQuery(q): RawQuery) -> ApiResult {
    let (criteria, own) = parse(q, &["page", "page_size"])?;
    let page = Page::from_params(&own)?;
    let snap = state.snapshot();
    let sel = apply_filter(&snap.store, &criteria);
    Ok(Json(report::datasets(&snap, &sel, Some(page))).into_response())
}

async fn get_dataset(State(state): State<Shared>, Path(id): Path<String>, RawQuery(q): RawQuery) -> ApiResult {
    let given = pairs(q.clone());
    let (criteria, _) = parse(q, &[])?;
    let snap = state.snapshot();
    let criteria = (!given.is_empty()).then_some(&criteria);
    report::dataset_detail(&snap, &id, criteria)
        .map(|v| Json(v).into_response())
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no dataset `{id}`")))
}

async fn summary(State(state): State<Shared>, RawQuery(q): RawQuery) -> ApiResult {
    let (criteria, _) = parse(q, &[])?;
    let snap = state.snapshot();
    Ok(Json(report::summary(&snap, &apply_filter(&snap.store, &criteria))).into_response())
}

async fn card(State(state): State<Shared>, RawQuery(q): RawQuery) -> ApiResult {
    let (criteria, own) = parse(q, &["format"])?;
    let snap = state.snapshot();
    let card = generate_card(&apply_filter(&snap.store, &criteria));
    match own.get("format").map(String::as_str) {
        None | Some("markdown") => {
            Ok(([(header::CONTENT_TYPE, "text/markdown; charset=utf-8")], render_markdown(&card)).into_response())
        }
        Some("structured") => Ok(([(header::CONTENT_TYPE, "application/json")], card.to_json()).into_response()),
        Some(other) => Err(ParamError::new("format", format!("unknown format `{other}` (expected markdown or structured)")).into()),
    }
}

async fn analytics(State(state): State<Shared>, Path(kind): Path<String>, RawQuery(q): RawQuery) -> ApiResult {
    let kind: StatKind = kind.parse().map_err(|e: String| ApiError::new(StatusCode::NOT_FOUND, e))?;
    let (criteria, own) = parse(q, kind.params())?;
    let opts = StatOptions::from_params(&own)?;
    let snap = state.snapshot();
    let sel = apply_filter(&snap.store, &criteria);
    Ok(Json(report::stats(kind, &snap, &sel, &opts).value).into_response())
}

async fn taxonomies(State(state): State<Shared>) -> Json<Value> {
    let snap = state.snapshot();
    Json(json!({ "version": snap.version, "taxonomies": snap.taxonomies }))
}

async fn registry(State(state): State<Shared>) -> Json<Value> {
    let snap = state.snapshot();
    Json(json!({ "version": snap.version, "licenses": snap.store.registry().entries() }))
}

async fn version(State(state): State<Shared>) -> Json<Value> {
    let snap = state.snapshot();
    Json(json!({
        "version": snap.version,
        "records": snap.store.len(),
        "built_at": snap.store.built_at().to_rfc3339(),
        "policy": snap.store.policy_fingerprint(),
        "engine": env!("CARGO_PKG_VERSION"),
    }))
}

async fn reload(
    State(state): State<Shared>,
    peer: Result<ConnectInfo<SocketAddr>, ExtensionRejection>,
) -> ApiResult {
    if !peer.is_ok_and(|ConnectInfo(p)| p.ip().is_loopback()) {
        return Err(ApiError::new(StatusCode::FORBIDDEN, "reload is only accepted from localhost"));
    }
    reload_now(state).await.map(|v| Json(v).into_response())
}

async fn reload_now(state: Shared) -> Result<Value, ApiError> {
    let worker = state.clone();
    tokio::task::spawn_blocking(move || {
        let Some(_guard) = worker.try_begin_reload() else {
            return Err(ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "a reload is already running"));
        };
        let snap = worker
            .reload()
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
        Ok(json!({ "version": snap.version, "records": snap.store.len() }))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

/// Blocks serving `state` on `addr` until Ctrl-C.
pub fn serve(state: Shared, addr: &str, reload_on_sighup: bool) -> std::io::Result<()> {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        if reload_on_sighup {
            spawn_sighup_reloader(state.clone())?;
        }
        let app = router(state).into_make_service_with_connect_info::<SocketAddr>();
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
    })
}

#[cfg(unix)]
fn spawn_sighup_reloader(state: Shared) -> std::io::Result<()> {
    use tokio::signal::unix::{signal, SignalKind};
    let mut hup = signal(SignalKind::hangup())?;
    tokio::spawn(async move {
        while hup.recv().await.is_some() {
            match reload_now(state.clone()).await {
                Ok(v) => eprintln!("reloaded: {v}"),
                Err(e) => eprintln!("reload failed: {}", e.body),
            }
        }
    });
    Ok(())
}

#[cfg(not(unix))]
fn spawn_sighup_reloader(_state: Shared) -> std::io::Result<()> {
    Ok(())
}

//! JSON HTTP API over a [`Registry`] and its review data.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, Request, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{DecideOutcome, Registry, RegistryError, ReviewError, ReviewStore};
use crate::linkage::{Band, Verdict};
use crate::model::{EntityKind, EntityUri};
use crate::rdf::{record_to_triples, serialize_graph, GraphFormat, NamespaceTable};
use crate::taxonomy::Taxonomy;

pub const DEFAULT_LIMIT: usize = 50;
pub const MAX_LIMIT: usize = 1000;

#[derive(Clone)]
pub struct AppState {
    pub registry: Arc<Registry>,
    pub review: Arc<ReviewStore>,
    pub ns: Arc<NamespaceTable>,
    pub taxonomy: &'static Taxonomy,
}

impl AppState {
    /// Review data is read from `review_dir`; missing files count as empty.
    pub fn new(registry: Registry, review_dir: &Path, ns: NamespaceTable) -> Result<Self, ReviewError> {
        let review = ReviewStore::load(review_dir, registry.is_read_only())?;
        Ok(AppState {
            registry: Arc::new(registry),
            review: Arc::new(review),
            ns: Arc::new(ns),
            taxonomy: Taxonomy::builtin(),
        })
    }
}

/// Error body `{code, message}` with a matching status.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BAD_REQUEST", message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NOT_FOUND", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = self.code, message = %self.message, "request failed");
        }
        (self.status, Json(json!({ "code": self.code, "message": self.message }))).into_response()
    }
}

impl From<RegistryError> for ApiError {
    fn from(e: RegistryError) -> Self {
        let status = match &e {
            RegistryError::NotFound(_) => StatusCode::NOT_FOUND,
            RegistryError::ReadOnly | RegistryError::IdnoConflict { .. } => StatusCode::CONFLICT,
            RegistryError::Invalid(_) | RegistryError::NotWorkUri(_) => StatusCode::BAD_REQUEST,
            RegistryError::Corrupt { .. } | RegistryError::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<ReviewError> for ApiError {
    fn from(e: ReviewError) -> Self {
        let status = match &e {
            ReviewError::UnknownCandidate(_) => StatusCode::NOT_FOUND,
            ReviewError::Conflict { .. } | ReviewError::ReadOnly => StatusCode::CONFLICT,
            ReviewError::BadRequest(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

type Params = Query<HashMap<String, String>>;

#[derive(Debug, Serialize)]
struct Page<T> {
    total: usize,
    offset: usize,
    limit: usize,
    items: Vec<T>,
}

fn parse_param(params: &HashMap<String, String>, name: &str, default: usize) -> Result<usize, ApiError> {
    match params.get(name) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| ApiError::bad_request(format!("{name} must be a non-negative integer"))),
    }
}

fn page<T>(items: Vec<T>, params: &HashMap<String, String>) -> Result<Json<Page<T>>, ApiError> {
    let limit = parse_param(params, "limit", DEFAULT_LIMIT)?;
    if limit == 0 || limit > MAX_LIMIT {
        return Err(ApiError::bad_request(format!("limit must be between 1 and {MAX_LIMIT}")));
    }
    let offset = parse_param(params, "offset", 0)?;
    let total = items.len();
    let items = items.into_iter().skip(offset).take(limit).collect();
    Ok(Json(Page { total, offset, limit, items }))
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))
}

fn work_uri(id: &str) -> Result<EntityUri, ApiError> {
    if id.is_empty() || !id.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ApiError::bad_request(format!("invalid work id {id:?}")));
    }
    id.parse().map(EntityUri::work).map_err(|_| ApiError::bad_request(format!("invalid work id {id:?}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WorkFormat {
    Json,
    Tei,
    Graph(GraphFormat),
}

fn negotiate(params: &HashMap<String, String>, headers: &HeaderMap) -> Result<WorkFormat, ApiError> {
    if let Some(f) = params.get("format") {
        return match f.as_str() {
            "json" => Ok(WorkFormat::Json),
            "tei" | "xml" => Ok(WorkFormat::Tei),
            "nt" => Ok(WorkFormat::Graph(GraphFormat::NTriples)),
            "ttl" => Ok(WorkFormat::Graph(GraphFormat::Turtle)),
            other => Err(ApiError::bad_request(format!("unknown format {other:?}"))),
        };
    }
    let accept = headers.get(header::ACCEPT).and_then(|v| v.to_str().ok()).unwrap_or("");
    for media in accept.split(',').map(|m| m.split(';').next().unwrap_or("").trim()) {
        match media {
            "application/json" => return Ok(WorkFormat::Json),
            "application/tei+xml" | "application/xml" | "text/xml" => return Ok(WorkFormat::Tei),
            "application/n-triples" => return Ok(WorkFormat::Graph(GraphFormat::NTriples)),
            "text/turtle" => return Ok(WorkFormat::Graph(GraphFormat::Turtle)),
            _ => {}
        }
    }
    Ok(WorkFormat::Json)
}

async fn get_work(
    State(st): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(params): Params,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let uri = work_uri(&id)?;
    let format = negotiate(&params, &headers)?;
    Ok(match format {
        WorkFormat::Tei => {
            let text = st.registry.get_tei(&uri)?;
            ([(header::CONTENT_TYPE, "application/tei+xml; charset=utf-8")], text).into_response()
        }
        WorkFormat::Json => Json(st.registry.get_record(&uri)?).into_response(),
        WorkFormat::Graph(g) => {
            let record = st.registry.get_record(&uri)?;
            let triples = record_to_triples(&record, &st.ns)
                .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.code(), e.to_string()))?;
            let body = serialize_graph(&triples, g, &st.ns);
            ([(header::CONTENT_TYPE, format!("{}; charset=utf-8", g.media_type()))], body).into_response()
        }
    })
}

#[derive(Serialize)]
struct WorkSummary {
    uri: EntityUri,
    headword: Option<String>,
}

async fn list_works(State(st): State<AppState>, Query(params): Params) -> Result<Response, ApiError> {
    let index = st.registry.index_snapshot();
    let items: Vec<WorkSummary> = index
        .entries
        .iter()
        .map(|(id, e)| WorkSummary { uri: EntityUri::work(*id), headword: e.display_title.clone() })
        .collect();
    Ok(page(items, &params)?.into_response())
}

async fn search(State(st): State<AppState>, Query(params): Params) -> Result<Response, ApiError> {
    let title = params
        .get("title")
        .filter(|t| !t.trim().is_empty())
        .ok_or_else(|| ApiError::bad_request("title parameter is required"))?;
    let lang = params.get("lang").map(String::as_str).filter(|l| !l.is_empty());
    let hits = st.registry.search_titles(title, lang);
    Ok(page(hits, &params)?.into_response())
}

async fn idno(
    State(st): State<AppState>,
    UrlPath((scheme, value)): UrlPath<(String, String)>,
) -> Result<Response, ApiError> {
    let uri = st
        .registry
        .lookup_idno(&scheme, &value)
        .ok_or_else(|| ApiError::not_found(format!("no work with idno {scheme} {value:?}")))?;
    let location = format!("/api/work/{}", uri.id);
    Ok((StatusCode::SEE_OTHER, [(header::LOCATION, location)], Json(json!({ "uri": uri }))).into_response())
}

#[derive(Deserialize)]
struct MintBody {
    kind: String,
}

async fn mint(State(st): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let body: MintBody = parse_body(&body)?;
    let kind: EntityKind =
        body.kind.parse().map_err(|e: crate::model::UriError| ApiError::bad_request(e.to_string()))?;
    let uri = st.registry.mint_uri(kind)?;
    Ok((StatusCode::CREATED, Json(json!({ "uri": uri }))).into_response())
}

async fn review_queue(State(st): State<AppState>, Query(params): Params) -> Result<Response, ApiError> {
    let band: Band = params
        .get("band")
        .map_or(Ok(Band::Review), |b| b.parse())
        .map_err(|_| ApiError::bad_request("band must be auto, review or reject"))?;
    let items = st.review.queue(band, &st.registry);
    Ok(page(items, &params)?.into_response())
}

#[derive(Deserialize)]
struct DecisionBody {
    candidate_id: String,
    verdict: Verdict,
    editor: String,
    #[serde(default, rename = "override")]
    override_previous: bool,
}

async fn review_decision(State(st): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let body: DecisionBody = parse_body(&body)?;
    let outcome =
        st.review.decide(&body.candidate_id, body.verdict, &body.editor, body.override_previous, Utc::now())?;
    let (status, recorded, decision) = match outcome {
        DecideOutcome::Recorded(d) => (StatusCode::CREATED, true, d),
        DecideOutcome::Unchanged(d) => (StatusCode::OK, false, d),
    };
    Ok((status, Json(json!({ "recorded": recorded, "decision": decision }))).into_response())
}

async fn review_clusters(State(st): State<AppState>, Query(params): Params) -> Result<Response, ApiError> {
    Ok(page(st.review.clusters()?, &params)?.into_response())
}

async fn taxonomy(State(st): State<AppState>, Query(params): Params) -> Result<Response, ApiError> {
    Ok(page(st.taxonomy.nodes().to_vec(), &params)?.into_response())
}

async fn taxonomy_node(State(st): State<AppState>, UrlPath(code): UrlPath<String>) -> Result<Response, ApiError> {
    let node = st.taxonomy.lookup(&code).map_err(|e| ApiError::not_found(e.to_string()))?;
    Ok(Json(node.clone()).into_response())
}

async fn lint_directionality(State(st): State<AppState>, Query(params): Params) -> Result<Response, ApiError> {
    Ok(page(st.registry.lint_directionality(&st.ns)?, &params)?.into_response())
}

async fn fallback() -> ApiError {
    ApiError::not_found("no such endpoint")
}

async fn log_requests(req: Request, next: Next) -> Response {
    let method = req.method().clone();
    let path = req.uri().path().to_string();
    let started = Instant::now();
    let resp = next.run(req).await;
    tracing::info!(%method, %path, status = resp.status().as_u16(), elapsed_ms = started.elapsed().as_millis() as u64);
    resp
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/works", get(list_works))
        .route("/api/work/{id}", get(get_work))
        .route("/api/search", get(search))
        .route("/api/idno/{scheme}/{value}", get(idno))
        .route("/api/mint", post(mint))
        .route("/api/review/queue", get(review_queue))
        .route("/api/review/decision", post(review_decision))
        .route("/api/review/clusters", get(review_clusters))
        .route("/api/taxonomy", get(taxonomy))
        .route("/api/taxonomy/{code}", get(taxonomy_node))
        .route("/api/lint/directionality", get(lint_directionality))
        .fallback(fallback)
        .layer(middleware::from_fn(log_requests))
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

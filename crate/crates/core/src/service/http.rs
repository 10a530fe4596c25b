//! JSON-over-HTTP front end for [`TrialStore`].

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use super::session::{ResponseModel, SessionError};
use super::store::TrialStore;
use crate::commands;
use crate::dist::SnbParams;
use crate::SnbError;

/// Structured error payload `{code, message}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: ErrorBody { code: "bad_request".into(), message: message.into() },
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let (status, code) = match &e {
            SessionError::Invalid(_) => (StatusCode::BAD_REQUEST, "bad_request"),
            SessionError::NotFound { .. } => (StatusCode::NOT_FOUND, "not_found"),
            SessionError::Conflict(_) => (StatusCode::CONFLICT, "conflict"),
            SessionError::Storage(_) => (StatusCode::INTERNAL_SERVER_ERROR, "storage"),
        };
        ApiError { status, body: ErrorBody { code: code.into(), message: e.to_string() } }
    }
}

impl From<SnbError> for ApiError {
    fn from(e: SnbError) -> Self {
        ApiError::bad_request(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PriorBody {
    alpha: f64,
    beta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateTrialBody {
    s: u64,
    t: u64,
    #[serde(default)]
    p: Option<f64>,
    #[serde(default)]
    prior: Option<PriorBody>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutcomeBody {
    response: bool,
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

fn query_param<T: std::str::FromStr>(q: &HashMap<String, String>, name: &str) -> Result<T, ApiError> {
    let raw = q.get(name).ok_or_else(|| ApiError::bad_request(format!("missing query parameter `{name}`")))?;
    raw.parse().map_err(|_| ApiError::bad_request(format!("query parameter `{name}` is malformed: {raw:?}")))
}

fn table_response(table: crate::table::OutputTable) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], table.to_json()).into_response()
}

async fn create_trial(State(store): State<Arc<TrialStore>>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateTrialBody = parse_body(&body)?;
    let model = match (req.p, req.prior) {
        (Some(p), None) => ResponseModel::Fixed { p },
        (None, Some(pr)) => ResponseModel::Beta { alpha: pr.alpha, beta: pr.beta },
        _ => return Err(ApiError::bad_request("exactly one of `p` or `prior` is required")),
    };
    let report = store.create(req.s, req.t, model)?;
    Ok((StatusCode::CREATED, Json(report)).into_response())
}

async fn get_trial(State(store): State<Arc<TrialStore>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(store.state(&id)?).into_response())
}

async fn record_outcome(
    State(store): State<Arc<TrialStore>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: OutcomeBody = parse_body(&body)?;
    Ok(Json(store.record(&id, req.response)?).into_response())
}

async fn undo_outcome(State(store): State<Arc<TrialStore>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(store.undo(&id)?).into_response())
}

async fn get_posterior(State(store): State<Arc<TrialStore>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(store.posterior(&id)?).into_response())
}

async fn snb_pmf(Query(q): Query<HashMap<String, String>>) -> Result<Response, ApiError> {
    let params = SnbParams::new(query_param(&q, "p")?, query_param(&q, "s")?, query_param(&q, "t")?)?;
    Ok(table_response(commands::pmf_table(&params)))
}

async fn snb_moments(Query(q): Query<HashMap<String, String>>) -> Result<Response, ApiError> {
    let grid = match q.get("grid") {
        Some(spec) => commands::parse_grid(spec)?,
        None => commands::parse_grid("0:1:0.01")?,
    };
    let table = commands::moments_table(query_param(&q, "s")?, query_param(&q, "t")?, &grid)?;
    Ok(table_response(table))
}

async fn not_found() -> ApiError {
    ApiError { status: StatusCode::NOT_FOUND, body: ErrorBody { code: "not_found".into(), message: "no such endpoint".into() } }
}

pub fn router(store: Arc<TrialStore>) -> Router {
    Router::new()
        .route("/api/trials", post(create_trial))
        .route("/api/trials/{id}", get(get_trial))
        .route("/api/trials/{id}/outcomes", post(record_outcome))
        .route("/api/trials/{id}/undo", post(undo_outcome))
        .route("/api/trials/{id}/posterior", get(get_posterior))
        .route("/api/snb/pmf", get(snb_pmf))
        .route("/api/snb/moments", get(snb_moments))
        .fallback(not_found)
        .with_state(store)
}

/// Serves the API on `addr` until Ctrl-C.
pub async fn serve(addr: SocketAddr, store: Arc<TrialStore>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("snb service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

//! Read-only HTTP service: `GET /recommend` and `GET /health` over a dataset
//! loaded once at startup.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Query as QueryParams, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde_json::json;
use tokio::net::TcpListener;

use localexpert::ingest::load_dataset;
use localexpert::output::recommendation_json;
use localexpert::recommend::{Aggregation, Method, QueryMap};
use localexpert::walk::DEFAULT_STAY_PROBABILITY;
use localexpert::{Dataset, Error, Mode};

use crate::commands::{run_request, RecommendRequest};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub default_method: Method,
    pub default_k: usize,
    /// `Some` pins the seed of requests that carry none; `None` draws one
    /// per request. Either way the seed is echoed back.
    pub fixed_seed: Option<u64>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            default_method: "lrw".parse().expect("known method"),
            default_k: 5,
            fixed_seed: None,
        }
    }
}

pub struct AppState {
    dataset: Dataset,
    queries: QueryMap,
    config: ServiceConfig,
    loaded_at: u64,
}

impl AppState {
    pub fn new(dataset: Dataset, config: ServiceConfig) -> Self {
        AppState {
            dataset,
            queries: QueryMap::default(),
            config,
            loaded_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or_default(),
        }
    }

    /// Loads the dataset; the service refuses to start if this fails.
    pub fn load(dir: &Path, config: ServiceConfig) -> localexpert::Result<Self> {
        Ok(AppState::new(load_dataset(dir)?, config))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/recommend", get(handle_recommend))
        .route("/health", get(handle_health))
        .with_state(state)
}

pub async fn serve(listener: TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

fn json_response(status: StatusCode, body: String) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))],
        body,
    )
        .into_response()
}

fn bad_parameter(name: &str, message: impl std::fmt::Display) -> Response {
    json_response(
        StatusCode::BAD_REQUEST,
        json!({ "error": format!("{message}"), "parameter": name }).to_string(),
    )
}

fn error_response(err: &Error) -> Response {
    let (status, body) = match err {
        Error::NotFound { kind, id } => (
            StatusCode::NOT_FOUND,
            json!({ "error": err.to_string(), "kind": kind, "id": id }),
        ),
        Error::UnknownQuery { query, known } => (
            StatusCode::UNPROCESSABLE_ENTITY,
            json!({ "error": err.to_string(), "query": query, "known_queries": known }),
        ),
        Error::InvalidQuery(_) | Error::Domain(_) | Error::UnknownMethod(_) => {
            (StatusCode::BAD_REQUEST, json!({ "error": err.to_string() }))
        }
        _ => (StatusCode::INTERNAL_SERVER_ERROR, json!({ "error": err.to_string() })),
    };
    json_response(status, body.to_string())
}

fn parse_param<T: std::str::FromStr>(
    params: &HashMap<String, String>,
    name: &str,
) -> Result<Option<T>, Response>
where
    T::Err: std::fmt::Display,
{
    match params.get(name) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|e| bad_parameter(name, format!("invalid `{name}`: {e}"))),
    }
}

fn required(params: &HashMap<String, String>, name: &str) -> Result<String, Response> {
    match params.get(name) {
        Some(v) if !v.trim().is_empty() => Ok(v.clone()),
        _ => Err(bad_parameter(name, format!("missing parameter `{name}`"))),
    }
}

fn parse_request(
    params: &HashMap<String, String>,
    config: &ServiceConfig,
) -> Result<(RecommendRequest, bool), Response> {
    let query = required(params, "query")?;
    let city = required(params, "city")?;
    let mode: Mode = parse_param(params, "mode")?.unwrap_or(Mode::Global);
    let method: Method = parse_param(params, "method")?.unwrap_or(config.default_method);
    let k: usize = parse_param(params, "k")?.unwrap_or(config.default_k);
    if k == 0 {
        return Err(bad_parameter("k", "`k` must be at least 1"));
    }
    let stay: f64 = parse_param(params, "stay")?.unwrap_or(DEFAULT_STAY_PROBABILITY);
    if !(0.0..=1.0).contains(&stay) {
        return Err(bad_parameter("stay", "`stay` must lie in [0, 1]"));
    }
    let user = params.get("user").filter(|u| !u.is_empty()).cloned();
    if mode == Mode::Pa && user.is_none() {
        return Err(bad_parameter("user", "mode `pa` requires parameter `user`"));
    }
    let aggregation: Aggregation = parse_param(params, "aggregate")?.unwrap_or_default();
    let timings: bool = parse_param(params, "timings")?.unwrap_or(false);
    Ok((
        RecommendRequest {
            query,
            city,
            mode,
            user,
            method,
            k,
            stay,
            seed: parse_param(params, "seed")?.or(config.fixed_seed),
            top: parse_param(params, "top")?,
            aggregation,
        },
        timings,
    ))
}

async fn handle_recommend(
    State(state): State<Arc<AppState>>,
    QueryParams(params): QueryParams<HashMap<String, String>>,
) -> Response {
    let (request, include_timings) = match parse_request(&params, &state.config) {
        Ok(parsed) => parsed,
        Err(response) => return response,
    };
    let seed = request.resolved_seed();
    let worker = Arc::clone(&state);
    let result = tokio::task::spawn_blocking(move || {
        run_request(&worker.dataset, &worker.queries, &request, seed)
    })
    .await;
    match result {
        Ok(Ok(run)) => {
            let t = run.timings;
            let mut response = json_response(StatusCode::OK, recommendation_json(&run, include_timings));
            let server_timing = format!(
                "graph;dur={:.3}, algo;dur={:.3}, other;dur={:.3}, total;dur={:.3}",
                t.t_graph * 1e3,
                t.t_algo * 1e3,
                t.t_other * 1e3,
                t.t_total * 1e3
            );
            if let Ok(value) = HeaderValue::from_str(&server_timing) {
                response.headers_mut().insert("server-timing", value);
            }
            response
        }
        Ok(Err(err)) => error_response(&err),
        Err(join) => json_response(
            StatusCode::INTERNAL_SERVER_ERROR,
            json!({ "error": join.to_string() }).to_string(),
        ),
    }
}

async fn handle_health(State(state): State<Arc<AppState>>) -> Response {
    json_response(
        StatusCode::OK,
        json!({
            "status": "ok",
            "users": state.dataset.users().len(),
            "places": state.dataset.places().len(),
            "reviews": state.dataset.reviews().len(),
            "loaded_at": state.loaded_at,
        })
        .to_string(),
    )
}

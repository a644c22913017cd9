//! Read-only HTTP API over a loaded index.
//!
//! | route                         | result                               |
//! |-------------------------------|--------------------------------------|
//! | `GET /documents`              | every record                         |
//! | `GET /documents/{id}`         | one record, 404 when unknown         |
//! | `GET /search?concept=c&q=txt` | ranked records, 400 without concept  |

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use normreq_core::index::{IndexError, IndexedSentence, RequirementIndex, SharedIndex};
use serde::{Deserialize, Serialize};

/// A search result: the record plus its score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub score: f64,
    #[serde(flatten)]
    pub record: IndexedSentence,
}

#[derive(Debug, Deserialize)]
pub struct SearchParams {
    pub concept: Option<String>,
    pub q: Option<String>,
}

/// Ranked hits for a concept, shared by the HTTP route and the offline
/// `query` command.
pub fn search(index: &RequirementIndex, concept: &str, q: Option<&str>) -> Vec<Hit> {
    index
        .search_by_concept(concept, q)
        .into_iter()
        .map(|(score, record)| Hit { score, record: record.clone() })
        .collect()
}

fn error(status: StatusCode, message: String) -> Response {
    (status, Json(serde_json::json!({ "error": message }))).into_response()
}

async fn all(State(index): State<Arc<SharedIndex>>) -> Json<Vec<IndexedSentence>> {
    Json(index.current().search_all().into_iter().cloned().collect())
}

async fn by_id(State(index): State<Arc<SharedIndex>>, Path(id): Path<String>) -> Response {
    match index.current().get_by_id(&id) {
        Ok(record) => Json(record.clone()).into_response(),
        Err(e @ IndexError::NotFound(_)) => error(StatusCode::NOT_FOUND, e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn by_concept(State(index): State<Arc<SharedIndex>>, Query(params): Query<SearchParams>) -> Response {
    match params.concept.as_deref().map(str::trim) {
        Some(concept) if !concept.is_empty() => {
            let q = params.q.as_deref().filter(|q| !q.trim().is_empty());
            Json(search(&index.current(), concept, q)).into_response()
        }
        _ => error(StatusCode::BAD_REQUEST, "missing query parameter: concept".into()),
    }
}

pub fn router(index: Arc<SharedIndex>) -> Router {
    Router::new()
        .route("/documents", get(all))
        .route("/documents/{id}", get(by_id))
        .route("/search", get(by_concept))
        .with_state(index)
}

/// Serves until interrupted.
pub async fn serve(index: Arc<SharedIndex>, addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(index))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

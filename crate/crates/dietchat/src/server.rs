//! HTTP/JSON API.
//!
//! | method | path                         | body            | reply            |
//! |--------|------------------------------|-----------------|------------------|
//! | POST   | `/sessions`                  | `CreateSession` | `SessionCreated` |
//! | POST   | `/sessions/{id}/events`      | `InboundEvent`  | `EventReply`     |
//! | GET    | `/sessions/{id}/transcript`  |                 | `Transcript`     |
//! | GET    | `/charts/{id}`               |                 | `image/svg+xml`  |
//!
//! Errors are `{"error": "..."}` with status 400 (malformed input) or 404.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dietchat_core::InboundEvent;
use serde_json::json;

use crate::service::{ChatService, CreateSession};
use crate::Error;

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::UnknownSession(_) => StatusCode::NOT_FOUND,
            Error::BadRequest(_) | Error::Core(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError(StatusCode::BAD_REQUEST, r.body_text())
    }
}

type Service = State<Arc<ChatService>>;

async fn create_session(
    State(service): Service,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let Json(req) = body?;
    Ok((StatusCode::CREATED, Json(service.create(&req)?)))
}

async fn post_event(
    State(service): Service,
    Path(id): Path<String>,
    body: Result<Json<InboundEvent>, JsonRejection>,
) -> Result<impl IntoResponse, ApiError> {
    let Json(event) = body?;
    Ok(Json(service.handle(&id, event)?))
}

async fn get_transcript(State(service): Service, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(service.transcript(&id)?))
}

async fn get_chart(State(service): Service, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    let id = id.strip_suffix(".svg").unwrap_or(&id);
    match service.chart(id) {
        Some(svg) => Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg)),
        None => Err(ApiError(StatusCode::NOT_FOUND, format!("unknown chart `{id}`"))),
    }
}

pub fn router(service: Arc<ChatService>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/events", post(post_event))
        .route("/sessions/{id}/transcript", get(get_transcript))
        .route("/charts/{id}", get(get_chart))
        .with_state(service)
}

/// Binds `addr` and serves until the process ends. Returns the bound
/// address through `on_bound` (useful with port 0).
pub async fn serve(
    addr: SocketAddr,
    service: Arc<ChatService>,
    on_bound: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    on_bound(listener.local_addr()?);
    axum::serve(listener, router(service)).await
}

/// Starts the server on a background thread with its own runtime and
/// returns the bound address.
pub fn spawn(addr: SocketAddr, service: Arc<ChatService>) -> std::io::Result<SocketAddr> {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = match tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build() {
            Ok(rt) => rt,
            Err(e) => return tx.send(Err(e)).unwrap_or(()),
        };
        let tx2 = tx.clone();
        if let Err(e) = rt.block_on(serve(addr, service, move |a| tx2.send(Ok(a)).unwrap_or(()))) {
            tx.send(Err(e)).unwrap_or(());
        }
    });
    rx.recv().map_err(|_| std::io::Error::other("server thread exited"))?
}

//! HTTP and WebSocket front end.

use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use tokio::net::TcpListener;

use crate::protocol::{parse_client_lines, ClientMessage, ErrorCode, ServerMessage};
use crate::service::{ServiceError, SessionService};

pub const LOG_CONTENT_TYPE: &str = "application/x-ndjson";

pub fn router(service: Arc<SessionService>) -> Router {
    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/envs", get(envs))
        .route("/logs/{session_id}", get(logs))
        .route("/ws", get(ws))
        .with_state(service)
}

async fn envs(State(service): State<Arc<SessionService>>) -> Response {
    Json(service.list_envs().to_vec()).into_response()
}

async fn logs(State(service): State<Arc<SessionService>>, Path(session_id): Path<String>) -> Response {
    match service.log_jsonl(&session_id) {
        Ok(text) => ([(header::CONTENT_TYPE, LOG_CONTENT_TYPE)], text).into_response(),
        Err(e) => {
            let status = match e {
                ServiceError::UnknownSession(_) | ServiceError::NotAvailable(_) => StatusCode::NOT_FOUND,
                _ => StatusCode::INTERNAL_SERVER_ERROR,
            };
            (status, e.to_string()).into_response()
        }
    }
}

async fn ws(State(service): State<Arc<SessionService>>, upgrade: WebSocketUpgrade) -> Response {
    upgrade.on_upgrade(move |socket| connection(service, socket))
}

/// One client connection. Requests are answered in arrival order; sessions
/// made over this connection are closed when it ends.
async fn connection(service: Arc<SessionService>, mut socket: WebSocket) {
    let mut owned: Vec<String> = Vec::new();
    while let Some(Ok(frame)) = socket.recv().await {
        let text = match frame {
            Message::Text(t) => t.to_string(),
            Message::Binary(b) => String::from_utf8_lossy(&b).into_owned(),
            Message::Close(_) => break,
            _ => continue,
        };
        let mut done = false;
        for parsed in parse_client_lines(&text) {
            let reply = match parsed {
                Ok(msg) => {
                    let closing = matches!(msg, ClientMessage::Bye { session_id: None });
                    let svc = service.clone();
                    let reply = tokio::task::spawn_blocking(move || svc.handle(msg))
                        .await
                        .unwrap_or_else(|e| ServerMessage::error(ErrorCode::Internal, e.to_string()));
                    match &reply {
                        ServerMessage::Made { session_id, .. } => owned.push(session_id.clone()),
                        ServerMessage::Bye { session_id: Some(id) } => owned.retain(|o| o != id),
                        _ => {}
                    }
                    done |= closing;
                    reply
                }
                Err(e) => ServerMessage::error(ErrorCode::MalformedInput, e),
            };
            if socket.send(Message::Text(reply.to_line().into())).await.is_err() {
                done = true;
                break;
            }
        }
        if done {
            break;
        }
    }
    let svc = service.clone();
    let _ = tokio::task::spawn_blocking(move || {
        for id in owned {
            let _ = svc.close(&id);
        }
    })
    .await;
}

/// Serves until `shutdown` resolves, then closes every session so that all
/// logs are flushed.
pub async fn serve(
    listener: TcpListener,
    service: Arc<SessionService>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let sweeper = {
        let svc = service.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(Duration::from_secs(60));
            loop {
                tick.tick().await;
                let svc = svc.clone();
                let _ = tokio::task::spawn_blocking(move || svc.evict_idle(Instant::now())).await;
            }
        })
    };
    let result = axum::serve(listener, router(service.clone())).with_graceful_shutdown(shutdown).await;
    sweeper.abort();
    service.close_all();
    result
}

/// Resolves on Ctrl-C or SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
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

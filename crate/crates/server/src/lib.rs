//! Session service: environments behind a WebSocket protocol, with blind
//! key assignment and server-side episode logs for human play.
//!
//! Endpoints: `GET /ws` (newline-delimited JSON messages), `GET /envs`,
//! `GET /logs/{session_id}` and `GET /healthz`.

pub mod client;
pub mod http;
pub mod keys;
pub mod protocol;
pub mod service;

pub use http::{router, serve, shutdown_signal};
pub use keys::{assign_keys, KeyError, KeyMapping};
pub use protocol::{ClientMessage, ErrorCode, Frames, ServerMessage, PROTOCOL_VERSION};
pub use service::{ServiceConfig, ServiceError, SessionService};

/// Reads `PORT`, `LOG_DIR`, `CAPACITY` from the environment over defaults.
pub fn config_from_env(defaults: ServiceConfig, default_port: u16) -> (ServiceConfig, u16) {
    let mut cfg = defaults;
    let port = std::env::var("PORT").ok().and_then(|p| p.parse().ok()).unwrap_or(default_port);
    if let Ok(dir) = std::env::var("LOG_DIR") {
        if !dir.is_empty() {
            cfg.log_dir = Some(dir.into());
        }
    }
    if let Some(c) = std::env::var("CAPACITY").ok().and_then(|c| c.parse().ok()) {
        cfg.capacity = c;
    }
    (cfg, port)
}

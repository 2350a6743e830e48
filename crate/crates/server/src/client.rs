//! A scripted protocol client, used to drive a running service without a
//! browser.

use futures_util::{SinkExt, StreamExt};
use miniverse_core::metrics::{replay_verify, EpisodeLog};
use miniverse_core::rng::{below, label, stream};
use serde_json::Value;
use thiserror::Error;
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

use crate::protocol::{field_paths, ClientMessage, ErrorCode, ServerMessage, PROTOCOL_VERSION, WITHHELD_IN_STUDY};

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("websocket: {0}")]
    Ws(#[from] tokio_tungstenite::tungstenite::Error),
    #[error("http: {0}")]
    Http(#[from] reqwest::Error),
    #[error("connection closed")]
    Closed,
    #[error("bad server message: {0}")]
    BadMessage(String),
    #[error("unexpected reply: {0}")]
    Unexpected(String),
}

pub struct Client {
    base: String,
    ws: WebSocketStream<MaybeTlsStream<TcpStream>>,
    /// Every raw line received, in order.
    pub transcript: Vec<String>,
}

impl Client {
    /// Connects to `host:port`.
    pub async fn connect(addr: &str) -> Result<Self, ClientError> {
        let (ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/ws")).await?;
        Ok(Self { base: format!("http://{addr}"), ws, transcript: Vec::new() })
    }

    /// Sends one message and waits for its reply.
    pub async fn request(&mut self, msg: &ClientMessage) -> Result<ServerMessage, ClientError> {
        self.ws.send(Message::text(msg.to_line())).await?;
        loop {
            match self.ws.next().await.ok_or(ClientError::Closed)?? {
                Message::Text(t) => {
                    let line = t.trim_end().to_string();
                    let parsed = serde_json::from_str(&line).map_err(|e| ClientError::BadMessage(format!("{e}: {line}")))?;
                    self.transcript.push(line);
                    return Ok(parsed);
                }
                Message::Close(_) => return Err(ClientError::Closed),
                _ => continue,
            }
        }
    }

    pub async fn get(&self, path: &str) -> Result<(u16, String), ClientError> {
        let resp = reqwest::get(format!("{}{path}", self.base)).await?;
        let status = resp.status().as_u16();
        Ok((status, resp.text().await?))
    }

    pub async fn close(mut self) -> Result<(), ClientError> {
        self.ws.close(None).await?;
        Ok(())
    }
}

/// Outcome of a scripted study session.
#[derive(Debug)]
pub struct StudyReport {
    pub session_id: String,
    pub env_id: String,
    pub keys_pressed: usize,
    pub completed_episodes: usize,
    pub log: EpisodeLog,
    pub replay_ok: bool,
    /// Every server line received during the session.
    pub transcript: Vec<String>,
}

fn unexpected(m: &ServerMessage) -> ClientError {
    ClientError::Unexpected(m.to_line().trim_end().chars().take(200).collect())
}

/// Plays a study session blind: presses uniformly random digits until
/// `episodes` episodes have ended, checks that reset is refused, then fetches
/// the server log and replays it.
pub async fn run_study_session(addr: &str, env_id: &str, episodes: u32, seed: u64) -> Result<StudyReport, ClientError> {
    let mut c = Client::connect(addr).await?;
    match c.request(&ClientMessage::Hello { protocol_version: PROTOCOL_VERSION }).await? {
        ServerMessage::Hello { .. } => {}
        other => return Err(unexpected(&other)),
    }
    let make = ClientMessage::Make {
        env_id: env_id.into(),
        seed: Some(seed),
        study_mode: true,
        subject_id: None,
        fresh_mapping: false,
    };
    let (session_id, made_env) = match c.request(&make).await? {
        ServerMessage::Made { session_id, env_id, .. } => (session_id, env_id),
        other => return Err(unexpected(&other)),
    };
    match c.request(&ClientMessage::Reset { session_id: session_id.clone(), seed: None }).await? {
        ServerMessage::Error { code: ErrorCode::ForbiddenInStudyMode, .. } => {}
        other => return Err(unexpected(&other)),
    }
    let mut rng = stream(seed, label::ROLLOUT);
    let mut ended = 0;
    let mut keys_pressed = 0;
    while ended < episodes {
        let key = Some(below(&mut rng, 9) as u8 + 1);
        keys_pressed += 1;
        match c.request(&ClientMessage::Step { session_id: session_id.clone(), key, action: None }).await? {
            ServerMessage::Stepped { terminated, truncated, .. } => ended += (terminated || truncated) as u32,
            other => return Err(unexpected(&other)),
        }
    }
    match c.request(&ClientMessage::Bye { session_id: Some(session_id.clone()) }).await? {
        ServerMessage::Bye { .. } => {}
        other => return Err(unexpected(&other)),
    }
    let (status, body) = c.get(&format!("/logs/{session_id}")).await?;
    if status != 200 {
        return Err(ClientError::Unexpected(format!("log download status {status}")));
    }
    let log = EpisodeLog::from_jsonl(&body).map_err(|e| ClientError::BadMessage(e.to_string()))?;
    let replay_ok = replay_verify(&log).map_err(|e| ClientError::BadMessage(e.to_string()))?;
    let transcript = std::mem::take(&mut c.transcript);
    c.close().await?;
    Ok(StudyReport {
        session_id,
        env_id: made_env,
        keys_pressed,
        completed_episodes: log.completed_episodes(),
        log,
        replay_ok,
        transcript,
    })
}

/// Problems in a study-mode transcript: withheld fields present, any field
/// that names a mapping, or any action name appearing in a string value.
pub fn study_leaks(transcript: &[String], action_names: &[String]) -> Vec<String> {
    let mut found = Vec::new();
    for (i, line) in transcript.iter().enumerate() {
        let v: Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => {
                found.push(format!("line {i}: unparsable ({e})"));
                continue;
            }
        };
        let ty = v["type"].as_str().unwrap_or("").to_string();
        for path in field_paths(&v) {
            let qualified = format!("{ty}.{path}");
            let leaf = path.rsplit('.').next().unwrap_or("");
            let named_mapping = (leaf.contains("mapping") && leaf != "mapping_size") || leaf.contains("key") || leaf.contains("digit");
            if WITHHELD_IN_STUDY.contains(&qualified.as_str()) || named_mapping || leaf == "action_names" {
                found.push(format!("line {i}: field {qualified}"));
            }
        }
        for name in action_names {
            if line.contains(name.as_str()) {
                found.push(format!("line {i}: action name {name:?}"));
            }
        }
    }
    found
}

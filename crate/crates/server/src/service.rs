//! Session lifecycle: creation, stepping, auto-reset, logging and eviction.

use std::collections::{HashMap, VecDeque};
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, Instant};

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use miniverse_core::metrics::{read_log, LogError, Recorder, LOG_EXTENSION};
use miniverse_core::registry::{catalog, make, study_variant, EnvSummary};
use miniverse_core::rng::{entropy_seed, label, stream, RngStream};
use miniverse_core::{Env, EnvError, RenderMode};
use rand::RngCore;
use thiserror::Error;

use crate::keys::{assign_keys, KeyMapping, DIGITS};
use crate::protocol::{ClientMessage, ErrorCode, Frames, ServerMessage, Spaces, PROTOCOL_VERSION};

pub const DEFAULT_CAPACITY: usize = 64;
pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);
/// Logs of closed sessions kept in memory for download.
const CLOSED_LOGS_KEPT: usize = 256;

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub capacity: usize,
    pub idle_timeout: Duration,
    /// Where `.epjsonl` files are written; logs stay in memory only when unset.
    pub log_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self { capacity: DEFAULT_CAPACITY, idle_timeout: DEFAULT_IDLE_TIMEOUT, log_dir: None }
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown environment id {0:?}")]
    UnknownEnvId(String),
    #[error("session capacity {0} reached")]
    CapacityExceeded(usize),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("not allowed in study mode")]
    ForbiddenInStudyMode,
    #[error("protocol version {0} is not supported")]
    UnsupportedProtocolVersion(u32),
    #[error("no completed episode logged for session {0:?}")]
    NotAvailable(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl ServiceError {
    pub fn code(&self) -> ErrorCode {
        match self {
            ServiceError::UnknownEnvId(_) => ErrorCode::UnknownEnvId,
            ServiceError::CapacityExceeded(_) => ErrorCode::CapacityExceeded,
            ServiceError::UnknownSession(_) | ServiceError::NotAvailable(_) => ErrorCode::UnknownSession,
            ServiceError::MalformedInput(_) => ErrorCode::MalformedInput,
            ServiceError::ForbiddenInStudyMode => ErrorCode::ForbiddenInStudyMode,
            ServiceError::UnsupportedProtocolVersion(_) => ErrorCode::UnsupportedProtocolVersion,
            ServiceError::Internal(_) => ErrorCode::Internal,
        }
    }
}

impl From<LogError> for ServiceError {
    fn from(e: LogError) -> Self {
        match e {
            LogError::Env(EnvError::ActionOutOfRange { .. }) => ServiceError::MalformedInput(e.to_string()),
            other => ServiceError::Internal(other.to_string()),
        }
    }
}

type Sink = Box<dyn Write + Send>;

struct Session {
    study: bool,
    mapping: Option<KeyMapping>,
    recorder: Recorder<Sink>,
    /// Seeds for episodes after the first.
    seeds: RngStream,
    last_active: Instant,
}

impl Session {
    fn env(&self) -> &dyn Env {
        self.recorder.env()
    }

    fn frames(&self) -> Result<Frames, ServiceError> {
        let env = self.env();
        let png = |mode| -> Result<String, ServiceError> {
            let img = env.render_frame(mode).map_err(|e| ServiceError::Internal(e.to_string()))?;
            Ok(STANDARD.encode(img.to_png()))
        };
        let top_down = if env.as_grid().is_some() || !self.study { Some(png(RenderMode::TopDown)?) } else { None };
        Ok(Frames { agent_view: png(RenderMode::AgentView)?, top_down })
    }

    fn mission(&self) -> Option<String> {
        self.env().mission().map(str::to_string)
    }

    fn step_count(&self) -> u32 {
        let log = self.recorder.log();
        log.episodes.last().and_then(|e| e.steps.last()).map_or(0, |s| s.t)
    }
}

/// All live sessions. Each session is processed under its own lock, so
/// requests to one session are strictly sequential while different sessions
/// proceed in parallel.
pub struct SessionService {
    config: ServiceConfig,
    catalog: Vec<EnvSummary>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    subjects: Mutex<HashMap<String, KeyMapping>>,
    closed: Mutex<VecDeque<(String, String)>>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|p| p.into_inner())
}

impl SessionService {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            config,
            catalog: catalog(),
            sessions: Mutex::new(HashMap::new()),
            subjects: Mutex::new(HashMap::new()),
            closed: Mutex::new(VecDeque::new()),
        }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn list_envs(&self) -> &[EnvSummary] {
        &self.catalog
    }

    pub fn session_count(&self) -> usize {
        lock(&self.sessions).len()
    }

    /// Answers one request. Failures become `error` messages.
    pub fn handle(&self, msg: ClientMessage) -> ServerMessage {
        let result = match msg {
            ClientMessage::Hello { protocol_version } => {
                if protocol_version == PROTOCOL_VERSION {
                    Ok(ServerMessage::Hello { protocol_version, server: format!("miniverse/{}", env!("CARGO_PKG_VERSION")) })
                } else {
                    Err(ServiceError::UnsupportedProtocolVersion(protocol_version))
                }
            }
            ClientMessage::Make { env_id, seed, study_mode, subject_id, fresh_mapping } => {
                self.make(&env_id, seed, study_mode, subject_id.as_deref(), fresh_mapping)
            }
            ClientMessage::Step { session_id, key, action } => self.step(&session_id, key, action),
            ClientMessage::Reset { session_id, seed } => self.reset(&session_id, seed),
            ClientMessage::Bye { session_id } => match session_id {
                Some(id) => self.close(&id).map(|_| ServerMessage::Bye { session_id: Some(id) }),
                None => Ok(ServerMessage::Bye { session_id: None }),
            },
        };
        result.unwrap_or_else(|e| ServerMessage::error(e.code(), e.to_string()))
    }

    pub fn make(
        &self,
        env_id: &str,
        seed: Option<u64>,
        study: bool,
        subject_id: Option<&str>,
        fresh_mapping: bool,
    ) -> Result<ServerMessage, ServiceError> {
        let unknown = |_| ServiceError::UnknownEnvId(env_id.to_string());
        let id = if study { study_variant(env_id).map_err(unknown)? } else { env_id };
        let env = make(id).map_err(unknown)?;
        self.evict_idle(Instant::now());
        if self.session_count() >= self.config.capacity {
            return Err(ServiceError::CapacityExceeded(self.config.capacity));
        }
        let seed = seed.unwrap_or_else(entropy_seed);
        let n = env.action_space().n();
        let mapping = if study { Some(self.mapping_for(subject_id, fresh_mapping, seed, n)?) } else { None };

        let session_id = self.fresh_id();
        let sink: Sink = match &self.config.log_dir {
            Some(dir) => {
                let path = dir.join(format!("{session_id}.{LOG_EXTENSION}"));
                Box::new(File::create(&path).map_err(|e| ServiceError::Internal(format!("{}: {e}", path.display())))?)
            }
            None => Box::new(io::sink()),
        };
        let mut recorder = Recorder::new(env, sink, seed, mapping.as_ref().map(|m| m.entries().clone()))?;
        recorder.reset(seed)?;
        let session = Session {
            study,
            mapping,
            recorder,
            seeds: stream(seed, label::SESSION),
            last_active: Instant::now(),
        };
        let env = session.env();
        let names = env.action_space().names().to_vec();
        let made = ServerMessage::Made {
            session_id: session_id.clone(),
            env_id: id.to_string(),
            study_mode: study,
            spaces: Spaces {
                n_actions: n,
                obs_shape: env.observation_spec().image_shape,
                action_names: if study { None } else { Some(names) },
            },
            mapping_size: session.mapping.as_ref().map(KeyMapping::n_actions),
            mission: session.mission(),
            max_steps: env.max_steps(),
            episode_index: session.recorder.episode(),
            frame: session.frames()?,
        };
        let mut sessions = lock(&self.sessions);
        if sessions.len() >= self.config.capacity {
            return Err(ServiceError::CapacityExceeded(self.config.capacity));
        }
        sessions.insert(session_id, Arc::new(Mutex::new(session)));
        Ok(made)
    }

    /// The subject's existing mapping unless a fresh one is requested or its
    /// size does not fit; otherwise a new draw, remembered for the subject.
    fn mapping_for(&self, subject: Option<&str>, fresh: bool, seed: u64, n: usize) -> Result<KeyMapping, ServiceError> {
        let mut subjects = lock(&self.subjects);
        if let Some(existing) = subject.and_then(|s| subjects.get(s)) {
            if !fresh && existing.n_actions() == n {
                return Ok(existing.clone());
            }
        }
        let m = assign_keys(&mut stream(seed, label::KEYS), n).map_err(|e| ServiceError::Internal(e.to_string()))?;
        if let Some(s) = subject {
            subjects.insert(s.to_string(), m.clone());
        }
        Ok(m)
    }

    fn fresh_id(&self) -> String {
        let sessions = lock(&self.sessions);
        loop {
            let id = format!("{:016x}", entropy_seed());
            if !sessions.contains_key(&id) {
                return id;
            }
        }
    }

    fn session(&self, session_id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        lock(&self.sessions).get(session_id).cloned().ok_or_else(|| ServiceError::UnknownSession(session_id.to_string()))
    }

    pub fn step(&self, session_id: &str, key: Option<u8>, action: Option<usize>) -> Result<ServerMessage, ServiceError> {
        let cell = self.session(session_id)?;
        let mut s = lock(&cell);
        s.last_active = Instant::now();
        let action = match (s.study, key, action) {
            (true, Some(k), None) if DIGITS.contains(&k) => s.mapping.as_ref().and_then(|m| m.action(k)),
            (true, _, _) => return Err(ServiceError::MalformedInput("study sessions take one digit key 1-9".into())),
            (false, None, Some(a)) => Some(a),
            (false, _, _) => return Err(ServiceError::MalformedInput("free-play sessions take one action index".into())),
        };
        let outcome = s.recorder.step(action, key)?;
        let (reward, terminated, truncated, step_count) = match &outcome {
            Some(o) => (o.reward, o.terminated, o.truncated, o.info.step_count),
            None => (0.0, false, false, s.step_count()),
        };
        if terminated || truncated {
            let next = s.seeds.next_u64();
            s.recorder.reset(next)?;
        }
        Ok(ServerMessage::Stepped {
            session_id: session_id.to_string(),
            reward,
            terminated,
            truncated,
            no_op: (!s.study).then_some(outcome.is_none()),
            step_count: (!s.study).then_some(step_count),
            episode_index: s.recorder.episode(),
            mission: s.mission(),
            frame: s.frames()?,
        })
    }

    pub fn reset(&self, session_id: &str, seed: Option<u64>) -> Result<ServerMessage, ServiceError> {
        let cell = self.session(session_id)?;
        let mut s = lock(&cell);
        s.last_active = Instant::now();
        if s.study {
            return Err(ServiceError::ForbiddenInStudyMode);
        }
        let seed = match seed {
            Some(v) => v,
            None => s.seeds.next_u64(),
        };
        s.recorder.reset(seed)?;
        Ok(ServerMessage::Observation {
            session_id: session_id.to_string(),
            episode_index: s.recorder.episode(),
            mission: s.mission(),
            frame: s.frames()?,
        })
    }

    /// Ends a session, flushing its log.
    pub fn close(&self, session_id: &str) -> Result<(), ServiceError> {
        let cell = lock(&self.sessions).remove(session_id).ok_or_else(|| ServiceError::UnknownSession(session_id.into()))?;
        let mut s = lock(&cell);
        let jsonl = s.recorder.log().to_jsonl();
        s.recorder.close()?;
        let mut closed = lock(&self.closed);
        closed.push_back((session_id.to_string(), jsonl));
        while closed.len() > CLOSED_LOGS_KEPT {
            closed.pop_front();
        }
        Ok(())
    }

    /// Closes every session; used on shutdown.
    pub fn close_all(&self) {
        let ids: Vec<String> = lock(&self.sessions).keys().cloned().collect();
        for id in ids {
            let _ = self.close(&id);
        }
    }

    /// Closes sessions idle for longer than the configured timeout.
    pub fn evict_idle(&self, now: Instant) -> usize {
        let stale: Vec<String> = lock(&self.sessions)
            .iter()
            .filter(|(_, s)| now.saturating_duration_since(lock(s).last_active) > self.config.idle_timeout)
            .map(|(id, _)| id.clone())
            .collect();
        stale.iter().filter(|id| self.close(id).is_ok()).count()
    }

    /// The session's log as `.epjsonl` text, once it has a completed episode.
    pub fn log_jsonl(&self, session_id: &str) -> Result<String, ServiceError> {
        let not_available = || ServiceError::NotAvailable(session_id.to_string());
        let text = if let Ok(cell) = self.session(session_id) {
            let s = lock(&cell);
            if s.recorder.log().completed_episodes() == 0 {
                return Err(not_available());
            }
            s.recorder.log().to_jsonl()
        } else if let Some((_, t)) = lock(&self.closed).iter().rev().find(|(id, _)| id == session_id) {
            t.clone()
        } else {
            let valid = session_id.chars().all(|c| c.is_ascii_hexdigit());
            let path = self.config.log_dir.as_ref().filter(|_| valid).map(|d| d.join(format!("{session_id}.{LOG_EXTENSION}")));
            match path.and_then(|p| std::fs::read_to_string(p).ok()) {
                Some(t) => t,
                None => return Err(ServiceError::UnknownSession(session_id.to_string())),
            }
        };
        match read_log(text.as_bytes()) {
            Ok(log) if log.completed_episodes() > 0 => Ok(text),
            _ => Err(not_available()),
        }
    }

    /// Server-side view of a study session's mapping. Never sent to clients.
    pub fn mapping_of(&self, session_id: &str) -> Option<KeyMapping> {
        self.session(session_id).ok().and_then(|c| lock(&c).mapping.clone())
    }

    /// Runs `f` against the live environment of a session.
    pub fn inspect<R>(&self, session_id: &str, f: impl FnOnce(&dyn Env) -> R) -> Option<R> {
        self.session(session_id).ok().map(|c| f(lock(&c).env()))
    }
}

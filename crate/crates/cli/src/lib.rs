//! Command implementations behind the `miniverse` binary.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use miniverse_core::metrics::{plot_trajectory, read_log, verify_log, LogError, Recorder};
use miniverse_core::registry::{make, ENV_IDS};
use miniverse_core::rng::{below, label, stream};
use miniverse_core::{Env, EnvError, RenderMode};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const VERIFICATION: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown environment id {0:?}")]
    UnknownEnvId(String),
    #[error("replay mismatch at episode {episode}, t {t}: {what}")]
    ReplayMismatch { episode: u32, t: u32, what: String },
    #[error("unreadable log {path}: {msg}")]
    BadLog { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot bind {addr}: {source}")]
    BindFailure { addr: String, source: io::Error },
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Env(EnvError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownEnvId(_) => exit::USAGE,
            CliError::Io { source, .. } if source.kind() == io::ErrorKind::NotFound => exit::USAGE,
            CliError::ReplayMismatch { .. } | CliError::BadLog { .. } => exit::VERIFICATION,
            _ => exit::FAILURE,
        }
    }
}

impl From<EnvError> for CliError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::UnknownEnvId(id) => CliError::UnknownEnvId(id),
            other => CliError::Env(other),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub episode: u32,
    pub seed: u64,
    pub steps: u32,
    pub reward: f64,
    pub terminated: bool,
    pub truncated: bool,
}

impl std::fmt::Display for EpisodeSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let end = if self.terminated { "terminated" } else { "truncated" };
        write!(f, "episode={} seed={} steps={} reward={:.6} end={end}", self.episode, self.seed, self.steps, self.reward)
    }
}

/// Uniform random actions for `episodes` episodes. The first episode uses
/// `seed`; later ones draw from the session stream. With `log`, every step
/// is written as `.epjsonl`.
pub fn run_random(env_id: &str, episodes: u32, seed: u64, log: Option<&Path>) -> Result<Vec<EpisodeSummary>, CliError> {
    let env = make(env_id)?;
    let n = env.action_space().n();
    let sink: Box<dyn Write> = match log {
        Some(p) => Box::new(File::create(p).map_err(io_err(p))?),
        None => Box::new(io::sink()),
    };
    let mut rec = Recorder::new(env, sink, seed, None)?;
    let mut seeds = stream(seed, label::SESSION);
    let mut actions = stream(seed, label::ROLLOUT);
    let mut out = Vec::new();
    for k in 0..episodes {
        let ep_seed = if k == 0 { seed } else { seeds.next_u64() };
        rec.reset(ep_seed)?;
        let mut reward = 0.0;
        loop {
            let o = rec.step(Some(below(&mut actions, n)), None)?.expect("real step");
            reward += o.reward;
            if o.terminated || o.truncated {
                out.push(EpisodeSummary {
                    episode: k + 1,
                    seed: ep_seed,
                    steps: o.info.step_count,
                    reward,
                    terminated: o.terminated,
                    truncated: o.truncated,
                });
                break;
            }
        }
    }
    rec.close()?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub env_id: String,
    pub steps: u64,
    pub steps_per_sec: f64,
    /// First-person frames rendered; 3D environments only.
    pub frames: u64,
    pub frames_per_sec: Option<f64>,
}

/// Times `steps` random steps, resetting on episode end, then (3D only)
/// times rendering the agent view. Single-threaded.
pub fn benchmark(env_id: &str, steps: u64, seed: u64) -> Result<BenchReport, CliError> {
    let mut env = make(env_id)?;
    let n = env.action_space().n();
    let mut rng = stream(seed, label::ROLLOUT);
    let actions: Vec<usize> = (0..steps).map(|_| below(&mut rng, n)).collect();
    env.reset(Some(seed));
    let t0 = Instant::now();
    let mut episode = 0;
    for &a in &actions {
        let o = env.step(a)?;
        if o.terminated || o.truncated {
            episode += 1;
            env.reset(Some(seed.wrapping_add(episode)));
        }
    }
    let steps_per_sec = steps as f64 / t0.elapsed().as_secs_f64().max(1e-9);

    let (frames, frames_per_sec) = if env.as_world3d().is_some() {
        let frames = steps.min(5_000).max(1);
        let t0 = Instant::now();
        let mut checksum = 0u64;
        for _ in 0..frames {
            let img = env.render_frame(RenderMode::AgentView)?;
            checksum = checksum.wrapping_add(img.as_bytes()[0] as u64);
        }
        std::hint::black_box(checksum);
        (frames, Some(frames as f64 / t0.elapsed().as_secs_f64().max(1e-9)))
    } else {
        (0, None)
    };
    Ok(BenchReport { env_id: env_id.into(), steps, steps_per_sec, frames, frames_per_sec })
}

/// Verifies a log by replay and, when it holds, writes its trajectory plot.
/// Returns the number of episodes checked.
pub fn replay(log_path: &Path, out: &Path) -> Result<usize, CliError> {
    let file = File::open(log_path).map_err(io_err(log_path))?;
    let bad = |msg: String| CliError::BadLog { path: log_path.to_path_buf(), msg };
    let log = read_log(BufReader::new(file)).map_err(|e| bad(e.to_string()))?;
    match verify_log(&log).map_err(|e| bad(e.to_string()))? {
        Ok(()) => {}
        Err(m) => return Err(CliError::ReplayMismatch { episode: m.episode, t: m.t, what: m.what }),
    }
    let svg = plot_trajectory(&log).map_err(|e| bad(e.to_string()))?;
    std::fs::write(out, svg).map_err(io_err(out))?;
    Ok(log.episodes.len())
}

/// Hash over `trajectories` random rollouts of up to `steps` actions: every
/// action, reward bit pattern, end flag, pose and observation byte. Equal
/// digests across processes mean bit-identical simulation.
pub fn digest(env_id: &str, trajectories: u64, steps: usize, seed: u64) -> Result<String, CliError> {
    let mut h = Sha256::new();
    for i in 0..trajectories {
        let s = seed.wrapping_add(i);
        let mut env: Box<dyn Env> = make(env_id)?;
        let n = env.action_space().n();
        let mut rng = stream(s, label::ROLLOUT);
        let (obs, info) = env.reset(Some(s));
        h.update(info.seed.to_le_bytes());
        h.update(obs.image.as_bytes());
        for _ in 0..steps {
            let a = below(&mut rng, n);
            let o = env.step(a)?;
            h.update((a as u64).to_le_bytes());
            h.update(o.reward.to_bits().to_le_bytes());
            h.update([o.terminated as u8, o.truncated as u8]);
            h.update(o.info.step_count.to_le_bytes());
            h.update(serde_json::to_vec(&env.pose()).expect("pose serializes"));
            h.update(o.observation.image.as_bytes());
            if o.terminated || o.truncated {
                break;
            }
        }
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// Every registered id, or just `env` when given and valid.
pub fn env_ids(env: Option<&str>) -> Result<Vec<String>, CliError> {
    match env {
        Some(id) if ENV_IDS.contains(&id) => Ok(vec![id.to_string()]),
        Some(id) => Err(CliError::UnknownEnvId(id.to_string())),
        None => Ok(ENV_IDS.iter().map(|s| s.to_string()).collect()),
    }
}

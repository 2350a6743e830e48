use thiserror::Error;

use super::log::EpisodeLog;
use crate::env::{Env, EnvError};
use crate::registry::make;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReplayError {
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// First point where a replay diverged from the log.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("episode {episode}, t {t}: {what}")]
pub struct Mismatch {
    pub episode: u32,
    pub t: u32,
    pub what: String,
}

/// Rebuilds each episode from its seed, re-applies the logged actions and
/// compares every reward, flag and pose bit for bit. Records without an
/// action must leave the world untouched.
pub fn verify_log(log: &EpisodeLog) -> Result<Result<(), Mismatch>, ReplayError> {
    let mut env = make(&log.header.env_id)?;
    let names: Vec<String> = env.action_space().names().to_vec();
    if names != log.header.action_names {
        return Ok(Err(Mismatch { episode: 0, t: 0, what: "action names differ".into() }));
    }
    for ep in &log.episodes {
        let m = &ep.meta;
        let fail = |t: u32, what: String| Ok(Err(Mismatch { episode: m.episode, t, what }));
        let (_, info) = env.reset(Some(m.seed));
        if info.seed != m.seed || env.pose() != Some(m.start_pose) {
            return fail(0, "start pose".into());
        }
        if env.mission() != Some(m.mission.as_str()) {
            return fail(0, "mission".into());
        }
        let mut t = 0;
        for s in &ep.steps {
            if s.episode != m.episode {
                return fail(s.t, "episode number".into());
            }
            let (reward, terminated, truncated) = match s.action {
                None => (0.0, false, false),
                Some(a) => match env.step(a) {
                    Ok(out) => {
                        t = out.info.step_count;
                        (out.reward, out.terminated, out.truncated)
                    }
                    Err(e) => return fail(s.t, format!("step rejected: {e}")),
                },
            };
            if s.t != t {
                return fail(s.t, format!("step count {t}"));
            }
            if reward.to_bits() != s.reward.to_bits() {
                return fail(s.t, format!("reward {reward} vs logged {}", s.reward));
            }
            if (terminated, truncated) != (s.terminated, s.truncated) {
                return fail(s.t, "episode-end flags".into());
            }
            if env.pose() != Some(s.pose) {
                return fail(s.t, format!("pose {:?} vs logged {:?}", env.pose(), s.pose));
            }
        }
    }
    Ok(Ok(()))
}

/// `true` iff the log replays exactly.
pub fn replay_verify(log: &EpisodeLog) -> Result<bool, ReplayError> {
    Ok(verify_log(log)?.is_ok())
}

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use super::log::{EpisodeLog, EpisodeMeta, LogError, LogHeader, LogWriter, StepRecord, LOG_FORMAT_VERSION};
use crate::env::{Env, Info, Observation, StepOutcome};

pub fn unix_millis() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// Drives an environment and logs every reset and step as it happens.
pub struct Recorder<W: Write> {
    env: Box<dyn Env>,
    writer: LogWriter<W>,
    episode: u32,
    t0: Instant,
}

impl<W: Write> Recorder<W> {
    pub fn new(
        env: Box<dyn Env>,
        out: W,
        seed: u64,
        key_mapping: Option<BTreeMap<u8, usize>>,
    ) -> Result<Self, LogError> {
        let header = LogHeader {
            format_version: LOG_FORMAT_VERSION,
            env_id: env.env_id().to_string(),
            seed,
            key_mapping,
            action_names: env.action_space().names().to_vec(),
            started_at: unix_millis(),
        };
        let writer = LogWriter::new(out, header)?;
        Ok(Self { env, writer, episode: 0, t0: Instant::now() })
    }

    pub fn env(&self) -> &dyn Env {
        self.env.as_ref()
    }

    pub fn log(&self) -> &EpisodeLog {
        self.writer.log()
    }

    /// Number of the current episode, 1-based; 0 before the first reset.
    pub fn episode(&self) -> u32 {
        self.episode
    }

    pub fn reset(&mut self, seed: u64) -> Result<(Observation, Info), LogError> {
        let (obs, info) = self.env.reset(Some(seed));
        self.episode += 1;
        let meta = EpisodeMeta {
            episode: self.episode,
            seed: info.seed,
            start_pose: self.env.pose().expect("pose after reset"),
            mission: self.env.mission().unwrap_or_default().to_string(),
        };
        self.writer.begin_episode(meta)?;
        Ok((obs, info))
    }

    /// Steps with `action`, or records a no-op when it is `None`. Returns
    /// the outcome of a real step.
    pub fn step(&mut self, action: Option<usize>, key_pressed: Option<u8>) -> Result<Option<StepOutcome>, LogError> {
        let wall_clock_ms = self.t0.elapsed().as_millis() as u64;
        let pose = |env: &dyn Env| env.pose().ok_or(LogError::NoEpisode);
        let (record, outcome) = match action {
            Some(a) => {
                let out = self.env.step(a)?;
                let rec = StepRecord {
                    episode: self.episode,
                    t: out.info.step_count,
                    action: Some(a),
                    key_pressed,
                    reward: out.reward,
                    terminated: out.terminated,
                    truncated: out.truncated,
                    pose: pose(self.env.as_ref())?,
                    wall_clock_ms,
                };
                (rec, Some(out))
            }
            None => {
                let t = self.writer.log().episodes.last().and_then(|e| e.steps.last()).map_or(0, |s| s.t);
                let rec = StepRecord {
                    episode: self.episode,
                    t,
                    action: None,
                    key_pressed,
                    reward: 0.0,
                    terminated: false,
                    truncated: false,
                    pose: pose(self.env.as_ref())?,
                    wall_clock_ms,
                };
                (rec, None)
            }
        };
        self.writer.record_step(record)?;
        Ok(outcome)
    }

    pub fn close(&mut self) -> Result<Option<W>, LogError> {
        self.writer.close()
    }
}

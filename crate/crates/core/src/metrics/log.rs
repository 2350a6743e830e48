use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::Pose;

pub const LOG_FORMAT_VERSION: u32 = 1;
pub const LOG_EXTENSION: &str = "epjsonl";

#[derive(Debug, Error)]
pub enum LogError {
    #[error("log is closed for writing")]
    LogClosed,
    #[error("step recorded before any episode began")]
    NoEpisode,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Env(#[from] crate::env::EnvError),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format_version: u32,
    pub env_id: String,
    pub seed: u64,
    /// Digit to action index, present for study sessions.
    pub key_mapping: Option<BTreeMap<u8, usize>>,
    pub action_names: Vec<String>,
    /// Unix time in milliseconds.
    pub started_at: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMeta {
    /// 1-based.
    pub episode: u32,
    pub seed: u64,
    pub start_pose: Pose,
    pub mission: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub episode: u32,
    /// Environment step count after this record.
    pub t: u32,
    /// `None` when the pressed key maps to no action; the world is unchanged.
    pub action: Option<usize>,
    pub key_pressed: Option<u8>,
    pub reward: f64,
    pub terminated: bool,
    pub truncated: bool,
    pub pose: Pose,
    pub wall_clock_ms: u64,
}

/// One line of a log file, discriminated by its `record` field.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum LogRecord {
    Header(LogHeader),
    Episode(EpisodeMeta),
    Step(StepRecord),
}

impl LogRecord {
    /// Parses one line. Goes through a JSON value so that the integer keys
    /// of the key mapping decode.
    pub fn parse(line: &str) -> Result<Self, String> {
        let mut v: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let obj = v.as_object_mut().ok_or("record is not an object")?;
        let tag = obj.remove("record").ok_or("missing record tag")?;
        let err = |e: serde_json::Error| e.to_string();
        match tag.as_str() {
            Some("header") => serde_json::from_value(v).map(LogRecord::Header).map_err(err),
            Some("episode") => serde_json::from_value(v).map(LogRecord::Episode).map_err(err),
            Some("step") => serde_json::from_value(v).map(LogRecord::Step).map_err(err),
            _ => Err(format!("unknown record tag {tag}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub meta: EpisodeMeta,
    pub steps: Vec<StepRecord>,
}

impl EpisodeRecord {
    pub fn ended(&self) -> bool {
        self.steps.last().is_some_and(|s| s.terminated || s.truncated)
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeLog {
    pub header: LogHeader,
    pub episodes: Vec<EpisodeRecord>,
}

impl EpisodeLog {
    pub fn new(header: LogHeader) -> Self {
        Self { header, episodes: Vec::new() }
    }

    pub fn records(&self) -> Vec<LogRecord> {
        let mut out = vec![LogRecord::Header(self.header.clone())];
        for ep in &self.episodes {
            out.push(LogRecord::Episode(ep.meta.clone()));
            out.extend(ep.steps.iter().cloned().map(LogRecord::Step));
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        self.records().iter().map(|r| serde_json::to_string(r).expect("log records serialize") + "\n").collect()
    }

    pub fn from_jsonl(text: &str) -> Result<Self, LogError> {
        read_log(text.as_bytes())
    }

    /// Episodes whose last step terminated or truncated.
    pub fn completed_episodes(&self) -> usize {
        self.episodes.iter().filter(|e| e.ended()).count()
    }
}

/// Parses a log. A trailing partial line (e.g. after a crash) is ignored.
pub fn read_log(reader: impl BufRead) -> Result<EpisodeLog, LogError> {
    let lines: Vec<String> = reader.lines().collect::<Result<_, _>>()?;
    let mut log: Option<EpisodeLog> = None;
    let last = lines.len();
    for (i, line) in lines.iter().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec = match LogRecord::parse(line) {
            Ok(r) => r,
            Err(_) if line_no == last && log.is_some() => break,
            Err(msg) => return Err(LogError::Format { line: line_no, msg }),
        };
        let err = |msg: &str| LogError::Format { line: line_no, msg: msg.into() };
        match (rec, log.as_mut()) {
            (LogRecord::Header(h), None) => log = Some(EpisodeLog::new(h)),
            (LogRecord::Header(_), Some(_)) => return Err(err("second header")),
            (_, None) => return Err(err("missing header")),
            (LogRecord::Episode(m), Some(l)) => l.episodes.push(EpisodeRecord { meta: m, steps: Vec::new() }),
            (LogRecord::Step(s), Some(l)) => match l.episodes.last_mut() {
                Some(ep) if ep.meta.episode == s.episode => ep.steps.push(s),
                _ => return Err(err("step outside its episode")),
            },
        }
    }
    log.ok_or(LogError::Format { line: 0, msg: "empty log".into() })
}

/// Append-only log sink that flushes every record as it is written.
pub struct LogWriter<W: Write> {
    out: Option<W>,
    log: EpisodeLog,
    open_episode: bool,
}

impl<W: Write> LogWriter<W> {
    pub fn new(mut out: W, header: LogHeader) -> Result<Self, LogError> {
        write_line(&mut out, &LogRecord::Header(header.clone()))?;
        Ok(Self { out: Some(out), log: EpisodeLog::new(header), open_episode: false })
    }

    pub fn begin_episode(&mut self, meta: EpisodeMeta) -> Result<(), LogError> {
        let out = self.out.as_mut().ok_or(LogError::LogClosed)?;
        write_line(out, &LogRecord::Episode(meta.clone()))?;
        self.log.episodes.push(EpisodeRecord { meta, steps: Vec::new() });
        self.open_episode = true;
        Ok(())
    }

    /// Appends a step to the current episode. Fails with `LogClosed` once
    /// the episode has ended or the writer was closed.
    pub fn record_step(&mut self, step: StepRecord) -> Result<(), LogError> {
        let out = self.out.as_mut().ok_or(LogError::LogClosed)?;
        let ep = self.log.episodes.last_mut().ok_or(LogError::NoEpisode)?;
        if !self.open_episode {
            return Err(LogError::LogClosed);
        }
        write_line(out, &LogRecord::Step(step.clone()))?;
        self.open_episode = !(step.terminated || step.truncated);
        ep.steps.push(step);
        Ok(())
    }

    pub fn log(&self) -> &EpisodeLog {
        &self.log
    }

    pub fn is_closed(&self) -> bool {
        self.out.is_none()
    }

    /// Flushes and releases the sink; later writes fail with `LogClosed`.
    pub fn close(&mut self) -> Result<Option<W>, LogError> {
        match self.out.take() {
            Some(mut w) => {
                w.flush()?;
                Ok(Some(w))
            }
            None => Ok(None),
        }
    }
}

fn write_line(out: &mut impl Write, rec: &LogRecord) -> Result<(), LogError> {
    let mut line = serde_json::to_vec(rec).expect("log records serialize");
    line.push(b'\n');
    out.write_all(&line)?;
    out.flush()?;
    Ok(())
}

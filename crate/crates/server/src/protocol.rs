//! Wire messages. Every message is one JSON object on its own line with a
//! `type` discriminator.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const PROTOCOL_VERSION: u32 = 1;

/// Server fields never present in a study-mode message.
pub const WITHHELD_IN_STUDY: [&str; 3] = ["made.spaces.action_names", "stepped.no_op", "stepped.step_count"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Hello {
        protocol_version: u32,
    },
    Make {
        env_id: String,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        study_mode: bool,
        /// Study sessions of the same subject share one key mapping.
        #[serde(default)]
        subject_id: Option<String>,
        /// Draw a new mapping even when the subject already has one.
        #[serde(default)]
        fresh_mapping: bool,
    },
    Step {
        session_id: String,
        /// Digit pressed; required in study mode.
        #[serde(default)]
        key: Option<u8>,
        /// Action index; free play only.
        #[serde(default)]
        action: Option<usize>,
    },
    Reset {
        session_id: String,
        #[serde(default)]
        seed: Option<u64>,
    },
    Bye {
        #[serde(default)]
        session_id: Option<String>,
    },
}

/// PNG images, base64 encoded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frames {
    pub agent_view: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_down: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spaces {
    pub n_actions: usize,
    pub obs_shape: [usize; 3],
    /// Withheld in study mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action_names: Option<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorCode {
    UnknownEnvId,
    CapacityExceeded,
    UnknownSession,
    MalformedInput,
    ForbiddenInStudyMode,
    UnsupportedProtocolVersion,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello {
        protocol_version: u32,
        server: String,
    },
    Made {
        session_id: String,
        env_id: String,
        study_mode: bool,
        spaces: Spaces,
        /// Number of mapped digits in study mode.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mapping_size: Option<usize>,
        mission: Option<String>,
        max_steps: u32,
        episode_index: u32,
        frame: Frames,
    },
    Stepped {
        session_id: String,
        reward: f64,
        terminated: bool,
        truncated: bool,
        /// The input changed nothing. Free play only: in study mode it would
        /// tell which digits are bound.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        no_op: Option<bool>,
        /// Free play only, for the same reason.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        step_count: Option<u32>,
        /// Current episode, 1-based. Advances when this step ended an episode.
        episode_index: u32,
        mission: Option<String>,
        /// After an episode end, the first frame of the next episode.
        frame: Frames,
    },
    Observation {
        session_id: String,
        episode_index: u32,
        mission: Option<String>,
        frame: Frames,
    },
    Error {
        code: ErrorCode,
        message: String,
    },
    Bye {
        session_id: Option<String>,
    },
}

impl ServerMessage {
    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        ServerMessage::Error { code, message: message.into() }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize") + "\n"
    }
}

impl ClientMessage {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("client messages serialize") + "\n"
    }
}

/// Splits a text frame into its non-empty lines and parses each.
pub fn parse_client_lines(text: &str) -> Vec<Result<ClientMessage, String>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| e.to_string()))
        .collect()
}

pub fn parse_server_lines(text: &str) -> Vec<Result<ServerMessage, String>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| e.to_string()))
        .collect()
}

/// Dotted paths of every field in a JSON value, array elements folded to `[]`.
pub fn field_paths(v: &Value) -> BTreeSet<String> {
    fn walk(v: &Value, prefix: &str, out: &mut BTreeSet<String>) {
        match v {
            Value::Object(m) => {
                for (k, child) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    out.insert(p.clone());
                    walk(child, &p, out);
                }
            }
            Value::Array(items) => {
                for item in items {
                    walk(item, &format!("{prefix}[]"), out);
                }
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    walk(v, "", &mut out);
    out
}

fn full_frames() -> Frames {
    Frames { agent_view: String::new(), top_down: Some(String::new()) }
}

/// One instance of every message with all optional fields present.
pub fn exemplars() -> (Vec<ClientMessage>, Vec<ServerMessage>) {
    let sid = || "s".to_string();
    let client = vec![
        ClientMessage::Hello { protocol_version: PROTOCOL_VERSION },
        ClientMessage::Make {
            env_id: String::new(),
            seed: Some(0),
            study_mode: true,
            subject_id: Some(String::new()),
            fresh_mapping: false,
        },
        ClientMessage::Step { session_id: sid(), key: Some(1), action: Some(0) },
        ClientMessage::Reset { session_id: sid(), seed: Some(0) },
        ClientMessage::Bye { session_id: Some(sid()) },
    ];
    let server = vec![
        ServerMessage::Hello { protocol_version: PROTOCOL_VERSION, server: String::new() },
        ServerMessage::Made {
            session_id: sid(),
            env_id: String::new(),
            study_mode: false,
            spaces: Spaces { n_actions: 0, obs_shape: [0; 3], action_names: Some(vec![String::new()]) },
            mapping_size: Some(0),
            mission: Some(String::new()),
            max_steps: 0,
            episode_index: 0,
            frame: full_frames(),
        },
        ServerMessage::Stepped {
            session_id: sid(),
            reward: 0.0,
            terminated: false,
            truncated: false,
            no_op: Some(false),
            step_count: Some(0),
            episode_index: 0,
            mission: Some(String::new()),
            frame: full_frames(),
        },
        ServerMessage::Observation { session_id: sid(), episode_index: 0, mission: Some(String::new()), frame: full_frames() },
        ServerMessage::error(ErrorCode::Internal, ""),
        ServerMessage::Bye { session_id: Some(sid()) },
    ];
    (client, server)
}

/// The frozen field layout of the protocol as pretty JSON.
pub fn schema() -> String {
    let describe = |v: Value| {
        let ty = v["type"].as_str().expect("tagged").to_string();
        let fields: Vec<String> = field_paths(&v).into_iter().filter(|p| p != "type").collect();
        (ty, fields)
    };
    let (client, server) = exemplars();
    let client: serde_json::Map<String, Value> = client
        .into_iter()
        .map(|m| describe(serde_json::to_value(m).unwrap()))
        .map(|(t, f)| (t, Value::from(f)))
        .collect();
    let server: serde_json::Map<String, Value> = server
        .into_iter()
        .map(|m| describe(serde_json::to_value(m).unwrap()))
        .map(|(t, f)| (t, Value::from(f)))
        .collect();
    let doc = serde_json::json!({
        "protocol_version": PROTOCOL_VERSION,
        "client": client,
        "server": server,
        "withheld_in_study_mode": WITHHELD_IN_STUDY,
        "error_codes": [
            "UnknownEnvId", "CapacityExceeded", "UnknownSession", "MalformedInput",
            "ForbiddenInStudyMode", "UnsupportedProtocolVersion", "Internal"
        ],
    });
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}

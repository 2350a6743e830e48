//! The environment contract shared by every 2D and 3D environment.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid_envs::GridEnv;
use crate::image::RgbImage;
use crate::mission::TemplateId;
use crate::world3d::World3dEnv;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("action {action} out of range for a space of {n} actions")]
    ActionOutOfRange { action: usize, n: usize },
    #[error("episode has ended; call reset before stepping again")]
    EpisodeEnded,
    #[error("environment has not been reset")]
    NotReset,
    #[error("unknown environment id {0:?}")]
    UnknownEnvId(String),
    #[error("mission {0:?} does not match any template")]
    UnparsableMission(String),
    #[error("wrapper requires a grid environment")]
    NotAGridEnv,
    #[error("wrapper requires a 3D environment")]
    NotAWorld3dEnv,
    #[error("invalid observation dimensions {width}x{height}")]
    InvalidDims { width: usize, height: usize },
    #[error("epsilon {0} outside [0, 1]")]
    InvalidEpsilon(f64),
    #[error("invalid action space: {0}")]
    InvalidSpace(String),
}

/// A finite, ordered set of named actions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteActionSpace {
    names: Vec<String>,
}

impl DiscreteActionSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, EnvError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(EnvError::InvalidSpace("no actions".into()));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(EnvError::InvalidSpace(format!("duplicate action {a:?}")));
            }
        }
        Ok(Self { names })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, action: usize) -> bool {
        action < self.names.len()
    }

    pub fn check(&self, action: usize) -> Result<(), EnvError> {
        if self.contains(action) {
            Ok(())
        } else {
            Err(EnvError::ActionOutOfRange { action, n: self.n() })
        }
    }
}

/// Dense `rows x cols x channels` array of small non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObsArray {
    shape: [usize; 3],
    data: Vec<u8>,
}

impl ObsArray {
    pub fn zeros(shape: [usize; 3]) -> Self {
        Self { shape, data: vec![0; shape[0] * shape[1] * shape[2]] }
    }

    pub fn from_raw(shape: [usize; 3], data: Vec<u8>) -> Option<Self> {
        (data.len() == shape[0] * shape[1] * shape[2]).then_some(Self { shape, data })
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, ch: usize) -> u8 {
        self.data[(row * self.shape[1] + col) * self.shape[2] + ch]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, ch: usize, v: u8) {
        let i = (row * self.shape[1] + col) * self.shape[2] + ch;
        self.data[i] = v;
    }

    pub fn cell(&self, row: usize, col: usize) -> &[u8] {
        let c = self.shape[2];
        let i = (row * self.shape[1] + col) * c;
        &self.data[i..i + c]
    }

    pub fn max_value(&self) -> u8 {
        self.data.iter().copied().max().unwrap_or(0)
    }
}

impl From<RgbImage> for ObsArray {
    fn from(img: RgbImage) -> Self {
        let shape = img.shape();
        Self { shape, data: img.into_bytes() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissionField {
    Text(String),
    OneHot(Vec<u8>),
}

impl MissionField {
    pub fn text(&self) -> Option<&str> {
        match self {
            MissionField::Text(t) => Some(t),
            MissionField::OneHot(_) => None,
        }
    }
}

/// What an agent receives after `reset` and every `step`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub image: ObsArray,
    /// Facing direction 0..3; grid environments only.
    pub direction: Option<u8>,
    /// Absent once stripped by the image-only wrapper.
    pub mission: Option<MissionField>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissionSpec {
    /// Free text; `template` names the grammar when the text is parseable.
    Text { template: Option<TemplateId> },
    OneHot { len: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationSpec {
    pub image_shape: [usize; 3],
    /// Inclusive upper bound on image values.
    pub image_max: u8,
    pub has_direction: bool,
    pub mission: Option<MissionSpec>,
}

impl ObservationSpec {
    /// Whether `obs` matches this spec exactly.
    pub fn conforms(&self, obs: &Observation) -> bool {
        if obs.image.shape() != self.image_shape || obs.image.max_value() > self.image_max {
            return false;
        }
        match (self.has_direction, obs.direction) {
            (true, Some(d)) if d < 4 => {}
            (false, None) => {}
            _ => return false,
        }
        match (&self.mission, &obs.mission) {
            (None, None) => true,
            (Some(MissionSpec::Text { .. }), Some(MissionField::Text(_))) => true,
            (Some(MissionSpec::OneHot { len }), Some(MissionField::OneHot(v))) => {
                v.len() == *len && v.iter().all(|&x| x <= 1) && v.iter().map(|&x| x as usize).sum::<usize>() == 1
            }
            _ => false,
        }
    }
}

/// Diagnostics returned alongside observations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Info {
    /// The seed that generated the current episode.
    pub seed: u64,
    pub step_count: u32,
    pub success: bool,
    /// The action actually applied, when a wrapper may have replaced it.
    pub executed_action: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: f64,
    pub terminated: bool,
    pub truncated: bool,
    pub info: Info,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeClock {
    step_count: u32,
    max_steps: u32,
}

impl EpisodeClock {
    pub fn new(max_steps: u32) -> Self {
        assert!(max_steps > 0, "max_steps must be positive");
        Self { step_count: 0, max_steps }
    }

    pub fn at(step_count: u32, max_steps: u32) -> Self {
        assert!(max_steps > 0 && step_count <= max_steps);
        Self { step_count, max_steps }
    }

    pub fn step_count(&self) -> u32 {
        self.step_count
    }

    pub fn max_steps(&self) -> u32 {
        self.max_steps
    }

    pub fn tick(&mut self) {
        debug_assert!(self.step_count < self.max_steps);
        self.step_count += 1;
    }

    pub fn expired(&self) -> bool {
        self.step_count >= self.max_steps
    }
}

/// Reward paid on success, given the clock after the successful step.
pub type RewardFn = fn(&EpisodeClock) -> f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderMode {
    TopDown,
    AgentView,
}

/// Agent pose as recorded in logs: a tile cell or a continuous floor position.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Pose {
    Grid { x: i32, y: i32, dir: u8 },
    World { x: f64, z: f64, yaw: f64 },
}

pub trait Env: Send {
    fn env_id(&self) -> &str;

    fn action_space(&self) -> &DiscreteActionSpace;

    fn observation_spec(&self) -> ObservationSpec;

    /// Regenerates the world. Without a seed one is drawn from OS entropy and
    /// reported in the returned info.
    fn reset(&mut self, seed: Option<u64>) -> (Observation, Info);

    fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError>;

    fn render_frame(&self, mode: RenderMode) -> Result<RgbImage, EnvError>;

    /// Current agent pose, or `None` before the first reset.
    fn pose(&self) -> Option<Pose>;

    fn mission(&self) -> Option<&str>;

    fn max_steps(&self) -> u32;

    fn as_grid(&self) -> Option<&GridEnv> {
        None
    }

    fn as_world3d(&self) -> Option<&World3dEnv> {
        None
    }

    fn as_world3d_mut(&mut self) -> Option<&mut World3dEnv> {
        None
    }

    fn space_descriptors(&self) -> (DiscreteActionSpace, ObservationSpec) {
        (self.action_space().clone(), self.observation_spec())
    }
}

impl<E: Env + ?Sized> Env for Box<E> {
    fn env_id(&self) -> &str {
        (**self).env_id()
    }
    fn action_space(&self) -> &DiscreteActionSpace {
        (**self).action_space()
    }
    fn observation_spec(&self) -> ObservationSpec {
        (**self).observation_spec()
    }
    fn reset(&mut self, seed: Option<u64>) -> (Observation, Info) {
        (**self).reset(seed)
    }
    fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        (**self).step(action)
    }
    fn render_frame(&self, mode: RenderMode) -> Result<RgbImage, EnvError> {
        (**self).render_frame(mode)
    }
    fn pose(&self) -> Option<Pose> {
        (**self).pose()
    }
    fn mission(&self) -> Option<&str> {
        (**self).mission()
    }
    fn max_steps(&self) -> u32 {
        (**self).max_steps()
    }
    fn as_grid(&self) -> Option<&GridEnv> {
        (**self).as_grid()
    }
    fn as_world3d(&self) -> Option<&World3dEnv> {
        (**self).as_world3d()
    }
    fn as_world3d_mut(&mut self) -> Option<&mut World3dEnv> {
        (**self).as_world3d_mut()
    }
}

/// Episode bookkeeping shared by the concrete environments.
#[derive(Clone, Debug)]
pub(crate) struct Lifecycle {
    pub seed: u64,
    pub clock: EpisodeClock,
    pub started: bool,
    pub ended: bool,
    pub success: bool,
}

impl Lifecycle {
    pub fn new(max_steps: u32) -> Self {
        Self { seed: 0, clock: EpisodeClock::new(max_steps), started: false, ended: false, success: false }
    }

    pub fn begin(&mut self, seed: Option<u64>) -> u64 {
        let seed = seed.unwrap_or_else(crate::rng::entropy_seed);
        self.seed = seed;
        self.clock = EpisodeClock::new(self.clock.max_steps());
        self.started = true;
        self.ended = false;
        self.success = false;
        seed
    }

    pub fn check_step(&self, space: &DiscreteActionSpace, action: usize) -> Result<(), EnvError> {
        if !self.started {
            return Err(EnvError::NotReset);
        }
        if self.ended {
            return Err(EnvError::EpisodeEnded);
        }
        space.check(action)
    }

    /// Advances the clock and settles the end-of-step flags and reward.
    /// `failed` ends the episode with no reward (e.g. stepping onto lava).
    pub fn settle(&mut self, success: bool, failed: bool, reward_fn: RewardFn) -> (f64, bool, bool) {
        self.clock.tick();
        let terminated = success || failed;
        let truncated = !terminated && self.clock.expired();
        let reward = if success { reward_fn(&self.clock).clamp(0.0, 1.0) } else { 0.0 };
        self.success = success;
        self.ended = terminated || truncated;
        (reward, terminated, truncated)
    }

    pub fn info(&self) -> Info {
        Info { seed: self.seed, step_count: self.clock.step_count(), success: self.success, executed_action: None }
    }
}

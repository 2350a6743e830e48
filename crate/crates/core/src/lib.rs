//! Goal-oriented, partially observable environments on a 2D tile grid and on a
//! flat-floorplan 2.5D world, sharing one reset/step contract.
//!
//! The crate is organised by subsystem:
//!
//! - [`env`]: the environment contract, spaces, observations and lifecycle types.
//! - [`grid`]: the tile world, its transition table, visibility and encoders.
//! - [`mission`]: instruction templates, parsing and one-hot encoding.
//! - [`grid_envs`]: the shipped 2D tasks.
//! - [`world3d`]: rooms, portals, disc kinematics, the column raycaster and 3D tasks.
//! - [`wrappers`]: observation/action transformers.
//! - [`registry`]: construction by id.
//! - [`metrics`]: episode logs, replay verification, AUC and trajectory plots.

pub mod env;
pub mod grid;
pub mod grid_envs;
pub mod image;
pub mod metrics;
pub mod mission;
pub mod registry;
pub mod rng;
pub mod world3d;
pub mod wrappers;

pub use env::{
    DiscreteActionSpace, Env, EnvError, EpisodeClock, Info, MissionField, Observation,
    ObservationSpec, Pose, RenderMode, StepOutcome,
};
pub use image::RgbImage;
pub use registry::{catalog, make, EnvSummary};

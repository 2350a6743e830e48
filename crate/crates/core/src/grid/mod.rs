//! The 2D tile world.

mod agent;
mod encode;
pub mod golden;
#[allow(clippy::module_inception)]
mod grid;
mod object;
mod place;
mod render;
mod reward;
mod transition;
mod visibility;

pub use agent::{AgentState, Direction, GridAction, GRID_ACTION_NAMES};
pub use encode::{decode_cell, encode_full, encode_view, GridView, DEFAULT_VIEW_SIZE};
pub use grid::{Grid, GridError};
pub use object::{Color, DoorState, ObjectKind, WorldObject, COLORS};
pub use place::{place_agent, place_object, Region};
pub use render::{render_rgb, render_view, MIN_TILE_PX};
pub use reward::compute_reward;
pub use transition::{apply_action, transition};
pub use visibility::{line_of_sight, supercover_between, view_to_world, visible_mask};

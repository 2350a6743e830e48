//! The flat-floorplan 2.5D world: rectangular rooms joined by portals,
//! floor-standing entities, a disc-shaped agent and a column raycaster.

mod entity;
mod envs;
mod geometry;
pub mod golden;
mod kinematics;
mod plan;
mod render;
mod topdown;

pub use entity::{place_agent3d, place_entity, Entity3D, EntityKind, EntitySpec, PlacementError};
pub use envs::{
    build_four_rooms3d, build_gotoobj3d, generate as generate_world3d, World3d, World3dConfig, World3dEnv, World3dTask,
    FOUR_ROOMS_ROOM,
};
pub use geometry::{point_segment_distance, ray_segment, Segment, Vec2};
pub use kinematics::{
    step_kinematics, Action3D, AgentPose, ACTION3D_NAMES, AGENT_RADIUS, EYE_HEIGHT, MOVE_STEP, NEAR_FACTOR,
    PICKUP_HALF_ANGLE, TURN_STEP,
};
pub use plan::{Axis, FloorPlan, PlanError, Portal, Room, Wall, PORTAL_CLEARANCE};
pub use render::{
    cast_column, cast_columns, render_first_person, Camera, ColumnHit, DEFAULT_OBS_HEIGHT, DEFAULT_OBS_WIDTH, HFOV_DEG, WALL_HEIGHT,
};
pub use topdown::{agent_wedge, render_topdown3d, TopDownView, DEFAULT_PX_PER_UNIT};

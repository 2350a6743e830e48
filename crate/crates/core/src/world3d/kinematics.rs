use std::f64::consts::TAU;

use super::geometry::Vec2;
use super::plan::FloorPlan;

pub const MOVE_STEP: f64 = 0.15;
pub const TURN_STEP: f64 = 15.0 * std::f64::consts::PI / 180.0;
pub const AGENT_RADIUS: f64 = 0.4;
pub const EYE_HEIGHT: f64 = 1.5;
/// Proximity threshold as a multiple of the summed radii.
pub const NEAR_FACTOR: f64 = 1.5;
pub const PICKUP_HALF_ANGLE: f64 = std::f64::consts::FRAC_PI_4;

pub const ACTION3D_NAMES: [&str; 8] =
    ["turn left", "turn right", "move forward", "move back", "pickup", "drop", "toggle", "done"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Action3D {
    TurnLeft = 0,
    TurnRight = 1,
    MoveForward = 2,
    MoveBack = 3,
    Pickup = 4,
    Drop = 5,
    Toggle = 6,
    Done = 7,
}

impl Action3D {
    pub const ALL: [Action3D; 8] = [
        Action3D::TurnLeft,
        Action3D::TurnRight,
        Action3D::MoveForward,
        Action3D::MoveBack,
        Action3D::Pickup,
        Action3D::Drop,
        Action3D::Toggle,
        Action3D::Done,
    ];

    pub fn from_index(i: usize) -> Option<Action3D> {
        Self::ALL.get(i).copied()
    }
}

/// Agent position and heading. Yaw 0 faces +x; positive yaw turns left,
/// towards -z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentPose {
    pub x: f64,
    pub z: f64,
    pub yaw: f64,
    pub radius: f64,
    pub eye_height: f64,
}

impl AgentPose {
    pub fn new(x: f64, z: f64, yaw: f64) -> Self {
        Self { x, z, yaw, radius: AGENT_RADIUS, eye_height: EYE_HEIGHT }
    }

    pub fn pos(&self) -> Vec2 {
        Vec2::new(self.x, self.z)
    }

    pub fn heading(&self) -> Vec2 {
        Vec2::new(self.yaw.cos(), -self.yaw.sin())
    }

    /// Unit vector to the agent's right.
    pub fn right(&self) -> Vec2 {
        Vec2::new(self.yaw.sin(), self.yaw.cos())
    }
}

/// Turns and translations. A translation whose destination disc would
/// overlap a wall or entity leaves the pose unchanged; other actions do not
/// move the agent.
pub fn step_kinematics(plan: &FloorPlan, pose: &AgentPose, action: Action3D) -> AgentPose {
    let mut next = *pose;
    match action {
        Action3D::TurnLeft => next.yaw = (pose.yaw + TURN_STEP).rem_euclid(TAU),
        Action3D::TurnRight => next.yaw = (pose.yaw - TURN_STEP).rem_euclid(TAU),
        Action3D::MoveForward | Action3D::MoveBack => {
            let sign = if action == Action3D::MoveForward { 1.0 } else { -1.0 };
            let dest = pose.pos() + pose.heading() * (sign * MOVE_STEP);
            if !plan.disc_collides(dest, pose.radius, None) {
                next.x = dest.x;
                next.z = dest.z;
            }
        }
        Action3D::Pickup | Action3D::Drop | Action3D::Toggle | Action3D::Done => {}
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;

    fn room() -> FloorPlan {
        let mut p = FloorPlan::new();
        p.add_rect_room(0.0, 10.0, 0.0, 10.0).unwrap();
        p
    }

    #[test]
    fn full_turn_returns() {
        let p = room();
        let start = AgentPose::new(5.0, 5.0, 0.3);
        let mut pose = start;
        for _ in 0..24 {
            pose = step_kinematics(&p, &pose, Action3D::TurnLeft);
        }
        let d = (pose.yaw - start.yaw).rem_euclid(TAU);
        assert!(d.min(TAU - d) < 1e-9);
    }

    #[test]
    fn forward_and_back_cancel() {
        let p = room();
        let start = AgentPose::new(5.0, 5.0, 1.1);
        let moved = step_kinematics(&p, &step_kinematics(&p, &start, Action3D::MoveBack), Action3D::MoveForward);
        assert!((moved.x - start.x).abs() < 1e-9 && (moved.z - start.z).abs() < 1e-9);
    }

    #[test]
    fn blocked_by_wall() {
        let p = room();
        let start = AgentPose::new(10.0 - AGENT_RADIUS - 0.1, 5.0, 0.0);
        assert_eq!(step_kinematics(&p, &start, Action3D::MoveForward), start);
    }

    #[test]
    fn left_turn_faces_negative_z() {
        let pose = AgentPose::new(0.0, 0.0, std::f64::consts::FRAC_PI_2);
        assert!((pose.heading().z + 1.0).abs() < 1e-12);
        assert!((pose.right().x - 1.0).abs() < 1e-12);
    }
}

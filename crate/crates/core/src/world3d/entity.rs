use thiserror::Error;

use super::geometry::Vec2;
use super::kinematics::{AgentPose, AGENT_RADIUS, EYE_HEIGHT};
use super::plan::FloorPlan;
use crate::grid::{Color, ObjectKind};
use crate::rng::{below, uniform, RngStream};

const MAX_ATTEMPTS: usize = 1000;
const LATTICE_STEP: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlacementError {
    #[error("no collision-free spot for the footprint")]
    NoFreeSpace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntityKind {
    Box,
    Ball,
    Key,
}

impl EntityKind {
    pub fn name(self) -> &'static str {
        match self {
            EntityKind::Box => "box",
            EntityKind::Ball => "ball",
            EntityKind::Key => "key",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [EntityKind::Box, EntityKind::Ball, EntityKind::Key].into_iter().find(|k| k.name() == name)
    }

    pub fn from_object_kind(kind: ObjectKind) -> Option<Self> {
        match kind {
            ObjectKind::Box => Some(EntityKind::Box),
            ObjectKind::Ball => Some(EntityKind::Ball),
            ObjectKind::Key => Some(EntityKind::Key),
            _ => None,
        }
    }

    pub fn object_kind(self) -> ObjectKind {
        match self {
            EntityKind::Box => ObjectKind::Box,
            EntityKind::Ball => ObjectKind::Ball,
            EntityKind::Key => ObjectKind::Key,
        }
    }

    /// Footprint radius and height.
    pub fn dims(self) -> (f64, f64) {
        match self {
            EntityKind::Box => (0.4, 0.8),
            EntityKind::Ball => (0.3, 0.6),
            EntityKind::Key => (0.25, 0.5),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entity3D {
    pub id: u32,
    pub kind: EntityKind,
    pub color: Color,
    pub x: f64,
    pub z: f64,
    pub radius: f64,
    pub height: f64,
}

impl Entity3D {
    pub fn pos(&self) -> Vec2 {
        Vec2::new(self.x, self.z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EntitySpec {
    pub kind: EntityKind,
    pub color: Color,
}

/// Draws a collision-free centre for a disc of `radius`: up to 1000
/// uniform samples over the room (or all rooms, area-weighted), then a
/// uniform pick among the free points of a fine lattice.
fn sample_spot(
    plan: &FloorPlan,
    rng: &mut RngStream,
    room: Option<usize>,
    radius: f64,
    avoid: Option<(Vec2, f64)>,
) -> Result<Vec2, PlacementError> {
    let rooms: Vec<usize> = match room {
        Some(r) => vec![r],
        None => (0..plan.rooms().len()).collect(),
    };
    let free = |p: Vec2| {
        !plan.disc_collides(p, radius, None) && avoid.is_none_or(|(c, r)| p.dist(c) >= r + radius)
    };
    let total: f64 = rooms.iter().map(|&i| plan.rooms()[i].area()).sum();
    if total <= 0.0 {
        return Err(PlacementError::NoFreeSpace);
    }
    for _ in 0..MAX_ATTEMPTS {
        let mut pick = uniform(rng, 0.0, total);
        let mut chosen = rooms[rooms.len() - 1];
        for &i in &rooms {
            let a = plan.rooms()[i].area();
            if pick < a {
                chosen = i;
                break;
            }
            pick -= a;
        }
        let r = plan.rooms()[chosen];
        if r.max_x - r.min_x <= 2.0 * radius || r.max_z - r.min_z <= 2.0 * radius {
            continue;
        }
        let p = Vec2::new(uniform(rng, r.min_x + radius, r.max_x - radius), uniform(rng, r.min_z + radius, r.max_z - radius));
        if free(p) {
            return Ok(p);
        }
    }
    let mut lattice = Vec::new();
    for &i in &rooms {
        let r = plan.rooms()[i];
        let nx = ((r.max_x - r.min_x) / LATTICE_STEP) as usize;
        let nz = ((r.max_z - r.min_z) / LATTICE_STEP) as usize;
        for iz in 0..=nz {
            for ix in 0..=nx {
                let p = Vec2::new(r.min_x + ix as f64 * LATTICE_STEP, r.min_z + iz as f64 * LATTICE_STEP);
                if r.contains(p) && free(p) {
                    lattice.push(p);
                }
            }
        }
    }
    if lattice.is_empty() {
        return Err(PlacementError::NoFreeSpace);
    }
    Ok(lattice[below(rng, lattice.len())])
}

/// Places a new entity whose footprint clears every wall, every other
/// entity and the optional `avoid` disc, and adds it to the plan.
pub fn place_entity(
    plan: &mut FloorPlan,
    rng: &mut RngStream,
    spec: EntitySpec,
    room: Option<usize>,
    avoid: Option<(Vec2, f64)>,
) -> Result<Entity3D, PlacementError> {
    let (radius, height) = spec.kind.dims();
    let p = sample_spot(plan, rng, room, radius, avoid)?;
    let e = Entity3D { id: plan.next_entity_id, kind: spec.kind, color: spec.color, x: p.x, z: p.z, radius, height };
    plan.next_entity_id += 1;
    plan.entities.push(e);
    Ok(e)
}

/// Places the agent on a free spot with a uniform heading.
pub fn place_agent3d(plan: &FloorPlan, rng: &mut RngStream, room: Option<usize>) -> Result<AgentPose, PlacementError> {
    let p = sample_spot(plan, rng, room, AGENT_RADIUS, None)?;
    let yaw = uniform(rng, 0.0, std::f64::consts::TAU);
    Ok(AgentPose { x: p.x, z: p.z, yaw, radius: AGENT_RADIUS, eye_height: EYE_HEIGHT })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{label, stream};
    use crate::world3d::point_segment_distance;

    fn room() -> FloorPlan {
        let mut p = FloorPlan::new();
        p.add_rect_room(0.0, 5.0, 0.0, 5.0).unwrap();
        p
    }

    #[test]
    fn placement_is_seeded_and_clear() {
        let spec = EntitySpec { kind: EntityKind::Box, color: Color::Red };
        let mut a = room();
        let mut b = room();
        let ea = place_entity(&mut a, &mut stream(4, label::WORLD), spec, None, None).unwrap();
        let eb = place_entity(&mut b, &mut stream(4, label::WORLD), spec, None, None).unwrap();
        assert_eq!(ea, eb);
        assert_eq!(ea.color, Color::Red);
        for w in a.walls() {
            assert!(point_segment_distance(ea.pos(), &w.seg) >= ea.radius);
        }
    }

    #[test]
    fn crowded_room_runs_out_of_space() {
        let mut p = FloorPlan::new();
        p.add_rect_room(0.0, 0.9, 0.0, 0.9).unwrap();
        let mut rng = stream(1, label::WORLD);
        let spec = EntitySpec { kind: EntityKind::Box, color: Color::Blue };
        let e = place_entity(&mut p, &mut rng, spec, None, None).unwrap();
        assert!((e.x - 0.45).abs() <= 0.05 && (e.z - 0.45).abs() <= 0.05);
        assert_eq!(place_entity(&mut p, &mut rng, spec, None, None), Err(PlacementError::NoFreeSpace));
    }
}

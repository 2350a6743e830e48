use thiserror::Error;

use super::entity::Entity3D;
use super::geometry::{Segment, Vec2};
use super::kinematics::AGENT_RADIUS;
use crate::grid::Color;

/// Extra width a portal needs beyond the agent's diameter.
pub const PORTAL_CLEARANCE: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("room extent is empty or not finite")]
    DegenerateExtent,
    #[error("room overlaps room {0}")]
    OverlappingRoom(usize),
    #[error("rooms {0} and {1} share no edge covering the span")]
    NoSharedEdge(usize, usize),
    #[error("portal span {0} is narrower than the agent needs")]
    SpanTooNarrow(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Room {
    pub min_x: f64,
    pub max_x: f64,
    pub min_z: f64,
    pub max_z: f64,
    pub wall_color: Color,
    pub floor_color: Color,
    pub ceil_color: Color,
}

impl Room {
    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.z >= self.min_z && p.z <= self.max_z
    }

    pub fn area(&self) -> f64 {
        (self.max_x - self.min_x) * (self.max_z - self.min_z)
    }
}

/// The coordinate a portal span runs along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Z,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Z => "z",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Portal {
    pub room_a: usize,
    pub room_b: usize,
    pub axis: Axis,
    /// Fixed value of the other coordinate along the shared edge.
    pub at: f64,
    pub start: f64,
    pub end: f64,
}

/// A wall piece. `normal` points into `room`; rays only see the face on that
/// side while collision treats the segment as solid from both sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wall {
    pub seg: Segment,
    pub normal: Vec2,
    pub room: usize,
    pub color: Color,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FloorPlan {
    rooms: Vec<Room>,
    portals: Vec<Portal>,
    walls: Vec<Wall>,
    pub entities: Vec<Entity3D>,
    pub(crate) next_entity_id: u32,
}

impl FloorPlan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn portals(&self) -> &[Portal] {
        &self.portals
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    /// Appends a room with grey surfaces and returns its index.
    pub fn add_rect_room(&mut self, min_x: f64, max_x: f64, min_z: f64, max_z: f64) -> Result<usize, PlanError> {
        let finite = [min_x, max_x, min_z, max_z].iter().all(|v| v.is_finite());
        if !finite || min_x >= max_x || min_z >= max_z {
            return Err(PlanError::DegenerateExtent);
        }
        for (i, r) in self.rooms.iter().enumerate() {
            let ox = max_x.min(r.max_x) - min_x.max(r.min_x);
            let oz = max_z.min(r.max_z) - min_z.max(r.min_z);
            if ox > 0.0 && oz > 0.0 {
                return Err(PlanError::OverlappingRoom(i));
            }
        }
        self.rooms.push(Room {
            min_x,
            max_x,
            min_z,
            max_z,
            wall_color: Color::Grey,
            floor_color: Color::Grey,
            ceil_color: Color::Grey,
        });
        self.rebuild_walls();
        Ok(self.rooms.len() - 1)
    }

    pub fn set_room_colors(&mut self, room: usize, wall: Color, floor: Color, ceil: Color) {
        let r = &mut self.rooms[room];
        r.wall_color = wall;
        r.floor_color = floor;
        r.ceil_color = ceil;
        self.rebuild_walls();
    }

    /// Opens `span` (along the shared edge) between two touching rooms.
    pub fn connect_rooms(&mut self, a: usize, b: usize, span: (f64, f64)) -> Result<(), PlanError> {
        let (start, end) = if span.0 <= span.1 { span } else { (span.1, span.0) };
        let no_edge = PlanError::NoSharedEdge(a, b);
        if a == b || a >= self.rooms.len() || b >= self.rooms.len() {
            return Err(no_edge);
        }
        let (ra, rb) = (self.rooms[a], self.rooms[b]);
        let (axis, at, lo, hi) = if ra.max_x == rb.min_x || rb.max_x == ra.min_x {
            let at = if ra.max_x == rb.min_x { ra.max_x } else { ra.min_x };
            (Axis::Z, at, ra.min_z.max(rb.min_z), ra.max_z.min(rb.max_z))
        } else if ra.max_z == rb.min_z || rb.max_z == ra.min_z {
            let at = if ra.max_z == rb.min_z { ra.max_z } else { ra.min_z };
            (Axis::X, at, ra.min_x.max(rb.min_x), ra.max_x.min(rb.max_x))
        } else {
            return Err(no_edge);
        };
        if !(lo < hi && start >= lo && end <= hi) {
            return Err(no_edge);
        }
        let width = end - start;
        if width < 2.0 * AGENT_RADIUS + PORTAL_CLEARANCE {
            return Err(PlanError::SpanTooNarrow(width));
        }
        self.portals.push(Portal { room_a: a, room_b: b, axis, at, start, end });
        self.rebuild_walls();
        Ok(())
    }

    /// Index of the first room containing `p`.
    pub fn room_at(&self, p: Vec2) -> Option<usize> {
        self.rooms.iter().position(|r| r.contains(p))
    }

    /// Bounding box `(min_x, max_x, min_z, max_z)` of all rooms.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.rooms.iter().fold((f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY), |b, r| {
            (b.0.min(r.min_x), b.1.max(r.max_x), b.2.min(r.min_z), b.3.max(r.max_z))
        })
    }

    pub fn entity(&self, id: u32) -> Option<&Entity3D> {
        self.entities.iter().find(|e| e.id == id)
    }

    /// Whether a disc at `c` would overlap a wall or a placed entity
    /// (other than `ignore`). Touching is allowed.
    pub fn disc_collides(&self, c: Vec2, radius: f64, ignore: Option<u32>) -> bool {
        self.walls.iter().any(|w| super::geometry::point_segment_distance(c, &w.seg) < radius)
            || self.entities.iter().any(|e| Some(e.id) != ignore && c.dist(e.pos()) < radius + e.radius)
    }

    fn rebuild_walls(&mut self) {
        let mut walls = Vec::new();
        for (i, r) in self.rooms.iter().enumerate() {
            // (axis of the edge's span, fixed coordinate, inward normal)
            let edges = [
                (Axis::X, r.min_z, Vec2::new(0.0, 1.0), r.min_x, r.max_x),
                (Axis::X, r.max_z, Vec2::new(0.0, -1.0), r.min_x, r.max_x),
                (Axis::Z, r.min_x, Vec2::new(1.0, 0.0), r.min_z, r.max_z),
                (Axis::Z, r.max_x, Vec2::new(-1.0, 0.0), r.min_z, r.max_z),
            ];
            for (axis, at, normal, lo, hi) in edges {
                let mut gaps: Vec<(f64, f64)> = self
                    .portals
                    .iter()
                    .filter(|p| p.axis == axis && p.at == at && (p.room_a == i || p.room_b == i))
                    .map(|p| (p.start, p.end))
                    .collect();
                gaps.sort_by(|x, y| x.0.total_cmp(&y.0));
                let mut cursor = lo;
                let mut pieces = Vec::new();
                for (s, e) in gaps {
                    if s > cursor {
                        pieces.push((cursor, s));
                    }
                    cursor = cursor.max(e);
                }
                if hi > cursor {
                    pieces.push((cursor, hi));
                }
                for (s, e) in pieces {
                    let seg = match axis {
                        Axis::X => Segment::new(Vec2::new(s, at), Vec2::new(e, at)),
                        Axis::Z => Segment::new(Vec2::new(at, s), Vec2::new(at, e)),
                    };
                    walls.push(Wall { seg, normal, room: i, color: r.wall_color });
                }
            }
        }
        self.walls = walls;
    }
}

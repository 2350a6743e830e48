//! Per-pixel reference image for scenes holding only boxes. Walls are found
//! by walking the ray from room to room: leaving a room through an edge is a
//! wall hit unless the exit point lands inside a neighbouring room.

use miniverse_core::grid::Color;
use miniverse_core::world3d::{AgentPose, Axis, Camera, EntityKind, FloorPlan, Room, WALL_HEIGHT};

pub type Px = [u8; 3];

/// What the central ray of one column meets first among the walls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WallHit {
    pub depth: f64,
    pub room: usize,
    /// True for edges of constant x.
    pub x_edge: bool,
}

fn inside(r: &Room, x: f64, z: f64) -> bool {
    x > r.min_x && x < r.max_x && z > r.min_z && z < r.max_z
}

fn room_of(plan: &FloorPlan, x: f64, z: f64) -> Option<usize> {
    plan.rooms().iter().position(|r| x >= r.min_x && x <= r.max_x && z >= r.min_z && z <= r.max_z)
}

/// Walks the ray (ox, oz) + t (dx, dz) through the room union.
pub fn walk(plan: &FloorPlan, ox: f64, oz: f64, dx: f64, dz: f64) -> Option<WallHit> {
    let mut room = room_of(plan, ox, oz)?;
    let mut t0 = 0.0;
    for _ in 0..64 {
        let r = &plan.rooms()[room];
        let tx = if dx > 0.0 { (r.max_x - ox) / dx } else if dx < 0.0 { (r.min_x - ox) / dx } else { f64::INFINITY };
        let tz = if dz > 0.0 { (r.max_z - oz) / dz } else if dz < 0.0 { (r.min_z - oz) / dz } else { f64::INFINITY };
        let (t, x_edge) = if tx <= tz { (tx, true) } else { (tz, false) };
        if t < t0 - 1e-12 {
            return None;
        }
        let eps = 1e-7;
        let (px, pz) = (ox + (t + eps) * dx, oz + (t + eps) * dz);
        let (along, at) = if x_edge { (oz + t * dz, ox + t * dx) } else { (ox + t * dx, oz + t * dz) };
        let through_portal = |j: usize| {
            plan.portals().iter().any(|p| {
                let joins = (p.room_a == room && p.room_b == j) || (p.room_b == room && p.room_a == j);
                let edge_matches = (p.axis == Axis::Z) == x_edge && (p.at - at).abs() < 1e-9;
                joins && edge_matches && along > p.start && along < p.end
            })
        };
        let next = (0..plan.rooms().len()).find(|&j| j != room && inside(&plan.rooms()[j], px, pz) && through_portal(j));
        match next {
            Some(j) => {
                room = j;
                t0 = t;
            }
            None => return Some(WallHit { depth: t, room, x_edge }),
        }
    }
    None
}

fn scale(c: Px, num: u16, den: u16) -> Px {
    c.map(|v| (v as u16 * num / den) as u8)
}

/// Expected first-person image of a plan whose entities are all boxes.
pub fn expected_image(plan: &FloorPlan, pose: &AgentPose, cam: &Camera) -> Vec<Vec<Px>> {
    assert!(plan.entities.iter().all(|e| e.kind == EntityKind::Box), "box-only scenes");
    let (fx, fz) = (pose.yaw.cos(), -pose.yaw.sin());
    let (rx, rz) = (pose.yaw.sin(), pose.yaw.cos());
    let th = (cam.hfov_deg.to_radians() / 2.0).tan();
    let tv = th * cam.height as f64 / cam.width as f64;
    let eye = pose.eye_height;
    let home = room_of(plan, pose.x, pose.z);
    let mut img = vec![vec![[0u8; 3]; cam.width]; cam.height];
    for c in 0..cam.width {
        let u = (2.0 * (c as f64 + 0.5) / cam.width as f64 - 1.0) * th;
        let (dx, dz) = (fx + rx * u, fz + rz * u);
        let hit = walk(plan, pose.x, pose.z, dx, dz);
        let wall_depth = hit.map_or(f64::INFINITY, |h| h.depth);
        // Nearest box whose billboard spans this column.
        let mut boxes: Vec<(f64, f64, f64, Color)> = plan
            .entities
            .iter()
            .filter_map(|e| {
                let (relx, relz) = (e.x - pose.x, e.z - pose.z);
                let depth = relx * fx + relz * fz;
                let lateral = relx * rx + relz * rz;
                let spans = ((u * depth - lateral) / e.radius).abs() <= 1.0;
                (depth > 0.05 && depth < wall_depth && spans).then_some((depth, e.height, e.radius, e.color))
            })
            .collect();
        boxes.sort_by(|a, b| a.0.total_cmp(&b.0));
        for r in 0..cam.height {
            let v = (1.0 - 2.0 * (r as f64 + 0.5) / cam.height as f64) * tv;
            let on_box = boxes.iter().find(|b| {
                let t = (v * b.0 + eye) / b.1;
                (0.0..=1.0).contains(&t)
            });
            img[r][c] = if let Some(b) = on_box {
                b.3.rgb()
            } else if let Some(h) = hit.filter(|h| {
                let y = v * h.depth;
                y >= -eye && y <= WALL_HEIGHT - eye
            }) {
                let base = plan.rooms()[h.room].wall_color.rgb();
                if h.x_edge { scale(base, 4, 5) } else { base }
            } else {
                let (dist, ceiling) = if v > 0.0 { ((WALL_HEIGHT - eye) / v, true) } else { (eye / -v, false) };
                let (px, pz) = (pose.x + dx * dist, pose.z + dz * dist);
                match room_of(plan, px, pz).or(home) {
                    Some(i) if ceiling => plan.rooms()[i].ceil_color.rgb().map(|v| (v as u16 * 7 / 10 + 40) as u8),
                    Some(i) => scale(plan.rooms()[i].floor_color.rgb(), 2, 5),
                    None => [0, 0, 0],
                }
            };
        }
    }
    img
}

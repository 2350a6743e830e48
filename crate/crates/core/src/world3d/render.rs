use super::entity::{Entity3D, EntityKind};
use super::geometry::{ray_segment, Vec2};
use super::kinematics::AgentPose;
use super::plan::FloorPlan;
use crate::grid::Color;
use crate::image::{Rgb, RgbImage};

pub const DEFAULT_OBS_WIDTH: usize = 80;
pub const DEFAULT_OBS_HEIGHT: usize = 60;
pub const HFOV_DEG: f64 = 60.0;
pub const WALL_HEIGHT: f64 = 2.5;
const NEAR_CLIP: f64 = 0.05;
const VOID: Rgb = [0, 0, 0];

/// Pinhole camera with square pixels; the vertical field of view follows
/// from the aspect ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Camera {
    pub width: usize,
    pub height: usize,
    pub hfov_deg: f64,
}

impl Default for Camera {
    fn default() -> Self {
        Self { width: DEFAULT_OBS_WIDTH, height: DEFAULT_OBS_HEIGHT, hfov_deg: HFOV_DEG }
    }
}

impl Camera {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, ..Self::default() }
    }

    pub fn tan_half_h(&self) -> f64 {
        (self.hfov_deg.to_radians() / 2.0).tan()
    }

    pub fn tan_half_v(&self) -> f64 {
        self.tan_half_h() * self.height as f64 / self.width as f64
    }

    /// Horizontal image-plane coordinate of column `c`'s centre, right positive.
    pub fn column_u(&self, c: usize) -> f64 {
        (2.0 * (c as f64 + 0.5) / self.width as f64 - 1.0) * self.tan_half_h()
    }

    /// Vertical image-plane coordinate of row `r`'s centre, up positive.
    pub fn row_v(&self, r: usize) -> f64 {
        (1.0 - 2.0 * (r as f64 + 0.5) / self.height as f64) * self.tan_half_v()
    }

    /// Ray direction through column `c`, scaled so its forward component is 1.
    /// Ray parameters along it are therefore perpendicular depths.
    pub fn column_dir(&self, pose: &AgentPose, c: usize) -> Vec2 {
        pose.heading() + pose.right() * self.column_u(c)
    }
}

/// The nearest wall face seen through one column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColumnHit {
    /// Perpendicular depth, infinite when nothing is hit.
    pub depth: f64,
    /// Index into `FloorPlan::walls`.
    pub wall: Option<usize>,
}

pub fn cast_column(plan: &FloorPlan, origin: Vec2, dir: Vec2) -> ColumnHit {
    let mut best = ColumnHit { depth: f64::INFINITY, wall: None };
    for (i, w) in plan.walls().iter().enumerate() {
        if dir.dot(w.normal) >= 0.0 {
            continue;
        }
        if let Some(t) = ray_segment(origin, dir, &w.seg) {
            if t < best.depth {
                best = ColumnHit { depth: t, wall: Some(i) };
            }
        }
    }
    best
}

pub fn cast_columns(plan: &FloorPlan, pose: &AgentPose, camera: &Camera) -> Vec<ColumnHit> {
    (0..camera.width).map(|c| cast_column(plan, pose.pos(), camera.column_dir(pose, c))).collect()
}

fn scale(c: Rgb, num: u16, den: u16) -> Rgb {
    c.map(|v| (v as u16 * num / den) as u8)
}

fn wall_shade(color: Color, normal: Vec2) -> Rgb {
    if normal.x != 0.0 {
        scale(color.rgb(), 4, 5)
    } else {
        color.rgb()
    }
}

fn floor_shade(color: Color) -> Rgb {
    scale(color.rgb(), 2, 5)
}

fn ceil_shade(color: Color) -> Rgb {
    color.rgb().map(|v| (v as u16 * 7 / 10 + 40) as u8)
}

/// Sprite coverage in billboard-local coordinates: `s` runs -1..1 left to
/// right, `t` runs 0..1 bottom to top.
fn sprite_covers(kind: EntityKind, s: f64, t: f64) -> bool {
    match kind {
        EntityKind::Box => true,
        EntityKind::Ball => s * s + (2.0 * t - 1.0).powi(2) <= 1.0,
        EntityKind::Key => {
            let dy = (t - 0.75) * 2.0;
            let r2 = s * s + dy * dy;
            let ring = (0.04..=0.25).contains(&r2);
            let shaft = s.abs() <= 0.12 && (0.05..=0.55).contains(&t);
            let teeth = (0.12..=0.45).contains(&s) && ((0.05..=0.15).contains(&t) || (0.25..=0.35).contains(&t));
            ring || shaft || teeth
        }
    }
}

/// First-person view: one ray per column against the wall faces, then
/// camera-facing billboards painted far to near, each clipped per column
/// by the wall depth.
pub fn render_first_person(plan: &FloorPlan, pose: &AgentPose, camera: &Camera) -> RgbImage {
    let (w, h) = (camera.width, camera.height);
    let mut img = RgbImage::new(w, h);
    let origin = pose.pos();
    let eye = pose.eye_height;
    let home = plan.room_at(origin);
    let rows_v: Vec<f64> = (0..h).map(|r| camera.row_v(r)).collect();
    let hits = cast_columns(plan, pose, camera);
    for (c, hit) in hits.iter().enumerate() {
        let dir = camera.column_dir(pose, c);
        let wall = hit.wall.map(|i| plan.walls()[i]);
        for (r, &v) in rows_v.iter().enumerate() {
            let y = v * hit.depth;
            let px = match wall {
                Some(wl) if y >= -eye && y <= WALL_HEIGHT - eye => wall_shade(wl.color, wl.normal),
                _ => {
                    let (dist, ceiling) = if v > 0.0 { ((WALL_HEIGHT - eye) / v, true) } else { (eye / -v, false) };
                    let at = origin + dir * dist;
                    match plan.room_at(at).or(home) {
                        Some(i) if ceiling => ceil_shade(plan.rooms()[i].ceil_color),
                        Some(i) => floor_shade(plan.rooms()[i].floor_color),
                        None => VOID,
                    }
                }
            };
            img.set(c, r, px);
        }
    }

    let (fwd, right) = (pose.heading(), pose.right());
    let mut visible: Vec<(f64, f64, &Entity3D)> = plan
        .entities
        .iter()
        .filter_map(|e| {
            let rel = e.pos() - origin;
            let depth = rel.dot(fwd);
            (depth > NEAR_CLIP).then(|| (depth, rel.dot(right), e))
        })
        .collect();
    visible.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.2.id.cmp(&b.2.id)));
    for (depth, lateral, e) in visible {
        let color = e.color.rgb();
        for (c, hit) in hits.iter().enumerate() {
            if depth >= hit.depth {
                continue;
            }
            let s = (camera.column_u(c) * depth - lateral) / e.radius;
            if !(-1.0..=1.0).contains(&s) {
                continue;
            }
            for (r, &v) in rows_v.iter().enumerate() {
                let t = (v * depth + eye) / e.height;
                if (0.0..=1.0).contains(&t) && sprite_covers(e.kind, s, t) {
                    img.set(c, r, color);
                }
            }
        }
    }
    img
}

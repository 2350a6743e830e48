use super::geometry::Vec2;
use super::kinematics::AgentPose;
use super::plan::FloorPlan;
use crate::image::{Rgb, RgbImage};

pub const DEFAULT_PX_PER_UNIT: f64 = 20.0;
const AGENT_COLOR: Rgb = [255, 0, 0];

/// Mapping between plan coordinates and top-down pixels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TopDownView {
    pub px_per_unit: f64,
    pub min_x: f64,
    pub min_z: f64,
    pub width: usize,
    pub height: usize,
}

impl TopDownView {
    pub fn for_plan(plan: &FloorPlan, px_per_unit: f64) -> Self {
        let (min_x, max_x, min_z, max_z) = plan.bounds();
        let width = ((max_x - min_x) * px_per_unit).ceil().max(1.0) as usize;
        let height = ((max_z - min_z) * px_per_unit).ceil().max(1.0) as usize;
        Self { px_per_unit, min_x, min_z, width, height }
    }

    /// Continuous pixel coordinates of a plan point.
    pub fn to_px(&self, p: Vec2) -> (f64, f64) {
        ((p.x - self.min_x) * self.px_per_unit, (p.z - self.min_z) * self.px_per_unit)
    }

    /// Plan point at the centre of pixel `(px, py)`.
    pub fn to_world(&self, px: usize, py: usize) -> Vec2 {
        Vec2::new(
            self.min_x + (px as f64 + 0.5) / self.px_per_unit,
            self.min_z + (py as f64 + 0.5) / self.px_per_unit,
        )
    }

    fn clamp_px(&self, p: Vec2) -> (i64, i64) {
        let (x, y) = self.to_px(p);
        ((x.floor() as i64).clamp(0, self.width as i64 - 1), (y.floor() as i64).clamp(0, self.height as i64 - 1))
    }
}

/// Triangle marking the agent: tip along the heading, base behind.
pub fn agent_wedge(pose: &AgentPose) -> [Vec2; 3] {
    let (p, f, r) = (pose.pos(), pose.heading(), pose.right());
    let k = pose.radius;
    [p + f * (1.5 * k), p - f * (0.6 * k) - r * (0.8 * k), p - f * (0.6 * k) + r * (0.8 * k)]
}

fn in_triangle(p: Vec2, t: &[Vec2; 3]) -> bool {
    let d0 = (t[1] - t[0]).cross(p - t[0]);
    let d1 = (t[2] - t[1]).cross(p - t[1]);
    let d2 = (t[0] - t[2]).cross(p - t[2]);
    (d0 >= 0.0 && d1 >= 0.0 && d2 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0 && d2 <= 0.0)
}

/// Orthographic plan view: room floors, wall outlines (portals show as
/// gaps), entity discs and the agent wedge.
pub fn render_topdown3d(plan: &FloorPlan, pose: Option<&AgentPose>, px_per_unit: f64) -> RgbImage {
    let view = TopDownView::for_plan(plan, px_per_unit);
    let mut img = RgbImage::new(view.width, view.height);
    let wedge = pose.map(agent_wedge);
    for py in 0..view.height {
        for px in 0..view.width {
            let p = view.to_world(px, py);
            let mut c = match plan.room_at(p) {
                Some(i) => plan.rooms()[i].floor_color.rgb().map(|v| v / 3),
                None => continue,
            };
            if let Some(e) = plan.entities.iter().find(|e| p.dist(e.pos()) <= e.radius) {
                c = e.color.rgb();
            }
            img.set(px, py, c);
        }
    }
    for w in plan.walls() {
        let a = view.clamp_px(w.seg.a);
        let b = view.clamp_px(w.seg.b);
        img.line(a, b, w.color.rgb());
    }
    if let Some(t) = wedge {
        for py in 0..view.height {
            for px in 0..view.width {
                if in_triangle(view.to_world(px, py), &t) {
                    img.set(px, py, AGENT_COLOR);
                }
            }
        }
    }
    img
}

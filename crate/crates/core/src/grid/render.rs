//! Deterministic tile art for grid worlds and agent views.

use std::collections::HashMap;

use crate::image::{Rgb, RgbImage};

use super::agent::{AgentState, Direction};
use super::encode::{decode_cell, GridView};
use super::grid::Grid;
use super::object::{DoorState, ObjectKind, WorldObject};

pub const MIN_TILE_PX: usize = 8;

const BLACK: Rgb = [0, 0, 0];
const GRID_LINE: Rgb = [100, 100, 100];
const LAVA: Rgb = [255, 128, 0];
const AGENT: Rgb = [255, 0, 0];

/// Renders the whole grid. `highlight` is a `width * height` row-major mask of
/// cells to brighten (the agent's visible region).
pub fn render_rgb(grid: &Grid, agent: Option<&AgentState>, tile_px: usize, highlight: Option<&[bool]>) -> RgbImage {
    assert!(tile_px >= MIN_TILE_PX, "tile_px must be at least {MIN_TILE_PX}");
    let (w, h) = (grid.width() as usize, grid.height() as usize);
    let mut img = RgbImage::new(w * tile_px, h * tile_px);
    let mut tiles = TileCache::new(tile_px);
    for ((x, y), obj) in grid.cells() {
        let here = agent.filter(|a| a.pos == (x, y));
        let lit = highlight.is_some_and(|m| m[y as usize * w + x as usize]);
        tiles.draw(&mut img, x as usize * tile_px, y as usize * tile_px, obj, here.map(|a| a.dir), lit);
    }
    img
}

/// Renders an agent view from its encoding alone: the agent at the bottom
/// centre facing up, visible cells brightened, unseen cells black.
pub fn render_view(view: &GridView, tile_px: usize) -> RgbImage {
    assert!(tile_px >= MIN_TILE_PX, "tile_px must be at least {MIN_TILE_PX}");
    let v = view.view_size as usize;
    let mut img = RgbImage::new(v * tile_px, v * tile_px);
    let mut tiles = TileCache::new(tile_px);
    for vy in 0..v {
        for vx in 0..v {
            let code = view.encoding.cell(vy, vx);
            let is_agent = vx == v / 2 && vy == v - 1;
            let obj = decode_cell(code).ok();
            let lit = view.is_visible(vx as i32, vy as i32);
            if code[0] == ObjectKind::Unseen as u8 && !is_agent {
                continue;
            }
            let dir = is_agent.then_some(Direction::North);
            tiles.draw(&mut img, vx * tile_px, vy * tile_px, obj.as_ref(), dir, lit);
        }
    }
    img
}

type TileKey = (Option<WorldObject>, Option<Direction>, bool);

/// Tiles already drawn during one render; most cells repeat.
struct TileCache {
    t: usize,
    tiles: HashMap<TileKey, RgbImage>,
}

impl TileCache {
    fn new(t: usize) -> Self {
        Self { t, tiles: HashMap::new() }
    }

    fn draw(&mut self, img: &mut RgbImage, ox: usize, oy: usize, obj: Option<&WorldObject>, agent: Option<Direction>, lit: bool) {
        let t = self.t;
        let tile = self.tiles.entry((obj.cloned(), agent, lit)).or_insert_with(|| tile_image(t, obj, agent, lit));
        img.blit(tile, ox, oy);
    }
}

fn tile_image(t: usize, obj: Option<&WorldObject>, agent: Option<Direction>, lit: bool) -> RgbImage {
    let mut img = RgbImage::new(t, t);
    let inv = 1.0 / t as f64;
    for py in 0..t {
        for px in 0..t {
            let fx = (px as f64 + 0.5) * inv;
            let fy = (py as f64 + 0.5) * inv;
            let mut c = tile_pixel(obj, fx, fy);
            if let Some(dir) = agent {
                if in_agent_triangle(dir, fx, fy) {
                    c = AGENT;
                }
            }
            if lit {
                c = brighten(c);
            }
            img.set(px, py, c);
        }
    }
    img
}

/// Blend towards white by a fixed 30%.
#[inline]
pub(crate) fn brighten(c: Rgb) -> Rgb {
    c.map(|v| v + ((255 - v as u16) * 3 / 10) as u8)
}

fn in_rect(fx: f64, fy: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> bool {
    fx >= x0 && fx <= x1 && fy >= y0 && fy <= y1
}

fn in_circle(fx: f64, fy: f64, cx: f64, cy: f64, r: f64) -> bool {
    (fx - cx) * (fx - cx) + (fy - cy) * (fy - cy) <= r * r
}

fn scale(c: Rgb, num: u16, den: u16) -> Rgb {
    c.map(|v| (v as u16 * num / den) as u8)
}

fn tile_pixel(obj: Option<&WorldObject>, fx: f64, fy: f64) -> Rgb {
    let background = if fx < 0.031 || fy < 0.031 { GRID_LINE } else { BLACK };
    let Some(obj) = obj else { return background };
    let col = obj.color().rgb();
    match obj.kind() {
        ObjectKind::Wall | ObjectKind::Goal => col,
        ObjectKind::Floor => {
            if in_rect(fx, fy, 0.031, 1.0, 0.031, 1.0) {
                scale(col, 1, 2)
            } else {
                background
            }
        }
        ObjectKind::Lava => {
            for i in 0..3 {
                let base = 0.3 + 0.2 * i as f64;
                let wave = base + 0.05 * (fx * std::f64::consts::TAU * 2.0).cos();
                if (0.1..=0.9).contains(&fx) && (fy - wave).abs() < 0.03 {
                    return BLACK;
                }
            }
            LAVA
        }
        ObjectKind::Door => match obj.door_state().unwrap_or(DoorState::Closed) {
            DoorState::Open => {
                if in_rect(fx, fy, 0.92, 0.96, 0.04, 0.96) {
                    BLACK
                } else if in_rect(fx, fy, 0.88, 1.0, 0.0, 1.0) {
                    col
                } else {
                    background
                }
            }
            DoorState::Closed => {
                if in_circle(fx, fy, 0.75, 0.5, 0.08) || !in_rect(fx, fy, 0.04, 0.96, 0.04, 0.96) {
                    col
                } else if !in_rect(fx, fy, 0.08, 0.92, 0.08, 0.92) {
                    BLACK
                } else if !in_rect(fx, fy, 0.12, 0.88, 0.12, 0.88) {
                    col
                } else {
                    BLACK
                }
            }
            DoorState::Locked => {
                if in_rect(fx, fy, 0.52, 0.75, 0.50, 0.56) || !in_rect(fx, fy, 0.06, 0.94, 0.06, 0.94) {
                    col
                } else {
                    scale(col, 45, 100)
                }
            }
        },
        ObjectKind::Key => {
            if in_circle(fx, fy, 0.56, 0.28, 0.064) {
                BLACK
            } else if in_circle(fx, fy, 0.56, 0.28, 0.19)
                || in_rect(fx, fy, 0.50, 0.63, 0.31, 0.88)
                || in_rect(fx, fy, 0.38, 0.50, 0.59, 0.66)
                || in_rect(fx, fy, 0.38, 0.50, 0.81, 0.88)
            {
                col
            } else {
                background
            }
        }
        ObjectKind::Ball => {
            if in_circle(fx, fy, 0.5, 0.5, 0.31) {
                col
            } else {
                background
            }
        }
        ObjectKind::Box => {
            if in_rect(fx, fy, 0.16, 0.84, 0.47, 0.53) {
                col
            } else if in_rect(fx, fy, 0.18, 0.82, 0.18, 0.82) {
                BLACK
            } else if in_rect(fx, fy, 0.12, 0.88, 0.12, 0.88) {
                col
            } else {
                background
            }
        }
        ObjectKind::Unseen | ObjectKind::Empty | ObjectKind::Agent => background,
    }
}

/// The heading triangle, drawn for East and rotated clockwise per quarter turn.
fn in_agent_triangle(dir: Direction, fx: f64, fy: f64) -> bool {
    // Undo the rotation: map the sample point back into the East frame.
    let (mut x, mut y) = (fx - 0.5, fy - 0.5);
    for _ in 0..dir as u8 {
        (x, y) = (y, -x);
    }
    let (x, y) = (x + 0.5, y + 0.5);
    let (ax, ay, bx, by, cx, cy) = (0.12, 0.19, 0.87, 0.50, 0.12, 0.81);
    let d1 = (x - bx) * (ay - by) - (ax - bx) * (y - by);
    let d2 = (x - cx) * (by - cy) - (bx - cx) * (y - cy);
    let d3 = (x - ax) * (cy - ay) - (cx - ax) * (y - ay);
    let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(neg && pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{encode_view, Color};

    #[test]
    fn image_dimensions() {
        let g = Grid::new(5, 3);
        let img = render_rgb(&g, None, 16, None);
        assert_eq!(img.shape(), [3 * 16, 5 * 16, 3]);
    }

    #[test]
    fn deterministic_bytes() {
        let mut g = Grid::new(4, 4);
        g.wall_rect(0, 0, 4, 4).unwrap();
        g.put_object(WorldObject::door(Color::Blue, DoorState::Closed), 1, 1).unwrap();
        let a = AgentState::new((2, 2), Direction::South);
        assert_eq!(render_rgb(&g, Some(&a), 12, None), render_rgb(&g, Some(&a), 12, None));
    }

    #[test]
    fn key_colors_differ_only_on_palette_pixels() {
        let mut red = Grid::new(1, 1);
        red.put_object(WorldObject::key(Color::Red), 0, 0).unwrap();
        let mut blue = Grid::new(1, 1);
        blue.put_object(WorldObject::key(Color::Blue), 0, 0).unwrap();
        let (a, b) = (render_rgb(&red, None, 32, None), render_rgb(&blue, None, 32, None));
        let mut differing = 0;
        for y in 0..32 {
            for x in 0..32 {
                if a.get(x, y) != b.get(x, y) {
                    differing += 1;
                    assert_eq!(a.get(x, y), Color::Red.rgb());
                    assert_eq!(b.get(x, y), Color::Blue.rgb());
                }
            }
        }
        assert!(differing > 50);
    }

    #[test]
    fn agent_view_dimensions_and_facing() {
        let mut g = Grid::new(9, 9);
        g.wall_rect(0, 0, 9, 9).unwrap();
        let a = AgentState::new((4, 4), Direction::East);
        let img = render_view(&encode_view(&g, &a, 7), 8);
        assert_eq!(img.shape(), [56, 56, 3]);
        // The triangle's tip points up in the agent-view tile.
        let tile_top = 6 * 8;
        assert_eq!(img.get(3 * 8 + 4, tile_top + 2), brighten(AGENT));
    }
}

//! Line-of-sight over the tile grid.
//!
//! A cell is visible when the segment joining the agent's cell centre to the
//! target's cell centre passes through the interior of no opaque cell strictly
//! between the two. Grazing a cell along an edge or through a corner does not
//! count as passing through it.

use super::agent::AgentState;
use super::grid::Grid;

/// Cells whose interior the centre-to-centre segment crosses, excluding both
/// endpoints, in order of traversal.
pub fn supercover_between(from: (i32, i32), to: (i32, i32)) -> SupercoverIter {
    let dx = to.0 - from.0;
    let dy = to.1 - from.1;
    SupercoverIter {
        cur: from,
        to,
        nx: dx.unsigned_abs() as i64,
        ny: dy.unsigned_abs() as i64,
        sx: dx.signum(),
        sy: dy.signum(),
        ix: 0,
        iy: 0,
    }
}

pub struct SupercoverIter {
    cur: (i32, i32),
    to: (i32, i32),
    nx: i64,
    ny: i64,
    sx: i32,
    sy: i32,
    ix: i64,
    iy: i64,
}

impl Iterator for SupercoverIter {
    type Item = (i32, i32);

    fn next(&mut self) -> Option<(i32, i32)> {
        if self.ix >= self.nx && self.iy >= self.ny {
            return None;
        }
        // Compare the parameters (ix + 1/2)/nx and (iy + 1/2)/ny of the next
        // vertical and horizontal cell boundaries.
        let step_x = if self.ix >= self.nx {
            false
        } else if self.iy >= self.ny {
            true
        } else {
            let tx = (1 + 2 * self.ix) * self.ny;
            let ty = (1 + 2 * self.iy) * self.nx;
            if tx == ty {
                self.ix += 1;
                self.iy += 1;
                self.cur = (self.cur.0 + self.sx, self.cur.1 + self.sy);
                return self.emit();
            }
            tx < ty
        };
        if step_x {
            self.ix += 1;
            self.cur.0 += self.sx;
        } else {
            self.iy += 1;
            self.cur.1 += self.sy;
        }
        self.emit()
    }
}

impl SupercoverIter {
    fn emit(&mut self) -> Option<(i32, i32)> {
        if self.cur == self.to {
            self.ix = self.nx;
            self.iy = self.ny;
            None
        } else {
            Some(self.cur)
        }
    }
}

/// Whether `to` is visible from `from` inside `grid`.
pub fn line_of_sight(grid: &Grid, from: (i32, i32), to: (i32, i32)) -> bool {
    grid.in_bounds(to.0, to.1) && supercover_between(from, to).all(|(x, y)| !grid.is_opaque(x, y))
}

/// World cell shown at view coordinates `(vx, vy)`. The agent sits at the
/// bottom-centre cell `(view_size / 2, view_size - 1)` looking towards row 0.
#[inline]
pub fn view_to_world(agent: &AgentState, view_size: i32, vx: i32, vy: i32) -> (i32, i32) {
    let (fx, fy) = agent.dir.delta();
    let (rx, ry) = agent.dir.right().delta();
    let ahead = view_size - 1 - vy;
    let side = vx - view_size / 2;
    (agent.pos.0 + ahead * fx + side * rx, agent.pos.1 + ahead * fy + side * ry)
}

/// Row-major `view_size x view_size` visibility mask in view coordinates.
pub fn visible_mask(grid: &Grid, agent: &AgentState, view_size: i32) -> Vec<bool> {
    assert!(view_size > 0 && view_size % 2 == 1, "view_size must be odd");
    let mut mask = Vec::with_capacity((view_size * view_size) as usize);
    for vy in 0..view_size {
        for vx in 0..view_size {
            let cell = view_to_world(agent, view_size, vx, vy);
            mask.push(cell == agent.pos || line_of_sight(grid, agent.pos, cell));
        }
    }
    mask
}

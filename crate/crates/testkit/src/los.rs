//! Brute-force line of sight with exact rational arithmetic.
//!
//! Coordinates are doubled so cell centres are odd integers and cell edges
//! even ones. A target is visible when the centre-to-centre segment enters
//! the open interior of no opaque cell other than its endpoints.

use miniverse_core::grid::{AgentState, Direction, Grid};

/// `num / den` with `den > 0`.
#[derive(Clone, Copy, Debug)]
struct Frac {
    num: i64,
    den: i64,
}

impl Frac {
    fn new(num: i64, den: i64) -> Self {
        if den < 0 { Frac { num: -num, den: -den } } else { Frac { num, den } }
    }

    fn lt(self, o: Frac) -> bool {
        self.num * o.den < o.num * self.den
    }
}

/// Open parameter interval where `lo < p0 + t * d < hi`, or `None` for
/// "every t" / `Some(None)` for "no t".
fn slab(p0: i64, d: i64, lo: i64, hi: i64) -> Option<Option<(Frac, Frac)>> {
    if d == 0 {
        return if lo < p0 && p0 < hi { None } else { Some(None) };
    }
    let a = Frac::new(lo - p0, d);
    let b = Frac::new(hi - p0, d);
    Some(Some(if a.lt(b) { (a, b) } else { (b, a) }))
}

/// Whether the segment between the centres of `from` and `to` passes through
/// the open interior of cell `c`.
pub fn crosses_interior(from: (i32, i32), to: (i32, i32), c: (i32, i32)) -> bool {
    let (x0, y0) = (2 * from.0 as i64 + 1, 2 * from.1 as i64 + 1);
    let (dx, dy) = (2 * (to.0 - from.0) as i64, 2 * (to.1 - from.1) as i64);
    let (cx, cy) = (2 * c.0 as i64, 2 * c.1 as i64);
    let mut lo = Frac::new(0, 1);
    let mut hi = Frac::new(1, 1);
    let mut lo_open = false;
    let mut hi_open = false;
    for s in [slab(x0, dx, cx, cx + 2), slab(y0, dy, cy, cy + 2)] {
        match s {
            None => {}
            Some(None) => return false,
            Some(Some((a, b))) => {
                if !a.lt(lo) {
                    lo = a;
                    lo_open = true;
                }
                if !hi.lt(b) {
                    hi = b;
                    hi_open = true;
                }
            }
        }
    }
    lo.lt(hi) || (!lo_open && !hi_open && !hi.lt(lo))
}

pub fn visible(grid: &Grid, from: (i32, i32), to: (i32, i32)) -> bool {
    for y in 0..grid.height() {
        for x in 0..grid.width() {
            let c = (x, y);
            if c != from && c != to && grid.is_opaque(x, y) && crosses_interior(from, to, c) {
                return false;
            }
        }
    }
    true
}

/// World cell shown at view cell `(vx, vy)`: the agent sits at the bottom
/// centre facing up.
pub fn view_cell(agent: &AgentState, view_size: i32, vx: i32, vy: i32) -> (i32, i32) {
    let ahead = view_size - 1 - vy;
    let side = vx - view_size / 2;
    let (fx, fy, rx, ry) = match agent.dir {
        Direction::East => (1, 0, 0, 1),
        Direction::South => (0, 1, -1, 0),
        Direction::West => (-1, 0, 0, -1),
        Direction::North => (0, -1, 1, 0),
    };
    (agent.pos.0 + ahead * fx + side * rx, agent.pos.1 + ahead * fy + side * ry)
}

/// Row-major `view_size x view_size` visibility by exhaustive checking.
pub fn mask(grid: &Grid, agent: &AgentState, view_size: i32) -> Vec<bool> {
    let mut out = Vec::with_capacity((view_size * view_size) as usize);
    for vy in 0..view_size {
        for vx in 0..view_size {
            let (x, y) = view_cell(agent, view_size, vx, vy);
            let inside = x >= 0 && y >= 0 && x < grid.width() && y < grid.height();
            out.push(inside && ((x, y) == agent.pos || visible(grid, agent.pos, (x, y))));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_vs_corner() {
        assert!(crosses_interior((0, 0), (2, 0), (1, 0)));
        assert!(!crosses_interior((0, 0), (2, 0), (1, 1)));
        // Diagonal passes exactly through corners of the off-diagonal cells.
        assert!(!crosses_interior((0, 0), (2, 2), (1, 0)));
        assert!(crosses_interior((0, 0), (2, 2), (1, 1)));
        assert!(crosses_interior((0, 0), (1, 3), (0, 1)));
    }
}

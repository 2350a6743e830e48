use crate::rng::{below, RngStream};

use super::agent::{AgentState, Direction};
use super::grid::{Grid, GridError};
use super::object::WorldObject;

/// Axis-aligned block of cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Region {
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
}

impl Region {
    pub fn new(x: i32, y: i32, w: i32, h: i32) -> Self {
        Self { x, y, w, h }
    }

    pub fn whole(grid: &Grid) -> Self {
        Self::new(0, 0, grid.width(), grid.height())
    }

    pub fn cells(self) -> impl Iterator<Item = (i32, i32)> {
        (self.y..self.y + self.h).flat_map(move |y| (self.x..self.x + self.w).map(move |x| (x, y)))
    }
}

/// Rejection-samples a uniform cell in `region` that is empty, is not
/// `occupied`, and is not refused by `reject`.
fn sample_cell(
    grid: &Grid,
    rng: &mut RngStream,
    region: Region,
    occupied: Option<(i32, i32)>,
    reject: &dyn Fn(&Grid, (i32, i32)) -> bool,
) -> Result<(i32, i32), GridError> {
    let ok = |c: (i32, i32)| grid.is_empty(c.0, c.1) && Some(c) != occupied && !reject(grid, c);
    if region.w <= 0 || region.h <= 0 || !region.cells().any(ok) {
        return Err(GridError::NoFreeCell);
    }
    loop {
        let c = (region.x + below(rng, region.w as usize) as i32, region.y + below(rng, region.h as usize) as i32);
        if ok(c) {
            return Ok(c);
        }
    }
}

/// Places `obj` on a random free cell of `region`, never on `agent_pos`.
pub fn place_object(
    grid: &mut Grid,
    rng: &mut RngStream,
    obj: WorldObject,
    region: Region,
    agent_pos: Option<(i32, i32)>,
    reject: &dyn Fn(&Grid, (i32, i32)) -> bool,
) -> Result<(i32, i32), GridError> {
    let (x, y) = sample_cell(grid, rng, region, agent_pos, reject)?;
    grid.put_object(obj, x, y)?;
    Ok((x, y))
}

/// Places the agent on a random free cell of `region` with a uniform heading.
pub fn place_agent(
    grid: &Grid,
    rng: &mut RngStream,
    region: Region,
    reject: &dyn Fn(&Grid, (i32, i32)) -> bool,
) -> Result<AgentState, GridError> {
    let pos = sample_cell(grid, rng, region, None, reject)?;
    let dir = Direction::from_index(below(rng, 4) as u8);
    Ok(AgentState::new(pos, dir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{label, stream};

    fn no_reject(_: &Grid, _: (i32, i32)) -> bool {
        false
    }

    #[test]
    fn forced_single_cell() {
        let mut g = Grid::new(4, 4);
        for (x, y) in Region::whole(&g).cells() {
            if (x, y) != (2, 1) {
                g.put_object(WorldObject::wall(), x, y).unwrap();
            }
        }
        let mut rng = stream(7, label::WORLD);
        let a = place_agent(&g, &mut rng, Region::whole(&g), &no_reject).unwrap();
        assert_eq!(a.pos, (2, 1));
    }

    #[test]
    fn full_region_errors() {
        let mut g = Grid::new(3, 3);
        g.wall_rect(0, 0, 3, 3).unwrap();
        g.put_object(WorldObject::goal(), 1, 1).unwrap();
        let mut rng = stream(7, label::WORLD);
        let whole = Region::whole(&g);
        let r = place_object(&mut g, &mut rng, WorldObject::ball(crate::grid::Color::Red), whole, None, &no_reject);
        assert_eq!(r, Err(GridError::NoFreeCell));
    }

    #[test]
    fn fixed_seed_fixed_placement() {
        let g = Grid::new(10, 10);
        let a = place_agent(&g, &mut stream(3, label::WORLD), Region::whole(&g), &no_reject).unwrap();
        let b = place_agent(&g, &mut stream(3, label::WORLD), Region::whole(&g), &no_reject).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn never_on_agent_cell() {
        let mut rng = stream(11, label::WORLD);
        for _ in 0..200 {
            let mut g = Grid::new(2, 1);
            let whole = Region::whole(&g);
            let p = place_object(&mut g, &mut rng, WorldObject::goal(), whole, Some((0, 0)), &no_reject).unwrap();
            assert_eq!(p, (1, 0));
        }
    }
}

use thiserror::Error;

use super::agent::AgentState;
use super::object::WorldObject;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("cell ({x}, {y}) is outside the grid")]
    OutOfBounds { x: i32, y: i32 },
    #[error("no free cell in the requested region")]
    NoFreeCell,
    #[error("malformed map: {0}")]
    Parse(String),
}

/// Row-major table of optional objects, `width` columns by `height` rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    width: i32,
    height: i32,
    cells: Vec<Option<WorldObject>>,
}

impl Grid {
    pub fn new(width: i32, height: i32) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        Self { width, height, cells: vec![None; (width * height) as usize] }
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    #[inline]
    pub fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && x < self.width && y < self.height
    }

    #[inline]
    fn index(&self, x: i32, y: i32) -> usize {
        (y * self.width + x) as usize
    }

    /// Object at `(x, y)`; `None` for empty cells and for out-of-range coordinates.
    #[inline]
    pub fn get(&self, x: i32, y: i32) -> Option<&WorldObject> {
        if self.in_bounds(x, y) {
            self.cells[self.index(x, y)].as_ref()
        } else {
            None
        }
    }

    pub fn get_mut(&mut self, x: i32, y: i32) -> Option<&mut WorldObject> {
        if self.in_bounds(x, y) {
            let i = self.index(x, y);
            self.cells[i].as_mut()
        } else {
            None
        }
    }

    pub fn set(&mut self, x: i32, y: i32, obj: Option<WorldObject>) -> Result<(), GridError> {
        if !self.in_bounds(x, y) {
            return Err(GridError::OutOfBounds { x, y });
        }
        let i = self.index(x, y);
        self.cells[i] = obj;
        Ok(())
    }

    pub fn take(&mut self, x: i32, y: i32) -> Option<WorldObject> {
        if self.in_bounds(x, y) {
            let i = self.index(x, y);
            self.cells[i].take()
        } else {
            None
        }
    }

    /// Whether the cell holds no object at all.
    #[inline]
    pub fn is_empty(&self, x: i32, y: i32) -> bool {
        self.in_bounds(x, y) && self.cells[self.index(x, y)].is_none()
    }

    #[inline]
    pub fn is_opaque(&self, x: i32, y: i32) -> bool {
        self.get(x, y).is_some_and(WorldObject::is_opaque)
    }

    /// Places `obj` at `(x, y)`, replacing any previous occupant.
    pub fn put_object(&mut self, obj: WorldObject, x: i32, y: i32) -> Result<(), GridError> {
        self.set(x, y, Some(obj))
    }

    /// Turns the perimeter of the `w x h` rectangle at `(x, y)` into walls.
    pub fn wall_rect(&mut self, x: i32, y: i32, w: i32, h: i32) -> Result<(), GridError> {
        if w <= 0 || h <= 0 {
            return Err(GridError::OutOfBounds { x, y });
        }
        for (cx, cy) in [(x, y), (x + w - 1, y + h - 1)] {
            if !self.in_bounds(cx, cy) {
                return Err(GridError::OutOfBounds { x: cx, y: cy });
            }
        }
        self.horz_wall(x, y, w);
        self.horz_wall(x, y + h - 1, w);
        self.vert_wall(x, y, h);
        self.vert_wall(x + w - 1, y, h);
        Ok(())
    }

    pub fn horz_wall(&mut self, x: i32, y: i32, len: i32) {
        for i in 0..len {
            let _ = self.put_object(WorldObject::wall(), x + i, y);
        }
    }

    pub fn vert_wall(&mut self, x: i32, y: i32, len: i32) {
        for j in 0..len {
            let _ = self.put_object(WorldObject::wall(), x, y + j);
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = ((i32, i32), Option<&WorldObject>)> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| ((x, y), self.get(x, y))))
    }

    /// The world turned a quarter clockwise, together with the agent.
    pub fn rotated_cw(&self, agent: &AgentState) -> (Grid, AgentState) {
        let mut out = Grid::new(self.height, self.width);
        for ((x, y), obj) in self.cells() {
            let i = out.index(self.height - 1 - y, x);
            out.cells[i] = obj.cloned();
        }
        let (ax, ay) = agent.pos;
        let agent = AgentState { pos: (self.height - 1 - ay, ax), dir: agent.dir.right(), carrying: agent.carrying.clone() };
        (out, agent)
    }
}

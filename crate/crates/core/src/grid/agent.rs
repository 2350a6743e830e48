use serde::{Deserialize, Serialize};

use super::object::WorldObject;

/// Facing direction; the discriminant is the observation's `direction` value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Direction {
    East = 0,
    South = 1,
    West = 2,
    North = 3,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::East, Direction::South, Direction::West, Direction::North];

    pub fn from_index(i: u8) -> Direction {
        Self::ALL[(i % 4) as usize]
    }

    pub fn left(self) -> Direction {
        Self::from_index(self as u8 + 3)
    }

    pub fn right(self) -> Direction {
        Self::from_index(self as u8 + 1)
    }

    /// Unit step in `(x, y)` with `y` growing southwards.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::East => (1, 0),
            Direction::South => (0, 1),
            Direction::West => (-1, 0),
            Direction::North => (0, -1),
        }
    }

    pub fn arrow(self) -> char {
        match self {
            Direction::East => '>',
            Direction::South => 'v',
            Direction::West => '<',
            Direction::North => '^',
        }
    }

    pub fn from_arrow(c: char) -> Option<Direction> {
        Self::ALL.iter().copied().find(|d| d.arrow() == c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum GridAction {
    TurnLeft = 0,
    TurnRight = 1,
    Forward = 2,
    Pickup = 3,
    Drop = 4,
    Toggle = 5,
    Done = 6,
}

pub const GRID_ACTION_NAMES: [&str; 7] =
    ["turn left", "turn right", "move forward", "pickup", "drop", "toggle", "done"];

impl GridAction {
    pub const ALL: [GridAction; 7] = [
        GridAction::TurnLeft,
        GridAction::TurnRight,
        GridAction::Forward,
        GridAction::Pickup,
        GridAction::Drop,
        GridAction::Toggle,
        GridAction::Done,
    ];

    pub fn from_index(i: usize) -> Option<GridAction> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        GRID_ACTION_NAMES[self as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AgentState {
    pub pos: (i32, i32),
    pub dir: Direction,
    pub carrying: Option<WorldObject>,
}

impl AgentState {
    pub fn new(pos: (i32, i32), dir: Direction) -> Self {
        Self { pos, dir, carrying: None }
    }

    pub fn front(&self) -> (i32, i32) {
        let (dx, dy) = self.dir.delta();
        (self.pos.0 + dx, self.pos.1 + dy)
    }
}

use serde::{Deserialize, Serialize};

/// Encoding ids for the first observation channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum ObjectKind {
    Unseen = 0,
    Empty = 1,
    Wall = 2,
    Floor = 3,
    Door = 4,
    Key = 5,
    Ball = 6,
    Box = 7,
    Goal = 8,
    Lava = 9,
    /// Only used by the full-grid encoding to mark the agent.
    Agent = 10,
}

impl ObjectKind {
    pub fn from_id(id: u8) -> Option<Self> {
        use ObjectKind::*;
        Some(match id {
            0 => Unseen,
            1 => Empty,
            2 => Wall,
            3 => Floor,
            4 => Door,
            5 => Key,
            6 => Ball,
            7 => Box,
            8 => Goal,
            9 => Lava,
            10 => Agent,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        use ObjectKind::*;
        match self {
            Unseen => "unseen",
            Empty => "empty",
            Wall => "wall",
            Floor => "floor",
            Door => "door",
            Key => "key",
            Ball => "ball",
            Box => "box",
            Goal => "goal",
            Lava => "lava",
            Agent => "agent",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Color {
    Red = 0,
    Green = 1,
    Blue = 2,
    Purple = 3,
    Yellow = 4,
    Grey = 5,
}

/// The palette in id order.
pub const COLORS: [Color; 6] = [Color::Red, Color::Green, Color::Blue, Color::Purple, Color::Yellow, Color::Grey];

impl Color {
    pub fn from_id(id: u8) -> Option<Self> {
        COLORS.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
            Color::Purple => "purple",
            Color::Yellow => "yellow",
            Color::Grey => "grey",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        COLORS.iter().copied().find(|c| c.name() == name)
    }

    /// Single-letter code used by the text map format.
    pub fn letter(self) -> char {
        match self {
            Color::Red => 'r',
            Color::Green => 'g',
            Color::Blue => 'b',
            Color::Purple => 'p',
            Color::Yellow => 'y',
            Color::Grey => 'e',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        COLORS.iter().copied().find(|col| col.letter() == c)
    }

    pub fn rgb(self) -> [u8; 3] {
        match self {
            Color::Red => [255, 0, 0],
            Color::Green => [0, 255, 0],
            Color::Blue => [0, 0, 255],
            Color::Purple => [112, 39, 195],
            Color::Yellow => [255, 255, 0],
            Color::Grey => [100, 100, 100],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum DoorState {
    Open = 0,
    Closed = 1,
    Locked = 2,
}

impl DoorState {
    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(DoorState::Open),
            1 => Some(DoorState::Closed),
            2 => Some(DoorState::Locked),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            DoorState::Open => 'o',
            DoorState::Closed => 'c',
            DoorState::Locked => 'l',
        }
    }
}

/// An item occupying a grid cell. Only doors carry a state and only boxes
/// carry contents; the constructors are the sole way to build one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WorldObject {
    kind: ObjectKind,
    color: Color,
    state: Option<DoorState>,
    contains: Option<Box<WorldObject>>,
}

impl WorldObject {
    fn plain(kind: ObjectKind, color: Color) -> Self {
        Self { kind, color, state: None, contains: None }
    }

    pub fn wall() -> Self {
        Self::plain(ObjectKind::Wall, Color::Grey)
    }

    pub fn floor(color: Color) -> Self {
        Self::plain(ObjectKind::Floor, color)
    }

    pub fn goal() -> Self {
        Self::plain(ObjectKind::Goal, Color::Green)
    }

    pub fn lava() -> Self {
        Self::plain(ObjectKind::Lava, Color::Red)
    }

    pub fn key(color: Color) -> Self {
        Self::plain(ObjectKind::Key, color)
    }

    pub fn ball(color: Color) -> Self {
        Self::plain(ObjectKind::Ball, color)
    }

    pub fn boxed(color: Color, contents: Option<WorldObject>) -> Self {
        Self { kind: ObjectKind::Box, color, state: None, contains: contents.map(Box::new) }
    }

    pub fn door(color: Color, state: DoorState) -> Self {
        Self { kind: ObjectKind::Door, color, state: Some(state), contains: None }
    }

    /// Builds a contents-free object of the given kind; `None` for kinds that
    /// cannot occupy a cell.
    pub fn of_kind(kind: ObjectKind, color: Color, state: DoorState) -> Option<Self> {
        Some(match kind {
            ObjectKind::Wall => Self::wall(),
            ObjectKind::Floor => Self::floor(color),
            ObjectKind::Door => Self::door(color, state),
            ObjectKind::Key => Self::key(color),
            ObjectKind::Ball => Self::ball(color),
            ObjectKind::Box => Self::boxed(color, None),
            ObjectKind::Goal => Self::goal(),
            ObjectKind::Lava => Self::lava(),
            ObjectKind::Unseen | ObjectKind::Empty | ObjectKind::Agent => return None,
        })
    }

    pub fn kind(&self) -> ObjectKind {
        self.kind
    }

    pub fn color(&self) -> Color {
        self.color
    }

    pub fn door_state(&self) -> Option<DoorState> {
        self.state
    }

    pub fn contents(&self) -> Option<&WorldObject> {
        self.contains.as_deref()
    }

    pub fn into_contents(self) -> Option<WorldObject> {
        self.contains.map(|b| *b)
    }

    pub(crate) fn set_door_state(&mut self, state: DoorState) {
        debug_assert_eq!(self.kind, ObjectKind::Door);
        self.state = Some(state);
    }

    /// Whether the agent may stand on this object's cell.
    pub fn can_overlap(&self) -> bool {
        match self.kind {
            ObjectKind::Floor | ObjectKind::Goal | ObjectKind::Lava => true,
            ObjectKind::Door => self.state == Some(DoorState::Open),
            _ => false,
        }
    }

    pub fn can_pickup(&self) -> bool {
        matches!(self.kind, ObjectKind::Key | ObjectKind::Ball | ObjectKind::Box)
    }

    pub fn is_opaque(&self) -> bool {
        match self.kind {
            ObjectKind::Wall => true,
            ObjectKind::Door => self.state != Some(DoorState::Open),
            _ => false,
        }
    }

    /// `(kind_id, color_id, state_id)`.
    pub fn encode(&self) -> [u8; 3] {
        [self.kind as u8, self.color as u8, self.state.map_or(0, |s| s as u8)]
    }
}

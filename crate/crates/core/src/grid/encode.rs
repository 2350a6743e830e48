use crate::env::ObsArray;

use super::agent::AgentState;
use super::grid::Grid;
use super::object::{Color, DoorState, ObjectKind, WorldObject};
use super::visibility::{view_to_world, visible_mask};

pub const DEFAULT_VIEW_SIZE: i32 = 7;

/// The agent's egocentric, occlusion-masked view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridView {
    pub view_size: i32,
    /// `view_size x view_size x 3` of `(kind_id, color_id, state_id)`, row 0 farthest ahead.
    pub encoding: ObsArray,
    pub visibility: Vec<bool>,
}

impl GridView {
    pub fn is_visible(&self, vx: i32, vy: i32) -> bool {
        self.visibility[(vy * self.view_size + vx) as usize]
    }
}

const UNSEEN: [u8; 3] = [ObjectKind::Unseen as u8, 0, 0];
const EMPTY: [u8; 3] = [ObjectKind::Empty as u8, 0, 0];

fn encode_cell(obj: Option<&WorldObject>) -> [u8; 3] {
    obj.map_or(EMPTY, WorldObject::encode)
}

pub fn encode_view(grid: &Grid, agent: &AgentState, view_size: i32) -> GridView {
    let v = view_size as usize;
    let visibility = visible_mask(grid, agent, view_size);
    let mut encoding = ObsArray::zeros([v, v, 3]);
    let agent_cell = (view_size / 2, view_size - 1);
    for vy in 0..view_size {
        for vx in 0..view_size {
            let code = if !visibility[(vy * view_size + vx) as usize] {
                UNSEEN
            } else if (vx, vy) == agent_cell && agent.carrying.is_some() {
                encode_cell(agent.carrying.as_ref())
            } else {
                let (x, y) = view_to_world(agent, view_size, vx, vy);
                encode_cell(grid.get(x, y))
            };
            for (ch, value) in code.into_iter().enumerate() {
                encoding.set(vy as usize, vx as usize, ch, value);
            }
        }
    }
    GridView { view_size, encoding, visibility }
}

/// Whole-grid encoding in world orientation (`height x width x 3`) with the
/// agent cell marked as `(agent, 0, direction)`.
pub fn encode_full(grid: &Grid, agent: &AgentState) -> ObsArray {
    let (w, h) = (grid.width() as usize, grid.height() as usize);
    let mut out = ObsArray::zeros([h, w, 3]);
    for ((x, y), obj) in grid.cells() {
        let code = if (x, y) == agent.pos {
            [ObjectKind::Agent as u8, 0, agent.dir as u8]
        } else {
            encode_cell(obj)
        };
        for (ch, value) in code.into_iter().enumerate() {
            out.set(y as usize, x as usize, ch, value);
        }
    }
    out
}

/// Inverse of the per-cell encoding, used to draw observations. Returns
/// `Err(kind)` for codes that do not name an object (`unseen`, `empty`, `agent`).
pub fn decode_cell(code: &[u8]) -> Result<WorldObject, ObjectKind> {
    let kind = ObjectKind::from_id(code[0]).unwrap_or(ObjectKind::Unseen);
    let color = Color::from_id(code[1]).unwrap_or(Color::Red);
    let state = DoorState::from_id(code[2]).unwrap_or(DoorState::Open);
    WorldObject::of_kind(kind, color, state).ok_or(kind)
}

//! Plain-text map format used by generation snapshots.
//!
//! One whitespace-separated token per cell, one line per row:
//! `W` wall, `·` empty, `G` goal, `L` lava, `F<c>` floor, `K<c>`/`B<c>`/`O<c>`
//! key/ball/box with a colour letter, `D<s><c>` door with a state letter
//! (`o`/`c`/`l`) and colour letter. The agent is `>`, `v`, `<` or `^`, followed
//! directly by the token of whatever it stands on, if anything. Colour letters:
//! `r g b p y e` (grey). Box contents are not represented.

use super::agent::{AgentState, Direction};
use super::grid::{Grid, GridError};
use super::object::{Color, DoorState, ObjectKind, WorldObject};

fn object_token(obj: Option<&WorldObject>) -> String {
    let Some(o) = obj else { return "·".into() };
    let c = o.color().letter();
    match o.kind() {
        ObjectKind::Wall => "W".into(),
        ObjectKind::Goal => "G".into(),
        ObjectKind::Lava => "L".into(),
        ObjectKind::Floor => format!("F{c}"),
        ObjectKind::Key => format!("K{c}"),
        ObjectKind::Ball => format!("B{c}"),
        ObjectKind::Box => format!("O{c}"),
        ObjectKind::Door => format!("D{}{c}", o.door_state().unwrap_or(DoorState::Closed).letter()),
        ObjectKind::Unseen | ObjectKind::Empty | ObjectKind::Agent => "·".into(),
    }
}

pub fn to_text(grid: &Grid, agent: Option<&AgentState>) -> String {
    let mut out = String::new();
    for y in 0..grid.height() {
        let row: Vec<String> = (0..grid.width())
            .map(|x| {
                let obj = grid.get(x, y);
                match agent.filter(|a| a.pos == (x, y)) {
                    Some(a) if obj.is_some() => format!("{}{}", a.dir.arrow(), object_token(obj)),
                    Some(a) => a.dir.arrow().to_string(),
                    None => object_token(obj),
                }
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn parse_object(tok: &str) -> Result<Option<WorldObject>, GridError> {
    let bad = || GridError::Parse(format!("bad token {tok:?}"));
    let mut chars = tok.chars();
    let head = chars.next().ok_or_else(bad)?;
    let rest: Vec<char> = chars.collect();
    let color = |i: usize| rest.get(i).copied().and_then(Color::from_letter).ok_or_else(bad);
    let obj = match (head, rest.len()) {
        ('·', 0) => return Ok(None),
        ('W', 0) => WorldObject::wall(),
        ('G', 0) => WorldObject::goal(),
        ('L', 0) => WorldObject::lava(),
        ('F', 1) => WorldObject::floor(color(0)?),
        ('K', 1) => WorldObject::key(color(0)?),
        ('B', 1) => WorldObject::ball(color(0)?),
        ('O', 1) => WorldObject::boxed(color(0)?, None),
        ('D', 2) => {
            let state = match rest[0] {
                'o' => DoorState::Open,
                'c' => DoorState::Closed,
                'l' => DoorState::Locked,
                _ => return Err(bad()),
            };
            WorldObject::door(color(1)?, state)
        }
        _ => return Err(bad()),
    };
    Ok(Some(obj))
}

pub fn from_text(text: &str) -> Result<(Grid, Option<AgentState>), GridError> {
    let rows: Vec<Vec<&str>> = text.lines().filter(|l| !l.trim().is_empty()).map(|l| l.split_whitespace().collect()).collect();
    let height = rows.len() as i32;
    let width = rows.first().map_or(0, |r| r.len()) as i32;
    if height == 0 || width == 0 || rows.iter().any(|r| r.len() as i32 != width) {
        return Err(GridError::Parse("rows must be non-empty and equally long".into()));
    }
    let mut grid = Grid::new(width, height);
    let mut agent = None;
    for (y, row) in rows.iter().enumerate() {
        for (x, tok) in row.iter().enumerate() {
            let mut rest = *tok;
            if let Some(dir) = tok.chars().next().and_then(Direction::from_arrow) {
                if agent.is_some() {
                    return Err(GridError::Parse("more than one agent".into()));
                }
                agent = Some(AgentState::new((x as i32, y as i32), dir));
                rest = &tok[1..];
                if rest.is_empty() {
                    continue;
                }
            }
            grid.set(x as i32, y as i32, parse_object(rest)?)?;
        }
    }
    Ok((grid, agent))
}

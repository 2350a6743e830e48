//! The single-step rules written as an explicit lookup over the agent's
//! front cell and hand, independent of the engine's transition code.

use miniverse_core::grid::{Color, DoorState, ObjectKind, WorldObject, COLORS};

/// What the agent touches: the cell in front and the carried object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Local {
    pub front: Option<WorldObject>,
    pub carrying: Option<WorldObject>,
}

/// Expected result of an action on a [`Local`] situation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expected {
    pub local: Local,
    /// Agent moved into the front cell.
    pub moved: bool,
    /// Heading change in quarter turns clockwise.
    pub turn: i32,
}

fn walkable(o: &Option<WorldObject>) -> bool {
    match o {
        None => true,
        Some(o) => match o.kind() {
            ObjectKind::Floor | ObjectKind::Goal | ObjectKind::Lava => true,
            ObjectKind::Door => o.door_state() == Some(DoorState::Open),
            _ => false,
        },
    }
}

fn portable(o: &WorldObject) -> bool {
    matches!(o.kind(), ObjectKind::Key | ObjectKind::Ball | ObjectKind::Box)
}

pub fn expected(local: &Local, action: usize) -> Expected {
    let same = |moved, turn| Expected { local: local.clone(), moved, turn };
    match action {
        0 => same(false, -1),
        1 => same(false, 1),
        2 => same(walkable(&local.front), 0),
        3 => match (&local.front, &local.carrying) {
            (Some(f), None) if portable(f) => {
                Expected { local: Local { front: None, carrying: Some(f.clone()) }, moved: false, turn: 0 }
            }
            _ => same(false, 0),
        },
        4 => match (&local.front, &local.carrying) {
            (None, Some(c)) => Expected { local: Local { front: Some(c.clone()), carrying: None }, moved: false, turn: 0 },
            _ => same(false, 0),
        },
        5 => {
            let Some(f) = &local.front else { return same(false, 0) };
            let front = match (f.kind(), f.door_state()) {
                (ObjectKind::Door, Some(DoorState::Open)) => Some(WorldObject::door(f.color(), DoorState::Closed)),
                (ObjectKind::Door, Some(DoorState::Closed)) => Some(WorldObject::door(f.color(), DoorState::Open)),
                (ObjectKind::Door, Some(DoorState::Locked)) => {
                    let key_matches = local
                        .carrying
                        .as_ref()
                        .is_some_and(|c| c.kind() == ObjectKind::Key && c.color() == f.color());
                    let state = if key_matches { DoorState::Open } else { DoorState::Locked };
                    Some(WorldObject::door(f.color(), state))
                }
                (ObjectKind::Box, _) => f.contents().cloned(),
                _ => Some(f.clone()),
            };
            Expected { local: Local { front, carrying: local.carrying.clone() }, moved: false, turn: 0 }
        }
        _ => same(false, 0),
    }
}

/// Front objects covering every kind, every door state in every colour,
/// and boxes with and without contents.
pub fn front_cases() -> Vec<Option<WorldObject>> {
    let mut v = vec![None, Some(WorldObject::wall()), Some(WorldObject::floor(Color::Blue)), Some(WorldObject::goal()), Some(WorldObject::lava())];
    for c in COLORS {
        for s in [DoorState::Open, DoorState::Closed, DoorState::Locked] {
            v.push(Some(WorldObject::door(c, s)));
        }
    }
    for c in [Color::Red, Color::Purple, Color::Grey] {
        v.push(Some(WorldObject::key(c)));
        v.push(Some(WorldObject::ball(c)));
    }
    for c in [Color::Yellow, Color::Green] {
        v.push(Some(WorldObject::boxed(c, None)));
        v.push(Some(WorldObject::boxed(c, Some(WorldObject::key(Color::Red)))));
        v.push(Some(WorldObject::boxed(c, Some(WorldObject::ball(Color::Blue)))));
    }
    v
}

/// Carried objects: nothing, a key of each colour, a ball and a box.
pub fn carry_cases() -> Vec<Option<WorldObject>> {
    let mut v = vec![None];
    v.extend(COLORS.iter().map(|&c| Some(WorldObject::key(c))));
    v.push(Some(WorldObject::ball(Color::Red)));
    v.push(Some(WorldObject::boxed(Color::Green, None)));
    v
}

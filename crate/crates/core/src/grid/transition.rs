use super::agent::{AgentState, GridAction};
use super::grid::Grid;
use super::object::{DoorState, ObjectKind};

/// Applies one action in place. Actions whose preconditions fail leave the
/// world untouched; the function is total.
pub fn apply_action(grid: &mut Grid, agent: &mut AgentState, action: GridAction) {
    let (fx, fy) = agent.front();
    match action {
        GridAction::TurnLeft => agent.dir = agent.dir.left(),
        GridAction::TurnRight => agent.dir = agent.dir.right(),
        GridAction::Forward => {
            if !grid.in_bounds(fx, fy) {
                return;
            }
            let passable = grid.get(fx, fy).is_none_or(|o| o.can_overlap());
            if passable {
                agent.pos = (fx, fy);
            }
        }
        GridAction::Pickup => {
            if agent.carrying.is_none() && grid.get(fx, fy).is_some_and(|o| o.can_pickup()) {
                agent.carrying = grid.take(fx, fy);
            }
        }
        GridAction::Drop => {
            if agent.carrying.is_some() && grid.is_empty(fx, fy) {
                let obj = agent.carrying.take();
                let _ = grid.set(fx, fy, obj);
            }
        }
        GridAction::Toggle => toggle(grid, agent, (fx, fy)),
        GridAction::Done => {}
    }
}

fn toggle(grid: &mut Grid, agent: &AgentState, (fx, fy): (i32, i32)) {
    let Some(front) = grid.get(fx, fy) else { return };
    match (front.kind(), front.door_state()) {
        (ObjectKind::Door, Some(state)) => {
            let color = front.color();
            let next = match state {
                DoorState::Open => DoorState::Closed,
                DoorState::Closed => DoorState::Open,
                DoorState::Locked => {
                    let has_key = agent.carrying.as_ref().is_some_and(|c| c.kind() == ObjectKind::Key && c.color() == color);
                    if !has_key {
                        return;
                    }
                    DoorState::Open
                }
            };
            if let Some(door) = grid.get_mut(fx, fy) {
                door.set_door_state(next);
            }
        }
        (ObjectKind::Box, _) => {
            let contents = grid.take(fx, fy).and_then(|b| b.into_contents());
            let _ = grid.set(fx, fy, contents);
        }
        _ => {}
    }
}

/// Value-semantics form of [`apply_action`].
pub fn transition(grid: &Grid, agent: &AgentState, action: GridAction) -> (Grid, AgentState) {
    let mut g = grid.clone();
    let mut a = agent.clone();
    apply_action(&mut g, &mut a, action);
    (g, a)
}

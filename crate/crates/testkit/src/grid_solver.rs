//! Breadth-first navigation over (cell, heading) and scripted solutions for
//! the shipped 2D tasks.

use std::collections::{HashMap, VecDeque};

use miniverse_core::grid::{apply_action, AgentState, Grid, GridAction, ObjectKind};
use miniverse_core::grid_envs::{GridGoal, GridWorld};

const TURN_LEFT: usize = 0;
const TURN_RIGHT: usize = 1;
const FORWARD: usize = 2;
const PICKUP: usize = 3;
const DROP: usize = 4;
const TOGGLE: usize = 5;

type State = ((i32, i32), u8);

fn step_vec(dir: u8) -> (i32, i32) {
    [(1, 0), (0, 1), (-1, 0), (0, -1)][dir as usize]
}

/// Cells the agent may walk onto. Lava is avoided.
fn walkable(grid: &Grid, x: i32, y: i32) -> bool {
    if x < 0 || y < 0 || x >= grid.width() || y >= grid.height() {
        return false;
    }
    match grid.get(x, y) {
        None => true,
        Some(o) => match o.kind() {
            ObjectKind::Floor | ObjectKind::Goal => true,
            ObjectKind::Door => o.door_state() == Some(miniverse_core::grid::DoorState::Open),
            _ => false,
        },
    }
}

fn front_of(s: State) -> (i32, i32) {
    let (dx, dy) = step_vec(s.1);
    (s.0 .0 + dx, s.0 .1 + dy)
}

/// Every reachable state with a shortest action sequence to it, in BFS order.
pub fn reachable_states(grid: &Grid, agent: &AgentState) -> Vec<(State, Vec<usize>)> {
    let start: State = (agent.pos, agent.dir as u8);
    let mut prev: HashMap<State, (State, usize)> = HashMap::new();
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    prev.insert(start, (start, usize::MAX));
    while let Some(s) = queue.pop_front() {
        let (fx, fy) = front_of(s);
        let mut next = vec![((s.0, (s.1 + 3) % 4), TURN_LEFT), ((s.0, (s.1 + 1) % 4), TURN_RIGHT)];
        if walkable(grid, fx, fy) {
            next.push((((fx, fy), s.1), FORWARD));
        }
        for (n, a) in next {
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(n) {
                e.insert((s, a));
                order.push(n);
                queue.push_back(n);
            }
        }
    }
    order
        .into_iter()
        .map(|s| {
            let mut path = Vec::new();
            let mut cur = s;
            while cur != start {
                let (p, a) = prev[&cur];
                path.push(a);
                cur = p;
            }
            path.reverse();
            (s, path)
        })
        .collect()
}

/// Shortest action sequence reaching a state accepted by `goal`.
pub fn nav_bfs(grid: &Grid, agent: &AgentState, goal: impl Fn((i32, i32), (i32, i32)) -> bool) -> Option<(State, Vec<usize>)> {
    reachable_states(grid, agent).into_iter().find(|(s, _)| goal(s.0, front_of(*s)))
}

fn play(world: &mut GridWorld, actions: &[usize]) {
    for &a in actions {
        apply_action(&mut world.grid, &mut world.agent, GridAction::from_index(a).expect("grid action"));
    }
}

fn locate(grid: &Grid, pred: impl Fn(&miniverse_core::grid::WorldObject) -> bool) -> Option<(i32, i32)> {
    grid.cells().find_map(|(p, o)| o.filter(|o| pred(o)).map(|_| p))
}

/// Walks somewhere the carried object can go down without cutting off any
/// of `keep_reachable` (cells that must stay faceable), then drops it.
fn drop_safely(world: &mut GridWorld, keep_reachable: &[(i32, i32)], forbid: &[(i32, i32)]) -> Option<Vec<usize>> {
    for (s, path) in reachable_states(&world.grid, &world.agent) {
        let f = front_of(s);
        if !world.grid.in_bounds(f.0, f.1) || world.grid.get(f.0, f.1).is_some() || forbid.contains(&f) || f == s.0 {
            continue;
        }
        let mut trial = world.clone();
        play(&mut trial, &path);
        play(&mut trial, &[DROP]);
        if trial.agent.carrying.is_some() {
            continue;
        }
        let ok = keep_reachable.iter().all(|&c| nav_bfs(&trial.grid, &trial.agent, |_, front| front == c).is_some());
        if ok {
            *world = trial;
            let mut actions = path;
            actions.push(DROP);
            return Some(actions);
        }
    }
    None
}

fn face_and(world: &mut GridWorld, target: (i32, i32), then: usize) -> Option<Vec<usize>> {
    let (_, mut path) = nav_bfs(&world.grid, &world.agent, |_, front| front == target)?;
    path.push(then);
    play(world, &path);
    Some(path)
}

/// Move the ball off the door, take the key, open the door, swap the key
/// for the box.
fn solve_unlock_pickup(start: &GridWorld) -> Option<Vec<usize>> {
    let mut w = start.clone();
    let mut actions = Vec::new();
    let door = locate(&w.grid, |o| o.kind() == ObjectKind::Door)?;
    let approach = (door.0 - 1, door.1);
    let ball = locate(&w.grid, |o| o.kind() == ObjectKind::Ball)?;
    actions.extend(face_and(&mut w, ball, PICKUP)?);
    let key = locate(&w.grid, |o| o.kind() == ObjectKind::Key)?;
    actions.extend(drop_safely(&mut w, &[key, door], &[approach])?);
    actions.extend(face_and(&mut w, key, PICKUP)?);
    actions.extend(face_and(&mut w, door, TOGGLE)?);
    let target = match &w.goal {
        GridGoal::Carry(t) => t.clone(),
        _ => return None,
    };
    let boxed = locate(&w.grid, |o| *o == target)?;
    actions.extend(drop_safely(&mut w, &[boxed], &[])?);
    actions.extend(face_and(&mut w, boxed, PICKUP)?);
    w.check_success().then_some(actions)
}

/// An action sequence that accomplishes the world's mission: BFS-shortest
/// for the navigation goals, scripted for carrying goals.
pub fn solve(world: &GridWorld) -> Option<Vec<usize>> {
    match &world.goal {
        GridGoal::ReachGoal => {
            let goal = locate(&world.grid, |o| o.kind() == ObjectKind::Goal)?;
            nav_bfs(&world.grid, &world.agent, |pos, _| pos == goal).map(|(_, p)| p)
        }
        GridGoal::Face { pos, .. } => nav_bfs(&world.grid, &world.agent, |_, front| front == *pos).map(|(_, p)| p),
        GridGoal::Carry(_) => solve_unlock_pickup(world),
    }
}

//! Continuous-space checks for the 3D world: analytic disc clearance, lattice
//! flood fill, and a waypoint-following pilot that uses only the three
//! navigation actions.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use miniverse_core::world3d::{AgentPose, FloorPlan, Vec2, World3d, NEAR_FACTOR};

const TURN_LEFT: usize = 0;
const TURN_RIGHT: usize = 1;
const FORWARD: usize = 2;
const LATTICE: f64 = 0.1;
const MARGIN: f64 = 0.12;
const AIM_TOLERANCE: f64 = 7.5 * PI / 180.0 + 1e-9;
const WAYPOINT_RADIUS: f64 = 0.25;
const TURN: f64 = 15.0 * PI / 180.0;
const MOVE: f64 = 0.15;

/// Distance from `p` to the closed segment `a`-`b`, by orthogonal
/// projection onto the supporting line.
pub fn point_to_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (ux, uz) = (b.0 - a.0, b.1 - a.1);
    let (wx, wz) = (p.0 - a.0, p.1 - a.1);
    let len2 = ux * ux + uz * uz;
    let s = if len2 > 0.0 { ((wx * ux + wz * uz) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (cx, cz) = (a.0 + s * ux - p.0, a.1 + s * uz - p.1);
    (cx * cx + cz * cz).sqrt()
}

/// Smallest distance from `p` to any wall piece of the plan.
pub fn wall_clearance(plan: &FloorPlan, p: (f64, f64)) -> f64 {
    plan.walls()
        .iter()
        .map(|w| point_to_segment(p, (w.seg.a.x, w.seg.a.z), (w.seg.b.x, w.seg.b.z)))
        .fold(f64::INFINITY, f64::min)
}

fn inside_some_room(plan: &FloorPlan, p: (f64, f64)) -> bool {
    plan.rooms().iter().any(|r| p.0 >= r.min_x && p.0 <= r.max_x && p.1 >= r.min_z && p.1 <= r.max_z)
}

/// Lattice of disc centres with at least `radius + margin` clearance from
/// walls and entities.
pub struct Lattice {
    pub min_x: f64,
    pub min_z: f64,
    pub nx: usize,
    pub nz: usize,
    pub free: Vec<bool>,
}

impl Lattice {
    pub fn new(plan: &FloorPlan, radius: f64, margin: f64) -> Self {
        let (mut min_x, mut max_x, mut min_z, mut max_z) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for r in plan.rooms() {
            min_x = min_x.min(r.min_x);
            max_x = max_x.max(r.max_x);
            min_z = min_z.min(r.min_z);
            max_z = max_z.max(r.max_z);
        }
        let nx = ((max_x - min_x) / LATTICE).round() as usize + 1;
        let nz = ((max_z - min_z) / LATTICE).round() as usize + 1;
        let mut free = vec![false; nx * nz];
        for iz in 0..nz {
            for ix in 0..nx {
                let p = (min_x + ix as f64 * LATTICE, min_z + iz as f64 * LATTICE);
                let clear_entities = plan.entities.iter().all(|e| {
                    let d = ((p.0 - e.x).powi(2) + (p.1 - e.z).powi(2)).sqrt();
                    d >= radius + e.radius + margin
                });
                free[iz * nx + ix] = inside_some_room(plan, p) && wall_clearance(plan, p) >= radius + margin && clear_entities;
            }
        }
        Self { min_x, min_z, nx, nz, free }
    }

    pub fn point(&self, i: usize) -> (f64, f64) {
        (self.min_x + (i % self.nx) as f64 * LATTICE, self.min_z + (i / self.nx) as f64 * LATTICE)
    }

    fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (ix, iz) = ((i % self.nx) as i64, (i / self.nx) as i64);
        [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (1, -1), (-1, 1), (1, 1)].into_iter().filter_map(move |(dx, dz)| {
            let (jx, jz) = (ix + dx, iz + dz);
            let ok = jx >= 0 && jz >= 0 && (jx as usize) < self.nx && (jz as usize) < self.nz;
            ok.then(|| jz as usize * self.nx + jx as usize).filter(|&j| self.free[j])
        })
    }

    /// Breadth-first search from `starts`; returns predecessor links
    /// (`usize::MAX` for unreached nodes, self-links for starts).
    pub fn flood(&self, starts: &[usize]) -> Vec<usize> {
        let mut prev = vec![usize::MAX; self.free.len()];
        let mut queue = VecDeque::new();
        for &s in starts {
            if self.free[s] && prev[s] == usize::MAX {
                prev[s] = s;
                queue.push_back(s);
            }
        }
        while let Some(i) = queue.pop_front() {
            for j in self.neighbours(i) {
                if prev[j] == usize::MAX {
                    prev[j] = i;
                    queue.push_back(j);
                }
            }
        }
        prev
    }

    pub fn nearest_free(&self, p: (f64, f64)) -> Option<usize> {
        (0..self.free.len())
            .filter(|&i| self.free[i])
            .min_by(|&a, &b| dist(self.point(a), p).total_cmp(&dist(self.point(b), p)))
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// For each room, whether a disc of `radius` starting at the centre of room
/// 0 can reach it.
pub fn rooms_reachable(plan: &FloorPlan, radius: f64) -> Vec<bool> {
    let lat = Lattice::new(plan, radius, 0.0);
    let r0 = &plan.rooms()[0];
    let start = lat.nearest_free(((r0.min_x + r0.max_x) / 2.0, (r0.min_z + r0.max_z) / 2.0));
    let prev = lat.flood(&start.into_iter().collect::<Vec<_>>());
    plan.rooms()
        .iter()
        .map(|r| {
            (0..lat.free.len()).any(|i| {
                let p = lat.point(i);
                prev[i] != usize::MAX && p.0 > r.min_x && p.0 < r.max_x && p.1 > r.min_z && p.1 < r.max_z
            })
        })
        .collect()
}

/// Clearance along the straight segment, sampled every 0.05 units.
fn segment_clear(plan: &FloorPlan, a: (f64, f64), b: (f64, f64), radius: f64, skip_entity: Option<u32>) -> bool {
    let n = (dist(a, b) / 0.05).ceil().max(1.0) as usize;
    (0..=n).all(|k| {
        let t = k as f64 / n as f64;
        let p = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
        wall_clearance(plan, p) >= radius
            && plan.entities.iter().filter(|e| Some(e.id) != skip_entity).all(|e| dist(p, (e.x, e.z)) >= radius + e.radius)
    })
}

/// Turn-to-bearing-then-forward controller following a lattice path to the
/// mission target. Replans whenever a forward move is blocked.
#[derive(Default)]
pub struct Pilot {
    waypoints: Vec<(f64, f64)>,
    next: usize,
    last_forward_from: Option<(f64, f64)>,
}

impl Pilot {
    pub fn new() -> Self {
        Self::default()
    }

    fn plan(&mut self, world: &World3d) {
        self.waypoints.clear();
        self.next = 0;
        let Some(target) = world.plan.entity(world.target) else { return };
        let a = world.agent;
        let reach = NEAR_FACTOR * (a.radius + target.radius) - 0.1;
        let here = (a.x, a.z);
        let mut lat = Lattice::new(&world.plan, a.radius, MARGIN);
        let starts: Vec<usize> = (0..lat.free.len())
            .filter(|&i| lat.free[i] && dist(lat.point(i), here) <= 0.6 && segment_clear(&world.plan, here, lat.point(i), a.radius, None))
            .collect();
        if starts.is_empty() {
            lat = Lattice::new(&world.plan, a.radius, 0.0);
        }
        let starts: Vec<usize> = if starts.is_empty() {
            lat.nearest_free(here).into_iter().collect()
        } else {
            starts
        };
        let prev = lat.flood(&starts);
        let goal = (0..lat.free.len())
            .filter(|&i| prev[i] != usize::MAX && dist(lat.point(i), (target.x, target.z)) <= reach)
            .min_by(|&i, &j| {
                let di = dist(lat.point(i), here) + dist(lat.point(i), (target.x, target.z));
                let dj = dist(lat.point(j), here) + dist(lat.point(j), (target.x, target.z));
                di.total_cmp(&dj)
            });
        let Some(mut cur) = goal else { return };
        let mut path = vec![lat.point(cur)];
        while prev[cur] != cur {
            cur = prev[cur];
            path.push(lat.point(cur));
        }
        path.reverse();
        // Shortcut: from each anchor jump to the farthest path node in clear view.
        let mut anchor = here;
        let mut i = 0;
        while i < path.len() {
            let mut far = i;
            for j in (i..path.len()).rev() {
                if segment_clear(&world.plan, anchor, path[j], a.radius + 0.05, None) {
                    far = j;
                    break;
                }
            }
            self.waypoints.push(path[far]);
            anchor = path[far];
            i = far + 1;
        }
    }

    /// Next navigation action (0 turn left, 1 turn right, 2 forward).
    pub fn act(&mut self, world: &World3d) -> usize {
        let a: AgentPose = world.agent;
        let here = (a.x, a.z);
        if let Some(from) = self.last_forward_from.take() {
            if from == here {
                self.plan(world);
            }
        }
        if self.waypoints.is_empty() {
            self.plan(world);
        }
        while self.next + 1 < self.waypoints.len() && dist(here, self.waypoints[self.next]) < WAYPOINT_RADIUS {
            self.next += 1;
        }
        let Some(&wp) = self.waypoints.get(self.next) else { return FORWARD };
        let desired = (-(wp.1 - a.z)).atan2(wp.0 - a.x);
        let wrap = |x: f64| (x + PI).rem_euclid(TAU) - PI;
        // Among the headings reachable by whole turns, take the one closest
        // to the bearing whose forward step stays clear.
        let mut best: Option<(i32, f64)> = None;
        for k in -11..=12 {
            let yaw = a.yaw + k as f64 * TURN;
            let next = (a.x + MOVE * yaw.cos(), a.z - MOVE * yaw.sin());
            let clear = wall_clearance(&world.plan, next) >= a.radius + 1e-9
                && world.plan.entities.iter().all(|e| dist(next, (e.x, e.z)) >= a.radius + e.radius + 1e-9);
            let err = wrap(desired - yaw).abs();
            if clear && best.is_none_or(|(_, e)| err < e - 1e-12) {
                best = Some((k, err));
            }
        }
        match best {
            Some((0, _)) => {
                self.last_forward_from = Some(here);
                FORWARD
            }
            Some((k, _)) if k > 0 => TURN_LEFT,
            Some(_) => TURN_RIGHT,
            None => {
                let err = wrap(desired - a.yaw);
                if err > AIM_TOLERANCE {
                    TURN_LEFT
                } else if err < -AIM_TOLERANCE {
                    TURN_RIGHT
                } else {
                    FORWARD
                }
            }
        }
    }
}

/// The agent disc's clearance from every wall in the plan.
pub fn agent_wall_clearance(plan: &FloorPlan, pose: &AgentPose) -> f64 {
    wall_clearance(plan, (pose.x, pose.z))
}

/// Centre of an entity as a plan point.
pub fn entity_point(world: &World3d, id: u32) -> Option<Vec2> {
    world.plan.entity(id).map(|e| Vec2::new(e.x, e.z))
}

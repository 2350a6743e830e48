//! The shipped 2D tasks and the [`GridEnv`] that runs them.

use std::collections::VecDeque;

use crate::env::{
    DiscreteActionSpace, Env, EnvError, Info, Lifecycle, MissionField, MissionSpec, Observation, ObservationSpec, Pose,
    RenderMode, RewardFn, StepOutcome,
};
use crate::grid::{
    apply_action, compute_reward, encode_view, place_agent, place_object, render_rgb, render_view, view_to_world,
    AgentState, Color, DoorState, Grid, GridAction, ObjectKind, Region, WorldObject, COLORS, DEFAULT_VIEW_SIZE,
    GRID_ACTION_NAMES,
};
use crate::image::RgbImage;
use crate::mission::{MissionVocabulary, TemplateId, OBJ_TYPES};
use crate::rng::{below, label, stream, RngStream};

/// Largest id the grid encoding can produce (the agent marker).
pub const GRID_OBS_MAX: u8 = ObjectKind::Agent as u8;

/// Action names of the three-action navigation variants used in the study.
pub const NAV3_ACTION_NAMES: [&str; 3] = ["turn left", "turn right", "go forward"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridTaskKind {
    Empty,
    GoToObj,
    FourRooms,
    UnlockPickup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridEnvConfig {
    pub env_id: String,
    pub task: GridTaskKind,
    pub width: i32,
    pub height: i32,
    pub view_size: i32,
    pub max_steps: u32,
    /// GoToObj only.
    pub distractors: usize,
    /// Restrict the action space to turn left, turn right, move forward.
    pub nav_only: bool,
    pub tile_px: usize,
}

impl GridEnvConfig {
    fn base(env_id: &str, task: GridTaskKind, width: i32, height: i32) -> Self {
        Self {
            env_id: env_id.into(),
            task,
            width,
            height,
            view_size: DEFAULT_VIEW_SIZE,
            max_steps: (4 * width * height) as u32,
            distractors: 2,
            nav_only: false,
            tile_px: 32,
        }
    }

    pub fn empty(size: i32) -> Self {
        Self::base(&format!("Grid-Empty-{size}x{size}"), GridTaskKind::Empty, size, size)
    }

    pub fn gotoobj(size: i32) -> Self {
        Self::base(&format!("Grid-GoToObj-{size}x{size}"), GridTaskKind::GoToObj, size, size)
    }

    pub fn four_rooms() -> Self {
        Self { max_steps: 100, ..Self::base("Grid-FourRooms", GridTaskKind::FourRooms, 19, 19) }
    }

    pub fn unlock_pickup() -> Self {
        Self::base("Grid-UnlockPickup", GridTaskKind::UnlockPickup, 11, 6)
    }

    pub fn with_nav_only(mut self, env_id: &str) -> Self {
        self.nav_only = true;
        self.env_id = env_id.into();
        self
    }
}

/// What counts as accomplishing the mission.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GridGoal {
    /// Stand on a goal tile.
    ReachGoal,
    /// Stand next to `pos` facing it while it still holds `object`.
    Face { pos: (i32, i32), object: WorldObject },
    /// Hold `object`.
    Carry(WorldObject),
}

/// A generated 2D world: tiles, agent, mission and success predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridWorld {
    pub grid: Grid,
    pub agent: AgentState,
    pub mission: String,
    pub goal: GridGoal,
}

impl GridWorld {
    pub fn check_success(&self) -> bool {
        match &self.goal {
            GridGoal::ReachGoal => {
                let (x, y) = self.agent.pos;
                self.grid.get(x, y).is_some_and(|o| o.kind() == ObjectKind::Goal)
            }
            GridGoal::Face { pos, object } => self.agent.front() == *pos && self.grid.get(pos.0, pos.1) == Some(object),
            GridGoal::Carry(object) => self.agent.carrying.as_ref() == Some(object),
        }
    }

    pub fn on_lava(&self) -> bool {
        let (x, y) = self.agent.pos;
        self.grid.get(x, y).is_some_and(|o| o.kind() == ObjectKind::Lava)
    }
}

fn anywhere(_: &Grid, _: (i32, i32)) -> bool {
    false
}

fn placement_failed(e: crate::grid::GridError) -> ! {
    panic!("world generation could not place an item: {e}")
}

/// Bordered `size x size` room, goal in the bottom-right interior corner,
/// agent anywhere free.
pub fn build_empty(size: i32, rng: &mut RngStream) -> GridWorld {
    assert!(size >= 4, "empty room needs size >= 4");
    let mut grid = Grid::new(size, size);
    grid.wall_rect(0, 0, size, size).expect("border in bounds");
    grid.put_object(WorldObject::goal(), size - 2, size - 2).expect("goal in bounds");
    let agent = place_agent(&grid, rng, Region::whole(&grid), &anywhere).unwrap_or_else(|e| placement_failed(e));
    GridWorld { grid, agent, mission: "get to the green goal square".into(), goal: GridGoal::ReachGoal }
}

/// Cells reachable from `start` by walking, `width * height` row-major.
pub(crate) fn reachable(grid: &Grid, start: (i32, i32)) -> Vec<bool> {
    let w = grid.width();
    let mut seen = vec![false; (w * grid.height()) as usize];
    let mut queue = VecDeque::from([start]);
    seen[(start.1 * w + start.0) as usize] = true;
    while let Some((x, y)) = queue.pop_front() {
        for (dx, dy) in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
            let (nx, ny) = (x + dx, y + dy);
            if !grid.in_bounds(nx, ny) || seen[(ny * w + nx) as usize] {
                continue;
            }
            if grid.get(nx, ny).is_none_or(|o| o.can_overlap()) {
                seen[(ny * w + nx) as usize] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    seen
}

/// One target object and `distractors` others that never share both colour
/// and type with it. Layouts where the agent cannot walk up to the target, or
/// already faces it, are redrawn.
pub fn build_gotoobj(size: i32, distractors: usize, rng: &mut RngStream) -> GridWorld {
    assert!(size >= 6, "go-to-object room needs size >= 6");
    let vocab = MissionVocabulary::default();
    loop {
        let mut grid = Grid::new(size, size);
        grid.wall_rect(0, 0, size, size).expect("border in bounds");
        let mission = vocab.sample_mission(TemplateId::GoTo, rng);
        let target = make_object(mission.obj_type, mission.color);
        let whole = Region::whole(&grid);
        let target_pos = place_object(&mut grid, rng, target.clone(), whole, None, &anywhere).unwrap_or_else(|e| placement_failed(e));
        for _ in 0..distractors {
            let (color, kind) = loop {
                let c = COLORS[below(rng, COLORS.len())];
                let k = OBJ_TYPES[below(rng, OBJ_TYPES.len())];
                if (c, k) != (mission.color, mission.obj_type) {
                    break (c, k);
                }
            };
            place_object(&mut grid, rng, make_object(kind, color), whole, None, &anywhere).unwrap_or_else(|e| placement_failed(e));
        }
        let agent = place_agent(&grid, rng, whole, &anywhere).unwrap_or_else(|e| placement_failed(e));
        let seen = reachable(&grid, agent.pos);
        let approachable = [(1, 0), (0, 1), (-1, 0), (0, -1)].iter().any(|(dx, dy)| {
            let (x, y) = (target_pos.0 + dx, target_pos.1 + dy);
            grid.in_bounds(x, y) && seen[(y * size + x) as usize]
        });
        if approachable && agent.front() != target_pos {
            return GridWorld { grid, agent, mission: mission.text, goal: GridGoal::Face { pos: target_pos, object: target } };
        }
    }
}

fn make_object(kind: ObjectKind, color: Color) -> WorldObject {
    WorldObject::of_kind(kind, color, DoorState::Closed).expect("placeable kind")
}

/// 19x19 grid split into four rooms by walls at column 9 and row 9, one gap
/// per wall segment; goal and agent placed anywhere free.
pub fn build_four_rooms(rng: &mut RngStream) -> GridWorld {
    const SIZE: i32 = 19;
    const ROOM: i32 = SIZE / 2;
    let mut grid = Grid::new(SIZE, SIZE);
    grid.wall_rect(0, 0, SIZE, SIZE).expect("border in bounds");
    for j in 0..2 {
        for i in 0..2 {
            let (left, top) = (i * ROOM, j * ROOM);
            let (right, bottom) = (left + ROOM, top + ROOM);
            if i + 1 < 2 {
                grid.vert_wall(right, top, ROOM);
                let gap = top + 1 + below(rng, (ROOM - 1) as usize) as i32;
                grid.set(right, gap, None).expect("gap in bounds");
            }
            if j + 1 < 2 {
                grid.horz_wall(left, bottom, ROOM);
                let gap = left + 1 + below(rng, (ROOM - 1) as usize) as i32;
                grid.set(gap, bottom, None).expect("gap in bounds");
            }
        }
    }
    let whole = Region::whole(&grid);
    place_object(&mut grid, rng, WorldObject::goal(), whole, None, &anywhere).unwrap_or_else(|e| placement_failed(e));
    let agent = place_agent(&grid, rng, whole, &anywhere).unwrap_or_else(|e| placement_failed(e));
    GridWorld { grid, agent, mission: "reach the goal".into(), goal: GridGoal::ReachGoal }
}

/// Two 4x4 rooms joined by a locked door that a ball blocks from the left.
/// The matching key and the agent start on the left; the box to fetch is on
/// the right.
pub fn build_unlock_pickup(rng: &mut RngStream) -> GridWorld {
    const W: i32 = 11;
    const H: i32 = 6;
    const WALL_X: i32 = 5;
    let vocab = MissionVocabulary::default();
    let mut grid = Grid::new(W, H);
    grid.wall_rect(0, 0, W, H).expect("border in bounds");
    grid.vert_wall(WALL_X, 0, H);
    let door_y = 1 + below(rng, (H - 2) as usize) as i32;
    let door_color = COLORS[below(rng, COLORS.len())];
    grid.put_object(WorldObject::door(door_color, DoorState::Locked), WALL_X, door_y).expect("door in bounds");
    let ball_color = COLORS[below(rng, COLORS.len())];
    grid.put_object(WorldObject::ball(ball_color), WALL_X - 1, door_y).expect("ball in bounds");
    let left = Region::new(1, 1, WALL_X - 1, H - 2);
    let right = Region::new(WALL_X + 1, 1, W - WALL_X - 2, H - 2);
    let box_color = COLORS[below(rng, COLORS.len())];
    let target = WorldObject::boxed(box_color, None);
    place_object(&mut grid, rng, target.clone(), right, None, &anywhere).unwrap_or_else(|e| placement_failed(e));
    place_object(&mut grid, rng, WorldObject::key(door_color), left, None, &anywhere).unwrap_or_else(|e| placement_failed(e));
    let agent = place_agent(&grid, rng, left, &anywhere).unwrap_or_else(|e| placement_failed(e));
    let mission = vocab.mission(TemplateId::PickUp, box_color, ObjectKind::Box).text;
    GridWorld { grid, agent, mission, goal: GridGoal::Carry(target) }
}

/// Generates the configured task's world from `seed`.
pub fn generate(config: &GridEnvConfig, seed: u64) -> GridWorld {
    let mut rng = stream(seed, label::WORLD);
    match config.task {
        GridTaskKind::Empty => build_empty(config.width, &mut rng),
        GridTaskKind::GoToObj => build_gotoobj(config.width, config.distractors, &mut rng),
        GridTaskKind::FourRooms => build_four_rooms(&mut rng),
        GridTaskKind::UnlockPickup => build_unlock_pickup(&mut rng),
    }
}

/// A 2D task behind the common [`Env`] contract.
#[derive(Clone)]
pub struct GridEnv {
    config: GridEnvConfig,
    space: DiscreteActionSpace,
    world: Option<GridWorld>,
    lifecycle: Lifecycle,
    reward_fn: RewardFn,
}

impl GridEnv {
    pub fn new(config: GridEnvConfig) -> Self {
        let names: &[&str] = if config.nav_only { &NAV3_ACTION_NAMES } else { &GRID_ACTION_NAMES };
        let space = DiscreteActionSpace::new(names.iter().copied()).expect("valid grid action space");
        let lifecycle = Lifecycle::new(config.max_steps);
        Self { config, space, world: None, lifecycle, reward_fn: compute_reward }
    }

    /// Replaces the success reward rule.
    pub fn with_reward(mut self, reward_fn: RewardFn) -> Self {
        self.reward_fn = reward_fn;
        self
    }

    pub fn config(&self) -> &GridEnvConfig {
        &self.config
    }

    pub fn world(&self) -> Option<&GridWorld> {
        self.world.as_ref()
    }

    pub fn view_size(&self) -> i32 {
        self.config.view_size
    }

    fn observe(&self) -> Observation {
        let world = self.world.as_ref().expect("observe after reset");
        let view = encode_view(&world.grid, &world.agent, self.config.view_size);
        Observation {
            image: view.encoding,
            direction: Some(world.agent.dir as u8),
            mission: Some(MissionField::Text(world.mission.clone())),
        }
    }

    /// World-space `width * height` mask of the cells the agent currently sees.
    pub fn visible_world_mask(&self) -> Option<Vec<bool>> {
        let world = self.world.as_ref()?;
        let g = &world.grid;
        let v = self.config.view_size;
        let view = crate::grid::visible_mask(g, &world.agent, v);
        let mut mask = vec![false; (g.width() * g.height()) as usize];
        for vy in 0..v {
            for vx in 0..v {
                let (x, y) = view_to_world(&world.agent, v, vx, vy);
                if view[(vy * v + vx) as usize] && g.in_bounds(x, y) {
                    mask[(y * g.width() + x) as usize] = true;
                }
            }
        }
        Some(mask)
    }

    fn mission_template(&self) -> Option<TemplateId> {
        match self.config.task {
            GridTaskKind::GoToObj => Some(TemplateId::GoTo),
            GridTaskKind::UnlockPickup => Some(TemplateId::PickUp),
            GridTaskKind::Empty | GridTaskKind::FourRooms => None,
        }
    }
}

impl Env for GridEnv {
    fn env_id(&self) -> &str {
        &self.config.env_id
    }

    fn action_space(&self) -> &DiscreteActionSpace {
        &self.space
    }

    fn observation_spec(&self) -> ObservationSpec {
        let v = self.config.view_size as usize;
        ObservationSpec {
            image_shape: [v, v, 3],
            image_max: GRID_OBS_MAX,
            has_direction: true,
            mission: Some(MissionSpec::Text { template: self.mission_template() }),
        }
    }

    fn reset(&mut self, seed: Option<u64>) -> (Observation, Info) {
        let seed = self.lifecycle.begin(seed);
        self.world = Some(generate(&self.config, seed));
        (self.observe(), self.lifecycle.info())
    }

    fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        self.lifecycle.check_step(&self.space, action)?;
        let world = self.world.as_mut().expect("reset before step");
        let act = GridAction::from_index(action).expect("action within grid table");
        apply_action(&mut world.grid, &mut world.agent, act);
        let success = world.check_success();
        let failed = !success && world.on_lava();
        let (reward, terminated, truncated) = self.lifecycle.settle(success, failed, self.reward_fn);
        let mut info = self.lifecycle.info();
        info.executed_action = Some(action);
        Ok(StepOutcome { observation: self.observe(), reward, terminated, truncated, info })
    }

    fn render_frame(&self, mode: RenderMode) -> Result<RgbImage, EnvError> {
        let world = self.world.as_ref().ok_or(EnvError::NotReset)?;
        Ok(match mode {
            RenderMode::TopDown => {
                let mask = self.visible_world_mask().expect("world present");
                render_rgb(&world.grid, Some(&world.agent), self.config.tile_px, Some(&mask))
            }
            RenderMode::AgentView => {
                let view = encode_view(&world.grid, &world.agent, self.config.view_size);
                render_view(&view, self.config.tile_px)
            }
        })
    }

    fn pose(&self) -> Option<Pose> {
        let a = &self.world.as_ref()?.agent;
        Some(Pose::Grid { x: a.pos.0, y: a.pos.1, dir: a.dir as u8 })
    }

    fn mission(&self) -> Option<&str> {
        self.world.as_ref().map(|w| w.mission.as_str())
    }

    fn max_steps(&self) -> u32 {
        self.config.max_steps
    }

    fn as_grid(&self) -> Option<&GridEnv> {
        Some(self)
    }
}

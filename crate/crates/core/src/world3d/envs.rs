use std::collections::VecDeque;

use super::entity::{place_agent3d, place_entity, Entity3D, EntityKind, EntitySpec};
use super::geometry::Vec2;
use super::kinematics::{step_kinematics, Action3D, AgentPose, ACTION3D_NAMES, NEAR_FACTOR, PICKUP_HALF_ANGLE};
use super::plan::FloorPlan;
use super::render::{render_first_person, Camera};
use super::topdown::{render_topdown3d, DEFAULT_PX_PER_UNIT};
use crate::env::{
    DiscreteActionSpace, Env, EnvError, Info, Lifecycle, MissionField, MissionSpec, Observation, ObsArray,
    ObservationSpec, Pose, RenderMode, RewardFn, StepOutcome,
};
use crate::grid::{compute_reward, Color, COLORS};
use crate::grid_envs::NAV3_ACTION_NAMES;
use crate::image::RgbImage;
use crate::mission::{MissionVocabulary, TemplateId, OBJ_TYPES};
use crate::rng::{below, label, stream, RngStream};

const REACH_STEP: f64 = 0.1;
const DROP_GAP: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum World3dTask {
    GoToObj,
    FourRooms,
}

#[derive(Clone, Debug, PartialEq)]
pub struct World3dConfig {
    pub env_id: String,
    pub task: World3dTask,
    pub max_steps: u32,
    pub camera: Camera,
    pub nav_only: bool,
    /// GoToObj only.
    pub distractors: usize,
    /// GoToObj only: side length of the square room.
    pub room_size: f64,
}

impl World3dConfig {
    pub fn gotoobj() -> Self {
        Self {
            env_id: "World3D-GoToObj".into(),
            task: World3dTask::GoToObj,
            max_steps: 200,
            camera: Camera::default(),
            nav_only: false,
            distractors: 2,
            room_size: 10.0,
        }
    }

    pub fn four_rooms() -> Self {
        Self { env_id: "World3D-FourRooms".into(), task: World3dTask::FourRooms, max_steps: 250, ..Self::gotoobj() }
    }

    pub fn with_nav_only(mut self, env_id: &str) -> Self {
        self.nav_only = true;
        self.env_id = env_id.into();
        self
    }
}

/// A generated 3D world. The mission is to get near the entity `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct World3d {
    pub plan: FloorPlan,
    pub agent: AgentPose,
    pub carrying: Option<Entity3D>,
    pub mission: String,
    pub target: u32,
}

impl World3d {
    /// Whether the agent and the entity are within the proximity threshold.
    pub fn near(&self, e: &Entity3D) -> bool {
        self.agent.pos().dist(e.pos()) <= NEAR_FACTOR * (self.agent.radius + e.radius)
    }

    pub fn check_success(&self) -> bool {
        self.plan.entity(self.target).is_some_and(|e| self.near(e))
    }

    pub fn apply_action(&mut self, action: Action3D) {
        match action {
            Action3D::Pickup => {
                if self.carrying.is_some() {
                    return;
                }
                let (pos, fwd) = (self.agent.pos(), self.agent.heading());
                let best = self
                    .plan
                    .entities
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| {
                        let rel = e.pos() - pos;
                        let angle = fwd.cross(rel).atan2(fwd.dot(rel)).abs();
                        self.near(e) && angle <= PICKUP_HALF_ANGLE
                    })
                    .min_by(|a, b| pos.dist(a.1.pos()).total_cmp(&pos.dist(b.1.pos())).then(a.1.id.cmp(&b.1.id)))
                    .map(|(i, _)| i);
                if let Some(i) = best {
                    self.carrying = Some(self.plan.entities.remove(i));
                }
            }
            Action3D::Drop => {
                let Some(mut e) = self.carrying else { return };
                let at = self.agent.pos() + self.agent.heading() * (self.agent.radius + e.radius + DROP_GAP);
                if self.plan.room_at(at).is_some() && !self.plan.disc_collides(at, e.radius, None) {
                    e.x = at.x;
                    e.z = at.z;
                    self.plan.entities.push(e);
                    self.carrying = None;
                }
            }
            _ => self.agent = step_kinematics(&self.plan, &self.agent, action),
        }
    }
}

/// Whether the agent can walk to within reach of `target`, judged on a
/// 0.1-unit lattice of collision-free disc centres.
fn target_reachable(plan: &FloorPlan, agent: &AgentPose, target: &Entity3D) -> bool {
    let (min_x, max_x, min_z, max_z) = plan.bounds();
    let nx = ((max_x - min_x) / REACH_STEP) as usize + 1;
    let nz = ((max_z - min_z) / REACH_STEP) as usize + 1;
    let point = |ix: usize, iz: usize| Vec2::new(min_x + ix as f64 * REACH_STEP, min_z + iz as f64 * REACH_STEP);
    let free: Vec<bool> = (0..nz)
        .flat_map(|iz| (0..nx).map(move |ix| (ix, iz)))
        .map(|(ix, iz)| {
            let p = point(ix, iz);
            plan.room_at(p).is_some() && !plan.disc_collides(p, agent.radius, None)
        })
        .collect();
    let reach = NEAR_FACTOR * (agent.radius + target.radius);
    let mut seen = vec![false; free.len()];
    let mut queue = VecDeque::new();
    for iz in 0..nz {
        for ix in 0..nx {
            let i = iz * nx + ix;
            if free[i] && point(ix, iz).dist(agent.pos()) <= 1.5 * REACH_STEP {
                seen[i] = true;
                queue.push_back((ix, iz));
            }
        }
    }
    while let Some((ix, iz)) = queue.pop_front() {
        if point(ix, iz).dist(target.pos()) < reach {
            return true;
        }
        let nbrs = [(ix.wrapping_sub(1), iz), (ix + 1, iz), (ix, iz.wrapping_sub(1)), (ix, iz + 1)];
        for (jx, jz) in nbrs {
            if jx < nx && jz < nz && free[jz * nx + jx] && !seen[jz * nx + jx] {
                seen[jz * nx + jx] = true;
                queue.push_back((jx, jz));
            }
        }
    }
    false
}

fn generation_failed(e: impl std::fmt::Display) -> ! {
    panic!("world generation could not place an item: {e}")
}

/// Agent placement that does not start the episode already at the target.
fn place_agent_away(plan: &FloorPlan, rng: &mut RngStream, target: &Entity3D) -> AgentPose {
    loop {
        let agent = place_agent3d(plan, rng, None).unwrap_or_else(|e| generation_failed(e));
        if agent.pos().dist(target.pos()) > NEAR_FACTOR * (agent.radius + target.radius) {
            return agent;
        }
    }
}

/// One square room holding a target entity and distractors that never
/// share both colour and type with it. Layouts where the target cannot be
/// reached are redrawn.
pub fn build_gotoobj3d(rng: &mut RngStream, size: f64, distractors: usize) -> World3d {
    let vocab = MissionVocabulary::default();
    loop {
        let mut plan = FloorPlan::new();
        plan.add_rect_room(0.0, size, 0.0, size).expect("valid room");
        let mission = vocab.sample_mission(TemplateId::GoTo, rng);
        let kind = EntityKind::from_object_kind(mission.obj_type).expect("mission names an entity type");
        let spec = EntitySpec { kind, color: mission.color };
        let target = place_entity(&mut plan, rng, spec, None, None).unwrap_or_else(|e| generation_failed(e));
        for _ in 0..distractors {
            let (color, obj) = loop {
                let c = COLORS[below(rng, COLORS.len())];
                let k = OBJ_TYPES[below(rng, OBJ_TYPES.len())];
                if (c, k) != (mission.color, mission.obj_type) {
                    break (c, k);
                }
            };
            let spec = EntitySpec { kind: EntityKind::from_object_kind(obj).expect("entity type"), color };
            place_entity(&mut plan, rng, spec, None, None).unwrap_or_else(|e| generation_failed(e));
        }
        let agent = place_agent_away(&plan, rng, &target);
        if target_reachable(&plan, &agent, &target) {
            return World3d { plan, agent, carrying: None, mission: mission.text, target: target.id };
        }
    }
}

/// Side length of each FourRooms3D room.
pub const FOUR_ROOMS_ROOM: f64 = 6.0;

/// Four 6x6 rooms in a 2x2 layout, each adjacent pair joined by a portal of
/// width 2 centred on the shared edge; a green box to reach.
pub fn build_four_rooms3d(rng: &mut RngStream) -> World3d {
    const S: f64 = FOUR_ROOMS_ROOM;
    let mut plan = FloorPlan::new();
    let walls = [Color::Blue, Color::Purple, Color::Yellow, Color::Red];
    for j in 0..2 {
        for i in 0..2 {
            let (x0, z0) = (i as f64 * S, j as f64 * S);
            let room = plan.add_rect_room(x0, x0 + S, z0, z0 + S).expect("valid room");
            plan.set_room_colors(room, walls[room], Color::Grey, Color::Grey);
        }
    }
    let mid = S / 2.0;
    for (a, b, centre) in [(0, 1, mid), (2, 3, S + mid), (0, 2, mid), (1, 3, S + mid)] {
        plan.connect_rooms(a, b, (centre - 1.0, centre + 1.0)).expect("rooms share an edge");
    }
    let spec = EntitySpec { kind: EntityKind::Box, color: Color::Green };
    let target = place_entity(&mut plan, rng, spec, None, None).unwrap_or_else(|e| generation_failed(e));
    let agent = place_agent_away(&plan, rng, &target);
    let mission = MissionVocabulary::default().mission(TemplateId::GoTo, Color::Green, EntityKind::Box.object_kind());
    World3d { plan, agent, carrying: None, mission: mission.text, target: target.id }
}

pub fn generate(config: &World3dConfig, seed: u64) -> World3d {
    let mut rng = stream(seed, label::WORLD);
    match config.task {
        World3dTask::GoToObj => build_gotoobj3d(&mut rng, config.room_size, config.distractors),
        World3dTask::FourRooms => build_four_rooms3d(&mut rng),
    }
}

/// A 3D task behind the common [`Env`] contract.
#[derive(Clone)]
pub struct World3dEnv {
    config: World3dConfig,
    space: DiscreteActionSpace,
    world: Option<World3d>,
    lifecycle: Lifecycle,
    reward_fn: RewardFn,
}

impl World3dEnv {
    pub fn new(config: World3dConfig) -> Self {
        let names: &[&str] = if config.nav_only { &NAV3_ACTION_NAMES } else { &ACTION3D_NAMES };
        let space = DiscreteActionSpace::new(names.iter().copied()).expect("valid 3D action space");
        let lifecycle = Lifecycle::new(config.max_steps);
        Self { config, space, world: None, lifecycle, reward_fn: compute_reward }
    }

    pub fn with_reward(mut self, reward_fn: RewardFn) -> Self {
        self.reward_fn = reward_fn;
        self
    }

    pub fn config(&self) -> &World3dConfig {
        &self.config
    }

    pub fn world(&self) -> Option<&World3d> {
        self.world.as_ref()
    }

    pub fn camera(&self) -> Camera {
        self.config.camera
    }

    /// Re-parameterises the observation camera; takes effect from the next
    /// observation.
    pub fn set_obs_dims(&mut self, width: usize, height: usize) -> Result<(), EnvError> {
        if width == 0 || height == 0 {
            return Err(EnvError::InvalidDims { width, height });
        }
        self.config.camera.width = width;
        self.config.camera.height = height;
        Ok(())
    }

    fn first_person(&self) -> RgbImage {
        let w = self.world.as_ref().expect("render after reset");
        render_first_person(&w.plan, &w.agent, &self.config.camera)
    }

    fn observe(&self) -> Observation {
        let w = self.world.as_ref().expect("observe after reset");
        Observation {
            image: ObsArray::from(self.first_person()),
            direction: None,
            mission: Some(MissionField::Text(w.mission.clone())),
        }
    }
}

impl Env for World3dEnv {
    fn env_id(&self) -> &str {
        &self.config.env_id
    }

    fn action_space(&self) -> &DiscreteActionSpace {
        &self.space
    }

    fn observation_spec(&self) -> ObservationSpec {
        let c = self.config.camera;
        ObservationSpec {
            image_shape: [c.height, c.width, 3],
            image_max: 255,
            has_direction: false,
            mission: Some(MissionSpec::Text { template: Some(TemplateId::GoTo) }),
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
        world.apply_action(Action3D::from_index(action).expect("action within 3D table"));
        let success = world.check_success();
        let (reward, terminated, truncated) = self.lifecycle.settle(success, false, self.reward_fn);
        let mut info = self.lifecycle.info();
        info.executed_action = Some(action);
        Ok(StepOutcome { observation: self.observe(), reward, terminated, truncated, info })
    }

    fn render_frame(&self, mode: RenderMode) -> Result<RgbImage, EnvError> {
        let w = self.world.as_ref().ok_or(EnvError::NotReset)?;
        Ok(match mode {
            RenderMode::TopDown => render_topdown3d(&w.plan, Some(&w.agent), DEFAULT_PX_PER_UNIT),
            RenderMode::AgentView => self.first_person(),
        })
    }

    fn pose(&self) -> Option<Pose> {
        let a = &self.world.as_ref()?.agent;
        Some(Pose::World { x: a.x, z: a.z, yaw: a.yaw })
    }

    fn mission(&self) -> Option<&str> {
        self.world.as_ref().map(|w| w.mission.as_str())
    }

    fn max_steps(&self) -> u32 {
        self.config.max_steps
    }

    fn as_world3d(&self) -> Option<&World3dEnv> {
        Some(self)
    }

    fn as_world3d_mut(&mut self) -> Option<&mut World3dEnv> {
        Some(self)
    }
}

//! Whole-suite checks with pass/fail summaries, shared by the integration
//! tests and the acceptance harness.

use miniverse_core::grid::{apply_action, visible_mask, AgentState, Color, Direction, Grid, GridAction, WorldObject};
use miniverse_core::grid_envs::{generate as generate_grid, GridEnvConfig};
use miniverse_core::metrics::{area_under_curve, replay_verify, transfer_improvement, EpisodeLog, Recorder, RewardCurve};
use miniverse_core::mission::{MissionVocabulary, TemplateId, ONE_HOT_LEN};
use miniverse_core::rng::{below, label, stream};
use miniverse_core::world3d::{
    generate_world3d, render_first_person, Action3D, AgentPose, Camera, Entity3D, EntityKind, FloorPlan, World3dConfig,
};
use miniverse_core::wrappers::ResizeObservation;
use miniverse_core::{make, Env};

use crate::{grid_solver, los, nav3d, ray_oracle, transition_table};

pub type CheckResult = Result<String, String>;

/// Every (front object, carried object, action) combination against the
/// lookup table.
pub fn transition_oracle() -> CheckResult {
    let mut cases = 0;
    for front in transition_table::front_cases() {
        for carrying in transition_table::carry_cases() {
            for action in 0..7 {
                let mut grid = Grid::new(5, 5);
                grid.set(3, 2, front.clone()).map_err(|e| e.to_string())?;
                let mut agent = AgentState::new((2, 2), Direction::East);
                agent.carrying = carrying.clone();
                let local = transition_table::Local { front: front.clone(), carrying: carrying.clone() };
                let want = transition_table::expected(&local, action);
                apply_action(&mut grid, &mut agent, GridAction::from_index(action).expect("grid action"));
                let moved = agent.pos == (3, 2);
                let turn = (agent.dir as i32 - Direction::East as i32 + 4) % 4;
                let want_turn = (want.turn + 4) % 4;
                let got = transition_table::Local { front: grid.get(3, 2).cloned(), carrying: agent.carrying.clone() };
                let others_untouched = grid.cells().all(|(p, o)| p == (3, 2) || o.is_none());
                if got != want.local || moved != want.moved || turn != want_turn || !others_untouched {
                    return Err(format!(
                        "front {front:?} carrying {carrying:?} action {action}: got {got:?} moved={moved} turn={turn}, want {want:?}"
                    ));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases"))
}

fn compare_masks(grid: &Grid, agent: &AgentState) -> Result<(), String> {
    let got = visible_mask(grid, agent, 7);
    let want = los::mask(grid, agent, 7);
    if got == want {
        Ok(())
    } else {
        Err(format!("mask mismatch at agent {:?} {:?} in grid {:?}", agent.pos, agent.dir, grid))
    }
}

/// `samples` random 9x9 grids with up to four walls, then every 5x5 grid
/// with up to three walls from every free cell and heading.
pub fn visibility_oracle(samples: usize, seed: u64) -> CheckResult {
    let mut rng = stream(seed, label::ROLLOUT);
    for _ in 0..samples {
        let mut grid = Grid::new(9, 9);
        let pos = (below(&mut rng, 9) as i32, below(&mut rng, 9) as i32);
        let n_walls = below(&mut rng, 5);
        let mut placed = 0;
        while placed < n_walls {
            let c = (below(&mut rng, 9) as i32, below(&mut rng, 9) as i32);
            if c != pos && grid.get(c.0, c.1).is_none() {
                grid.put_object(WorldObject::wall(), c.0, c.1).map_err(|e| e.to_string())?;
                placed += 1;
            }
        }
        let agent = AgentState::new(pos, Direction::from_index(below(&mut rng, 4) as u8));
        compare_masks(&grid, &agent)?;
    }
    let mut exhaustive = 0usize;
    let cells: Vec<(i32, i32)> = (0..25).map(|i| (i % 5, i / 5)).collect();
    let mut subsets: Vec<Vec<usize>> = vec![vec![]];
    for a in 0..25 {
        subsets.push(vec![a]);
        for b in a + 1..25 {
            subsets.push(vec![a, b]);
            for c in b + 1..25 {
                subsets.push(vec![a, b, c]);
            }
        }
    }
    for walls in &subsets {
        let mut grid = Grid::new(5, 5);
        for &w in walls {
            grid.put_object(WorldObject::wall(), cells[w].0, cells[w].1).map_err(|e| e.to_string())?;
        }
        for (i, &pos) in cells.iter().enumerate() {
            if walls.contains(&i) {
                continue;
            }
            for d in 0..4 {
                compare_masks(&grid, &AgentState::new(pos, Direction::from_index(d)))?;
                exhaustive += 1;
            }
        }
    }
    Ok(format!("{samples} sampled + {exhaustive} exhaustive configurations"))
}

/// Runs the oracle solution for `seeds` worlds of a 2D env and returns the
/// final rewards.
pub fn grid_solutions(env_id: &str, seeds: std::ops::Range<u64>) -> Result<Vec<f64>, String> {
    let mut env = make(env_id).map_err(|e| e.to_string())?;
    let config: GridEnvConfig = env.as_grid().ok_or("not a grid env")?.config().clone();
    let mut rewards = Vec::new();
    for seed in seeds {
        let world = generate_grid(&config, seed);
        let plan = grid_solver::solve(&world).ok_or(format!("{env_id} seed {seed}: oracle found no solution"))?;
        env.reset(Some(seed));
        if env.as_grid().and_then(|g| g.world()) != Some(&world) {
            return Err(format!("{env_id} seed {seed}: reset differs from generate"));
        }
        let mut last = None;
        for &a in &plan {
            let out = env.step(a).map_err(|e| e.to_string())?;
            let done = out.terminated || out.truncated;
            last = Some(out);
            if done {
                break;
            }
        }
        match last {
            Some(o) if o.terminated && o.info.success && o.reward > 0.0 => rewards.push(o.reward),
            _ => return Err(format!("{env_id} seed {seed}: plan of {} actions did not succeed", plan.len())),
        }
    }
    Ok(rewards)
}

/// Drives a 3D env with the bearing controller.
pub fn world3d_solutions(env_id: &str, seeds: std::ops::Range<u64>) -> Result<Vec<u32>, String> {
    let mut env = make(env_id).map_err(|e| e.to_string())?;
    let mut lengths = Vec::new();
    for seed in seeds {
        env.reset(Some(seed));
        let mut pilot = nav3d::Pilot::new();
        loop {
            let world = env.as_world3d().and_then(|w| w.world()).ok_or("not a 3D env")?;
            let a = pilot.act(world);
            let out = env.step(a).map_err(|e| e.to_string())?;
            if out.terminated && out.info.success {
                lengths.push(out.info.step_count);
                break;
            }
            if out.terminated || out.truncated {
                return Err(format!("{env_id} seed {seed}: controller did not reach the target"));
            }
        }
    }
    Ok(lengths)
}

pub fn solvability(env_id: &str, n_seeds: u64) -> CheckResult {
    if env_id.starts_with("World3D") {
        let lens = world3d_solutions(env_id, 0..n_seeds)?;
        let max = lens.iter().max().copied().unwrap_or(0);
        Ok(format!("{n_seeds} seeds, longest {max} steps"))
    } else {
        let rewards = grid_solutions(env_id, 0..n_seeds)?;
        let min = rewards.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(format!("{n_seeds} seeds, min reward {min:.3}"))
    }
}

/// Mean reward of shortest-path play on Grid-FourRooms.
pub fn reward_scale(n_seeds: u64) -> Result<f64, String> {
    let r = grid_solutions("Grid-FourRooms", 0..n_seeds)?;
    Ok(r.iter().sum::<f64>() / r.len() as f64)
}

/// Random action sequences in FourRooms3D; returns the worst penetration
/// of the agent disc into any wall.
pub fn collision_fuzz(sequences: usize, len: usize) -> Result<f64, String> {
    let config = World3dConfig::four_rooms();
    let mut rng = stream(7, label::ROLLOUT);
    let worlds: Vec<_> = (0..64).map(|seed| generate_world3d(&config, seed)).collect();
    let mut worst: f64 = 0.0;
    for s in 0..sequences {
        let mut world = worlds[s % 64].clone();
        for _ in 0..len {
            let a = Action3D::from_index(below(&mut rng, 8)).expect("3D action");
            world.apply_action(a);
            let pen = world.agent.radius - nav3d::agent_wall_clearance(&world.plan, &world.agent);
            worst = worst.max(pen);
        }
    }
    Ok(worst)
}

fn box_at(id: u32, x: f64, z: f64, color: Color) -> Entity3D {
    let (radius, height) = EntityKind::Box.dims();
    Entity3D { id, kind: EntityKind::Box, color, x, z, radius, height }
}

/// Five hand-built box-only scenes with their viewpoints.
pub fn renderer_scenes() -> Vec<(&'static str, FloorPlan, AgentPose)> {
    let mut scenes = Vec::new();

    let mut p = FloorPlan::new();
    p.add_rect_room(0.0, 8.0, 0.0, 8.0).unwrap();
    p.set_room_colors(0, Color::Blue, Color::Grey, Color::Yellow);
    scenes.push(("empty room, oblique", p, AgentPose::new(2.3, 5.7, 0.61)));

    let mut p = FloorPlan::new();
    p.add_rect_room(0.0, 10.0, 0.0, 6.0).unwrap();
    p.entities.push(box_at(0, 6.0, 3.2, Color::Red));
    p.entities.push(box_at(1, 8.0, 2.1, Color::Green));
    scenes.push(("two boxes, near occludes far", p, AgentPose::new(1.5, 3.0, 0.05)));

    let mut p = FloorPlan::new();
    p.add_rect_room(0.0, 6.0, 0.0, 6.0).unwrap();
    p.add_rect_room(6.0, 12.0, 0.0, 6.0).unwrap();
    p.set_room_colors(1, Color::Purple, Color::Green, Color::Blue);
    p.connect_rooms(0, 1, (2.0, 4.0)).unwrap();
    p.entities.push(box_at(0, 9.0, 3.0, Color::Yellow));
    scenes.push(("portal into second room", p, AgentPose::new(2.0, 3.3, -0.1)));

    let mut p = FloorPlan::new();
    p.add_rect_room(0.0, 6.0, 0.0, 6.0).unwrap();
    p.add_rect_room(6.0, 12.0, 0.0, 6.0).unwrap();
    p.connect_rooms(0, 1, (4.0, 5.5)).unwrap();
    p.entities.push(box_at(0, 9.0, 2.0, Color::Red));
    scenes.push(("box hidden behind wall", p, AgentPose::new(3.0, 2.0, 0.0)));

    let mut p = FloorPlan::new();
    for j in 0..2 {
        for i in 0..2 {
            let (x0, z0) = (i as f64 * 5.0, j as f64 * 5.0);
            let r = p.add_rect_room(x0, x0 + 5.0, z0, z0 + 5.0).unwrap();
            p.set_room_colors(r, [Color::Blue, Color::Purple, Color::Yellow, Color::Red][r], Color::Grey, Color::Grey);
        }
    }
    for (a, b, c) in [(0, 1, 2.5), (2, 3, 7.5), (0, 2, 2.5), (1, 3, 7.5)] {
        p.connect_rooms(a, b, (c - 1.0, c + 1.0)).unwrap();
    }
    p.entities.push(box_at(0, 6.5, 4.0, Color::Green));
    p.entities.push(box_at(1, 3.0, 7.0, Color::Grey));
    scenes.push(("four rooms, diagonal view", p, AgentPose::new(1.2, 1.4, -0.8)));
    scenes
}

/// Pixel-exact comparison of the renderer with the ray oracle.
pub fn renderer_oracle() -> CheckResult {
    let cam = Camera::default();
    for (name, plan, pose) in renderer_scenes() {
        let got = render_first_person(&plan, &pose, &cam);
        let want = ray_oracle::expected_image(&plan, &pose, &cam);
        for (r, row) in want.iter().enumerate() {
            for (c, px) in row.iter().enumerate() {
                if got.get(c, r) != *px {
                    return Err(format!("{name}: pixel ({c},{r}) is {:?}, oracle {:?}", got.get(c, r), px));
                }
            }
        }
    }
    Ok("5 scenes pixel-identical".into())
}

/// An entity entirely behind a wall changes no pixel.
pub fn full_occlusion() -> CheckResult {
    let mut p = FloorPlan::new();
    p.add_rect_room(0.0, 6.0, 0.0, 6.0).unwrap();
    p.add_rect_room(6.0, 12.0, 0.0, 6.0).unwrap();
    p.connect_rooms(0, 1, (4.5, 5.9)).unwrap();
    let pose = AgentPose::new(3.0, 2.0, 0.0);
    let cam = Camera::default();
    let bare = render_first_person(&p, &pose, &cam);
    for kind in [EntityKind::Box, EntityKind::Ball, EntityKind::Key] {
        let mut q = p.clone();
        let (radius, height) = kind.dims();
        q.entities.push(Entity3D { id: 0, kind, color: Color::Red, x: 8.0, z: 2.0, radius, height });
        let img = render_first_person(&q, &pose, &cam);
        let changed = (0..bare.as_bytes().len()).filter(|&i| bare.as_bytes()[i] != img.as_bytes()[i]).count();
        if changed != 0 {
            return Err(format!("hidden {} changed {changed} bytes", kind.name()));
        }
    }
    Ok("hidden box, ball and key contribute 0 pixels".into())
}

/// Records random trajectories and replays every log.
pub fn record_and_replay(env_id: &str, trajectories: u64, len: usize) -> Result<Vec<EpisodeLog>, String> {
    let mut logs = Vec::new();
    for i in 0..trajectories {
        let env = make(env_id).map_err(|e| e.to_string())?;
        let n = env.action_space().n();
        let mut rec = Recorder::new(env, Vec::new(), i, None).map_err(|e| e.to_string())?;
        let mut rng = stream(i, label::ROLLOUT);
        rec.reset(i).map_err(|e| e.to_string())?;
        for _ in 0..len {
            let out = rec.step(Some(below(&mut rng, n)), None).map_err(|e| e.to_string())?.expect("real step");
            if out.terminated || out.truncated {
                break;
            }
        }
        let log = rec.log().clone();
        if !replay_verify(&log).map_err(|e| e.to_string())? {
            return Err(format!("{env_id} trajectory {i} failed replay"));
        }
        logs.push(log);
    }
    Ok(logs)
}

/// Default image shapes, and the resize wrapper at a spread of sizes.
pub fn observation_shapes() -> CheckResult {
    let expect = |id: &str, shape: [usize; 3]| -> Result<(), String> {
        let mut env = make(id).map_err(|e| e.to_string())?;
        let got = env.reset(Some(0)).0.image.shape();
        if got != shape || env.observation_spec().image_shape != shape {
            return Err(format!("{id}: {got:?}, expected {shape:?}"));
        }
        Ok(())
    };
    for id in ["World3D-GoToObj", "World3D-FourRooms", "World3D-FourRooms-Nav3"] {
        expect(id, [60, 80, 3])?;
    }
    for id in ["Grid-Empty-8x8", "Grid-GoToObj-8x8", "Grid-FourRooms", "Grid-UnlockPickup", "Grid-FourRooms-Nav3"] {
        expect(id, [7, 7, 3])?;
    }
    let mut sizes = 0;
    for (w, h) in [(1, 1), (3, 200), (64, 64), (80, 60), (160, 120), (257, 31)] {
        let mut env = ResizeObservation::new(make("World3D-FourRooms").map_err(|e| e.to_string())?, w, h)
            .map_err(|e| e.to_string())?;
        let got = env.reset(Some(1)).0.image.shape();
        let stepped = env.step(2).map_err(|e| e.to_string())?.observation.image.shape();
        if got != [h, w, 3] || stepped != [h, w, 3] {
            return Err(format!("resize {w}x{h}: {got:?}"));
        }
        sizes += 1;
    }
    Ok(format!("3D 60x80x3, grid 7x7x3, {sizes} resize sizes"))
}

/// Every go-to mission survives encode/decode and text parsing, codes are
/// distinct, and the vocabulary listing matches `golden`.
pub fn one_hot_bijection(golden: &std::path::Path) -> CheckResult {
    let vocab = MissionVocabulary::default();
    let missions = vocab.instances(TemplateId::GoTo);
    if missions.len() != ONE_HOT_LEN || ONE_HOT_LEN != 18 {
        return Err(format!("{} missions for a {ONE_HOT_LEN}-long code", missions.len()));
    }
    let mut seen = std::collections::HashSet::new();
    for m in &missions {
        let code = vocab.encode_one_hot(m);
        if vocab.decode_one_hot(&code).as_ref() != Some(m) {
            return Err(format!("{:?} does not round-trip", m.text));
        }
        if vocab.parse_mission(&m.text).as_ref() != Ok(m) {
            return Err(format!("{:?} does not parse back", m.text));
        }
        seen.insert(code);
    }
    if seen.len() != ONE_HOT_LEN {
        return Err("codes collide".into());
    }
    let stored = std::fs::read_to_string(golden).map_err(|e| format!("{}: {e}", golden.display()))?;
    if stored != vocab.golden_text() {
        return Err("vocabulary differs from golden file".into());
    }
    Ok(format!("{} missions, golden stable", missions.len()))
}

/// Hand-computed relative AUC gains.
pub fn transfer_arithmetic(tol: f64) -> CheckResult {
    let base = area_under_curve(&RewardCurve::new(vec![(0, 0.2), (100_000, 0.6), (200_000, 0.9)]).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    if (base - 115_000.0).abs() > tol * base {
        return Err(format!("baseline AUC {base}"));
    }
    let ti = |a: f64, b: f64| transfer_improvement(a, b).map_err(|e| e.to_string());
    let cases = [(base, base, 0.0), (1.03993 * base, base, 0.03993), (0.5 * base, base, -0.5), (3.0, 2.0, 0.5)];
    for (a, b, want) in cases {
        let got = ti(a, b)?;
        if (got - want).abs() > tol {
            return Err(format!("({a}, {b}): {got} vs {want}"));
        }
    }
    let pct = 100.0 * ti(1.03993, 1.0)?;
    if (pct - 3.993).abs() > tol {
        return Err(format!("1.03993x ratio gives {pct}%"));
    }
    if transfer_improvement(1.0, 0.0).is_ok() {
        return Err("zero baseline accepted".into());
    }
    Ok(format!("{} cases, 1.03993x = {pct:.3}%", cases.len() + 1))
}

/// Rendering the same pose twice, or from a fresh env, gives identical pixels.
pub fn renderer_determinism(seeds: u64) -> CheckResult {
    let mut frames = 0;
    for id in ["World3D-GoToObj", "World3D-FourRooms"] {
        for seed in 0..seeds {
            let mut a = make(id).map_err(|e| e.to_string())?;
            let mut b = make(id).map_err(|e| e.to_string())?;
            let (oa, _) = a.reset(Some(seed));
            let (ob, _) = b.reset(Some(seed));
            let again = a.render_frame(miniverse_core::RenderMode::AgentView).map_err(|e| e.to_string())?;
            if oa.image != ob.image || oa.image.as_bytes() != again.as_bytes() {
                return Err(format!("{id} seed {seed}: frames differ"));
            }
            frames += 3;
        }
    }
    Ok(format!("{frames} frames"))
}

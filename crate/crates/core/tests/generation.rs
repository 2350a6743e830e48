use std::collections::VecDeque;
use std::path::PathBuf;

use miniverse_core::grid::{golden, place_object, AgentState, Direction, Grid, ObjectKind, Region, WorldObject};
use miniverse_core::grid_envs::{generate, GridEnvConfig, GridGoal, GridWorld};
use miniverse_core::mission::{MissionVocabulary, TemplateId, ONE_HOT_LEN};
use miniverse_core::rng::{label, stream};
use miniverse_core::world3d::{
    self, generate_world3d, step_kinematics, Action3D, AgentPose, FloorPlan, World3dConfig, MOVE_STEP,
};
use miniverse_testkit::{assert_golden, grid_solver, nav3d, stats};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn free_cells(g: &Grid) -> Vec<(i32, i32)> {
    g.cells().filter(|(_, o)| o.is_none_or(|o| o.can_overlap())).map(|(p, _)| p).collect()
}

/// Cells reachable by 4-neighbour steps over non-wall cells.
fn flood(g: &Grid, from: (i32, i32)) -> Vec<(i32, i32)> {
    let mut seen = vec![from];
    let mut q = VecDeque::from([from]);
    while let Some((x, y)) = q.pop_front() {
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let n = (x + dx, y + dy);
            let open = g.in_bounds(n.0, n.1) && g.get(n.0, n.1).is_none_or(|o| o.kind() != ObjectKind::Wall);
            if open && !seen.contains(&n) {
                seen.push(n);
                q.push_back(n);
            }
        }
    }
    seen
}

fn perimeter_is_wall(w: &GridWorld) {
    let g = &w.grid;
    for ((x, y), o) in g.cells() {
        if x == 0 || y == 0 || x == g.width() - 1 || y == g.height() - 1 {
            assert_eq!(o.map(|o| o.kind()), Some(ObjectKind::Wall), "({x},{y})");
        }
    }
}

#[test]
fn empty_room_facts() {
    let cfg = GridEnvConfig::empty(8);
    for seed in 0..100 {
        let w = generate(&cfg, seed);
        perimeter_is_wall(&w);
        assert_eq!(w.grid.get(6, 6).map(|o| o.kind()), Some(ObjectKind::Goal));
        let interior = w.grid.cells().filter(|((x, y), _)| (1..7).contains(x) && (1..7).contains(y)).count();
        assert_eq!(interior, 36);
        let (_, path) = grid_solver::nav_bfs(&w.grid, &w.agent, |p, _| p == (6, 6)).unwrap();
        let turns = path.iter().filter(|&&a| a < 2).count();
        let forwards = path.len() - turns;
        assert!(forwards <= 2 * (8 - 3) && turns <= 3, "seed {seed}: {forwards} forward, {turns} turns");
    }
}

#[test]
fn goto_success_only_when_facing_the_target() {
    let cfg = GridEnvConfig::gotoobj(8);
    for seed in 0..200 {
        let mut w = generate(&cfg, seed);
        perimeter_is_wall(&w);
        let GridGoal::Face { pos, object } = w.goal.clone() else { panic!() };
        for (x, y) in free_cells(&w.grid) {
            for d in 0..4 {
                w.agent = AgentState::new((x, y), Direction::from_index(d));
                let front = w.agent.front();
                let expected = front == pos;
                assert_eq!(w.check_success(), expected, "seed {seed} at ({x},{y}) dir {d}");
                if let Some(o) = w.grid.get(front.0, front.1) {
                    if o.color() == object.color() && o.kind() != object.kind() {
                        assert!(!w.check_success());
                    }
                }
            }
        }
    }
}

#[test]
fn four_rooms_connected_over_1000_seeds() {
    let cfg = GridEnvConfig::four_rooms();
    for seed in 0..1000 {
        let w = generate(&cfg, seed);
        perimeter_is_wall(&w);
        let open: Vec<_> = w.grid.cells().filter(|(_, o)| o.is_none_or(|o| o.kind() != ObjectKind::Wall)).map(|(p, _)| p).collect();
        let reach = flood(&w.grid, w.agent.pos);
        assert_eq!(reach.len(), open.len(), "seed {seed}");
        let goal = w.grid.cells().find(|(_, o)| o.is_some_and(|o| o.kind() == ObjectKind::Goal)).unwrap().0;
        assert_ne!(goal, w.agent.pos);
        let gaps = (1..18).filter(|&i| w.grid.get(9, i).is_none_or(|o| o.kind() != ObjectKind::Wall)).count()
            + (1..18).filter(|&i| w.grid.get(i, 9).is_none_or(|o| o.kind() != ObjectKind::Wall)).count();
        assert_eq!(gaps, 4, "seed {seed}");
    }
}

#[test]
fn unlock_pickup_door_matches_key() {
    let cfg = GridEnvConfig::unlock_pickup();
    for seed in 0..500 {
        let w = generate(&cfg, seed);
        perimeter_is_wall(&w);
        let find = |k: ObjectKind| w.grid.cells().filter_map(|(_, o)| o.filter(|o| o.kind() == k).cloned()).collect::<Vec<_>>();
        let (doors, keys) = (find(ObjectKind::Door), find(ObjectKind::Key));
        assert_eq!((doors.len(), keys.len()), (1, 1));
        assert_eq!(doors[0].color(), keys[0].color());
        let GridGoal::Carry(target) = &w.goal else { panic!() };
        assert_eq!(target.kind(), ObjectKind::Box);
    }
}

#[test]
fn golden_worlds() {
    for (name, cfg) in [
        ("empty8_seed0.txt", GridEnvConfig::empty(8)),
        ("gotoobj8_seed0.txt", GridEnvConfig::gotoobj(8)),
        ("fourrooms_seed0.txt", GridEnvConfig::four_rooms()),
        ("unlockpickup_seed0.txt", GridEnvConfig::unlock_pickup()),
    ] {
        let w = generate(&cfg, 0);
        let text = format!("mission: {}\n{}", w.mission, golden::to_text(&w.grid, Some(&w.agent)));
        assert_golden(&golden_path(name), &text);
        let (g, a) = golden::from_text(text.split_once('\n').unwrap().1).unwrap();
        assert_eq!(g, w.grid);
        assert_eq!(a.map(|a| (a.pos, a.dir)), Some((w.agent.pos, w.agent.dir)));
    }
}

#[test]
fn golden_floorplans() {
    for (name, cfg) in [("fourrooms3d_seed0.txt", World3dConfig::four_rooms()), ("gotoobj3d_seed0.txt", World3dConfig::gotoobj())] {
        let w = generate_world3d(&cfg, 0);
        let text = world3d::golden::to_text(&w.plan);
        assert_golden(&golden_path(name), &text);
        let back = world3d::golden::from_text(&text).unwrap();
        assert_eq!(world3d::golden::to_text(&back), text);
    }
}

#[test]
fn vocabulary_golden() {
    assert_golden(&golden_path("vocabulary.txt"), &MissionVocabulary::default().golden_text());
}

#[test]
fn placement_is_uniform_over_open_cells() {
    let mut g = Grid::new(8, 8);
    g.wall_rect(0, 0, 8, 8).unwrap();
    let whole = Region::whole(&g);
    let cells = free_cells(&g);
    let mut counts = vec![0u64; cells.len()];
    let mut rng = stream(2024, label::WORLD);
    for _ in 0..100_000 {
        let mut h = g.clone();
        let p = place_object(&mut h, &mut rng, WorldObject::goal(), whole, None, &|_, _| false).unwrap();
        counts[cells.iter().position(|&c| c == p).unwrap()] += 1;
    }
    let p = vec![1.0 / cells.len() as f64; cells.len()];
    assert_eq!(stats::outlier_bins(&counts, &p, 3.0), Vec::<usize>::new(), "{counts:?}");
    let expected: Vec<f64> = p.iter().map(|pi| pi * 100_000.0).collect();
    assert!(stats::chi_square(&counts, &expected) < stats::chi_square_critical(cells.len() - 1, 3.0));
}

#[test]
fn mission_sampling_is_uniform() {
    let vocab = MissionVocabulary::default();
    let mut rng = stream(77, label::WORLD);
    let mut counts = vec![0u64; ONE_HOT_LEN];
    for _ in 0..100_000 {
        let m = vocab.sample_mission(TemplateId::GoTo, &mut rng);
        assert!(m.text.starts_with("go to the "));
        counts[vocab.one_hot_index(&m)] += 1;
    }
    let p = vec![1.0 / 18.0; 18];
    assert_eq!(stats::outlier_bins(&counts, &p, 3.0), Vec::<usize>::new(), "{counts:?}");
}

fn assert_clear(plan: &FloorPlan, pose: &AgentPose, tag: &str) {
    for e in &plan.entities {
        assert!(nav3d::wall_clearance(plan, (e.x, e.z)) >= e.radius, "{tag}: entity {} touches a wall", e.id);
        assert!(plan.room_at(e.pos()).is_some(), "{tag}: entity outside rooms");
        for f in &plan.entities {
            if f.id < e.id {
                assert!(e.pos().dist(f.pos()) >= e.radius + f.radius, "{tag}: entities overlap");
            }
        }
        assert!(pose.pos().dist(e.pos()) >= pose.radius + e.radius, "{tag}: agent overlaps entity");
    }
    assert!(nav3d::agent_wall_clearance(plan, pose) >= pose.radius, "{tag}: agent touches a wall");
}

#[test]
fn placed_entities_never_touch_walls() {
    for (cfg, n) in [(World3dConfig::four_rooms(), 10_000), (World3dConfig::gotoobj(), 10_000)] {
        for seed in 0..n {
            let w = generate_world3d(&cfg, seed);
            assert_clear(&w.plan, &w.agent, &format!("{} seed {seed}", cfg.env_id));
        }
    }
}

#[test]
fn four_rooms3d_rooms_reachable() {
    let w = generate_world3d(&World3dConfig::four_rooms(), 0);
    let mut plan = w.plan.clone();
    plan.entities.clear();
    assert_eq!(nav3d::rooms_reachable(&plan, 0.4), vec![true; 4]);
    // Without portals the far rooms are cut off.
    let mut closed = FloorPlan::new();
    for r in plan.rooms() {
        closed.add_rect_room(r.min_x, r.max_x, r.min_z, r.max_z).unwrap();
    }
    assert_eq!(nav3d::rooms_reachable(&closed, 0.4), vec![true, false, false, false]);
}

#[test]
fn forward_blocked_exactly_when_the_disc_would_touch_a_wall() {
    let mut plan = FloorPlan::new();
    plan.add_rect_room(0.0, 4.0, 0.0, 3.0).unwrap();
    plan.add_rect_room(4.0, 8.0, 0.0, 3.0).unwrap();
    plan.connect_rooms(0, 1, (1.0, 2.2)).unwrap();
    let mut rng = stream(5, label::ROLLOUT);
    let mut blocked = 0;
    for _ in 0..20_000 {
        let x = miniverse_core::rng::uniform(&mut rng, 0.4, 7.6);
        let z = miniverse_core::rng::uniform(&mut rng, 0.4, 2.6);
        let yaw = miniverse_core::rng::uniform(&mut rng, 0.0, std::f64::consts::TAU);
        let pose = AgentPose::new(x, z, yaw);
        if nav3d::agent_wall_clearance(&plan, &pose) < pose.radius {
            continue;
        }
        let dest = (x + MOVE_STEP * yaw.cos(), z - MOVE_STEP * yaw.sin());
        let clearance = nav3d::wall_clearance(&plan, dest);
        if (clearance - pose.radius).abs() < 1e-9 {
            continue;
        }
        let next = step_kinematics(&plan, &pose, Action3D::MoveForward);
        if clearance < pose.radius {
            blocked += 1;
            assert_eq!(next, pose);
        } else {
            assert!((next.x - dest.0).abs() < 1e-12 && (next.z - dest.1).abs() < 1e-12);
        }
    }
    assert!(blocked > 100);
}

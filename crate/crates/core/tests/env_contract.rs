use miniverse_core::grid::{render_rgb, GRID_ACTION_NAMES};
use miniverse_core::grid_envs::{GridEnv, GridEnvConfig, NAV3_ACTION_NAMES};
use miniverse_core::registry::{study_variant, ENV_IDS};
use miniverse_core::world3d::ACTION3D_NAMES;
use miniverse_core::{catalog, make, Env, EnvError, RenderMode};
use miniverse_testkit::{contract, grid_solver, los};

#[test]
fn every_registered_env_honours_the_contract() {
    for id in ENV_IDS {
        contract::check_env(&|| make(id).unwrap()).unwrap_or_else(|e| panic!("{e}"));
    }
}

#[test]
fn unknown_id_is_rejected() {
    assert_eq!(make("nope").err(), Some(EnvError::UnknownEnvId("nope".into())));
}

#[test]
fn action_counts_and_names() {
    for id in ENV_IDS {
        let env = make(id).unwrap();
        let names = env.action_space().names().to_vec();
        let expected: Vec<&str> = if id.ends_with("-Nav3") {
            NAV3_ACTION_NAMES.to_vec()
        } else if id.starts_with("Grid") {
            GRID_ACTION_NAMES.to_vec()
        } else {
            ACTION3D_NAMES.to_vec()
        };
        assert_eq!(names, expected, "{id}");
    }
    assert_eq!(make("Grid-FourRooms").unwrap().action_space().n(), 7);
    assert_eq!(make("World3D-FourRooms").unwrap().action_space().n(), 8);
    for id in ["Grid-FourRooms", "World3D-FourRooms"] {
        let study = make(study_variant(id).unwrap()).unwrap();
        assert_eq!(study.action_space().names(), ["turn left", "turn right", "go forward"]);
    }
}

#[test]
fn default_observation_shapes() {
    let mut grid = make("Grid-FourRooms").unwrap();
    assert_eq!(grid.reset(Some(1)).0.image.shape(), [7, 7, 3]);
    let mut world = make("World3D-FourRooms").unwrap();
    let (obs, _) = world.reset(Some(1));
    assert_eq!(obs.image.shape(), [60, 80, 3]);
    assert_eq!(obs.direction, None);
    assert_eq!(world.render_frame(RenderMode::AgentView).unwrap().shape(), [60, 80, 3]);
    assert!(grid.reset(Some(1)).0.direction.is_some());
}

#[test]
fn catalog_lists_every_id_in_order() {
    let ids: Vec<String> = catalog().into_iter().map(|s| s.env_id).collect();
    assert_eq!(ids, ENV_IDS);
}

#[test]
fn agent_view_frame_matches_observation() {
    let mut env = make("World3D-GoToObj").unwrap();
    let (obs, _) = env.reset(Some(3));
    assert_eq!(env.render_frame(RenderMode::AgentView).unwrap().as_bytes(), obs.image.as_bytes());
    let out = env.step(0).unwrap();
    assert_eq!(env.render_frame(RenderMode::AgentView).unwrap().as_bytes(), out.observation.image.as_bytes());
}

#[test]
fn topdown_dimensions_follow_tile_size() {
    let mut env = make("Grid-UnlockPickup").unwrap();
    env.reset(Some(0));
    let g = env.as_grid().unwrap();
    let (w, h, t) = (g.config().width as usize, g.config().height as usize, g.config().tile_px);
    assert_eq!(env.render_frame(RenderMode::TopDown).unwrap().shape(), [t * h, t * w, 3]);
}

#[test]
fn topdown_highlight_is_the_visible_region() {
    let mut env = GridEnv::new(GridEnvConfig::four_rooms());
    for seed in 0..20 {
        env.reset(Some(seed));
        let frame = env.render_frame(RenderMode::TopDown).unwrap();
        let world = env.world().unwrap();
        let t = env.config().tile_px;
        let plain = render_rgb(&world.grid, Some(&world.agent), t, None);
        let (w, h) = (world.grid.width(), world.grid.height());
        // Oracle mask in world coordinates.
        let mut seen = vec![false; (w * h) as usize];
        let view = los::mask(&world.grid, &world.agent, 7);
        for vy in 0..7 {
            for vx in 0..7 {
                let (x, y) = los::view_cell(&world.agent, 7, vx, vy);
                if view[(vy * 7 + vx) as usize] {
                    seen[(y * w + x) as usize] = true;
                }
            }
        }
        for y in 0..h as usize {
            for x in 0..w as usize {
                let differs = (0..t).any(|py| (0..t).any(|px| frame.get(x * t + px, y * t + py) != plain.get(x * t + px, y * t + py)));
                assert_eq!(differs, seen[y * w as usize + x], "seed {seed} cell ({x},{y})");
            }
        }
    }
}

#[test]
fn goto_missions_follow_the_template() {
    let mut env = make("Grid-GoToObj-8x8").unwrap();
    for seed in 0..50 {
        env.reset(Some(seed));
        let m = env.mission().unwrap();
        let rest = m.strip_prefix("go to the ").unwrap_or_else(|| panic!("{m}"));
        let parts: Vec<&str> = rest.split(' ').collect();
        assert_eq!(parts.len(), 2, "{m}");
        assert!(["red", "green", "blue", "purple", "yellow", "grey"].contains(&parts[0]), "{m}");
        assert!(["key", "ball", "box"].contains(&parts[1]), "{m}");
    }
}

#[test]
fn empty_room_shortest_path_succeeds() {
    let mut env = GridEnv::new(GridEnvConfig::empty(8));
    env.reset(Some(1));
    let plan = grid_solver::solve(env.world().unwrap()).unwrap();
    let mut last = None;
    for a in plan {
        last = Some(env.step(a).unwrap());
    }
    let last = last.unwrap();
    assert!(last.terminated && last.reward > 0.0);
}

#[test]
fn envs_move_between_threads() {
    let mut env = make("World3D-FourRooms").unwrap();
    env.reset(Some(4));
    let handle = std::thread::spawn(move || {
        env.step(2).unwrap();
        env
    });
    let env = handle.join().unwrap();
    assert_eq!(env.env_id(), "World3D-FourRooms");
}

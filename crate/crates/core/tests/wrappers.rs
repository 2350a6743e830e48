use miniverse_core::grid::{encode_view, ObjectKind};
use miniverse_core::mission::MissionVocabulary;
use miniverse_core::registry::ENV_IDS;
use miniverse_core::rng::{below, label, stream};
use miniverse_core::wrappers::{FullyObservable, ImageOnly, OneHotMission, ResizeObservation, StochasticActions};
use miniverse_core::{make, Env, EnvError, MissionField};
use miniverse_testkit::{contract, los, stats};

#[test]
fn wrapped_envs_honour_the_contract() {
    for id in ENV_IDS {
        contract::check_env(&|| Box::new(ImageOnly::new(make(id).unwrap()))).unwrap_or_else(|e| panic!("{e}"));
        contract::check_env(&|| Box::new(StochasticActions::new(make(id).unwrap(), 0.3).unwrap())).unwrap_or_else(|e| panic!("{e}"));
    }
    for id in ["Grid-GoToObj-8x8", "World3D-GoToObj"] {
        contract::check_env(&|| Box::new(OneHotMission::new(make(id).unwrap()).unwrap())).unwrap_or_else(|e| panic!("{e}"));
    }
    for id in ["Grid-FourRooms", "Grid-UnlockPickup"] {
        contract::check_env(&|| Box::new(FullyObservable::new(make(id).unwrap()).unwrap())).unwrap_or_else(|e| panic!("{e}"));
    }
    contract::check_env(&|| Box::new(ResizeObservation::new(make("World3D-FourRooms").unwrap(), 32, 24).unwrap()))
        .unwrap_or_else(|e| panic!("{e}"));
}

#[test]
fn compositions_in_either_order() {
    let mut a = ImageOnly::new(OneHotMission::new(make("Grid-GoToObj-8x8").unwrap()).unwrap());
    let (obs, _) = a.reset(Some(2));
    assert!(a.observation_spec().conforms(&obs));
    assert!(obs.mission.is_none());
    let mut b = OneHotMission::new(ImageOnly::new(make("Grid-GoToObj-8x8").unwrap())).unwrap();
    let (obs, _) = b.reset(Some(2));
    assert!(b.observation_spec().conforms(&obs));
    assert!(obs.mission.is_none());
    assert_eq!(a.observation_spec(), b.observation_spec());
}

#[test]
fn image_only_keeps_rewards_and_flags() {
    let mut plain = make("Grid-GoToObj-8x8").unwrap();
    let mut wrapped = ImageOnly::new(make("Grid-GoToObj-8x8").unwrap());
    plain.reset(Some(8));
    wrapped.reset(Some(8));
    let mut rng = stream(8, label::ROLLOUT);
    for _ in 0..plain.max_steps() {
        let a = below(&mut rng, 7);
        let (x, y) = (plain.step(a).unwrap(), wrapped.step(a).unwrap());
        assert_eq!((x.reward, x.terminated, x.truncated), (y.reward, y.terminated, y.truncated));
        assert_eq!(x.observation.image, y.observation.image);
        if x.terminated || x.truncated {
            break;
        }
    }
}

#[test]
fn one_hot_for_red_key_is_first_unit_vector() {
    let vocab = MissionVocabulary::default();
    let mut env = OneHotMission::new(make("Grid-GoToObj-8x8").unwrap()).unwrap();
    let mut seen_red_key = false;
    for seed in 0..400 {
        let (obs, _) = env.reset(Some(seed));
        let Some(MissionField::OneHot(v)) = obs.mission else { panic!("one-hot expected") };
        assert_eq!(v.len(), 18);
        assert_eq!(v.iter().map(|&x| x as u32).sum::<u32>(), 1);
        let text = env.mission().unwrap().to_string();
        assert_eq!(vocab.decode_one_hot(&v).unwrap().text, text);
        if text == "go to the red key" {
            assert_eq!(v[0], 1);
            seen_red_key = true;
        }
    }
    assert!(seen_red_key);
}

#[test]
fn zero_epsilon_is_the_base_env() {
    for id in ["Grid-FourRooms", "World3D-GoToObj"] {
        for seed in 0..100 {
            let mut base = make(id).unwrap();
            let mut wrapped = StochasticActions::new(make(id).unwrap(), 0.0).unwrap();
            assert_eq!(base.reset(Some(seed)).0, wrapped.reset(Some(seed)).0);
            let mut rng = stream(seed, label::ROLLOUT);
            for _ in 0..30 {
                let a = below(&mut rng, base.action_space().n());
                let x = base.step(a).unwrap();
                let y = wrapped.step(a).unwrap();
                assert_eq!(y.info.executed_action, Some(a));
                assert_eq!(x, y);
                if x.terminated || x.truncated {
                    break;
                }
            }
        }
    }
}

#[test]
fn full_epsilon_executes_uniform_actions() {
    let mut env = StochasticActions::new(make("Grid-Empty-8x8").unwrap(), 1.0).unwrap();
    env.reset(Some(1));
    let mut counts = [0u64; 7];
    let mut seed = 1;
    for _ in 0..100_000 {
        let out = env.step(6).unwrap();
        counts[out.info.executed_action.unwrap()] += 1;
        if out.terminated || out.truncated {
            seed += 1;
            env.reset(Some(seed));
        }
    }
    let expected = [100_000.0 / 7.0; 7];
    let chi = stats::chi_square(&counts, &expected);
    assert!(chi < stats::chi_square_critical(6, 3.0), "chi-square {chi} for {counts:?}");
}

#[test]
fn same_seed_same_perturbations() {
    let run = || {
        let mut env = StochasticActions::new(make("Grid-FourRooms").unwrap(), 0.5).unwrap();
        env.reset(Some(12));
        (0..60).map(|_| env.step(2).unwrap().info.executed_action.unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn partial_view_is_crop_rotate_mask_of_full_view() {
    let mut full = FullyObservable::new(make("Grid-UnlockPickup").unwrap()).unwrap();
    let mut rng = stream(3, label::ROLLOUT);
    full.reset(Some(3));
    for _ in 0..150 {
        let out = full.step(below(&mut rng, 7)).unwrap();
        let world = full.as_grid().unwrap().world().unwrap();
        let map = &out.observation.image;
        assert_eq!(map.shape(), [6, 11, 3]);
        let view = encode_view(&world.grid, &world.agent, 7);
        let mask = los::mask(&world.grid, &world.agent, 7);
        for vy in 0..7 {
            for vx in 0..7 {
                let got = view.encoding.cell(vy as usize, vx as usize);
                let (x, y) = los::view_cell(&world.agent, 7, vx, vy);
                let want: Vec<u8> = if !mask[(vy * 7 + vx) as usize] {
                    vec![ObjectKind::Unseen as u8, 0, 0]
                } else if (x, y) == world.agent.pos {
                    match &world.agent.carrying {
                        Some(c) => c.encode().to_vec(),
                        None => vec![ObjectKind::Empty as u8, 0, 0],
                    }
                } else {
                    map.cell(y as usize, x as usize).to_vec()
                };
                assert_eq!(got, &want[..], "view cell ({vx},{vy})");
            }
        }
        if out.terminated || out.truncated {
            full.reset(Some(4));
        }
    }
}

#[test]
fn fully_observable_rejects_3d() {
    assert!(matches!(FullyObservable::new(make("World3D-FourRooms").unwrap()), Err(EnvError::NotAGridEnv)));
}

#[test]
fn resize_renders_at_requested_dims() {
    let mut env = ResizeObservation::new(make("World3D-FourRooms").unwrap(), 160, 120).unwrap();
    assert_eq!(env.reset(Some(0)).0.image.shape(), [120, 160, 3]);
    let mut tiny = ResizeObservation::new(make("World3D-GoToObj").unwrap(), 1, 1).unwrap();
    assert_eq!(tiny.reset(Some(0)).0.image.shape(), [1, 1, 3]);
    assert!(matches!(
        ResizeObservation::new(make("World3D-GoToObj").unwrap(), 0, 5),
        Err(EnvError::InvalidDims { width: 0, height: 5 })
    ));
    assert!(matches!(ResizeObservation::new(make("Grid-FourRooms").unwrap(), 8, 8), Err(EnvError::NotAWorld3dEnv)));
}

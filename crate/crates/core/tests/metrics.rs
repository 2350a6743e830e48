use std::collections::BTreeMap;
use std::path::PathBuf;

use miniverse_core::env::EpisodeClock;
use miniverse_core::grid_envs::{GridEnv, GridEnvConfig};
use miniverse_core::metrics::{
    area_under_curve, episode_polyline, plot_trajectory, plot_trajectory_raster, read_log, replay_verify,
    transfer_improvement, verify_log, EpisodeLog, LogError, LogHeader, LogWriter, Recorder, RewardCurve, StepRecord,
    LOG_FORMAT_VERSION,
};
use miniverse_core::rng::{below, label, stream};
use miniverse_core::{make, Env, Pose};
use miniverse_testkit::{assert_golden, grid_solver};

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn header(env_id: &str) -> LogHeader {
    LogHeader {
        format_version: LOG_FORMAT_VERSION,
        env_id: env_id.into(),
        seed: 1,
        key_mapping: None,
        action_names: make(env_id).unwrap().action_space().names().to_vec(),
        started_at: 0,
    }
}

fn random_log(env_id: &str, episodes: u32, seed: u64) -> EpisodeLog {
    let env = make(env_id).unwrap();
    let n = env.action_space().n();
    let mut rec = Recorder::new(env, Vec::new(), seed, None).unwrap();
    let mut rng = stream(seed, label::ROLLOUT);
    for e in 0..episodes {
        rec.reset(seed + e as u64).unwrap();
        loop {
            let out = rec.step(Some(below(&mut rng, n)), None).unwrap().unwrap();
            if out.terminated || out.truncated {
                break;
            }
        }
    }
    rec.log().clone()
}

#[test]
fn one_step_gives_one_step_record() {
    let mut w = LogWriter::new(Vec::new(), header("Grid-Empty-8x8")).unwrap();
    let mut env = make("Grid-Empty-8x8").unwrap();
    env.reset(Some(1));
    w.begin_episode(miniverse_core::metrics::EpisodeMeta {
        episode: 1,
        seed: 1,
        start_pose: env.pose().unwrap(),
        mission: env.mission().unwrap().into(),
    })
    .unwrap();
    assert_eq!(w.log().episodes[0].steps.len(), 0);
    let out = env.step(2).unwrap();
    let step = StepRecord {
        episode: 1,
        t: 1,
        action: Some(2),
        key_pressed: None,
        reward: out.reward,
        terminated: out.terminated,
        truncated: out.truncated,
        pose: env.pose().unwrap(),
        wall_clock_ms: 0,
    };
    w.record_step(step.clone()).unwrap();
    assert_eq!(w.log().episodes[0].steps, vec![step.clone()]);
    let bytes = w.close().unwrap().unwrap();
    assert_eq!(String::from_utf8(bytes).unwrap().lines().count(), 3);
    assert!(matches!(w.record_step(step), Err(LogError::LogClosed)));
}

#[test]
fn steps_after_episode_end_are_rejected() {
    let env = make("Grid-Empty-8x8").unwrap();
    let mut rec = Recorder::new(env, Vec::new(), 0, None).unwrap();
    assert!(matches!(rec.step(Some(0), None), Err(LogError::Env(miniverse_core::EnvError::NotReset))));
    rec.reset(0).unwrap();
    loop {
        let out = rec.step(Some(6), None).unwrap().unwrap();
        if out.truncated {
            break;
        }
    }
    assert!(matches!(rec.step(None, Some(4)), Err(LogError::LogClosed)));
}

#[test]
fn fifty_step_episode_replays_every_pose() {
    let env = make("Grid-FourRooms").unwrap();
    let mut rec = Recorder::new(env, Vec::new(), 21, None).unwrap();
    rec.reset(21).unwrap();
    let mut rng = stream(21, label::ROLLOUT);
    let mut poses = Vec::new();
    for _ in 0..50 {
        let a = [0, 1, 2, 2, 2][below(&mut rng, 5)];
        let out = rec.step(Some(a), None).unwrap().unwrap();
        poses.push(rec.env().pose().unwrap());
        if out.terminated {
            break;
        }
    }
    let log = rec.log().clone();
    assert_eq!(log.episodes[0].steps.iter().map(|s| s.pose).collect::<Vec<_>>(), poses);
    let mut env = make("Grid-FourRooms").unwrap();
    env.reset(Some(21));
    for (s, p) in log.episodes[0].steps.iter().zip(&poses) {
        env.step(s.action.unwrap()).unwrap();
        assert_eq!(env.pose().as_ref(), Some(p));
    }
    assert!(replay_verify(&log).unwrap());
}

#[test]
fn fresh_logs_replay_and_survive_serialisation() {
    for id in ["Grid-UnlockPickup", "World3D-FourRooms-Nav3"] {
        let log = random_log(id, 2, 4);
        assert!(replay_verify(&log).unwrap());
        let back = EpisodeLog::from_jsonl(&log.to_jsonl()).unwrap();
        assert_eq!(back, log);
        assert!(replay_verify(&back).unwrap());
    }
}

#[test]
fn tiny_reward_change_fails_replay() {
    let mut log = random_log("Grid-Empty-8x8", 1, 2);
    assert!(replay_verify(&log).unwrap());
    log.episodes[0].steps[0].reward += 1e-6;
    let m = verify_log(&log).unwrap().unwrap_err();
    assert_eq!((m.episode, m.t), (1, 1));
    assert!(!replay_verify(&log).unwrap());
}

#[test]
fn no_op_records_keep_the_world_still() {
    let env = make("Grid-FourRooms-Nav3").unwrap();
    let mut key_mapping = BTreeMap::new();
    key_mapping.extend([(1u8, 0usize), (5, 1), (9, 2)]);
    let mut rec = Recorder::new(env, Vec::new(), 3, Some(key_mapping)).unwrap();
    rec.reset(3).unwrap();
    rec.step(Some(2), Some(9)).unwrap();
    rec.step(None, Some(4)).unwrap();
    rec.step(Some(0), Some(1)).unwrap();
    let log = rec.log().clone();
    let steps = &log.episodes[0].steps;
    assert_eq!(steps.iter().map(|s| s.t).collect::<Vec<_>>(), vec![1, 1, 2]);
    assert_eq!(steps[1].action, None);
    assert_eq!(steps[1].pose, steps[0].pose);
    assert!(replay_verify(&log).unwrap());
    let back = EpisodeLog::from_jsonl(&log.to_jsonl()).unwrap();
    assert_eq!(back.header.key_mapping, log.header.key_mapping);
    // A no-op that claims the world moved is caught.
    let mut bad = log.clone();
    bad.episodes[0].steps[1].pose = Pose::Grid { x: 0, y: 0, dir: 0 };
    assert!(!replay_verify(&bad).unwrap());
}

fn drifted_reward(clock: &EpisodeClock) -> f64 {
    1.0 - 0.5 * clock.step_count() as f64 / clock.max_steps() as f64
}

#[test]
fn logs_from_a_drifted_engine_fail_replay() {
    let cfg = GridEnvConfig::empty(8);
    let env = GridEnv::new(cfg.clone()).with_reward(drifted_reward);
    let mut rec = Recorder::new(Box::new(env), Vec::new(), 1, None).unwrap();
    rec.reset(1).unwrap();
    let mut probe = GridEnv::new(cfg);
    probe.reset(Some(1));
    for a in grid_solver::solve(probe.world().unwrap()).unwrap() {
        rec.step(Some(a), None).unwrap();
    }
    let log = rec.log().clone();
    assert!(log.episodes[0].ended());
    assert!(!replay_verify(&log).unwrap());
}

#[test]
fn stored_logs_still_replay() {
    for (name, id, seed) in [("fourrooms_seed7.epjsonl", "Grid-FourRooms", 7), ("world3d_fourrooms_seed7.epjsonl", "World3D-FourRooms", 7)] {
        let path = golden_path(name);
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::write(&path, random_log(id, 2, seed).to_jsonl()).unwrap();
        }
        let file = std::fs::File::open(&path).unwrap();
        let log = read_log(std::io::BufReader::new(file)).unwrap();
        assert_eq!(log.episodes.len(), 2);
        assert!(replay_verify(&log).unwrap(), "{name}");
    }
}

#[test]
fn record_field_names_are_frozen() {
    let log = random_log("Grid-Empty-8x8", 1, 0);
    let mut out = String::new();
    let mut seen = std::collections::BTreeSet::new();
    for line in log.to_jsonl().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let obj = v.as_object().unwrap();
        let tag = obj["record"].as_str().unwrap().to_string();
        if seen.insert(tag.clone()) {
            let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
            out.push_str(&format!("{tag}: {}\n", keys.join(" ")));
        }
    }
    let step = serde_json::to_value(&log.episodes[0].steps[0]).unwrap();
    out.push_str(&format!("grid pose: {}\n", step["pose"]));
    assert_golden(&golden_path("log_schema.txt"), &out.replace(&step["pose"].to_string(), "{\"dir\":_,\"x\":_,\"y\":_}"));
}

#[test]
fn truncated_file_tail_is_ignored() {
    let log = random_log("Grid-Empty-8x8", 1, 5);
    let text = log.to_jsonl();
    let cut = &text[..text.len() - 7];
    let back = EpisodeLog::from_jsonl(cut).unwrap();
    assert_eq!(back.episodes[0].steps.len(), log.episodes[0].steps.len() - 1);
}

#[test]
fn auc_reference_values() {
    let flat = RewardCurve::new(vec![(0, 1.0), (200_000, 1.0)]).unwrap();
    assert_eq!(area_under_curve(&flat).unwrap(), 200_000.0);
    let zero = RewardCurve::new(vec![(0, 0.0), (100, 0.0)]).unwrap();
    assert_eq!(area_under_curve(&zero).unwrap(), 0.0);
    let tri = RewardCurve::new(vec![(0, 0.0), (100, 1.0)]).unwrap();
    assert_eq!(area_under_curve(&tri).unwrap(), 50.0);
    let base = area_under_curve(&tri).unwrap();
    assert_eq!(transfer_improvement(base, base).unwrap(), 0.0);
    assert!((transfer_improvement(1.03993 * base, base).unwrap() - 0.03993).abs() < 1e-12);
    assert_eq!(transfer_improvement(0.0, base).unwrap(), -1.0);
}

#[test]
fn plot_has_one_labelled_panel_per_episode() {
    let log = random_log("Grid-Empty-8x8", 10, 30);
    let svg = plot_trajectory(&log).unwrap();
    assert_eq!(svg.matches(r#"class="panel""#).count(), 10);
    for e in 1..=10 {
        assert!(svg.contains(&format!(r#"data-episode="{e}""#)));
        assert!(svg.contains(&format!(">{e}</text>")));
    }
    assert_eq!(plot_trajectory(&log).unwrap(), svg);
    let img = plot_trajectory_raster(&log, 0).unwrap();
    assert_eq!(img.as_bytes(), plot_trajectory_raster(&log, 0).unwrap().as_bytes());
    let mut bad = log.clone();
    bad.episodes[3].steps[0].reward = 0.5;
    assert!(plot_trajectory(&bad).is_err());
}

#[test]
fn straight_walk_gives_collinear_vertices() {
    for id in ["Grid-Empty-8x8", "World3D-GoToObj"] {
        let env = make(id).unwrap();
        let mut rec = Recorder::new(env, Vec::new(), 0, None).unwrap();
        rec.reset(0).unwrap();
        for _ in 0..4 {
            rec.step(Some(2), None).unwrap();
        }
        let pts = episode_polyline(rec.log(), 0).unwrap();
        for w in pts.windows(3) {
            let cross = (w[1].0 - w[0].0) * (w[2].1 - w[0].1) - (w[1].1 - w[0].1) * (w[2].0 - w[0].0);
            assert!(cross.abs() < 1e-6, "{id}: {pts:?}");
        }
    }
}

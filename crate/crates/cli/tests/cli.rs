use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Output, Stdio};

use miniverse_cli::BenchReport;
use miniverse_core::metrics::{read_log, replay_verify};
use miniverse_server::client::Client;
use miniverse_server::protocol::{ClientMessage, ServerMessage};

fn miniverse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_miniverse")).args(args).output().expect("spawn miniverse")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_random_is_deterministic_and_logs_replay() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("run.epjsonl");
    let a = miniverse(&["run-random", "--env", "Grid-Empty-8x8", "--episodes", "1", "--seed", "4", "--log", path_str(&log)]);
    assert_eq!(code(&a), 0, "{a:?}");
    let b = miniverse(&["run-random", "--env", "Grid-Empty-8x8", "--episodes", "1", "--seed", "4"]);
    assert_eq!(stdout(&a), stdout(&b));
    let first = stdout(&a).lines().next().unwrap().to_string();
    assert!(first.contains("end=terminated") || first.contains("end=truncated"), "{first}");

    let svg = dir.path().join("run.svg");
    let r = miniverse(&["replay", "--log", path_str(&log), "--out", path_str(&svg)]);
    assert_eq!(code(&r), 0, "{r:?}");
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn ten_episode_log_plots_ten_panels() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("ten.epjsonl");
    let o = miniverse(&["run-random", "--env", "World3D-GoToObj", "--episodes", "10", "--seed", "2", "--log", path_str(&log)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("episode=")).count(), 10);
    let r = miniverse(&["replay", "--log", path_str(&log)]);
    assert_eq!(code(&r), 0, "{r:?}");
    let svg = std::fs::read_to_string(log.with_extension("svg")).unwrap();
    assert_eq!(svg.matches(r#"class="panel""#).count(), 10);
}

#[test]
fn tampered_log_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("t.epjsonl");
    assert_eq!(code(&miniverse(&["run-random", "--env", "Grid-FourRooms", "--seed", "9", "--log", path_str(&log)])), 0);
    let text = std::fs::read_to_string(&log).unwrap();
    // Shift the recorded pose of the fifth step.
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let idx = lines.iter().enumerate().filter(|(_, l)| l.contains(r#""record":"step""#)).nth(4).unwrap().0;
    let mut v: serde_json::Value = serde_json::from_str(&lines[idx]).unwrap();
    let x = v["pose"]["x"].as_i64().unwrap();
    v["pose"]["x"] = serde_json::json!(x + 1);
    lines[idx] = v.to_string();
    std::fs::write(&log, lines.join("\n") + "\n").unwrap();
    let r = miniverse(&["replay", "--log", path_str(&log), "--out", path_str(&dir.path().join("t.svg"))]);
    assert_eq!(code(&r), 3, "{r:?}");
    assert!(String::from_utf8_lossy(&r.stderr).contains("mismatch"));
    assert!(!dir.path().join("t.svg").exists());

    std::fs::write(&log, "not a log\n").unwrap();
    assert_eq!(code(&miniverse(&["replay", "--log", path_str(&log)])), 3);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&miniverse(&["run-random", "--env", "nope"])), 2);
    assert_eq!(code(&miniverse(&["run-random"])), 2);
    assert_eq!(code(&miniverse(&["frobnicate"])), 2);
    assert_eq!(code(&miniverse(&["benchmark", "--env", "Grid-FourRooms", "--steps", "many"])), 2);
    assert_eq!(code(&miniverse(&["replay", "--log", "/nonexistent/x.epjsonl"])), 2);
    assert_eq!(code(&miniverse(&["digest", "--env", "nope"])), 2);
    assert_eq!(code(&miniverse(&["--help"])), 0);
}

#[test]
fn benchmark_reports_rates() {
    for (env, has_fps) in [("Grid-GoToObj-8x8", false), ("World3D-GoToObj", true)] {
        let o = miniverse(&["benchmark", "--env", env, "--steps", "2000"]);
        assert_eq!(code(&o), 0);
        let r: BenchReport = serde_json::from_str(stdout(&o).trim()).unwrap();
        assert_eq!((r.env_id.as_str(), r.steps), (env, 2000));
        assert!(r.steps_per_sec > 0.0);
        assert_eq!(r.frames_per_sec.is_some(), has_fps);
    }
}

#[test]
fn digest_is_identical_across_processes() {
    let a = miniverse(&["digest", "--trajectories", "20"]);
    let b = miniverse(&["digest", "--trajectories", "20"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).lines().count(), miniverse_core::registry::ENV_IDS.len());
    let other = miniverse(&["digest", "--trajectories", "20", "--seed", "1"]);
    assert_ne!(stdout(&a), stdout(&other));
}

#[test]
fn serve_answers_and_flushes_on_sigterm() {
    let dir = tempfile::tempdir().unwrap();
    let logs = dir.path().join("logs");
    let mut child = Command::new(env!("CARGO_BIN_EXE_miniverse"))
        .args(["serve", "--port", "0", "--log-dir", path_str(&logs)])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut out = BufReader::new(child.stdout.take().unwrap());
    let mut line = String::new();
    out.read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on http://").expect("listening line").to_string();

    let rt = tokio::runtime::Runtime::new().unwrap();
    let session_id = rt.block_on(async {
        let mut c = Client::connect(&addr).await.unwrap();
        assert_eq!(c.get("/healthz").await.unwrap(), (200, "ok".into()));
        let (status, envs) = c.get("/envs").await.unwrap();
        assert_eq!(status, 200);
        assert!(envs.contains("World3D-FourRooms"));
        let made = c
            .request(&ClientMessage::Make {
                env_id: "Grid-FourRooms".into(),
                seed: Some(12),
                study_mode: true,
                subject_id: None,
                fresh_mapping: false,
            })
            .await
            .unwrap();
        let ServerMessage::Made { session_id, .. } = made else { panic!("{made:?}") };
        for k in 1..=9 {
            let r = c.request(&ClientMessage::Step { session_id: session_id.clone(), key: Some(k), action: None }).await.unwrap();
            assert!(matches!(r, ServerMessage::Stepped { .. }));
        }
        // Leave the connection open: the shutdown must flush the session.
        std::mem::forget(c);
        session_id
    });

    let kill = Command::new("kill").args(["-TERM", &child.id().to_string()]).status().unwrap();
    assert!(kill.success());
    let status = child.wait().unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(logs.join(format!("{session_id}.epjsonl"))).unwrap();
    let log = read_log(text.as_bytes()).unwrap();
    assert_eq!(log.episodes.len(), 1);
    assert_eq!(log.episodes[0].steps.len(), 9);
    assert!(replay_verify(&log).unwrap());
}

#[test]
fn serve_reports_bind_failure() {
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let o = miniverse(&["serve", "--port", &port]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot bind"));
}

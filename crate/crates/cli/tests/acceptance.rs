//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Set `MINIVERSE_RECORD_BASELINE=1` to rewrite the stored
//! throughput baseline from this machine.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use miniverse_cli::benchmark;
use miniverse_core::registry::ENV_IDS;
use miniverse_server::client::{run_study_session, study_leaks};
use miniverse_server::{serve, ServiceConfig, SessionService};
use miniverse_testkit::checks::{self, CheckResult};
use serde::{Deserialize, Serialize};

const SOLVABLE: [&str; 6] =
    ["Grid-Empty-8x8", "Grid-GoToObj-8x8", "Grid-FourRooms", "Grid-UnlockPickup", "World3D-GoToObj", "World3D-FourRooms"];

const GRID_BENCH_ENV: &str = "Grid-FourRooms";
const RENDER_BENCH_ENV: &str = "World3D-FourRooms";
const MIN_GRID_STEPS_PER_SEC: f64 = 100_000.0;
const MIN_RENDER_FPS: f64 = 500.0;
const BASELINE_TOLERANCE: f64 = 0.30;

#[derive(Debug, Serialize, Deserialize)]
struct Baseline {
    grid_env: String,
    grid_steps_per_sec: f64,
    render_env: String,
    render_fps: f64,
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn determinism() -> CheckResult {
    let bin = env!("CARGO_BIN_EXE_miniverse");
    let run = || -> Result<String, String> {
        let o = Command::new(bin).args(["digest", "--trajectories", "100", "--steps", "200"]).output().map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(format!("digest exited with {:?}", o.status.code()));
        }
        Ok(String::from_utf8_lossy(&o.stdout).into_owned())
    };
    let (a, b) = (run()?, run()?);
    if a != b {
        return Err("digests differ between processes".into());
    }
    if a.lines().count() != ENV_IDS.len() {
        return Err(format!("expected {} digest lines", ENV_IDS.len()));
    }
    let mut logs = 0;
    for id in ENV_IDS {
        logs += checks::record_and_replay(id, 100, 200)?.len();
    }
    Ok(format!("{} envs x 100 trajectories identical across 2 processes; {logs} logs replay", ENV_IDS.len()))
}

fn solvability() -> CheckResult {
    let mut parts = Vec::new();
    for id in SOLVABLE {
        checks::solvability(id, 1000).map_err(|e| format!("{id}: {e}"))?;
        parts.push(id);
    }
    Ok(format!("1000 seeds each for {}", parts.join(", ")))
}

fn reward_scale() -> CheckResult {
    let mean = checks::reward_scale(100)?;
    if (0.85..=0.99).contains(&mean) {
        Ok(format!("mean {mean:.4} in [0.85, 0.99]"))
    } else {
        Err(format!("mean {mean:.4} outside [0.85, 0.99]"))
    }
}

fn renderer() -> CheckResult {
    let d = checks::renderer_determinism(20)?;
    let o = checks::renderer_oracle()?;
    let z = checks::full_occlusion()?;
    Ok(format!("determinism {d}; ray oracle {o}; occlusion {z}"))
}

fn collision() -> CheckResult {
    let worst = checks::collision_fuzz(100_000, 50)?;
    if worst < 1e-9 {
        Ok(format!("10^5 sequences x 50 actions, worst penetration {worst:.3e}"))
    } else {
        Err(format!("penetration {worst:.3e}"))
    }
}

fn best_of<F: FnMut() -> Result<f64, String>>(n: usize, mut f: F) -> Result<f64, String> {
    let mut best = 0.0f64;
    for _ in 0..n {
        best = best.max(f()?);
    }
    Ok(best)
}

fn throughput() -> CheckResult {
    let grid = best_of(3, || Ok(benchmark(GRID_BENCH_ENV, 300_000, 0).map_err(|e| e.to_string())?.steps_per_sec))?;
    let fps = best_of(3, || {
        let r = benchmark(RENDER_BENCH_ENV, 5_000, 0).map_err(|e| e.to_string())?;
        r.frames_per_sec.ok_or_else(|| "no frame rate".to_string())
    })?;
    let path = crate_dir().join("tests/baseline/throughput.json");
    if std::env::var_os("MINIVERSE_RECORD_BASELINE").is_some() {
        let b = Baseline {
            grid_env: GRID_BENCH_ENV.into(),
            grid_steps_per_sec: grid.round(),
            render_env: RENDER_BENCH_ENV.into(),
            render_fps: fps.round(),
        };
        std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::write(&path, serde_json::to_string_pretty(&b).unwrap() + "\n").map_err(|e| e.to_string())?;
    }
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let base: Baseline = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let (rg, rf) = (grid / base.grid_steps_per_sec, fps / base.render_fps);
    let detail = format!(
        "grid {grid:.0} steps/s ({rg:.2}x baseline, floor {MIN_GRID_STEPS_PER_SEC:.0}); \
         3D 80x60 {fps:.0} fps ({rf:.2}x baseline, floor {MIN_RENDER_FPS:.0})"
    );
    let floor = 1.0 - BASELINE_TOLERANCE;
    if rg < floor || rf < floor {
        return Err(format!("regression beyond {:.0}%: {detail}", BASELINE_TOLERANCE * 100.0));
    }
    if base.grid_steps_per_sec < MIN_GRID_STEPS_PER_SEC || base.render_fps < MIN_RENDER_FPS {
        return Err(format!("baseline below the absolute bounds: {detail}"));
    }
    Ok(detail)
}

fn protocol() -> CheckResult {
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.map_err(|e| e.to_string())?;
        let addr = listener.local_addr().map_err(|e| e.to_string())?.to_string();
        let service = Arc::new(SessionService::new(ServiceConfig::default()));
        let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
        let server = tokio::spawn(serve(listener, service.clone(), async move {
            let _ = stopped.await;
        }));
        let report = run_study_session(&addr, "Grid-FourRooms", 10, 2024).await.map_err(|e| e.to_string());
        let _ = stop.send(());
        let _ = server.await;
        let report = report?;
        if report.completed_episodes != 10 {
            return Err(format!("{} completed episodes", report.completed_episodes));
        }
        if !report.replay_ok {
            return Err("study log does not replay".into());
        }
        let names = service.list_envs().iter().find(|e| e.env_id == report.env_id).map(|e| e.action_names.clone());
        let leaks = study_leaks(&report.transcript, &names.unwrap_or_default());
        if !leaks.is_empty() {
            return Err(format!("mapping data in study messages: {}", leaks.join("; ")));
        }
        Ok(format!(
            "10 episodes, {} key presses, {} messages without mapping data, log replays",
            report.keys_pressed,
            report.transcript.len()
        ))
    })
}

fn main() {
    let vocab = crate_dir().join("../core/tests/golden/vocabulary.txt");
    let vocab: &Path = &vocab;
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> CheckResult + '_>)> = vec![
        ("determinism and replay", Duration::from_secs(60), Box::new(determinism)),
        ("transition oracle", Duration::from_secs(10), Box::new(checks::transition_oracle)),
        ("visibility oracle", Duration::from_secs(60), Box::new(|| checks::visibility_oracle(10_000, 99))),
        ("env solvability", Duration::from_secs(300), Box::new(solvability)),
        ("reward scale", Duration::from_secs(60), Box::new(reward_scale)),
        ("transfer improvement arithmetic", Duration::from_secs(1), Box::new(|| checks::transfer_arithmetic(1e-12))),
        ("observation spec", Duration::from_secs(1), Box::new(checks::observation_shapes)),
        ("one-hot encoding", Duration::from_secs(1), Box::new(move || checks::one_hot_bijection(vocab))),
        ("renderer properties", Duration::from_secs(60), Box::new(renderer)),
        ("collision fuzz", Duration::from_secs(120), Box::new(collision)),
        ("throughput regression", Duration::from_secs(60), Box::new(throughput)),
        ("protocol conformance", Duration::from_secs(60), Box::new(protocol)),
    ];
    let mut failed = 0;
    for (name, budget, check) in &criteria {
        let t0 = Instant::now();
        let result = check();
        let took = t0.elapsed();
        let over = took > *budget;
        match (&result, over) {
            (Ok(detail), false) => println!("PASS {name}: {detail} [{:.1}s]", took.as_secs_f64()),
            (Ok(detail), true) => {
                failed += 1;
                println!("FAIL {name}: over {}s budget: {detail} [{:.1}s]", budget.as_secs(), took.as_secs_f64());
            }
            (Err(e), _) => {
                failed += 1;
                println!("FAIL {name}: {e} [{:.1}s]", took.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

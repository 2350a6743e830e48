use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use miniverse_cli::{benchmark, digest, env_ids, exit, replay, run_random, CliError};
use miniverse_server::service::DEFAULT_CAPACITY;
use miniverse_server::{serve, shutdown_signal, ServiceConfig, SessionService};

#[derive(Parser)]
#[command(name = "miniverse", version, about = "Run, benchmark, replay and serve miniverse environments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play uniformly random actions and print one line per episode.
    RunRandom {
        #[arg(long)]
        env: String,
        #[arg(long, default_value_t = 1)]
        episodes: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the episodes to this `.epjsonl` file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Measure stepping (and for 3D, rendering) throughput.
    Benchmark {
        #[arg(long)]
        env: String,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verify a log by replay and plot its trajectories as SVG.
    Replay {
        #[arg(long)]
        log: PathBuf,
        /// Defaults to the log path with an `.svg` extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the session service until SIGTERM or Ctrl-C.
    Serve {
        #[arg(long, env = "PORT", default_value_t = 8765)]
        port: u16,
        #[arg(long, env = "HOST", default_value = "127.0.0.1")]
        host: String,
        #[arg(long, env = "LOG_DIR")]
        log_dir: Option<PathBuf>,
        #[arg(long, env = "CAPACITY", default_value_t = DEFAULT_CAPACITY)]
        capacity: usize,
    },
    /// Print a determinism digest per environment.
    Digest {
        /// One environment; all when omitted.
        #[arg(long)]
        env: Option<String>,
        #[arg(long, default_value_t = 100)]
        trajectories: u64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::RunRandom { env, episodes, seed, log } => {
            let summaries = run_random(&env, episodes, seed, log.as_deref())?;
            for s in &summaries {
                println!("{s}");
            }
            let mean = summaries.iter().map(|s| s.reward).sum::<f64>() / summaries.len().max(1) as f64;
            let successes = summaries.iter().filter(|s| s.terminated && s.reward > 0.0).count();
            println!("summary env={env} episodes={} mean_reward={mean:.6} successes={successes}", summaries.len());
        }
        Command::Benchmark { env, steps, seed } => {
            let report = benchmark(&env, steps, seed)?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
        }
        Command::Replay { log, out } => {
            let out = out.unwrap_or_else(|| log.with_extension("svg"));
            let episodes = replay(&log, &out)?;
            println!("verified episodes={episodes} svg={}", out.display());
        }
        Command::Serve { port, host, log_dir, capacity } => {
            if let Some(dir) = &log_dir {
                std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
            }
            let config = ServiceConfig { capacity, log_dir, ..ServiceConfig::default() };
            let rt = tokio::runtime::Runtime::new().map_err(|source| CliError::Io { path: "runtime".into(), source })?;
            rt.block_on(async move {
                let addr = format!("{host}:{port}");
                let listener = tokio::net::TcpListener::bind(&addr)
                    .await
                    .map_err(|source| CliError::BindFailure { addr: addr.clone(), source })?;
                let local = listener.local_addr().map_err(|source| CliError::BindFailure { addr, source })?;
                println!("listening on http://{local}");
                let service = Arc::new(SessionService::new(config));
                serve(listener, service, shutdown_signal())
                    .await
                    .map_err(|source| CliError::Io { path: "serve".into(), source })
            })?;
            println!("shut down");
        }
        Command::Digest { env, trajectories, steps, seed } => {
            for id in env_ids(env.as_deref())? {
                println!("{id} {}", digest(&id, trajectories, steps, seed)?);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::OK as u8 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

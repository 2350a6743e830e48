//! The environment contract as a reusable suite, run over every registered
//! environment and every wrapper stack.

use miniverse_core::rng::{below, label, stream};
use miniverse_core::{Env, EnvError, Observation, RenderMode, StepOutcome};

fn obs_bytes(o: &Observation) -> Vec<u8> {
    let mut v = o.image.as_bytes().to_vec();
    v.extend(o.direction);
    v.extend(format!("{:?}", o.mission).into_bytes());
    v
}

fn outcome_bytes(o: &StepOutcome) -> Vec<u8> {
    let mut v = obs_bytes(&o.observation);
    v.extend(o.reward.to_bits().to_le_bytes());
    v.extend([o.terminated as u8, o.truncated as u8, o.info.success as u8]);
    v.extend(o.info.step_count.to_le_bytes());
    v
}

/// An action that can neither succeed nor fail an episode.
fn idle_action(env: &dyn Env) -> usize {
    let names = env.action_space().names();
    names.iter().position(|n| n == "done").unwrap_or_else(|| names.iter().position(|n| n == "turn left").expect("idle action"))
}

/// Runs a seeded random rollout, checking per-step invariants, and returns
/// the concatenated bytes of every outcome.
fn rollout(env: &mut dyn Env, seed: u64, steps: usize) -> Result<Vec<u8>, String> {
    let id = env.env_id().to_string();
    let (spec_space, spec) = env.space_descriptors();
    let (obs, info) = env.reset(Some(seed));
    if info.seed != seed || info.step_count != 0 {
        return Err(format!("{id}: reset info {info:?}"));
    }
    if !spec.conforms(&obs) {
        return Err(format!("{id}: reset observation does not conform to its spec"));
    }
    let mut bytes = obs_bytes(&obs);
    let mut rng = stream(seed, label::ROLLOUT);
    let n = spec_space.n();
    let max = env.max_steps();
    for _ in 0..steps {
        let out = env.step(below(&mut rng, n)).map_err(|e| format!("{id}: {e}"))?;
        if !spec.conforms(&out.observation) {
            return Err(format!("{id}: step observation does not conform"));
        }
        if !(0.0..=1.0).contains(&out.reward) || (!out.terminated && out.reward != 0.0) {
            return Err(format!("{id}: reward {} with terminated={}", out.reward, out.terminated));
        }
        if out.info.step_count > max {
            return Err(format!("{id}: step_count beyond max_steps"));
        }
        let should_truncate = out.info.step_count == max && !out.terminated;
        if out.truncated != should_truncate || (out.terminated && out.truncated) {
            return Err(format!("{id}: truncated={} at step {}", out.truncated, out.info.step_count));
        }
        bytes.extend(outcome_bytes(&out));
        if out.terminated || out.truncated {
            if env.step(0) != Err(EnvError::EpisodeEnded) {
                return Err(format!("{id}: stepping after the end did not fail"));
            }
            let (obs, _) = env.reset(Some(seed.wrapping_add(1)));
            bytes.extend(obs_bytes(&obs));
        }
    }
    Ok(bytes)
}

/// The full suite over environments produced by `make`.
pub fn check_env(make: &dyn Fn() -> Box<dyn Env>) -> Result<(), String> {
    let mut env = make();
    let id = env.env_id().to_string();
    let n = env.action_space().n();
    if env.step(0) != Err(EnvError::NotReset) {
        return Err(format!("{id}: step before reset must fail"));
    }
    if env.pose().is_some() {
        return Err(format!("{id}: pose before reset"));
    }

    let (a, _) = env.reset(Some(42));
    let (b, _) = env.reset(Some(42));
    let (c, _) = make().reset(Some(42));
    if obs_bytes(&a) != obs_bytes(&b) || obs_bytes(&a) != obs_bytes(&c) {
        return Err(format!("{id}: reset(42) not reproducible"));
    }
    if env.step(n) != Err(EnvError::ActionOutOfRange { action: n, n }) {
        return Err(format!("{id}: action {n} accepted"));
    }

    let (obs, info) = env.reset(None);
    let pose = env.pose();
    let mut again = make();
    let (obs2, _) = again.reset(Some(info.seed));
    if obs_bytes(&obs) != obs_bytes(&obs2) || pose != again.pose() {
        return Err(format!("{id}: recorded seed {} does not reproduce the start", info.seed));
    }

    for seed in 0..3 {
        let first = rollout(env.as_mut(), seed, 300)?;
        let second = rollout(make().as_mut(), seed, 300)?;
        if first != second {
            return Err(format!("{id}: rollout {seed} not bit-identical"));
        }
    }

    let idle = idle_action(env.as_ref());
    env.reset(Some(5));
    let mut total = 0.0;
    let mut last = None;
    for _ in 0..env.max_steps() {
        let out = env.step(idle).map_err(|e| format!("{id}: {e}"))?;
        total += out.reward;
        last = Some((out.terminated, out.truncated));
    }
    if last != Some((false, true)) || total != 0.0 {
        return Err(format!("{id}: idling ended with {last:?}, reward {total}"));
    }

    env.reset(Some(9));
    for mode in [RenderMode::AgentView, RenderMode::TopDown] {
        env.render_frame(mode).map_err(|e| format!("{id}: render {mode:?}: {e}"))?;
    }
    Ok(())
}

use crate::env::EpisodeClock;

/// Success reward, decaying linearly from 1 at step 0 to 0.1 at `max_steps`.
pub fn compute_reward(clock: &EpisodeClock) -> f64 {
    1.0 - 0.9 * (clock.step_count() as f64 / clock.max_steps() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_midpoint() {
        assert_eq!(compute_reward(&EpisodeClock::at(0, 100)), 1.0);
        assert!((compute_reward(&EpisodeClock::at(100, 100)) - 0.1).abs() < 1e-15);
        assert!((compute_reward(&EpisodeClock::at(5, 100)) - 0.955).abs() < 1e-15);
    }
}

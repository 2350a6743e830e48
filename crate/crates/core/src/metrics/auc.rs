use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("a curve needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("timesteps must be strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("baseline AUC must be positive, got {0}")]
    ZeroBaseline(f64),
}

/// `(timestep, episodic reward)` pairs with strictly increasing timesteps.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardCurve {
    points: Vec<(u64, f64)>,
}

impl RewardCurve {
    pub fn new(points: Vec<(u64, f64)>) -> Result<Self, MetricsError> {
        if let Some(i) = points.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(MetricsError::NotIncreasing(i + 1));
        }
        Ok(Self { points })
    }

    /// One point per episode, placed at the cumulative timestep where the
    /// episode ended.
    pub fn from_episodes(episodes: impl IntoIterator<Item = (u64, f64)>) -> Result<Self, MetricsError> {
        let mut t = 0;
        let points = episodes
            .into_iter()
            .map(|(len, reward)| {
                t += len;
                (t, reward)
            })
            .collect();
        Self::new(points)
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self { points: self.points.iter().map(|&(t, r)| (t, r * k)).collect() }
    }
}

/// Trapezoidal area over the timestep axis.
pub fn area_under_curve(curve: &RewardCurve) -> Result<f64, MetricsError> {
    let p = curve.points();
    if p.len() < 2 {
        return Err(MetricsError::TooFewPoints(p.len()));
    }
    Ok(p.windows(2).map(|w| (w[1].0 - w[0].0) as f64 * (w[0].1 + w[1].1) / 2.0).sum())
}

/// Relative AUC gain of a warm-started run over its cold-started baseline.
pub fn transfer_improvement(auc_transfer: f64, auc_baseline: f64) -> Result<f64, MetricsError> {
    if auc_baseline.is_nan() || auc_baseline <= 0.0 {
        return Err(MetricsError::ZeroBaseline(auc_baseline));
    }
    Ok((auc_transfer - auc_baseline) / auc_baseline)
}

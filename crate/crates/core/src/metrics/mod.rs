//! Episode logs, replay verification, reward-curve metrics and trajectory
//! plots.

mod auc;
mod log;
mod plot;
mod record;
mod replay;

pub use auc::{area_under_curve, transfer_improvement, MetricsError, RewardCurve};
pub use log::{
    read_log, EpisodeLog, EpisodeMeta, EpisodeRecord, LogError, LogHeader, LogRecord, LogWriter, StepRecord,
    LOG_EXTENSION, LOG_FORMAT_VERSION,
};
pub use plot::{episode_polyline, plot_trajectory, plot_trajectory_raster, PlotError, PANEL_COLUMNS};
pub use record::{unix_millis, Recorder};
pub use replay::{replay_verify, verify_log, Mismatch, ReplayError};

use std::fmt::Write as _;

use base64::Engine as _;
use thiserror::Error;

use super::log::{EpisodeLog, EpisodeRecord};
use super::replay::{verify_log, Mismatch, ReplayError};
use crate::env::{Env, Pose};
use crate::grid::render_rgb;
use crate::image::{Rgb, RgbImage};
use crate::registry::make;
use crate::world3d::{render_topdown3d, TopDownView, Vec2, DEFAULT_PX_PER_UNIT};

/// Panels per row in the SVG layout.
pub const PANEL_COLUMNS: usize = 5;
const GRID_TILE_PX: usize = 16;
const LABEL_H: usize = 20;
const GAP: usize = 10;
const PATH_COLOR: Rgb = [255, 255, 255];
const START_COLOR: Rgb = [0, 192, 0];
const END_COLOR: Rgb = [255, 48, 48];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlotError {
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error("replay mismatch: {0}")]
    ReplayMismatch(Mismatch),
    #[error("episode index {0} out of range")]
    NoSuchEpisode(usize),
}

/// Top-down background of an episode's world and the agent's path in its
/// pixel coordinates.
fn episode_scene(env: &mut dyn Env, ep: &EpisodeRecord) -> (RgbImage, Vec<(f64, f64)>) {
    env.reset(Some(ep.meta.seed));
    let poses = std::iter::once(ep.meta.start_pose).chain(ep.steps.iter().map(|s| s.pose));
    if let Some(world) = env.as_grid().and_then(|g| g.world()) {
        let img = render_rgb(&world.grid, None, GRID_TILE_PX, None);
        let k = GRID_TILE_PX as f64;
        let pts = poses
            .filter_map(|p| match p {
                Pose::Grid { x, y, .. } => Some(((x as f64 + 0.5) * k, (y as f64 + 0.5) * k)),
                Pose::World { .. } => None,
            })
            .collect();
        (img, pts)
    } else {
        let world = env.as_world3d().and_then(|w| w.world()).expect("environment exposes its world");
        let img = render_topdown3d(&world.plan, None, DEFAULT_PX_PER_UNIT);
        let view = TopDownView::for_plan(&world.plan, DEFAULT_PX_PER_UNIT);
        let pts = poses
            .filter_map(|p| match p {
                Pose::World { x, z, .. } => Some(view.to_px(Vec2::new(x, z))),
                Pose::Grid { .. } => None,
            })
            .collect();
        (img, pts)
    }
}

/// Path vertices of episode `index` (0-based position in the log), with
/// consecutive duplicates removed.
pub fn episode_polyline(log: &EpisodeLog, index: usize) -> Result<Vec<(f64, f64)>, PlotError> {
    let ep = log.episodes.get(index).ok_or(PlotError::NoSuchEpisode(index))?;
    let mut env = make(&log.header.env_id).map_err(ReplayError::from)?;
    let (_, mut pts) = episode_scene(env.as_mut(), ep);
    pts.dedup();
    Ok(pts)
}

fn hex(c: Rgb) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn check(log: &EpisodeLog) -> Result<(), PlotError> {
    verify_log(log)?.map_err(PlotError::ReplayMismatch)
}

/// One labelled panel per episode: world background, path polyline, start
/// disc and end square. Fails unless the log replays exactly.
pub fn plot_trajectory(log: &EpisodeLog) -> Result<String, PlotError> {
    check(log)?;
    let mut env = make(&log.header.env_id).map_err(ReplayError::from)?;
    let scenes: Vec<(u32, RgbImage, Vec<(f64, f64)>)> = log
        .episodes
        .iter()
        .map(|ep| {
            let (img, mut pts) = episode_scene(env.as_mut(), ep);
            pts.dedup();
            (ep.meta.episode, img, pts)
        })
        .collect();
    let cell_w = scenes.iter().map(|s| s.1.width()).max().unwrap_or(0);
    let cell_h = scenes.iter().map(|s| s.1.height()).max().unwrap_or(0) + LABEL_H;
    let cols = scenes.len().clamp(1, PANEL_COLUMNS);
    let rows = scenes.len().div_ceil(PANEL_COLUMNS).max(1);
    let width = cols * cell_w + (cols + 1) * GAP;
    let height = rows * cell_h + (rows + 1) * GAP;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r##"<rect width="{width}" height="{height}" fill="#ffffff"/>"##);
    for (i, (episode, img, pts)) in scenes.iter().enumerate() {
        let x0 = GAP + (i % PANEL_COLUMNS) * (cell_w + GAP);
        let y0 = GAP + (i / PANEL_COLUMNS) * (cell_h + GAP);
        let png = base64::engine::general_purpose::STANDARD.encode(img.to_png());
        let _ = writeln!(svg, r#"<g class="panel" data-episode="{episode}" transform="translate({x0},{y0})">"#);
        let _ = writeln!(
            svg,
            r#"<image width="{}" height="{}" href="data:image/png;base64,{png}"/>"#,
            img.width(),
            img.height()
        );
        let points: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="path" points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            points.join(" "),
            hex(PATH_COLOR)
        );
        if let (Some(s), Some(e)) = (pts.first(), pts.last()) {
            let _ = writeln!(svg, r#"<circle class="start" cx="{:.2}" cy="{:.2}" r="4" fill="{}"/>"#, s.0, s.1, hex(START_COLOR));
            let _ = writeln!(
                svg,
                r#"<rect class="end" x="{:.2}" y="{:.2}" width="8" height="8" fill="{}"/>"#,
                e.0 - 4.0,
                e.1 - 4.0,
                hex(END_COLOR)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="4" y="{}" font-family="monospace" font-size="14">{episode}</text>"#,
            img.height() + 15
        );
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Raster version of one panel, for pixel-level checks and PPM output.
pub fn plot_trajectory_raster(log: &EpisodeLog, index: usize) -> Result<RgbImage, PlotError> {
    check(log)?;
    let ep = log.episodes.get(index).ok_or(PlotError::NoSuchEpisode(index))?;
    let mut env = make(&log.header.env_id).map_err(ReplayError::from)?;
    let (mut img, pts) = episode_scene(env.as_mut(), ep);
    let px = |p: &(f64, f64)| (p.0.floor() as i64, p.1.floor() as i64);
    for w in pts.windows(2) {
        img.line(px(&w[0]), px(&w[1]), PATH_COLOR);
    }
    for (p, c) in [(pts.first(), START_COLOR), (pts.last(), END_COLOR)] {
        if let Some(p) = p {
            let (x, y) = px(p);
            for dy in -2..=2 {
                for dx in -2..=2 {
                    img.put(x + dx, y + dy, c);
                }
            }
        }
    }
    Ok(img)
}

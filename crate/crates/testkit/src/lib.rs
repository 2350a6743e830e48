//! Reference implementations written independently of `miniverse-core`'s
//! internals, used as oracles by its tests and by the acceptance harness.

pub mod checks;
pub mod contract;
pub mod grid_solver;
pub mod los;
pub mod nav3d;
pub mod ray_oracle;
pub mod stats;
pub mod transition_table;

use std::path::Path;

/// Compares `actual` with the snapshot at `path`. With `UPDATE_GOLDEN` set
/// the snapshot is rewritten instead.
pub fn assert_golden(path: &Path, actual: &str) {
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).expect("create golden dir");
        }
        std::fs::write(path, actual).expect("write golden file");
        return;
    }
    let expected = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("missing golden file {}: {e}; rerun with UPDATE_GOLDEN=1", path.display()));
    assert!(expected == actual, "{} changed:\n--- expected\n{expected}\n--- actual\n{actual}", path.display());
}

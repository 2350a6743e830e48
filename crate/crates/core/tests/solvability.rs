use miniverse_testkit::checks;

fn solvable(env_id: &str) {
    let detail = checks::solvability(env_id, 1000).unwrap_or_else(|e| panic!("{e}"));
    println!("{env_id}: {detail}");
}

#[test]
fn grid_empty() {
    solvable("Grid-Empty-8x8");
}

#[test]
fn grid_gotoobj() {
    solvable("Grid-GoToObj-8x8");
}

#[test]
fn grid_four_rooms() {
    solvable("Grid-FourRooms");
}

#[test]
fn grid_unlock_pickup() {
    solvable("Grid-UnlockPickup");
}

#[test]
fn world3d_gotoobj() {
    solvable("World3D-GoToObj");
}

#[test]
fn world3d_four_rooms() {
    solvable("World3D-FourRooms");
}

#[test]
fn shortest_path_reward_scale() {
    let mean = checks::reward_scale(100).unwrap();
    println!("mean reward {mean:.4}");
    assert!((0.85..=0.99).contains(&mean), "mean {mean}");
}

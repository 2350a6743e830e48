//! Construction of the shipped environments by id.

use serde::{Deserialize, Serialize};

use crate::env::{Env, EnvError};
use crate::grid_envs::{GridEnv, GridEnvConfig};
use crate::world3d::{World3dConfig, World3dEnv};

/// Every registered id, in catalog order.
pub const ENV_IDS: [&str; 8] = [
    "Grid-Empty-8x8",
    "Grid-GoToObj-8x8",
    "Grid-FourRooms",
    "Grid-UnlockPickup",
    "Grid-FourRooms-Nav3",
    "World3D-GoToObj",
    "World3D-FourRooms",
    "World3D-FourRooms-Nav3",
];

pub fn make(env_id: &str) -> Result<Box<dyn Env>, EnvError> {
    Ok(match env_id {
        "Grid-Empty-8x8" => Box::new(GridEnv::new(GridEnvConfig::empty(8))),
        "Grid-GoToObj-8x8" => Box::new(GridEnv::new(GridEnvConfig::gotoobj(8))),
        "Grid-FourRooms" => Box::new(GridEnv::new(GridEnvConfig::four_rooms())),
        "Grid-UnlockPickup" => Box::new(GridEnv::new(GridEnvConfig::unlock_pickup())),
        "Grid-FourRooms-Nav3" => Box::new(GridEnv::new(GridEnvConfig::four_rooms().with_nav_only(env_id))),
        "World3D-GoToObj" => Box::new(World3dEnv::new(World3dConfig::gotoobj())),
        "World3D-FourRooms" => Box::new(World3dEnv::new(World3dConfig::four_rooms())),
        "World3D-FourRooms-Nav3" => Box::new(World3dEnv::new(World3dConfig::four_rooms().with_nav_only(env_id))),
        _ => return Err(EnvError::UnknownEnvId(env_id.to_string())),
    })
}

/// The id used for a human-study session: the FourRooms tasks are played
/// with the three navigation actions only.
pub fn study_variant(env_id: &str) -> Result<&'static str, EnvError> {
    let id = match env_id {
        "Grid-FourRooms" => "Grid-FourRooms-Nav3",
        "World3D-FourRooms" => "World3D-FourRooms-Nav3",
        other => ENV_IDS.iter().copied().find(|&i| i == other).ok_or_else(|| EnvError::UnknownEnvId(other.into()))?,
    };
    Ok(id)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvSummary {
    pub env_id: String,
    /// "grid" or "world3d".
    pub family: String,
    pub n_actions: usize,
    pub action_names: Vec<String>,
    pub obs_shape: [usize; 3],
    pub max_steps: u32,
}

pub fn catalog() -> Vec<EnvSummary> {
    ENV_IDS
        .iter()
        .map(|id| {
            let env = make(id).expect("registered id");
            let (space, spec) = env.space_descriptors();
            EnvSummary {
                env_id: id.to_string(),
                family: if env.as_grid().is_some() { "grid" } else { "world3d" }.into(),
                n_actions: space.n(),
                action_names: space.names().to_vec(),
                obs_shape: spec.image_shape,
                max_steps: env.max_steps(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ids_construct() {
        for id in ENV_IDS {
            let env = make(id).unwrap();
            assert_eq!(env.env_id(), id);
        }
        assert_eq!(make("nope").err(), Some(EnvError::UnknownEnvId("nope".into())));
    }

    #[test]
    fn action_counts() {
        let cat = catalog();
        let n = |id: &str| cat.iter().find(|s| s.env_id == id).unwrap().n_actions;
        assert_eq!(n("Grid-FourRooms"), 7);
        assert_eq!(n("World3D-FourRooms"), 8);
        assert_eq!(n("Grid-FourRooms-Nav3"), 3);
        assert_eq!(n("World3D-FourRooms-Nav3"), 3);
        let names = &cat.iter().find(|s| s.env_id == "World3D-FourRooms-Nav3").unwrap().action_names;
        assert_eq!(names, &["turn left", "turn right", "go forward"]);
    }

    #[test]
    fn study_ids() {
        assert_eq!(study_variant("Grid-FourRooms").unwrap(), "Grid-FourRooms-Nav3");
        assert_eq!(study_variant("Grid-Empty-8x8").unwrap(), "Grid-Empty-8x8");
        assert!(study_variant("x").is_err());
    }
}

//! Observation and action transformers. Each wrapper is itself an [`Env`];
//! the outermost layer determines the reported spaces.

use rand::Rng;

use crate::env::{
    DiscreteActionSpace, Env, EnvError, Info, MissionField, MissionSpec, Observation, ObservationSpec, Pose, RenderMode,
    StepOutcome,
};
use crate::grid::encode_full;
use crate::grid_envs::{GridEnv, GRID_OBS_MAX};
use crate::image::RgbImage;
use crate::mission::{MissionVocabulary, TemplateId, ONE_HOT_LEN};
use crate::rng::{below, label, stream, RngStream};
use crate::world3d::World3dEnv;

macro_rules! forward_common {
    () => {
        fn env_id(&self) -> &str {
            self.inner.env_id()
        }
        fn render_frame(&self, mode: RenderMode) -> Result<RgbImage, EnvError> {
            self.inner.render_frame(mode)
        }
        fn pose(&self) -> Option<Pose> {
            self.inner.pose()
        }
        fn mission(&self) -> Option<&str> {
            self.inner.mission()
        }
        fn max_steps(&self) -> u32 {
            self.inner.max_steps()
        }
        fn as_grid(&self) -> Option<&GridEnv> {
            self.inner.as_grid()
        }
        fn as_world3d(&self) -> Option<&World3dEnv> {
            self.inner.as_world3d()
        }
        fn as_world3d_mut(&mut self) -> Option<&mut World3dEnv> {
            self.inner.as_world3d_mut()
        }
    };
}

/// Reduces observations to the image array.
pub struct ImageOnly<E> {
    inner: E,
}

impl<E: Env> ImageOnly<E> {
    pub fn new(inner: E) -> Self {
        Self { inner }
    }

    fn strip(obs: Observation) -> Observation {
        Observation { image: obs.image, direction: None, mission: None }
    }
}

impl<E: Env> Env for ImageOnly<E> {
    forward_common!();

    fn action_space(&self) -> &DiscreteActionSpace {
        self.inner.action_space()
    }

    fn observation_spec(&self) -> ObservationSpec {
        ObservationSpec { has_direction: false, mission: None, ..self.inner.observation_spec() }
    }

    fn reset(&mut self, seed: Option<u64>) -> (Observation, Info) {
        let (obs, info) = self.inner.reset(seed);
        (Self::strip(obs), info)
    }

    fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        let mut out = self.inner.step(action)?;
        out.observation = Self::strip(out.observation);
        Ok(out)
    }
}

/// Replaces go-to mission text with its 18-way one-hot vector. Layers
/// without a mission pass through unchanged.
pub struct OneHotMission<E> {
    inner: E,
    vocab: MissionVocabulary,
}

impl<E: Env> OneHotMission<E> {
    /// Fails with `UnparsableMission` unless the inner missions follow the
    /// go-to template.
    pub fn new(inner: E) -> Result<Self, EnvError> {
        match inner.observation_spec().mission {
            Some(MissionSpec::Text { template: Some(TemplateId::GoTo) }) | None => {}
            Some(MissionSpec::OneHot { .. }) => {}
            Some(MissionSpec::Text { .. }) => {
                let sample = inner.mission().unwrap_or("").to_string();
                return Err(EnvError::UnparsableMission(format!("{}: {sample:?}", inner.env_id())));
            }
        }
        Ok(Self { inner, vocab: MissionVocabulary::default() })
    }

    fn encode(&self, obs: &mut Observation) {
        if let Some(MissionField::Text(text)) = &obs.mission {
            let m = self.vocab.parse_mission(text).expect("go-to template env produced an unparsable mission");
            obs.mission = Some(MissionField::OneHot(self.vocab.encode_one_hot(&m)));
        }
    }
}

impl<E: Env> Env for OneHotMission<E> {
    forward_common!();

    fn action_space(&self) -> &DiscreteActionSpace {
        self.inner.action_space()
    }

    fn observation_spec(&self) -> ObservationSpec {
        let spec = self.inner.observation_spec();
        let mission = spec.mission.map(|_| MissionSpec::OneHot { len: ONE_HOT_LEN });
        ObservationSpec { mission, ..spec }
    }

    fn reset(&mut self, seed: Option<u64>) -> (Observation, Info) {
        let (mut obs, info) = self.inner.reset(seed);
        self.encode(&mut obs);
        (obs, info)
    }

    fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        let mut out = self.inner.step(action)?;
        self.encode(&mut out.observation);
        Ok(out)
    }
}

/// With probability `epsilon` replaces the submitted action by a uniform
/// draw. The draws come from a stream keyed by the episode seed, separate
/// from world generation.
pub struct StochasticActions<E> {
    inner: E,
    epsilon: f64,
    rng: RngStream,
}

impl<E: Env> StochasticActions<E> {
    pub fn new(inner: E, epsilon: f64) -> Result<Self, EnvError> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(EnvError::InvalidEpsilon(epsilon));
        }
        Ok(Self { inner, epsilon, rng: stream(0, label::PERTURB) })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl<E: Env> Env for StochasticActions<E> {
    forward_common!();

    fn action_space(&self) -> &DiscreteActionSpace {
        self.inner.action_space()
    }

    fn observation_spec(&self) -> ObservationSpec {
        self.inner.observation_spec()
    }

    fn reset(&mut self, seed: Option<u64>) -> (Observation, Info) {
        let (obs, info) = self.inner.reset(seed);
        self.rng = stream(info.seed, label::PERTURB);
        (obs, info)
    }

    fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        self.inner.action_space().check(action)?;
        let n = self.inner.action_space().n();
        let executed = if self.rng.random::<f64>() < self.epsilon { below(&mut self.rng, n) } else { action };
        let mut out = self.inner.step(executed)?;
        out.info.executed_action = Some(executed);
        Ok(out)
    }
}

/// Replaces the egocentric grid view with the whole map, agent marked.
pub struct FullyObservable<E> {
    inner: E,
}

impl<E: Env> FullyObservable<E> {
    pub fn new(inner: E) -> Result<Self, EnvError> {
        if inner.as_grid().is_none() {
            return Err(EnvError::NotAGridEnv);
        }
        Ok(Self { inner })
    }

    fn full_view(&self, obs: &mut Observation) {
        let world = self.inner.as_grid().and_then(|g| g.world()).expect("grid world after reset");
        obs.image = encode_full(&world.grid, &world.agent);
    }
}

impl<E: Env> Env for FullyObservable<E> {
    forward_common!();

    fn action_space(&self) -> &DiscreteActionSpace {
        self.inner.action_space()
    }

    fn observation_spec(&self) -> ObservationSpec {
        let g = self.inner.as_grid().expect("checked at construction").config();
        ObservationSpec {
            image_shape: [g.height as usize, g.width as usize, 3],
            image_max: GRID_OBS_MAX,
            ..self.inner.observation_spec()
        }
    }

    fn reset(&mut self, seed: Option<u64>) -> (Observation, Info) {
        let (mut obs, info) = self.inner.reset(seed);
        self.full_view(&mut obs);
        (obs, info)
    }

    fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        let mut out = self.inner.step(action)?;
        self.full_view(&mut out.observation);
        Ok(out)
    }
}

/// Re-renders 3D observations at `width x height` by changing the camera.
pub struct ResizeObservation<E> {
    inner: E,
}

impl<E: Env> ResizeObservation<E> {
    pub fn new(mut inner: E, width: usize, height: usize) -> Result<Self, EnvError> {
        if width == 0 || height == 0 {
            return Err(EnvError::InvalidDims { width, height });
        }
        inner.as_world3d_mut().ok_or(EnvError::NotAWorld3dEnv)?.set_obs_dims(width, height)?;
        Ok(Self { inner })
    }
}

impl<E: Env> Env for ResizeObservation<E> {
    forward_common!();

    fn action_space(&self) -> &DiscreteActionSpace {
        self.inner.action_space()
    }

    fn observation_spec(&self) -> ObservationSpec {
        self.inner.observation_spec()
    }

    fn reset(&mut self, seed: Option<u64>) -> (Observation, Info) {
        self.inner.reset(seed)
    }

    fn step(&mut self, action: usize) -> Result<StepOutcome, EnvError> {
        self.inner.step(action)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::make;

    #[test]
    fn image_only_shapes() {
        let mut g = ImageOnly::new(make("Grid-Empty-8x8").unwrap());
        let (obs, _) = g.reset(Some(1));
        assert_eq!(obs.image.shape(), [7, 7, 3]);
        assert!(obs.mission.is_none() && obs.direction.is_none());
        let mut w = ImageOnly::new(make("World3D-GoToObj").unwrap());
        assert_eq!(w.reset(Some(1)).0.image.shape(), [60, 80, 3]);
    }

    #[test]
    fn one_hot_requires_goto() {
        assert!(matches!(OneHotMission::new(make("Grid-FourRooms").unwrap()), Err(EnvError::UnparsableMission(_))));
        let mut env = OneHotMission::new(make("Grid-GoToObj-8x8").unwrap()).unwrap();
        let (obs, _) = env.reset(Some(5));
        assert!(env.observation_spec().conforms(&obs));
        let Some(MissionField::OneHot(v)) = obs.mission else { panic!("expected one-hot") };
        let decoded = MissionVocabulary::default().decode_one_hot(&v).unwrap();
        assert_eq!(Some(decoded.text.as_str()), env.mission());
    }

    #[test]
    fn epsilon_bounds() {
        assert!(matches!(StochasticActions::new(make("Grid-Empty-8x8").unwrap(), 1.5), Err(EnvError::InvalidEpsilon(_))));
        assert!(StochasticActions::new(make("Grid-Empty-8x8").unwrap(), f64::NAN).is_err());
    }

    #[test]
    fn fully_observable_grid_only() {
        assert_eq!(FullyObservable::new(make("World3D-FourRooms").unwrap()).err(), Some(EnvError::NotAGridEnv));
        let mut env = FullyObservable::new(make("Grid-FourRooms").unwrap()).unwrap();
        let (obs, _) = env.reset(Some(2));
        assert_eq!(obs.image.shape(), [19, 19, 3]);
        assert!(env.observation_spec().conforms(&obs));
    }

    #[test]
    fn resize_dims() {
        let mut env = ResizeObservation::new(make("World3D-FourRooms").unwrap(), 160, 120).unwrap();
        assert_eq!(env.reset(Some(0)).0.image.shape(), [120, 160, 3]);
        let mut tiny = ResizeObservation::new(make("World3D-GoToObj").unwrap(), 1, 1).unwrap();
        assert_eq!(tiny.reset(Some(0)).0.image.shape(), [1, 1, 3]);
        assert_eq!(
            ResizeObservation::new(make("World3D-GoToObj").unwrap(), 0, 5).err(),
            Some(EnvError::InvalidDims { width: 0, height: 5 })
        );
        assert_eq!(ResizeObservation::new(make("Grid-Empty-8x8").unwrap(), 4, 4).err(), Some(EnvError::NotAWorld3dEnv));
    }
}

//! Builds the serving link and the interference covariance from a config.

use crate::array::{build_steering_matrices, SteeringMatrices, TiltConfig};
use crate::channel::{interference_matrix, NoiseInterference};
use crate::error::Result;
use crate::geometry::{generate_path_angles, PathAngles};
use crate::harness::config::{Normalization, ScenarioConfig};
use crate::rng::SeedTree;

/// Seed subtree of the serving link.
pub const SERVING_SEEDS: &str = "serving";

/// Seed subtree of interferer `index`.
pub fn interferer_seed_label(index: usize) -> String {
    format!("interferer-{index}")
}

/// Everything the analytical and Monte Carlo paths need, built once.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub los_elevation: f64,
    pub serving_angles: PathAngles,
    pub serving: SteeringMatrices,
    /// Co-channel interferers only.
    pub interferers: Vec<SteeringMatrices>,
    pub noise: NoiseInterference,
}

impl Scenario {
    /// The same scenario with every serving port tilted to `tilt` radians.
    /// Angles and interference are reused.
    pub fn with_serving_tilt(&self, tilt: f64) -> Result<Self> {
        let tilts = TiltConfig::uniform(tilt, self.config.n_bs)?;
        let serving = serving_steering(&self.config, &self.serving_angles, &tilts)?;
        Ok(Self {
            serving,
            ..self.clone()
        })
    }

    /// The same scenario at a different SNR.
    pub fn with_snr_db(&self, snr_db: f64) -> Result<Self> {
        let mut config = self.config.clone();
        config.snr_db = snr_db;
        let noise = NoiseInterference::new(self.noise.interference().clone(), config.noise_variance())?;
        Ok(Self {
            config,
            noise,
            ..self.clone()
        })
    }
}

fn normalize(config: &ScenarioConfig, steering: SteeringMatrices) -> SteeringMatrices {
    match config.normalization {
        Normalization::SqrtPaths => steering,
        Normalization::Paths => steering.with_extra_path_scaling(),
    }
}

fn serving_steering(config: &ScenarioConfig, angles: &PathAngles, tilts: &TiltConfig) -> Result<SteeringMatrices> {
    let steering = build_steering_matrices(
        angles,
        tilts,
        &config.pattern.to_params(),
        &config.array.to_geometry(),
        config.n_bs,
        config.n_ms,
    )?;
    Ok(normalize(config, steering))
}

/// Draws the serving and interferer path angles, builds their steering
/// matrices and the covariance `R + σ²I`.
pub fn scenario_multicell(config: &ScenarioConfig) -> Result<Scenario> {
    config.validate()?;
    let seeds = SeedTree::new(config.master_seed);
    let pattern = config.pattern.to_params();
    let geometry = config.array.to_geometry();

    let los_elevation = config.serving_los()?;
    let serving_angles = generate_path_angles(
        &config.spectra.to_params(los_elevation),
        config.n_paths,
        &seeds.child(SERVING_SEEDS),
    )?;
    let tilts = config.tilt_deg.resolve(los_elevation, config.n_bs)?;
    let serving = serving_steering(config, &serving_angles, &tilts)?;

    let mut interferers = Vec::new();
    for (i, site) in config.interferers.iter().enumerate() {
        if !site.co_channel {
            continue;
        }
        let los = config.interferer_placement(i)?.los_elevation()?;
        let angles = generate_path_angles(
            &config.spectra.to_params(los),
            config.n_paths,
            &seeds.child(&interferer_seed_label(i)),
        )?;
        let tilts = match &site.tilt_deg {
            Some(spec) => spec.resolve(los, config.n_bs)?,
            None => TiltConfig::uniform(los, config.n_bs)?,
        };
        let steering = build_steering_matrices(&angles, &tilts, &pattern, &geometry, config.n_bs, config.n_ms)?;
        interferers.push(normalize(config, steering));
    }

    let r = interference_matrix(&interferers, config.n_ms)?;
    let noise = NoiseInterference::new(r, config.noise_variance())?;
    Ok(Scenario {
        config: config.clone(),
        los_elevation,
        serving_angles,
        serving,
        interferers,
        noise,
    })
}

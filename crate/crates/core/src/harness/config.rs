//! Scenario configuration, read from TOML. Angles are in degrees and SNR in dB
//! here; everything downstream works in radians and linear units.
//!
//! ```toml
//! n_bs = 20
//! n_ms = 1
//! n_paths = 40
//! snr_db = 5.0
//! tilt_deg = "los"          # or 96.0, or one value per port
//! trials = 2000
//! master_seed = 1
//! normalization = "sqrt-paths"
//!
//! [serving]
//! position = [0.0, 0.0]
//! height = 25.0
//!
//! [ms]
//! position = [250.0, 0.0]
//! height = 1.5
//!
//! [[interferers]]
//! position = [500.0, 0.0]
//! height = 25.0
//! co_channel = true
//! ```
//!
//! Every field has a default, so an empty file is a valid configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::array::{AntennaPatternParams, ArrayGeometry, TiltConfig};
use crate::error::{Error, Result};
use crate::geometry::{AngularSpectrumParams, SitePlacement};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_bs: usize,
    pub n_ms: usize,
    pub n_paths: usize,
    pub snr_db: f64,
    pub tilt_deg: TiltSpec,
    pub trials: usize,
    pub master_seed: u64,
    pub normalization: Normalization,
    pub serving: SiteConfig,
    pub ms: SiteConfig,
    pub interferers: Vec<InterfererConfig>,
    pub pattern: PatternConfig,
    pub array: ArrayConfig,
    pub spectra: SpectraConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_bs: 20,
            n_ms: 1,
            n_paths: 40,
            snr_db: 5.0,
            tilt_deg: TiltSpec::default(),
            trials: 2000,
            master_seed: 1,
            normalization: Normalization::SqrtPaths,
            serving: SiteConfig {
                position: [0.0, 0.0],
                height: 25.0,
            },
            ms: SiteConfig {
                position: [250.0, 0.0],
                height: 1.5,
            },
            interferers: vec![InterfererConfig::default()],
            pattern: PatternConfig::default(),
            array: ArrayConfig::default(),
            spectra: SpectraConfig::default(),
        }
    }
}

/// Port downtilt: `"los"`, one value for every port, or one value per port.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TiltSpec {
    Uniform(f64),
    PerPort(Vec<f64>),
    Named(String),
}

impl Default for TiltSpec {
    fn default() -> Self {
        TiltSpec::Named("los".into())
    }
}

impl TiltSpec {
    /// Per-port tilts in radians; `los` is the given line-of-sight elevation.
    pub fn resolve(&self, los_elevation: f64, n_bs: usize) -> Result<TiltConfig> {
        match self {
            TiltSpec::Uniform(deg) => TiltConfig::uniform(deg.to_radians(), n_bs),
            TiltSpec::PerPort(deg) => {
                if deg.len() != n_bs {
                    return Err(Error::Config(format!("{} tilts given for {n_bs} ports", deg.len())));
                }
                TiltConfig::new(deg.iter().map(|d| d.to_radians()).collect())
            }
            TiltSpec::Named(name) if name.eq_ignore_ascii_case("los") => TiltConfig::uniform(los_elevation, n_bs),
            TiltSpec::Named(name) => Err(Error::Config(format!(
                "unknown tilt `{name}`; use \"los\", a number of degrees or a per-port list"
            ))),
        }
    }
}

/// Overall channel prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `H = (1/√N)·B·diag(α)·Aᴴ`.
    SqrtPaths,
    /// `H = (1/N)·B·diag(α)·Aᴴ`.
    Paths,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    /// Ground coordinates, meters.
    pub position: [f64; 2],
    /// Antenna height, meters.
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterfererConfig {
    pub position: [f64; 2],
    pub height: f64,
    /// Defaults to this interferer's own line-of-sight elevation to the MS.
    pub tilt_deg: Option<TiltSpec>,
    /// An interferer on another frequency band contributes nothing to `R`.
    pub co_channel: bool,
}

impl Default for InterfererConfig {
    fn default() -> Self {
        Self {
            position: [500.0, 0.0],
            height: 25.0,
            tilt_deg: None,
            co_channel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatternConfig {
    pub vertical_3db_deg: f64,
    pub horizontal_3db_deg: f64,
    pub max_gain_db: f64,
    pub attenuation_floor_db: f64,
}

impl Default for PatternConfig {
    fn default() -> Self {
        Self {
            vertical_3db_deg: 15.0,
            horizontal_3db_deg: 70.0,
            max_gain_db: 17.0,
            attenuation_floor_db: 20.0,
        }
    }
}

impl PatternConfig {
    pub fn to_params(&self) -> AntennaPatternParams {
        AntennaPatternParams {
            vertical_3db_beamwidth: self.vertical_3db_deg.to_radians(),
            horizontal_3db_beamwidth: self.horizontal_3db_deg.to_radians(),
            max_gain_db: self.max_gain_db,
            attenuation_floor_db: self.attenuation_floor_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrayConfig {
    pub wavelength_m: f64,
    pub tx_spacing_wavelengths: f64,
    pub rx_spacing_wavelengths: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            wavelength_m: 0.15,
            tx_spacing_wavelengths: 0.5,
            rx_spacing_wavelengths: 0.5,
        }
    }
}

impl ArrayConfig {
    pub fn to_geometry(&self) -> ArrayGeometry {
        let mut g = ArrayGeometry::half_wavelength(self.wavelength_m);
        g.tx_spacing = self.tx_spacing_wavelengths * self.wavelength_m;
        g.rx_spacing = self.rx_spacing_wavelengths * self.wavelength_m;
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectraConfig {
    pub elevation_spread_bs_deg: f64,
    pub elevation_spread_ms_deg: f64,
    pub azimuth_mean_deg: f64,
    pub azimuth_concentration: f64,
    /// Mean elevation of both spectra; defaults to each link's line-of-sight
    /// elevation.
    pub elevation_mean_deg: Option<f64>,
}

impl Default for SpectraConfig {
    fn default() -> Self {
        Self {
            elevation_spread_bs_deg: 7.0,
            elevation_spread_ms_deg: 10.0,
            azimuth_mean_deg: 0.0,
            azimuth_concentration: 5.0,
            elevation_mean_deg: None,
        }
    }
}

impl SpectraConfig {
    pub fn to_params(&self, los_elevation: f64) -> AngularSpectrumParams {
        let mean = self.elevation_mean_deg.map_or(los_elevation, f64::to_radians);
        AngularSpectrumParams {
            elevation_mean_depart: mean,
            elevation_spread_depart: self.elevation_spread_bs_deg.to_radians(),
            elevation_mean_arrive: mean,
            elevation_spread_arrive: self.elevation_spread_ms_deg.to_radians(),
            azimuth_mean: self.azimuth_mean_deg.to_radians(),
            azimuth_concentration: self.azimuth_concentration,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bs == 0 || self.n_ms == 0 || self.n_paths == 0 {
            return Err(Error::Config("n_bs, n_ms and n_paths must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::Config("snr_db must be finite".into()));
        }
        self.serving_placement()?;
        for i in 0..self.interferers.len() {
            self.interferer_placement(i)?;
        }
        self.pattern.to_params().validate()?;
        self.array.to_geometry().validate()?;
        Ok(())
    }

    pub fn noise_variance(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }

    pub fn serving_placement(&self) -> Result<SitePlacement> {
        SitePlacement::new(self.serving.position, self.serving.height, self.ms.position, self.ms.height)
    }

    pub fn interferer_placement(&self, index: usize) -> Result<SitePlacement> {
        let site = &self.interferers[index];
        SitePlacement::new(site.position, site.height, self.ms.position, self.ms.height)
    }

    /// Line-of-sight elevation from the serving base station to the MS.
    pub fn serving_los(&self) -> Result<f64> {
        self.serving_placement()?.los_elevation()
    }
}

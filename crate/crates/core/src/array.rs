//! Port radiation pattern, array responses and the deterministic matrices
//! `A` (`N_BS × N`) and `B` (`N_MS × N`).
//!
//! `A` holds the conjugated transmit steering phases times the real port field
//! amplitude, so that `H = (1/√N)·B·diag(α)·Aᴴ` reproduces the per-path sum
//! entry by entry. Neither matrix carries a path-count prefactor; the channel
//! module applies it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::PathAngles;
use crate::linalg::CMatrix;

/// ITU-style narrow-beam port pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPatternParams {
    pub vertical_3db_beamwidth: f64,
    pub horizontal_3db_beamwidth: f64,
    pub max_gain_db: f64,
    pub attenuation_floor_db: f64,
}

impl Default for AntennaPatternParams {
    fn default() -> Self {
        Self {
            vertical_3db_beamwidth: 15f64.to_radians(),
            horizontal_3db_beamwidth: 70f64.to_radians(),
            max_gain_db: 17.0,
            attenuation_floor_db: 20.0,
        }
    }
}

impl AntennaPatternParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.vertical_3db_beamwidth > 0.0 && self.horizontal_3db_beamwidth > 0.0) {
            return Err(Error::InvalidParameter("3 dB beamwidths must be positive".into()));
        }
        if !(self.attenuation_floor_db > 0.0) {
            return Err(Error::InvalidParameter("attenuation floor must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    pub tx_spacing: f64,
    pub rx_spacing: f64,
    pub wavenumber: f64,
}

impl ArrayGeometry {
    /// Uniform linear arrays with half-wavelength spacing on both ends.
    pub fn half_wavelength(wavelength: f64) -> Self {
        Self {
            tx_spacing: 0.5 * wavelength,
            rx_spacing: 0.5 * wavelength,
            wavenumber: 2.0 * PI / wavelength,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tx_spacing > 0.0 && self.rx_spacing > 0.0 && self.wavenumber > 0.0) {
            return Err(Error::InvalidParameter("array spacings and wavenumber must be positive".into()));
        }
        Ok(())
    }
}

/// Boresight elevation of every base-station port.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltConfig {
    per_port: Vec<f64>,
}

impl TiltConfig {
    pub fn new(per_port: Vec<f64>) -> Result<Self> {
        if per_port.is_empty() {
            return Err(Error::InvalidParameter("at least one port tilt is required".into()));
        }
        if let Some(bad) = per_port.iter().find(|t| !(**t > 0.0 && **t < PI)) {
            return Err(Error::InvalidParameter(format!("port tilt {bad} outside (0, π)")));
        }
        Ok(Self { per_port })
    }

    pub fn uniform(tilt: f64, n_bs: usize) -> Result<Self> {
        Self::new(vec![tilt; n_bs])
    }

    pub fn per_port(&self) -> &[f64] {
        &self.per_port
    }

    pub fn n_ports(&self) -> usize {
        self.per_port.len()
    }
}

/// `A_H(φ) = −min(12 (φ/φ_3dB)², floor)`.
pub fn horizontal_attenuation_db(azimuth: f64, params: &AntennaPatternParams) -> f64 {
    let ratio = azimuth / params.horizontal_3db_beamwidth;
    -(12.0 * ratio * ratio).min(params.attenuation_floor_db)
}

/// `A_V(θ, θ_tilt) = −min(12 ((θ − θ_tilt)/θ_3dB)², floor)`.
pub fn vertical_attenuation_db(elevation: f64, tilt: f64, params: &AntennaPatternParams) -> f64 {
    let ratio = (elevation - tilt) / params.vertical_3db_beamwidth;
    -(12.0 * ratio * ratio).min(params.attenuation_floor_db)
}

/// Square root of the linear port gain: the field amplitude `√g_t`.
pub fn port_field_amplitude(azimuth: f64, elevation: f64, tilt: f64, params: &AntennaPatternParams) -> f64 {
    let attenuation = -(horizontal_attenuation_db(azimuth, params) + vertical_attenuation_db(elevation, tilt, params));
    let gain_db = params.max_gain_db - attenuation.min(params.attenuation_floor_db);
    10f64.powf(gain_db / 20.0)
}

/// Transmit array response of zero-based port `port`:
/// `exp(i k · port · d_t · sin φ · sin θ)`.
pub fn tx_steering_entry(port: usize, azimuth: f64, elevation: f64, geometry: &ArrayGeometry) -> Complex64 {
    steering(port, geometry.tx_spacing, geometry.wavenumber, azimuth, elevation)
}

/// Receive array response of zero-based port `port`.
pub fn rx_steering_entry(port: usize, azimuth: f64, elevation: f64, geometry: &ArrayGeometry) -> Complex64 {
    steering(port, geometry.rx_spacing, geometry.wavenumber, azimuth, elevation)
}

fn steering(port: usize, spacing: f64, wavenumber: f64, azimuth: f64, elevation: f64) -> Complex64 {
    let phase = wavenumber * port as f64 * spacing * azimuth.sin() * elevation.sin();
    Complex64::from_polar(1.0, phase)
}

/// The pair of deterministic matrices defining the channel law.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringMatrices {
    a: CMatrix,
    b: CMatrix,
}

impl SteeringMatrices {
    /// Wraps raw matrices; both must have one column per path.
    pub fn from_matrices(a: CMatrix, b: CMatrix) -> Result<Self> {
        if a.ncols() != b.ncols() || a.ncols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "A has {} columns and B has {}; both need one column per path",
                a.ncols(),
                b.ncols()
            )));
        }
        if a.nrows() == 0 || b.nrows() == 0 {
            return Err(Error::DimensionMismatch("A and B need at least one row".into()));
        }
        Ok(Self { a, b })
    }

    /// `N_BS × N`.
    pub fn a(&self) -> &CMatrix {
        &self.a
    }
    /// `N_MS × N`.
    pub fn b(&self) -> &CMatrix {
        &self.b
    }
    pub fn n_paths(&self) -> usize {
        self.a.ncols()
    }
    pub fn n_bs(&self) -> usize {
        self.a.nrows()
    }
    pub fn n_ms(&self) -> usize {
        self.b.nrows()
    }

    /// Scales `A` by `1/√N`, turning the net `1/√N` channel prefactor into
    /// `1/N` (the literal per-path-sum normalization).
    pub fn with_extra_path_scaling(&self) -> Self {
        let s = 1.0 / (self.n_paths() as f64).sqrt();
        Self {
            a: self.a.scale(s),
            b: self.b.clone(),
        }
    }
}

/// Builds `A` and `B` from the path angles, the per-port tilts and the pattern.
pub fn build_steering_matrices(
    angles: &PathAngles,
    tilts: &TiltConfig,
    pattern: &AntennaPatternParams,
    geometry: &ArrayGeometry,
    n_bs: usize,
    n_ms: usize,
) -> Result<SteeringMatrices> {
    pattern.validate()?;
    geometry.validate()?;
    if tilts.n_ports() != n_bs {
        return Err(Error::DimensionMismatch(format!(
            "{} port tilts supplied for {n_bs} base-station ports",
            tilts.n_ports()
        )));
    }
    if n_ms == 0 {
        return Err(Error::DimensionMismatch("at least one receive port is required".into()));
    }
    let n = angles.n_paths();
    let (phi, theta) = (angles.depart_azimuth(), angles.depart_elevation());
    let (varphi, vartheta) = (angles.arrive_azimuth(), angles.arrive_elevation());
    let a = CMatrix::from_fn(n_bs, n, |s, p| {
        let gain = port_field_amplitude(phi[p], theta[p], tilts.per_port()[s], pattern);
        tx_steering_entry(s, phi[p], theta[p], geometry).conj() * gain
    });
    let b = CMatrix::from_fn(n_ms, n, |u, p| rx_steering_entry(u, varphi[p], vartheta[p], geometry));
    SteeringMatrices::from_matrices(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn pattern() -> AntennaPatternParams {
        AntennaPatternParams::default()
    }

    #[test]
    fn horizontal_attenuation_points() {
        let p = pattern();
        assert_eq!(horizontal_attenuation_db(0.0, &p), 0.0);
        assert!((horizontal_attenuation_db(p.horizontal_3db_beamwidth, &p) + 12.0).abs() < 1e-12);
        assert!((horizontal_attenuation_db(2.0 * p.horizontal_3db_beamwidth, &p) + 20.0).abs() < 1e-12);
        assert_eq!(horizontal_attenuation_db(-0.3, &p), horizontal_attenuation_db(0.3, &p));
    }

    #[test]
    fn vertical_attenuation_points() {
        let p = pattern();
        let tilt = 1.66;
        assert_eq!(vertical_attenuation_db(tilt, tilt, &p), 0.0);
        assert!((vertical_attenuation_db(tilt + p.vertical_3db_beamwidth / 2.0, tilt, &p) + 3.0).abs() < 1e-12);
        assert_eq!(vertical_attenuation_db(tilt + 1.0, tilt, &p), -20.0);
        let shift = 0.2;
        assert!(
            (vertical_attenuation_db(1.5 + shift, 1.7 + shift, &p) - vertical_attenuation_db(1.5, 1.7, &p)).abs()
                < 1e-12
        );
    }

    #[test]
    fn field_amplitude_points() {
        let p = pattern();
        let boresight = port_field_amplitude(0.0, 1.6, 1.6, &p);
        assert!((boresight - 10f64.powf(17.0 / 20.0)).abs() < 1e-12);
        assert!((boresight - 7.0795).abs() < 1e-4);
        let floor = port_field_amplitude(3.0, 0.1, 2.5, &p);
        assert!((floor - 10f64.powf(-3.0 / 20.0)).abs() < 1e-12);
        assert!((floor - 0.7079).abs() < 1e-4);
        // Each term alone at −12 dB, jointly clipped at the 20 dB floor.
        let joint = port_field_amplitude(p.horizontal_3db_beamwidth, 1.6 + p.vertical_3db_beamwidth, 1.6, &p);
        assert!((joint - floor).abs() < 1e-12);
    }

    #[test]
    fn steering_entries() {
        let geo = ArrayGeometry {
            tx_spacing: 0.5,
            rx_spacing: 0.25,
            wavenumber: 2.0 * PI,
        };
        assert_eq!(tx_steering_entry(0, 0.7, 1.2, &geo), Complex64::new(1.0, 0.0));
        for s in 0..5 {
            assert!((tx_steering_entry(s, 0.7, 0.0, &geo) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            assert!((rx_steering_entry(s, 0.7, 0.0, &geo) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        // k·d_t = π.
        assert!((tx_steering_entry(1, FRAC_PI_2, FRAC_PI_2, &geo) + 1.0).norm() < 1e-12);
        assert_eq!(rx_steering_entry(0, 0.7, 1.2, &geo), Complex64::new(1.0, 0.0));
        // k·d_r = π/2, so port index 2 gives phase π.
        assert!((rx_steering_entry(2, FRAC_PI_2, FRAC_PI_2, &geo) + 1.0).norm() < 1e-12);
    }

    #[test]
    fn scalar_boresight_matrices() {
        let angles = PathAngles::new(vec![0.0], vec![1.6], vec![0.0], vec![1.6]).unwrap();
        let tilts = TiltConfig::uniform(1.6, 1).unwrap();
        let m = build_steering_matrices(&angles, &tilts, &pattern(), &ArrayGeometry::half_wavelength(0.15), 1, 1)
            .unwrap();
        assert!((m.a()[(0, 0)] - Complex64::new(7.0795, 0.0)).norm() < 1e-4);
        assert!((m.b()[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let angles = PathAngles::new(vec![0.0], vec![1.6], vec![0.0], vec![1.6]).unwrap();
        let tilts = TiltConfig::uniform(1.6, 3).unwrap();
        let geo = ArrayGeometry::half_wavelength(0.15);
        assert!(matches!(
            build_steering_matrices(&angles, &tilts, &pattern(), &geo, 4, 1),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(TiltConfig::new(vec![0.0]).is_err());
        assert!(TiltConfig::new(vec![]).is_err());
    }
}

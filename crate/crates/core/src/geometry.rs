//! Site geometry and stochastic generation of path angles.
//!
//! Elevations are measured from the zenith: `0` points straight up, `π/2` is
//! the horizon and values above `π/2` point below it. Azimuths are wrapped to
//! `(−π, π]`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::SeedTree;

/// One base station and the mobile it serves (or interferes with).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SitePlacement {
    pub bs_position: [f64; 2],
    pub bs_height: f64,
    pub ms_position: [f64; 2],
    pub ms_height: f64,
}

impl SitePlacement {
    pub fn new(bs_position: [f64; 2], bs_height: f64, ms_position: [f64; 2], ms_height: f64) -> Result<Self> {
        if !(ms_height > 0.0 && bs_height > ms_height) {
            return Err(Error::InvalidParameter(format!(
                "heights must satisfy bs_height > ms_height > 0 (got {bs_height} and {ms_height})"
            )));
        }
        let placement = Self {
            bs_position,
            bs_height,
            ms_position,
            ms_height,
        };
        if !(placement.horizontal_distance() > 0.0) {
            return Err(Error::Domain("mobile sits directly under the base station".into()));
        }
        Ok(placement)
    }

    pub fn horizontal_distance(&self) -> f64 {
        let dx = self.ms_position[0] - self.bs_position[0];
        let dy = self.ms_position[1] - self.bs_position[1];
        dx.hypot(dy)
    }

    pub fn height_difference(&self) -> f64 {
        self.bs_height - self.ms_height
    }

    /// Line-of-sight elevation from the base station towards the mobile.
    pub fn los_elevation(&self) -> Result<f64> {
        los_elevation_angle(self.height_difference(), self.horizontal_distance())
    }
}

/// `π/2 + atan(Δh / d)` where `Δh` is how far the base station sits above the
/// mobile and `d` the horizontal distance.
pub fn los_elevation_angle(height_difference: f64, horizontal_distance: f64) -> Result<f64> {
    if !(horizontal_distance > 0.0) || !height_difference.is_finite() {
        return Err(Error::Domain(format!(
            "line-of-sight elevation needs a positive horizontal distance (got {horizontal_distance})"
        )));
    }
    Ok(FRAC_PI_2 + (height_difference / horizontal_distance).atan())
}

/// Parameters of the elevation (Laplacian) and azimuth (Von Mises) spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularSpectrumParams {
    pub elevation_mean_depart: f64,
    pub elevation_spread_depart: f64,
    pub elevation_mean_arrive: f64,
    pub elevation_spread_arrive: f64,
    pub azimuth_mean: f64,
    pub azimuth_concentration: f64,
}

impl AngularSpectrumParams {
    pub fn validate(&self) -> Result<()> {
        for (name, spread) in [
            ("departure elevation spread", self.elevation_spread_depart),
            ("arrival elevation spread", self.elevation_spread_arrive),
        ] {
            if !(spread > 0.0) || !spread.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive (got {spread})")));
            }
        }
        for (name, mean) in [
            ("departure elevation mean", self.elevation_mean_depart),
            ("arrival elevation mean", self.elevation_mean_arrive),
        ] {
            if !(0.0..=PI).contains(&mean) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, π] (got {mean})")));
            }
        }
        if !(self.azimuth_concentration >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "azimuth concentration must be nonnegative (got {})",
                self.azimuth_concentration
            )));
        }
        if !self.azimuth_mean.is_finite() {
            return Err(Error::InvalidParameter("azimuth mean must be finite".into()));
        }
        Ok(())
    }
}

/// Departure and arrival angles of the `N` single-bounce paths, paired by index.
#[derive(Debug, Clone, PartialEq)]
pub struct PathAngles {
    depart_azimuth: Vec<f64>,
    depart_elevation: Vec<f64>,
    arrive_azimuth: Vec<f64>,
    arrive_elevation: Vec<f64>,
}

impl PathAngles {
    pub fn new(
        depart_azimuth: Vec<f64>,
        depart_elevation: Vec<f64>,
        arrive_azimuth: Vec<f64>,
        arrive_elevation: Vec<f64>,
    ) -> Result<Self> {
        let n = depart_azimuth.len();
        if n == 0 {
            return Err(Error::InvalidParameter("at least one path is required".into()));
        }
        if [depart_elevation.len(), arrive_azimuth.len(), arrive_elevation.len()]
            .iter()
            .any(|&len| len != n)
        {
            return Err(Error::DimensionMismatch("all four angle arrays must have the same length".into()));
        }
        if depart_elevation.iter().chain(&arrive_elevation).any(|e| !(0.0..=PI).contains(e)) {
            return Err(Error::InvalidParameter("elevations must lie in [0, π]".into()));
        }
        if depart_azimuth.iter().chain(&arrive_azimuth).any(|a| !(*a > -PI && *a <= PI)) {
            return Err(Error::InvalidParameter("azimuths must lie in (−π, π]".into()));
        }
        Ok(Self {
            depart_azimuth,
            depart_elevation,
            arrive_azimuth,
            arrive_elevation,
        })
    }

    pub fn n_paths(&self) -> usize {
        self.depart_azimuth.len()
    }
    pub fn depart_azimuth(&self) -> &[f64] {
        &self.depart_azimuth
    }
    pub fn depart_elevation(&self) -> &[f64] {
        &self.depart_elevation
    }
    pub fn arrive_azimuth(&self) -> &[f64] {
        &self.arrive_azimuth
    }
    pub fn arrive_elevation(&self) -> &[f64] {
        &self.arrive_elevation
    }
}

/// Wraps an angle to `(−π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let wrapped = (angle + PI).rem_euclid(TAU) - PI;
    if wrapped <= -PI {
        wrapped + TAU
    } else {
        wrapped
    }
}

/// Draws elevations from the density `∝ exp(−√2·|θ − mean| / spread)` restricted
/// to `[0, π]`. Draws falling outside the support are rejected and redrawn.
pub fn sample_elevation_laplacian<R: Rng + ?Sized>(mean: f64, spread: f64, count: usize, rng: &mut R) -> Vec<f64> {
    debug_assert!(spread > 0.0 && (0.0..=PI).contains(&mean));
    let scale = spread / SQRT_2;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        // Inverse CDF of a two-sided exponential; u in (−1/2, 1/2).
        let u: f64 = rng.gen::<f64>() - 0.5;
        let tail = (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE);
        let theta = mean - scale * u.signum() * tail.ln();
        if (0.0..=PI).contains(&theta) {
            out.push(theta);
        }
    }
    out
}

/// Draws Von Mises(`mean`, `concentration`) azimuths wrapped to `(−π, π]`,
/// using the Best–Fisher wrapped-Cauchy envelope.
pub fn sample_azimuth_von_mises<R: Rng + ?Sized>(mean: f64, concentration: f64, count: usize, rng: &mut R) -> Vec<f64> {
    debug_assert!(concentration >= 0.0);
    if concentration < 1e-12 {
        return (0..count).map(|_| wrap_angle(mean + PI * (2.0 * rng.gen::<f64>() - 1.0))).collect();
    }
    let kappa = concentration;
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    (0..count)
        .map(|_| loop {
            let u1: f64 = rng.gen();
            let u2: f64 = rng.gen();
            let u3: f64 = rng.gen();
            let z = (PI * u1).cos();
            let f = (1.0 + r * z) / (r + z);
            let c = kappa * (r - f);
            if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
                let offset = f.clamp(-1.0, 1.0).acos();
                let signed = if u3 > 0.5 { offset } else { -offset };
                break wrap_angle(mean + signed);
            }
        })
        .collect()
}

/// Substream labels for the four angle families.
pub mod labels {
    pub const DEPART_AZIMUTH: &str = "angles/depart-azimuth";
    pub const DEPART_ELEVATION: &str = "angles/depart-elevation";
    pub const ARRIVE_AZIMUTH: &str = "angles/arrive-azimuth";
    pub const ARRIVE_ELEVATION: &str = "angles/arrive-elevation";
}

/// Draws one set of path angles. Callers generate this once per scenario and
/// reuse it for every channel realization.
pub fn generate_path_angles(params: &AngularSpectrumParams, n_paths: usize, seeds: &SeedTree) -> Result<PathAngles> {
    params.validate()?;
    if n_paths == 0 {
        return Err(Error::InvalidParameter("at least one path is required".into()));
    }
    let depart_azimuth = sample_azimuth_von_mises(
        params.azimuth_mean,
        params.azimuth_concentration,
        n_paths,
        &mut seeds.stream(labels::DEPART_AZIMUTH, 0),
    );
    let depart_elevation = sample_elevation_laplacian(
        params.elevation_mean_depart,
        params.elevation_spread_depart,
        n_paths,
        &mut seeds.stream(labels::DEPART_ELEVATION, 0),
    );
    let arrive_azimuth = sample_azimuth_von_mises(
        params.azimuth_mean,
        params.azimuth_concentration,
        n_paths,
        &mut seeds.stream(labels::ARRIVE_AZIMUTH, 0),
    );
    let arrive_elevation = sample_elevation_laplacian(
        params.elevation_mean_arrive,
        params.elevation_spread_arrive,
        n_paths,
        &mut seeds.stream(labels::ARRIVE_ELEVATION, 0),
    );
    PathAngles::new(depart_azimuth, depart_elevation, arrive_azimuth, arrive_elevation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    #[test]
    fn los_cell_edge_and_inner_radius() {
        let edge = los_elevation_angle(23.5, 250.0).unwrap().to_degrees();
        assert!((edge - 95.37).abs() < 5e-3, "{edge}");
        let inner = los_elevation_angle(23.5, 35.0).unwrap().to_degrees();
        assert!((inner - (90.0 + (23.5_f64 / 35.0).atan().to_degrees())).abs() < 1e-12);
        assert!((inner - 123.88).abs() < 5e-3);
        assert_eq!(los_elevation_angle(0.0, 100.0).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn los_rejects_zero_distance() {
        assert!(matches!(los_elevation_angle(23.5, 0.0), Err(Error::Domain(_))));
        assert!(SitePlacement::new([0.0, 0.0], 25.0, [0.0, 0.0], 1.5).is_err());
        assert!(SitePlacement::new([0.0, 0.0], 1.0, [10.0, 0.0], 1.5).is_err());
    }

    #[test]
    fn los_decreases_with_distance() {
        let mut prev = f64::INFINITY;
        for d in [1.0, 10.0, 100.0, 1e3, 1e4, 1e6] {
            let e = los_elevation_angle(23.5, d).unwrap();
            assert!(e < prev && e > FRAC_PI_2);
            prev = e;
        }
        assert!(prev - FRAC_PI_2 < 1e-4);
    }

    #[test]
    fn site_placement_los() {
        let site = SitePlacement::new([0.0, 0.0], 25.0, [150.0, 200.0], 1.5).unwrap();
        assert!((site.los_elevation().unwrap().to_degrees() - 95.37).abs() < 5e-3);
    }

    #[test]
    fn wrap_convention() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + FRAC_PI_2).abs() < 1e-12);
        assert!((wrap_angle(0.25)).abs() - 0.25 < 1e-15);
    }

    #[test]
    fn tiny_spread_collapses_to_mean() {
        let mut rng = SeedTree::new(1).stream("t", 0);
        let xs = sample_elevation_laplacian(deg(95.0), 1e-12, 100, &mut rng);
        assert!(xs.iter().all(|x| (x - deg(95.0)).abs() < 1e-9));
        let ys = sample_azimuth_von_mises(0.3, 1e9, 100, &mut rng);
        assert!(ys.iter().all(|y| (y - 0.3).abs() < 1e-3));
    }

    #[test]
    fn truncation_keeps_support() {
        let mut rng = SeedTree::new(2).stream("t", 0);
        let xs = sample_elevation_laplacian(0.05, deg(20.0), 10_000, &mut rng);
        assert!(xs.iter().all(|x| (0.0..=PI).contains(x)));
    }

    #[test]
    fn single_path_degenerate_spreads() {
        let params = AngularSpectrumParams {
            elevation_mean_depart: 1.6,
            elevation_spread_depart: 1e-12,
            elevation_mean_arrive: 1.4,
            elevation_spread_arrive: 1e-12,
            azimuth_mean: -0.2,
            azimuth_concentration: 1e12,
        };
        let angles = generate_path_angles(&params, 1, &SeedTree::new(3)).unwrap();
        assert!((angles.depart_elevation()[0] - 1.6).abs() < 1e-9);
        assert!((angles.arrive_elevation()[0] - 1.4).abs() < 1e-9);
        assert!((angles.depart_azimuth()[0] + 0.2).abs() < 1e-4);
        assert!((angles.arrive_azimuth()[0] + 0.2).abs() < 1e-4);
    }

    #[test]
    fn invalid_params_rejected() {
        let mut params = AngularSpectrumParams {
            elevation_mean_depart: 1.6,
            elevation_spread_depart: 0.1,
            elevation_mean_arrive: 1.4,
            elevation_spread_arrive: 0.1,
            azimuth_mean: 0.0,
            azimuth_concentration: 5.0,
        };
        assert!(generate_path_angles(&params, 0, &SeedTree::new(0)).is_err());
        params.elevation_spread_depart = 0.0;
        assert!(params.validate().is_err());
        params.elevation_spread_depart = 0.1;
        params.elevation_mean_arrive = 4.0;
        assert!(params.validate().is_err());
        params.elevation_mean_arrive = 1.4;
        params.azimuth_concentration = -1.0;
        assert!(params.validate().is_err());
    }
}

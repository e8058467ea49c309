//! Downtilt sweeps of the analytical mutual-information distribution.

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::asymptotic_dist::gaussian_approximation;
use crate::error::{Error, Result};
use crate::exact_dist::{build_exact_kernel, theorem1_mean, theorem1_quantile};
use crate::harness::scenario::Scenario;

/// What the argmax is taken over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepMetric {
    MeanMi,
    /// MI at the given CDF level (outage rate).
    MiAtCdfLevel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tilt_deg: f64,
    pub mean_mi: f64,
    pub mi_at_level: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub level: f64,
    pub rows: Vec<SweepRow>,
    pub argmax_tilt_deg: f64,
}

/// Mean and `level`-quantile of the mutual information for the serving link
/// as built. One receive port uses the exact law; more use the Gaussian
/// approximation.
pub fn analytical_summary(scenario: &Scenario, level: f64) -> Result<(f64, f64)> {
    if scenario.config.n_ms == 1 {
        let spectrum = build_exact_kernel(&scenario.serving, &scenario.noise)?.spectrum()?;
        Ok((theorem1_mean(&spectrum)?, theorem1_quantile(&spectrum, level)?))
    } else {
        let approx = gaussian_approximation(&scenario.serving, &scenario.noise)?;
        let sd = approx.std_dev(scenario.serving.n_paths());
        let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(level);
        Ok((approx.mu, approx.mu + sd * z))
    }
}

/// Evaluates every tilt (all serving ports share it) with angles and
/// interference held fixed.
pub fn sweep_tilt(scenario: &Scenario, tilts_deg: &[f64], level: f64, metric: SweepMetric) -> Result<SweepResult> {
    if tilts_deg.is_empty() {
        return Err(Error::InvalidParameter("tilt grid is empty".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("CDF level must lie in (0, 1), got {level}")));
    }
    let rows: Vec<SweepRow> = tilts_deg
        .par_iter()
        .map(|&tilt_deg| {
            let s = scenario.with_serving_tilt(tilt_deg.to_radians())?;
            let (mean_mi, mi_at_level) = analytical_summary(&s, level)?;
            Ok(SweepRow {
                tilt_deg,
                mean_mi,
                mi_at_level,
            })
        })
        .collect::<Result<_>>()?;
    let key = |r: &SweepRow| match metric {
        SweepMetric::MeanMi => r.mean_mi,
        SweepMetric::MiAtCdfLevel => r.mi_at_level,
    };
    let best = rows
        .iter()
        .max_by(|a, b| key(a).total_cmp(&key(b)))
        .expect("nonempty grid");
    Ok(SweepResult {
        level,
        argmax_tilt_deg: best.tilt_deg,
        rows,
    })
}

/// `start, start + step, …` up to and including `stop` (within rounding).
pub fn tilt_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || stop < start {
        return Err(Error::InvalidParameter("tilt grid needs step > 0 and stop ≥ start".into()));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

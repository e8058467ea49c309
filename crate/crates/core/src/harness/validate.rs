//! One-call validation pipelines: build the scenario, run Monte Carlo, compare
//! with the analytical law and apply the pass/fail thresholds.

use crate::asymptotic_dist::{
    assumption_diagnostics, build_kernels, gaussian_approximation, theorem4_cdf, DiagnosticReport,
    DiagnosticThresholds, GaussianMIApprox,
};
use crate::error::{Error, Result};
use crate::exact_dist::{build_exact_kernel, theorem1_cdf, theorem1_mean, theorem2_cdf, CdfMethod};
use crate::harness::compare::{compare_cdf, CdfComparison};
use crate::harness::config::ScenarioConfig;
use crate::harness::montecarlo::{mean_and_std, run_monte_carlo};
use crate::harness::output::MomentRow;
use crate::harness::scenario::{scenario_multicell, Scenario};

pub const GRID_SIZE: usize = 512;
pub const EXACT_KS_MAX: f64 = 0.03;
pub const LOW_SNR_KS_MAX: f64 = 0.03;
pub const HIGH_SNR_KS_MIN: f64 = 0.05;
pub const ASYMPTOTIC_KS_MAX: f64 = 0.05;
pub const MEAN_REL_MAX: f64 = 0.02;
pub const STD_REL_MAX: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct ExactValidation {
    pub comparison: CdfComparison,
    pub method: CdfMethod,
    pub n_eigenvalues: usize,
    pub moments: Vec<MomentRow>,
    pub passed: bool,
}

/// Single-port exact law against Monte Carlo.
pub fn validate_exact(config: &ScenarioConfig) -> Result<ExactValidation> {
    if config.n_ms != 1 {
        return Err(Error::Config(format!(
            "the exact law needs one receive port (n_ms = {})",
            config.n_ms
        )));
    }
    let scenario = scenario_multicell(config)?;
    let spectrum = build_exact_kernel(&scenario.serving, &scenario.noise)?.spectrum()?;
    let samples = run_monte_carlo(&scenario, config.trials, config.master_seed)?;
    let comparison = compare_cdf(&samples, |y| Ok(theorem1_cdf(&spectrum, y)?.probability), GRID_SIZE)?;
    let (mc_mean, _) = mean_and_std(&samples);
    let moments = vec![MomentRow {
        quantity: "mean".into(),
        monte_carlo: mc_mean,
        analytical: theorem1_mean(&spectrum)?,
    }];
    Ok(ExactValidation {
        passed: comparison.ks_distance <= EXACT_KS_MAX,
        method: spectrum.method(),
        n_eigenvalues: spectrum.len(),
        comparison,
        moments,
    })
}

#[derive(Debug, Clone)]
pub struct LowSnrPoint {
    pub snr_db: f64,
    pub comparison: CdfComparison,
}

#[derive(Debug, Clone)]
pub struct LowSnrValidation {
    pub low: LowSnrPoint,
    pub high: LowSnrPoint,
    pub passed: bool,
}

fn low_snr_point(base: &Scenario, snr_db: f64, trials: usize, seed: u64) -> Result<LowSnrPoint> {
    let scenario = base.with_snr_db(snr_db)?;
    let spectrum = build_exact_kernel(&scenario.serving, &scenario.noise)?.spectrum()?;
    let samples = run_monte_carlo(&scenario, trials, seed)?;
    let comparison = compare_cdf(&samples, |x| Ok(theorem2_cdf(&spectrum, x)?.probability), GRID_SIZE)?;
    Ok(LowSnrPoint { snr_db, comparison })
}

/// Low-SINR law against Monte Carlo of the exact mutual information, at an
/// SNR where it should fit and one where it should not.
pub fn validate_lowsnr(config: &ScenarioConfig, low_snr_db: f64, high_snr_db: f64) -> Result<LowSnrValidation> {
    let base = scenario_multicell(config)?;
    let low = low_snr_point(&base, low_snr_db, config.trials, config.master_seed)?;
    let high = low_snr_point(&base, high_snr_db, config.trials, config.master_seed)?;
    Ok(LowSnrValidation {
        passed: low.comparison.ks_distance <= LOW_SNR_KS_MAX && high.comparison.ks_distance > HIGH_SNR_KS_MIN,
        low,
        high,
    })
}

#[derive(Debug, Clone)]
pub struct AsymptoticValidation {
    pub comparison: CdfComparison,
    pub approx: GaussianMIApprox,
    /// Mean then standard deviation.
    pub moments: Vec<MomentRow>,
    pub passed: bool,
}

/// Gaussian approximation against Monte Carlo.
pub fn validate_asymptotic(config: &ScenarioConfig) -> Result<AsymptoticValidation> {
    let scenario = scenario_multicell(config)?;
    let approx = gaussian_approximation(&scenario.serving, &scenario.noise)?;
    let n = scenario.serving.n_paths();
    let samples = run_monte_carlo(&scenario, config.trials, config.master_seed)?;
    let comparison = compare_cdf(&samples, |x| Ok(theorem4_cdf(&approx, n, x)), GRID_SIZE)?;
    let (mc_mean, mc_std) = mean_and_std(&samples);
    let moments = vec![
        MomentRow {
            quantity: "mean".into(),
            monte_carlo: mc_mean,
            analytical: approx.mu,
        },
        MomentRow {
            quantity: "std".into(),
            monte_carlo: mc_std,
            analytical: approx.std_dev(n),
        },
    ];
    let passed = comparison.ks_distance <= ASYMPTOTIC_KS_MAX
        && moments[0].relative_error() <= MEAN_REL_MAX
        && moments[1].relative_error() <= STD_REL_MAX;
    Ok(AsymptoticValidation {
        comparison,
        approx,
        moments,
        passed,
    })
}

/// Assumption checks of the Gaussian approximation for the configured link.
pub fn diagnostics(config: &ScenarioConfig, thresholds: &DiagnosticThresholds) -> Result<DiagnosticReport> {
    let scenario = scenario_multicell(config)?;
    let kernels = build_kernels(&scenario.serving);
    let (approx, degenerate) = match gaussian_approximation(&scenario.serving, &scenario.noise) {
        Ok(a) => (Some(a), None),
        Err(Error::DegenerateFluctuation { value, .. }) => (None, Some(value)),
        Err(e) => return Err(e),
    };
    let mut report = assumption_diagnostics(&scenario.serving, &kernels, approx.as_ref(), thresholds);
    if report.fluctuation.is_none() {
        report.fluctuation = degenerate;
    }
    Ok(report)
}

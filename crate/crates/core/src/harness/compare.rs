//! Empirical vs analytical CDF comparison.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct CdfComparison {
    pub grid: Vec<f64>,
    pub empirical: Vec<f64>,
    pub analytical: Vec<f64>,
    /// Largest gap between the two CDFs over the samples (both one-sided
    /// limits) and the grid.
    pub ks_distance: f64,
}

/// Proportion of `sorted` at or below `x`.
pub fn empirical_cdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&s| s <= x) as f64 / sorted.len() as f64
}

/// Compares `samples` with `cdf` on a `grid_size`-point grid over
/// `[0, 1.2·max sample]`.
pub fn compare_cdf<F>(samples: &[f64], cdf: F, grid_size: usize) -> Result<CdfComparison>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: samples.len(),
            min: MIN_SAMPLES,
        });
    }
    if grid_size < 2 {
        return Err(Error::InvalidParameter("grid needs at least two points".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("samples must be finite".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;

    let at_samples: Vec<f64> = sorted.par_iter().map(|&x| cdf(x)).collect::<Result<_>>()?;
    let mut ks = 0.0_f64;
    for (i, f) in at_samples.iter().enumerate() {
        ks = ks.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }

    let top = 1.2 * sorted[sorted.len() - 1];
    let top = if top > 0.0 { top } else { 1.0 };
    let grid: Vec<f64> = (0..grid_size).map(|i| top * i as f64 / (grid_size - 1) as f64).collect();
    let analytical: Vec<f64> = grid.par_iter().map(|&x| cdf(x)).collect::<Result<_>>()?;
    let empirical: Vec<f64> = grid.iter().map(|&x| empirical_cdf(&sorted, x)).collect();
    for (e, a) in empirical.iter().zip(&analytical) {
        ks = ks.max((e - a).abs());
    }
    Ok(CdfComparison {
        grid,
        empirical,
        analytical,
        ks_distance: ks,
    })
}

/// One-sample 1% critical value, asymptotic form.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

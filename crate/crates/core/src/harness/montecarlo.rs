//! Seeded, parallel Monte Carlo of the instantaneous mutual information.

use rayon::prelude::*;

use crate::channel::{mutual_information, realize_channel, GainVector};
use crate::error::Result;
use crate::harness::scenario::{Scenario, SERVING_SEEDS};
use crate::rng::SeedTree;

/// Label of the per-trial gain stream under the serving subtree.
pub const GAIN_STREAM: &str = "gains";

/// `trials` draws of the mutual information with fresh `α ~ CN(0, I)` per
/// trial. Trial `t` uses gain stream `t`, so the result does not depend on
/// scheduling.
pub fn run_monte_carlo(scenario: &Scenario, trials: usize, master_seed: u64) -> Result<Vec<f64>> {
    let seeds = SeedTree::new(master_seed).child(SERVING_SEEDS);
    let n = scenario.serving.n_paths();
    run_monte_carlo_with_gains(scenario, trials, |trial| {
        GainVector::draw(n, &mut seeds.stream(GAIN_STREAM, trial))
    })
}

/// Like [`run_monte_carlo`] with caller-supplied gains per trial index.
pub fn run_monte_carlo_with_gains<G>(scenario: &Scenario, trials: usize, gains: G) -> Result<Vec<f64>>
where
    G: Fn(u64) -> GainVector + Sync,
{
    (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let h = realize_channel(&scenario.serving, &gains(trial))?;
            mutual_information(&h, &scenario.noise)
        })
        .collect()
}

/// Sample mean and (unbiased) standard deviation.
pub fn mean_and_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

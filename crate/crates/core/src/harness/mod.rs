//! Scenario configuration, Monte Carlo, CDF comparison, tilt sweeps and CSV
//! output, plus the validation pipelines behind the `mimo3d` CLI.

pub mod compare;
pub mod config;
pub mod montecarlo;
pub mod output;
pub mod scenario;
pub mod sweep;
pub mod validate;

pub use compare::{compare_cdf, CdfComparison};
pub use config::ScenarioConfig;
pub use montecarlo::run_monte_carlo;
pub use scenario::{scenario_multicell, Scenario};
pub use sweep::{sweep_tilt, SweepMetric, SweepResult};

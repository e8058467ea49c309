use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mimo3d::asymptotic_dist::DiagnosticThresholds;
use mimo3d::harness::output::{write_cdf_csv, write_moments_csv, write_sweep_csv};
use mimo3d::harness::scenario::scenario_multicell;
use mimo3d::harness::sweep::{sweep_tilt, tilt_grid, SweepMetric};
use mimo3d::harness::validate::{
    diagnostics, validate_asymptotic, validate_exact, validate_lowsnr, ASYMPTOTIC_KS_MAX, EXACT_KS_MAX,
    HIGH_SNR_KS_MIN, LOW_SNR_KS_MAX,
};
use mimo3d::harness::ScenarioConfig;
use mimo3d::{Error, Result};

#[derive(Parser)]
#[command(name = "mimo3d", version, about = "3D MIMO mutual-information distributions: validation and downtilt sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML scenario file; defaults apply to anything left out.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials (overrides the config).
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory for CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Mean,
    Quantile,
}

#[derive(Subcommand)]
enum Command {
    /// Exact single-port CDF against Monte Carlo.
    ValidateExact(Common),
    /// Low-SINR CDF against Monte Carlo at a low and a high SNR.
    ValidateLowsnr {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
        low_snr: f64,
        #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
        high_snr: f64,
    },
    /// Gaussian approximation against Monte Carlo, with moment errors.
    ValidateAsymptotic(Common),
    /// Analytical mean MI and quantile over a grid of serving downtilts.
    SweepTilt {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 85.0)]
        from: f64,
        #[arg(long, default_value_t = 105.0)]
        to: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// CDF level of the reported quantile.
        #[arg(long, default_value_t = 0.1)]
        level: f64,
        #[arg(long, value_enum, default_value_t = Metric::Mean)]
        metric: Metric,
    },
    /// Assumption checks of the Gaussian approximation.
    Diagnostics(Common),
}

fn load(common: &Common) -> Result<ScenarioConfig> {
    let mut config = match &common.config {
        Some(path) => ScenarioConfig::from_file(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.master_seed = seed;
    }
    if let Some(trials) = common.trials {
        config.trials = trials;
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(path: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(path.to_path_buf())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::ValidateExact(common) => {
            let config = load(&common)?;
            let v = validate_exact(&config)?;
            let dir = out_dir(&common.out)?;
            write_cdf_csv(&dir.join("cdf.csv"), &v.comparison)?;
            write_moments_csv(&dir.join("moments.csv"), &v.moments)?;
            println!(
                "exact: {} eigenvalues ({:?}), KS = {:.4} (max {EXACT_KS_MAX}), MC mean {:.5} vs {:.5}",
                v.n_eigenvalues, v.method, v.comparison.ks_distance, v.moments[0].monte_carlo, v.moments[0].analytical
            );
            println!("{}", verdict(v.passed));
            Ok(v.passed)
        }
        Command::ValidateLowsnr {
            common,
            low_snr,
            high_snr,
        } => {
            let config = load(&common)?;
            let v = validate_lowsnr(&config, low_snr, high_snr)?;
            let dir = out_dir(&common.out)?;
            for (name, point) in [("low", &v.low), ("high", &v.high)] {
                let sub = out_dir(&dir.join(name))?;
                write_cdf_csv(&sub.join("cdf.csv"), &point.comparison)?;
            }
            println!(
                "low-SINR law: KS = {:.4} at {} dB (max {LOW_SNR_KS_MAX}), KS = {:.4} at {} dB (min {HIGH_SNR_KS_MIN})",
                v.low.comparison.ks_distance, v.low.snr_db, v.high.comparison.ks_distance, v.high.snr_db
            );
            println!("{}", verdict(v.passed));
            Ok(v.passed)
        }
        Command::ValidateAsymptotic(common) => {
            let config = load(&common)?;
            let v = validate_asymptotic(&config)?;
            let dir = out_dir(&common.out)?;
            write_cdf_csv(&dir.join("cdf.csv"), &v.comparison)?;
            write_moments_csv(&dir.join("moments.csv"), &v.moments)?;
            println!(
                "gaussian: mu = {:.5}, sigma_a^2 = {:.5}, KS = {:.4} (max {ASYMPTOTIC_KS_MAX})",
                v.approx.mu, v.approx.sigma_a_sq, v.comparison.ks_distance
            );
            for m in &v.moments {
                println!(
                    "  {}: MC {:.5} vs {:.5} (relative error {:.4})",
                    m.quantity,
                    m.monte_carlo,
                    m.analytical,
                    m.relative_error()
                );
            }
            println!("{}", verdict(v.passed));
            Ok(v.passed)
        }
        Command::SweepTilt {
            common,
            from,
            to,
            step,
            level,
            metric,
        } => {
            let config = load(&common)?;
            let scenario = scenario_multicell(&config)?;
            let metric = match metric {
                Metric::Mean => SweepMetric::MeanMi,
                Metric::Quantile => SweepMetric::MiAtCdfLevel,
            };
            let sweep = sweep_tilt(&scenario, &tilt_grid(from, to, step)?, level, metric)?;
            let dir = out_dir(&common.out)?;
            write_sweep_csv(&dir.join("sweep.csv"), &sweep)?;
            println!(
                "line-of-sight elevation {:.2} deg, best tilt {} deg",
                scenario.los_elevation.to_degrees(),
                sweep.argmax_tilt_deg
            );
            Ok(true)
        }
        Command::Diagnostics(common) => {
            let config = load(&common)?;
            let thresholds = DiagnosticThresholds::default();
            let r = diagnostics(&config, &thresholds)?;
            println!(
                "N_BS/N = {:.3} [{}, {}]: {}",
                r.dimension_ratio,
                thresholds.min_ratio,
                thresholds.max_ratio,
                verdict(r.dimension_ok)
            );
            println!(
                "max spectral/Frobenius norm ratio = {:.4} (max {}): {}",
                r.norm_ratio,
                thresholds.max_norm_ratio,
                verdict(r.norm_ok)
            );
            match r.fluctuation {
                Some(v) => println!(
                    "fluctuation f'Θf/det² = {v:.4e} (min {:e}): {}",
                    thresholds.min_fluctuation,
                    verdict(r.fluctuation_ok)
                ),
                None => println!("fluctuation unavailable: FAIL"),
            }
            Ok(r.all_ok())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

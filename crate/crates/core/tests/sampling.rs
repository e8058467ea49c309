use std::f64::consts::PI;

use mimo3d::geometry::{
    generate_path_angles, los_elevation_angle, sample_azimuth_von_mises, sample_elevation_laplacian,
    AngularSpectrumParams, SitePlacement,
};
use mimo3d::rng::SeedTree;

const SAMPLES: usize = 100_000;

fn ks_against(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

fn laplace_cdf(x: f64, loc: f64, scale: f64) -> f64 {
    if x < loc {
        0.5 * ((x - loc) / scale).exp()
    } else {
        1.0 - 0.5 * (-(x - loc) / scale).exp()
    }
}

/// Laplace CDF renormalized to [0, π].
fn truncated_laplace_cdf(x: f64, mean: f64, spread: f64) -> f64 {
    let b = spread / 2f64.sqrt();
    let lo = laplace_cdf(0.0, mean, b);
    let hi = laplace_cdf(PI, mean, b);
    ((laplace_cdf(x.clamp(0.0, PI), mean, b) - lo) / (hi - lo)).clamp(0.0, 1.0)
}

/// `I_ν(x)` by its power series.
fn bessel_i(nu: u32, x: f64) -> f64 {
    let mut term = (x / 2.0).powi(nu as i32) / (1..=nu).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= (x / 2.0).powi(2) / (k as f64 * (k + nu) as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Von Mises CDF on (−π, π] by cumulative Simpson integration of the density.
fn von_mises_cdf_table(mu: f64, kappa: f64) -> impl Fn(f64) -> f64 {
    let cells = 20_000;
    let h = 2.0 * PI / cells as f64;
    let norm = 2.0 * PI * bessel_i(0, kappa);
    let density = move |x: f64| (kappa * (x - mu).cos()).exp() / norm;
    let mut table = vec![0.0; cells + 1];
    for i in 0..cells {
        let a = -PI + i as f64 * h;
        table[i + 1] = table[i] + h / 6.0 * (density(a) + 4.0 * density(a + h / 2.0) + density(a + h));
    }
    move |x: f64| {
        let pos = ((x + PI) / h).clamp(0.0, cells as f64);
        let i = (pos.floor() as usize).min(cells - 1);
        let frac = pos - i as f64;
        table[i] + frac * (table[i + 1] - table[i])
    }
}

fn resultant_length(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let c: f64 = samples.iter().map(|x| x.cos()).sum::<f64>() / n;
    let s: f64 = samples.iter().map(|x| x.sin()).sum::<f64>() / n;
    c.hypot(s)
}

fn paper_params() -> AngularSpectrumParams {
    let los = 95.37f64.to_radians();
    AngularSpectrumParams {
        elevation_mean_depart: los,
        elevation_spread_depart: 7f64.to_radians(),
        elevation_mean_arrive: los,
        elevation_spread_arrive: 10f64.to_radians(),
        azimuth_mean: 0.0,
        azimuth_concentration: 5.0,
    }
}

#[test]
fn los_elevation_values() {
    let edge = los_elevation_angle(23.5, 250.0).unwrap().to_degrees();
    assert!((edge - 95.37).abs() < 0.005, "{edge}");
    let inner = los_elevation_angle(23.5, 35.0).unwrap().to_degrees();
    assert!((inner - (90.0 + (23.5f64 / 35.0).atan().to_degrees())).abs() < 1e-12);
    assert!((inner - 123.88).abs() < 0.005);
    assert_eq!(los_elevation_angle(0.0, 100.0).unwrap(), PI / 2.0);
    assert!(los_elevation_angle(23.5, 0.0).is_err());

    let placement = SitePlacement::new([0.0, 0.0], 25.0, [150.0, 200.0], 1.5).unwrap();
    assert!((placement.los_elevation().unwrap().to_degrees() - edge).abs() < 1e-12);
}

#[test]
fn los_elevation_decreases_with_distance() {
    let mut last = f64::INFINITY;
    for d in [1.0, 10.0, 35.0, 100.0, 250.0, 1e3, 1e5] {
        let e = los_elevation_angle(23.5, d).unwrap();
        assert!(e < last);
        last = e;
    }
    assert!((los_elevation_angle(23.5, 1e9).unwrap() - PI / 2.0).abs() < 1e-7);
}

#[test]
fn laplacian_median_and_spread() {
    let mean = 95.37f64.to_radians();
    let spread = 7f64.to_radians();
    let mut rng = SeedTree::new(11).stream("laplace", 0);
    let mut samples = sample_elevation_laplacian(mean, spread, SAMPLES, &mut rng);
    assert!(samples.iter().all(|x| (0.0..=PI).contains(x)));

    let n = samples.len() as f64;
    let avg = samples.iter().sum::<f64>() / n;
    let std = (samples.iter().map(|x| (x - avg).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((std / spread - 1.0).abs() < 0.02, "std {} vs {}", std.to_degrees(), 7.0);

    samples.sort_by(f64::total_cmp);
    let median = samples[SAMPLES / 2];
    // Sample-median standard error for Laplace(scale b) is b/√n.
    let se = spread / 2f64.sqrt() / n.sqrt();
    assert!((median - mean).abs() < 3.0 * se, "median off by {} SE", (median - mean).abs() / se);
}

#[test]
fn laplacian_marginal_ks() {
    let mean = 95.37f64.to_radians();
    let spread = 7f64.to_radians();
    let mut rng = SeedTree::new(12).stream("laplace", 0);
    let samples = sample_elevation_laplacian(mean, spread, SAMPLES, &mut rng);
    let ks = ks_against(samples, |x| truncated_laplace_cdf(x, mean, spread));
    assert!(ks < ks_critical_1pct(SAMPLES), "{ks}");

    // Near the boundary the truncation matters.
    let mut rng = SeedTree::new(13).stream("laplace", 0);
    let samples = sample_elevation_laplacian(0.05, 0.2, SAMPLES, &mut rng);
    assert!(samples.iter().all(|&x| x >= 0.0));
    let ks = ks_against(samples, |x| truncated_laplace_cdf(x, 0.05, 0.2));
    assert!(ks < ks_critical_1pct(SAMPLES), "{ks}");
}

#[test]
fn tiny_spread_collapses_to_mean() {
    let mut rng = SeedTree::new(14).stream("laplace", 0);
    let s = sample_elevation_laplacian(1.3, 1e-9, 100, &mut rng);
    assert!(s.iter().all(|x| (x - 1.3).abs() < 1e-7));
}

#[test]
fn von_mises_resultant_length() {
    let ratio = bessel_i(1, 5.0) / bessel_i(0, 5.0);
    assert!((ratio - 0.8934).abs() < 1e-4);
    let mut rng = SeedTree::new(21).stream("vm", 0);
    let samples = sample_azimuth_von_mises(0.0, 5.0, SAMPLES, &mut rng);
    assert!(samples.iter().all(|&x| x > -PI && x <= PI));
    let r = resultant_length(&samples);
    assert!((r / ratio - 1.0).abs() < 0.01, "{r} vs {ratio}");
}

#[test]
fn von_mises_marginal_ks() {
    for (mu, kappa, seed) in [(0.0, 5.0, 22), (2.8, 1.5, 23), (-1.0, 40.0, 24)] {
        let mut rng = SeedTree::new(seed).stream("vm", 0);
        let samples = sample_azimuth_von_mises(mu, kappa, SAMPLES, &mut rng);
        let ks = ks_against(samples, von_mises_cdf_table(mu, kappa));
        assert!(ks < ks_critical_1pct(SAMPLES), "mu {mu} kappa {kappa}: {ks}");
    }
}

#[test]
fn von_mises_limits() {
    let mut rng = SeedTree::new(25).stream("vm", 0);
    let uniform = sample_azimuth_von_mises(0.3, 0.0, SAMPLES, &mut rng);
    assert!(resultant_length(&uniform) < 0.01);
    let ks = ks_against(uniform, |x| (x + PI) / (2.0 * PI));
    assert!(ks < ks_critical_1pct(SAMPLES));

    let mut rng = SeedTree::new(26).stream("vm", 0);
    let sharp = sample_azimuth_von_mises(PI, 1e8, 1000, &mut rng);
    assert!(sharp.iter().all(|&x| (x.abs() - PI).abs() < 1e-3));
}

#[test]
fn generated_angles_follow_their_spectra() {
    let params = paper_params();
    let angles = generate_path_angles(&params, 40, &SeedTree::new(31)).unwrap();
    let crit = 0.252; // one-sample KS, n = 40, α = 0.01
    let vm = von_mises_cdf_table(0.0, 5.0);
    let checks = [
        ks_against(angles.depart_azimuth().to_vec(), &vm),
        ks_against(angles.arrive_azimuth().to_vec(), &vm),
        ks_against(angles.depart_elevation().to_vec(), |x| {
            truncated_laplace_cdf(x, params.elevation_mean_depart, params.elevation_spread_depart)
        }),
        ks_against(angles.arrive_elevation().to_vec(), |x| {
            truncated_laplace_cdf(x, params.elevation_mean_arrive, params.elevation_spread_arrive)
        }),
    ];
    for ks in checks {
        assert!(ks < crit, "{checks:?}");
    }
}

#[test]
fn generated_angles_are_deterministic_and_independent() {
    let params = paper_params();
    let a = generate_path_angles(&params, 40, &SeedTree::new(5)).unwrap();
    let b = generate_path_angles(&params, 40, &SeedTree::new(5)).unwrap();
    assert_eq!(a, b);
    let c = generate_path_angles(&params, 40, &SeedTree::new(6)).unwrap();
    assert_ne!(a, c);
    // Departure and arrival azimuths share parameters but not streams.
    assert_ne!(a.depart_azimuth(), a.arrive_azimuth());
}

#[test]
fn single_degenerate_path_sits_at_the_means() {
    let params = AngularSpectrumParams {
        elevation_mean_depart: 1.2,
        elevation_spread_depart: 1e-12,
        elevation_mean_arrive: 2.0,
        elevation_spread_arrive: 1e-12,
        azimuth_mean: -0.4,
        azimuth_concentration: 1e14,
    };
    let a = generate_path_angles(&params, 1, &SeedTree::new(1)).unwrap();
    assert!((a.depart_elevation()[0] - 1.2).abs() < 1e-9);
    assert!((a.arrive_elevation()[0] - 2.0).abs() < 1e-9);
    assert!((a.depart_azimuth()[0] + 0.4).abs() < 1e-5);
    assert!((a.arrive_azimuth()[0] + 0.4).abs() < 1e-5);
}

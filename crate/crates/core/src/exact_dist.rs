//! Exact and low-SINR mutual-information CDFs through the quadratic form
//! `αᴴ C α`.
//!
//! With `α ~ CN(0, I)`, `αᴴ C α` is distributed as `Σᵢ λᵢ·Exp(1)` where `λᵢ` are
//! the eigenvalues of the Hermitian PSD kernel
//! `C = (1/N)·(Bᴴ Ω B) ∘ (AᴴA)ᵀ`. For distinct eigenvalues the CDF is the
//! hypoexponential sum of exponentials; for clustered eigenvalues (or weights
//! too large to sum accurately in `f64`) the CDF falls back to Gil-Pelaez
//! inversion of the characteristic function `∏ᵢ 1/(1 − j t λᵢ)`.
//!
//! With a single receive port the mutual information is `log(1 + αᴴCα)`
//! exactly, so its CDF is the hypoexponential CDF at `e^y − 1`. With several
//! receive ports, `Tr(Ω H Hᴴ) = αᴴCα` is only the first-order (low SINR)
//! approximation of the mutual information.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::array::SteeringMatrices;
use crate::channel::NoiseInterference;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_asymmetry, hermitian_eigenvalues, hermitian_part, CMatrix};
use crate::quadrature::{integrate, Tolerance};

/// Largest accepted condition number of `R + σ²I` when building `C`.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Eigenvalues down to `−NEGATIVE_EIGENVALUE_TOL · max(1, λ_max)` are clamped to zero.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-10;
/// Eigenvalues at or below `ZERO_EIGENVALUE_REL · λ_max` are treated as zero and dropped.
pub const ZERO_EIGENVALUE_REL: f64 = 1e-12;
/// Neighbouring eigenvalues closer than this (relative) are one cluster.
pub const CLUSTER_REL: f64 = 1e-8;
/// Closed-form weights whose absolute sum exceeds this are not trusted.
pub const WEIGHT_LIMIT: f64 = 1e6;

/// The Hermitian PSD kernel `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactKernel {
    c: CMatrix,
}

impl ExactKernel {
    /// Wraps an arbitrary Hermitian matrix (symmetrized on entry).
    pub fn from_matrix(c: CMatrix) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::DimensionMismatch("kernel must be square".into()));
        }
        let scale = c.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
        let asymmetry = hermitian_asymmetry(&c);
        if asymmetry > 1e-10 * scale {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(Self { c: hermitian_part(&c) })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.c
    }

    pub fn trace(&self) -> f64 {
        self.c.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn spectrum(&self) -> Result<EigenSpectrum> {
        EigenSpectrum::new(hermitian_eigenvalues(&self.c))
    }
}

/// `C = (1/N)·(Bᴴ Ω B) ∘ (AᴴA)ᵀ`.
pub fn build_exact_kernel(steering: &SteeringMatrices, ni: &NoiseInterference) -> Result<ExactKernel> {
    if ni.n_ms() != steering.n_ms() {
        return Err(Error::DimensionMismatch(format!(
            "covariance is {0}×{0} but B has {1} rows",
            ni.n_ms(),
            steering.n_ms()
        )));
    }
    if ni.condition_number() > CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            condition: ni.condition_number(),
            limit: CONDITION_LIMIT,
        });
    }
    let b = steering.b();
    let a = steering.a();
    let n = steering.n_paths();
    let bob = b.adjoint() * ni.whitening() * b;
    let aha = a.adjoint() * a;
    let c = CMatrix::from_fn(n, n, |i, j| bob[(i, j)] * aha[(j, i)]).unscale(n as f64);
    Ok(ExactKernel { c: hermitian_part(&c) })
}

/// How a CDF value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfMethod {
    /// Hypoexponential sum of exponentials.
    ClosedForm,
    /// Gil-Pelaez inversion of the characteristic function.
    CfInversion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfValue {
    pub probability: f64,
    pub method: CdfMethod,
}

/// Nonzero eigenvalues of a kernel, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    lambdas: Vec<f64>,
    degenerate: bool,
    weights: Option<Vec<f64>>,
}

impl EigenSpectrum {
    /// Clamps tiny negative values, drops zeros, sorts, and flags clusters.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidParameter("eigenvalues must be finite".into()));
        }
        let max = raw.iter().copied().fold(0.0_f64, f64::max);
        let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -NEGATIVE_EIGENVALUE_TOL * max.max(1.0) {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
        let mut lambdas: Vec<f64> = raw.into_iter().filter(|&l| l > ZERO_EIGENVALUE_REL * max).collect();
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let degenerate = lambdas.windows(2).any(|w| w[0] - w[1] <= CLUSTER_REL * w[0]);
        let weights = if degenerate { None } else { closed_form_weights(&lambdas) };
        Ok(Self {
            lambdas,
            degenerate,
            weights,
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// True when two or more eigenvalues coincide within [`CLUSTER_REL`].
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Whether CDF evaluations use the closed form.
    pub fn method(&self) -> CdfMethod {
        if self.weights.is_some() {
            CdfMethod::ClosedForm
        } else {
            CdfMethod::CfInversion
        }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `Σ λᵢ`, the mean of the quadratic form.
    pub fn sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }
}

/// `wᵢ = ∏_{l≠i} λᵢ/(λᵢ − λ_l)`, or `None` when their magnitudes make the
/// alternating sum unreliable.
fn closed_form_weights(lambdas: &[f64]) -> Option<Vec<f64>> {
    let weights: Vec<f64> = lambdas
        .iter()
        .enumerate()
        .map(|(i, &li)| {
            lambdas
                .iter()
                .enumerate()
                .filter(|&(l, _)| l != i)
                .map(|(_, &ll)| li / (li - ll))
                .product()
        })
        .collect();
    let spread: f64 = weights.iter().map(|w| w.abs()).sum();
    (spread.is_finite() && spread <= WEIGHT_LIMIT).then_some(weights)
}

/// Characteristic function `E[exp(j t αᴴCα)] = ∏ᵢ 1/(1 − j t λᵢ)`.
pub fn quadform_cf(spectrum: &EigenSpectrum, t: f64) -> Complex64 {
    spectrum
        .lambdas
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &l| acc / Complex64::new(1.0, -t * l))
}

/// CDF of `Σᵢ λᵢ·Exp(1)` at `x`.
pub fn hypoexp_cdf(spectrum: &EigenSpectrum, x: f64) -> Result<CdfValue> {
    match &spectrum.weights {
        Some(weights) => {
            let probability = if x <= 0.0 {
                if spectrum.is_empty() && x == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                let survival: f64 = weights
                    .iter()
                    .zip(&spectrum.lambdas)
                    .map(|(w, l)| w * (-x / l).exp())
                    .sum();
                (1.0 - survival).clamp(0.0, 1.0)
            };
            Ok(CdfValue {
                probability,
                method: CdfMethod::ClosedForm,
            })
        }
        None => Ok(CdfValue {
            probability: cf_inversion_cdf(spectrum, x)?,
            method: CdfMethod::CfInversion,
        }),
    }
}

/// Target accuracy of the inversion tail truncation.
const TAIL_TOL: f64 = 1e-10;
/// Successive truncation doublings must agree to this.
const REFINE_TOL: f64 = 1e-9;
const MAX_PANELS: usize = 5_000_000;

/// Gil-Pelaez inversion:
/// `F(x) = 1/2 − (1/π) ∫₀^∞ Im[e^{−jtx} φ(t)] / t dt`.
///
/// The integral runs over panels no wider than half an oscillation of
/// `e^{−jtx}`. The upper limit starts where an integration-by-parts bound on
/// the remaining tail drops below `1e-10` and is then doubled until the
/// added piece is below `1e-9`.
pub fn cf_inversion_cdf(spectrum: &EigenSpectrum, x: f64) -> Result<f64> {
    if spectrum.is_empty() {
        return Ok(if x >= 0.0 { 1.0 } else { 0.0 });
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let lambdas = &spectrum.lambdas;
    let k = lambdas.len() as f64;
    let envelope = |t: f64| lambdas.iter().map(|l| (1.0 + t * t * l * l).sqrt().recip()).product::<f64>();
    let integrand = |t: f64| {
        let phase: f64 = lambdas.iter().map(|l| (t * l).atan()).sum::<f64>() - t * x;
        envelope(t) * phase.sin() / t
    };
    let tail_bound = |t: f64| envelope(t) / t * (2.0 / x).min(t / k);

    let scale = 1.0 / lambdas[0];
    let half_period = PI / x;
    let mut limit = scale;
    while tail_bound(limit) > TAIL_TOL {
        limit *= 2.0;
        if limit * x / PI > MAX_PANELS as f64 {
            return Err(Error::Quadrature(format!(
                "tail bound {:e} still above {TAIL_TOL:e} at t = {limit:e} (x = {x}, {} eigenvalues)",
                tail_bound(limit),
                lambdas.len()
            )));
        }
    }

    let panel_tol = Tolerance {
        absolute: 1e-15,
        relative: 1e-12,
        max_intervals: 64,
    };
    let mut panels = 0usize;
    let mut integrate_range = |from: f64, to: f64| -> Result<f64> {
        let mut t = from;
        let mut acc = 0.0;
        while t < to {
            let width = half_period.min(scale.max(0.5 * t));
            let next = (t + width).min(to);
            acc += integrate(integrand, t, next, panel_tol)?.value;
            t = next;
            panels += 1;
            if panels > MAX_PANELS {
                return Err(Error::Quadrature(format!(
                    "more than {MAX_PANELS} panels needed (x = {x}, {} eigenvalues)",
                    lambdas.len()
                )));
            }
        }
        Ok(acc)
    };

    let mut total = integrate_range(0.0, limit)?;
    loop {
        let piece = integrate_range(limit, 2.0 * limit)?;
        total += piece;
        limit *= 2.0;
        if piece.abs() < REFINE_TOL {
            break;
        }
    }
    Ok((0.5 - total / PI).clamp(0.0, 1.0))
}

/// Exact CDF of the mutual information for a single receive port:
/// `P[log(1 + αᴴCα) ≤ y] = F(e^y − 1)`.
pub fn theorem1_cdf(spectrum: &EigenSpectrum, y: f64) -> Result<CdfValue> {
    hypoexp_cdf(spectrum, y.exp_m1())
}

/// Low-SINR approximate CDF of the mutual information, any number of
/// receive ports.
pub fn theorem2_cdf(spectrum: &EigenSpectrum, x: f64) -> Result<CdfValue> {
    hypoexp_cdf(spectrum, x)
}

/// A point beyond which the hypoexponential survival is below `1e-15`.
fn survival_horizon(spectrum: &EigenSpectrum) -> Result<f64> {
    let mut x = spectrum.sum().max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        if 1.0 - hypoexp_cdf(spectrum, x)?.probability < 1e-15 {
            return Ok(x);
        }
        x *= 1.5;
    }
    Err(Error::Quadrature("survival function does not decay".into()))
}

fn integrate_survival(upper: f64, survival: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let failure = RefCell::new(None);
    let tol = Tolerance {
        absolute: 1e-13,
        relative: 1e-12,
        max_intervals: 4000,
    };
    let est = integrate(
        |u| match survival(u) {
            Ok(s) => s,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        upper,
        tol,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(est?.value)
}

/// Mean of `Σᵢ λᵢ·Exp(1)` by quadrature of the survival function.
pub fn hypoexp_mean(spectrum: &EigenSpectrum) -> Result<f64> {
    if spectrum.is_empty() {
        return Ok(0.0);
    }
    let upper = survival_horizon(spectrum)?;
    integrate_survival(upper, |x| Ok(1.0 - hypoexp_cdf(spectrum, x)?.probability))
}

/// Mean of the single-port mutual information `E[log(1 + αᴴCα)]`, by
/// quadrature of `1 − F(e^y − 1)` over `y`.
pub fn theorem1_mean(spectrum: &EigenSpectrum) -> Result<f64> {
    if spectrum.is_empty() {
        return Ok(0.0);
    }
    let upper = survival_horizon(spectrum)?.ln_1p();
    integrate_survival(upper, |y| Ok(1.0 - theorem1_cdf(spectrum, y)?.probability))
}

/// `p`-quantile of `Σᵢ λᵢ·Exp(1)` by bisection.
pub fn hypoexp_quantile(spectrum: &EigenSpectrum, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("quantile level must lie in (0, 1), got {p}")));
    }
    if spectrum.is_empty() {
        return Ok(0.0);
    }
    let mut hi = spectrum.sum();
    while hypoexp_cdf(spectrum, hi)?.probability < p {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hypoexp_cdf(spectrum, mid)?.probability < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `p`-quantile of the single-port mutual information.
pub fn theorem1_quantile(spectrum: &EigenSpectrum, p: f64) -> Result<f64> {
    Ok(hypoexp_quantile(spectrum, p)?.ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(l: &[f64]) -> EigenSpectrum {
        EigenSpectrum::new(l.to_vec()).unwrap()
    }

    #[test]
    fn cf_points() {
        let s = spec(&[2.0, 1.0]);
        assert_eq!(quadform_cf(&s, 0.0), Complex64::new(1.0, 0.0));
        let expected = Complex64::new(1.0, 0.0) / (Complex64::new(1.0, -2.0) * Complex64::new(1.0, -1.0));
        assert!((quadform_cf(&s, 1.0) - expected).norm() < 1e-15);
        let t = 0.7;
        let id = EigenSpectrum::new(vec![1.0; 3]).unwrap();
        assert!((quadform_cf(&id, t) - Complex64::new(1.0, -t).powi(-3)).norm() < 1e-14);
    }

    #[test]
    fn single_eigenvalue_is_exponential() {
        let s = spec(&[2.5]);
        for x in [0.1, 1.0, 7.0] {
            let v = hypoexp_cdf(&s, x).unwrap();
            assert_eq!(v.method, CdfMethod::ClosedForm);
            assert!((v.probability - (1.0 - (-x / 2.5).exp())).abs() < 1e-15);
        }
    }

    #[test]
    fn two_term_hand_value() {
        let s = spec(&[2.0, 1.0]);
        let expected = 1.0 - 2.0 * (-1.0_f64).exp() + (-2.0_f64).exp();
        let v = hypoexp_cdf(&s, 2.0).unwrap().probability;
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.3996).abs() < 1e-4);
        let y = theorem1_cdf(&s, 3.0_f64.ln()).unwrap().probability;
        assert!((y - expected).abs() < 1e-14);
        assert_eq!(hypoexp_cdf(&s, 0.0).unwrap().probability, 0.0);
        assert_eq!(theorem1_cdf(&s, 0.0).unwrap().probability, 0.0);
        assert_eq!(theorem2_cdf(&s, 0.0).unwrap().probability, 0.0);
    }

    #[test]
    fn spectrum_clamps_drops_and_flags() {
        let s = spec(&[1.0, -1e-12, 3.0, 0.0, 1e-15]);
        assert_eq!(s.lambdas(), &[3.0, 1.0]);
        assert!(!s.is_degenerate());
        assert!(matches!(
            EigenSpectrum::new(vec![1.0, -1e-3]),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        let d = spec(&[1.0, 1.0 + 1e-10, 2.0]);
        assert!(d.is_degenerate());
        assert_eq!(d.method(), CdfMethod::CfInversion);
    }

    #[test]
    fn erlang_fallback() {
        let s = spec(&[1.0, 1.0]);
        for x in [0.05, 0.5, 1.0, 2.0, 5.0] {
            let v = hypoexp_cdf(&s, x).unwrap();
            assert_eq!(v.method, CdfMethod::CfInversion);
            let erlang = 1.0 - (-x).exp() * (1.0 + x);
            assert!((v.probability - erlang).abs() < 1e-8, "x={x}: {} vs {erlang}", v.probability);
        }
        assert_eq!(cf_inversion_cdf(&s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn inversion_matches_closed_form() {
        let s = spec(&[3.0, 1.2, 0.4]);
        for x in [0.1, 1.0, 4.0, 12.0] {
            let closed = hypoexp_cdf(&s, x).unwrap().probability;
            let inv = cf_inversion_cdf(&s, x).unwrap();
            assert!((closed - inv).abs() < 1e-8, "x={x}: {closed} vs {inv}");
        }
    }

    #[test]
    fn empty_spectrum_is_point_mass() {
        let s = spec(&[0.0, 0.0]);
        assert!(s.is_empty());
        assert_eq!(hypoexp_cdf(&s, 0.0).unwrap().probability, 1.0);
        assert_eq!(hypoexp_cdf(&s, -1.0).unwrap().probability, 0.0);
        assert_eq!(theorem1_mean(&s).unwrap(), 0.0);
    }

    #[test]
    fn means_by_quadrature() {
        let s = spec(&[2.0, 1.0, 0.25]);
        assert!((hypoexp_mean(&s).unwrap() - 3.25).abs() < 1e-8);
        // E[log(1 + λE)] = e^{1/λ} E₁(1/λ); for λ = 1, e·E₁(1) = 0.596347362323194.
        let one = spec(&[1.0]);
        assert!((theorem1_mean(&one).unwrap() - 0.596_347_362_323_194).abs() < 1e-9);
    }

    #[test]
    fn quantiles_invert_cdf() {
        let s = spec(&[2.0, 1.0]);
        let q = hypoexp_quantile(&s, 0.3).unwrap();
        assert!((hypoexp_cdf(&s, q).unwrap().probability - 0.3).abs() < 1e-10);
        let y = theorem1_quantile(&s, 0.9).unwrap();
        assert!((theorem1_cdf(&s, y).unwrap().probability - 0.9).abs() < 1e-10);
        assert!(hypoexp_quantile(&s, 1.0).is_err());
    }

    #[test]
    fn all_ones_kernel() {
        use crate::array::SteeringMatrices;
        let n = 5;
        let ones = CMatrix::from_element(1, n, Complex64::new(1.0, 0.0));
        let steering = SteeringMatrices::from_matrices(ones.clone(), ones).unwrap();
        let ni = NoiseInterference::noise_only(1, 1.0).unwrap();
        let kernel = build_exact_kernel(&steering, &ni).unwrap();
        let expected = CMatrix::from_element(n, n, Complex64::new(1.0 / n as f64, 0.0));
        assert!((kernel.matrix() - expected).norm() < 1e-15);
        let s = kernel.spectrum().unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.lambdas()[0] - 1.0).abs() < 1e-12);
    }
}

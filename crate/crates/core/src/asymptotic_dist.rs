//! Large-array Gaussian approximation of the mutual information.
//!
//! Every entry of `HHᴴ` is a quadratic form in the path gains,
//! `[HHᴴ]_{kl} = (1/N)·αᴴ C^{k,l} α`. Stacking the real and imaginary parts of
//! `(R + σ²I) + HHᴴ` into a vector `x` of length `2M²`, `√N·(x − m)` is
//! asymptotically Gaussian with covariance `Θ`. The mutual information is
//! `0.5·log det M̃(x) − log det(R + σ²I)`, where `M̃` stacks the real and
//! imaginary parts, so the delta method gives a Gaussian with mean
//! `μ = 0.5·log det M̃(m) − log det(R + σ²I)` and variance `σ_a²/N` where
//! `σ_a² = (0.5/det M̃)²·f̃ᵀΘf̃` and `f̃` is the gradient of `det M̃`.
//!
//! Vectors of length `2M²` are ordered as the real parts of entry `(k, l)` at
//! `k·M + l`, followed by the imaginary parts at `M² + k·M + l`.

use nalgebra::DVector;
use num_complex::Complex64;
use statrs::function::erf::erfc;

use crate::array::SteeringMatrices;
use crate::channel::NoiseInterference;
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, trace_of_product, trace_of_product_transposed, CMatrix, RMatrix};

/// Floor on `f̃ᵀΘf̃ / det(M̃)²` below which the Gaussian approximation is
/// considered degenerate.
pub const FLUCTUATION_TOL: f64 = 1e-8;

/// The `M²` complex kernels `C^{k,l}`.
#[derive(Debug, Clone)]
pub struct QuadKernels {
    n_ms: usize,
    kernels: Vec<CMatrix>,
}

impl QuadKernels {
    pub fn n_ms(&self) -> usize {
        self.n_ms
    }

    pub fn n_paths(&self) -> usize {
        self.kernels[0].nrows()
    }

    pub fn get(&self, k: usize, l: usize) -> &CMatrix {
        &self.kernels[k * self.n_ms + l]
    }
}

/// `C^{k,l}_{ij} = conj(B_{li})·B_{kj}·[AᴴA]_{ji}`, so that
/// `(1/N)·αᴴ C^{k,l} α = [HHᴴ]_{kl}`.
pub fn build_kernels(steering: &SteeringMatrices) -> QuadKernels {
    let a = steering.a();
    let b = steering.b();
    let m = steering.n_ms();
    let n = steering.n_paths();
    let aha = a.adjoint() * a;
    let mut kernels = Vec::with_capacity(m * m);
    for k in 0..m {
        for l in 0..m {
            kernels.push(CMatrix::from_fn(n, n, |i, j| b[(l, i)].conj() * b[(k, j)] * aha[(j, i)]));
        }
    }
    // Enforce C^{l,k} = (C^{k,l})ᴴ exactly.
    for k in 0..m {
        for l in k + 1..m {
            kernels[l * m + k] = kernels[k * m + l].adjoint();
        }
        let diag = &kernels[k * m + k];
        kernels[k * m + k] = (diag + diag.adjoint()).unscale(2.0);
    }
    QuadKernels { n_ms: m, kernels }
}

/// Real `2N×2N` matrices with `zᵀ C_Re z = Re(αᴴCα)` and `zᵀ C_Im z = Im(αᴴCα)`
/// for `z = [Re α; Im α]`.
#[derive(Debug, Clone)]
pub struct RealifiedKernels {
    n_ms: usize,
    n_paths: usize,
    c_re: Vec<RMatrix>,
    c_im: Vec<RMatrix>,
}

impl RealifiedKernels {
    pub fn n_ms(&self) -> usize {
        self.n_ms
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn c_re(&self, k: usize, l: usize) -> &RMatrix {
        &self.c_re[k * self.n_ms + l]
    }

    pub fn c_im(&self, k: usize, l: usize) -> &RMatrix {
        &self.c_im[k * self.n_ms + l]
    }

    /// The `2M²` matrices in stacking order.
    fn stacked(&self) -> impl Iterator<Item = &RMatrix> {
        self.c_re.iter().chain(self.c_im.iter())
    }
}

/// `C_Re = [[Re C, −Im C], [Im C, Re C]]`, `C_Im = [[Im C, Re C], [−Re C, Im C]]`.
pub fn realify(c: &CMatrix) -> (RMatrix, RMatrix) {
    let n = c.nrows();
    let re = c.map(|z| z.re);
    let im = c.map(|z| z.im);
    let mut c_re = RMatrix::zeros(2 * n, 2 * n);
    let mut c_im = RMatrix::zeros(2 * n, 2 * n);
    c_re.view_mut((0, 0), (n, n)).copy_from(&re);
    c_re.view_mut((0, n), (n, n)).copy_from(&(-&im));
    c_re.view_mut((n, 0), (n, n)).copy_from(&im);
    c_re.view_mut((n, n), (n, n)).copy_from(&re);
    c_im.view_mut((0, 0), (n, n)).copy_from(&im);
    c_im.view_mut((0, n), (n, n)).copy_from(&re);
    c_im.view_mut((n, 0), (n, n)).copy_from(&(-&re));
    c_im.view_mut((n, n), (n, n)).copy_from(&im);
    (c_re, c_im)
}

pub fn realify_kernels(kernels: &QuadKernels) -> RealifiedKernels {
    let (c_re, c_im) = kernels.kernels.iter().map(realify).unzip();
    RealifiedKernels {
        n_ms: kernels.n_ms,
        n_paths: kernels.n_paths(),
        c_re,
        c_im,
    }
}

/// Mean vector of `x` and covariance `Θ` of `√N·x`.
#[derive(Debug, Clone)]
pub struct AsymptoticMoments {
    pub mean: DVector<f64>,
    pub theta: RMatrix,
}

fn check_ms(kernels: &RealifiedKernels, ni: &NoiseInterference) -> Result<()> {
    if ni.n_ms() != kernels.n_ms {
        return Err(Error::DimensionMismatch(format!(
            "covariance is {0}×{0} but kernels are for {1} receive ports",
            ni.n_ms(),
            kernels.n_ms
        )));
    }
    Ok(())
}

/// Moments of the stacked entries of `HHᴴ`, offset by `R + σ²I` when `ni` is
/// given. `Θ_pq = (1/4N)·[Tr(X_p X_q) + Tr(X_p X_qᵀ)]`.
pub fn build_moments(kernels: &RealifiedKernels, ni: Option<&NoiseInterference>) -> Result<AsymptoticMoments> {
    let m = kernels.n_ms;
    let n = kernels.n_paths as f64;
    let stacked: Vec<&RMatrix> = kernels.stacked().collect();
    let dim = stacked.len();

    let mut mean = DVector::from_iterator(dim, stacked.iter().map(|x| x.trace() / (2.0 * n)));
    if let Some(ni) = ni {
        check_ms(kernels, ni)?;
        let zeta = ni.zeta();
        for k in 0..m {
            for l in 0..m {
                mean[k * m + l] += zeta[(k, l)].re;
                mean[m * m + k * m + l] += zeta[(k, l)].im;
            }
        }
    }

    let mut theta = RMatrix::zeros(dim, dim);
    for p in 0..dim {
        for q in p..dim {
            let v = (trace_of_product(stacked[p], stacked[q]) + trace_of_product_transposed(stacked[p], stacked[q]))
                / (4.0 * n);
            theta[(p, q)] = v;
            theta[(q, p)] = v;
        }
    }
    Ok(AsymptoticMoments { mean, theta })
}

/// `M = M₁ + jM₂ = E[(R + σ²I) + HHᴴ]` and `M̃ = [[M₁, −M₂], [M₂, M₁]]`.
#[derive(Debug, Clone)]
pub struct MeanMatrices {
    pub m1: RMatrix,
    pub m2: RMatrix,
    pub m_tilde: RMatrix,
}

impl MeanMatrices {
    pub fn complex(&self) -> CMatrix {
        self.m1.zip_map(&self.m2, Complex64::new)
    }
}

pub fn stack_mean_matrices(m1: RMatrix, m2: RMatrix) -> MeanMatrices {
    let m = m1.nrows();
    let mut m_tilde = RMatrix::zeros(2 * m, 2 * m);
    m_tilde.view_mut((0, 0), (m, m)).copy_from(&m1);
    m_tilde.view_mut((0, m), (m, m)).copy_from(&(-&m2));
    m_tilde.view_mut((m, 0), (m, m)).copy_from(&m2);
    m_tilde.view_mut((m, m), (m, m)).copy_from(&m1);
    MeanMatrices { m1, m2, m_tilde }
}

/// `[M₁]_{kl} = Re ζ_{kl} + Tr(C_Re^{k,l})/2N`, `[M₂]_{kl} = Im ζ_{kl} + Tr(C_Im^{k,l})/2N`.
pub fn build_mean_matrices(kernels: &RealifiedKernels, ni: &NoiseInterference) -> Result<MeanMatrices> {
    check_ms(kernels, ni)?;
    let m = kernels.n_ms;
    let two_n = 2.0 * kernels.n_paths as f64;
    let zeta = ni.zeta();
    let m1 = RMatrix::from_fn(m, m, |k, l| zeta[(k, l)].re + kernels.c_re(k, l).trace() / two_n);
    let m2 = RMatrix::from_fn(m, m, |k, l| zeta[(k, l)].im + kernels.c_im(k, l).trace() / two_n);
    Ok(stack_mean_matrices(m1, m2))
}

/// Gradient of `det M̃` with respect to the entries of `M₁` then `M₂`.
///
/// By Jacobi's formula `∂det/∂X_{ij} = det·(X⁻¹)_{ji}`. Entry `[M₁]_{kl}` sits
/// at `(k, l)` and `(M+k, M+l)`; entry `[M₂]_{kl}` sits at `(M+k, l)` and, negated,
/// at `(k, M+l)`.
pub fn det_gradient(m_tilde: &RMatrix) -> Result<DVector<f64>> {
    let two_m = m_tilde.nrows();
    if two_m == 0 || !two_m.is_multiple_of(2) || !m_tilde.is_square() {
        return Err(Error::DimensionMismatch("stacked mean matrix must be 2M×2M".into()));
    }
    let m = two_m / 2;
    let lu = m_tilde.clone().lu();
    let det = lu.determinant();
    let inv = lu
        .try_inverse()
        .filter(|_| det != 0.0 && det.is_finite())
        .ok_or_else(|| Error::Singular("stacked mean matrix is singular".into()))?;
    let mut f = DVector::zeros(2 * m * m);
    for k in 0..m {
        for l in 0..m {
            f[k * m + l] = det * (inv[(l, k)] + inv[(m + l, m + k)]);
            f[m * m + k * m + l] = det * (inv[(l, m + k)] - inv[(m + l, k)]);
        }
    }
    Ok(f)
}

/// Gaussian approximation of the mutual information.
#[derive(Debug, Clone)]
pub struct GaussianMIApprox {
    pub means: MeanMatrices,
    pub det_m_tilde: f64,
    pub f: DVector<f64>,
    /// `f̃ᵀΘf̃ / det(M̃)²`, the scale-free fluctuation strength.
    pub fluctuation: f64,
    /// Mean, nats.
    pub mu: f64,
    /// Variance of `√N·I`, nats².
    pub sigma_a_sq: f64,
}

impl GaussianMIApprox {
    /// Standard deviation of the unscaled mutual information.
    pub fn std_dev(&self, n_paths: usize) -> f64 {
        (self.sigma_a_sq / n_paths as f64).sqrt()
    }
}

pub fn theorem4_params(
    moments: &AsymptoticMoments,
    means: &MeanMatrices,
    ni: &NoiseInterference,
) -> Result<GaussianMIApprox> {
    let det = means.m_tilde.determinant();
    if !(det > 0.0 && det.is_finite()) {
        return Err(Error::Domain(format!("det of stacked mean matrix must be positive, got {det}")));
    }
    let f = det_gradient(&means.m_tilde)?;
    if f.len() != moments.theta.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "gradient has {} entries but Θ is {}×{}",
            f.len(),
            moments.theta.nrows(),
            moments.theta.ncols()
        )));
    }
    let fluctuation = (&moments.theta * &f).dot(&f) / (det * det);
    if !(fluctuation > FLUCTUATION_TOL) {
        return Err(Error::DegenerateFluctuation {
            value: fluctuation,
            tolerance: FLUCTUATION_TOL,
        });
    }
    Ok(GaussianMIApprox {
        means: means.clone(),
        det_m_tilde: det,
        f,
        fluctuation,
        mu: 0.5 * det.ln() - ni.log_det_zeta(),
        sigma_a_sq: 0.25 * fluctuation,
    })
}

/// Kernels, moments and the Gaussian parameters in one call.
pub fn gaussian_approximation(steering: &SteeringMatrices, ni: &NoiseInterference) -> Result<GaussianMIApprox> {
    let realified = realify_kernels(&build_kernels(steering));
    let moments = build_moments(&realified, Some(ni))?;
    let means = build_mean_matrices(&realified, ni)?;
    theorem4_params(&moments, &means, ni)
}

/// `P[I ≤ x]` under the Gaussian with mean `μ` and variance `σ_a²/N`.
pub fn theorem4_cdf(approx: &GaussianMIApprox, n_paths: usize, x: f64) -> f64 {
    let z = (x - approx.mu) / approx.std_dev(n_paths);
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticThresholds {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub max_norm_ratio: f64,
    pub min_fluctuation: f64,
}

impl Default for DiagnosticThresholds {
    fn default() -> Self {
        Self {
            min_ratio: 0.1,
            max_ratio: 10.0,
            max_norm_ratio: 0.5,
            min_fluctuation: FLUCTUATION_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    /// `N_BS / N`.
    pub dimension_ratio: f64,
    pub dimension_ok: bool,
    /// Largest `‖C^{k,l}‖₂ / ‖C^{k,l}‖_F`.
    pub norm_ratio: f64,
    pub norm_ok: bool,
    /// `f̃ᵀΘf̃ / det(M̃)²`, when available.
    pub fluctuation: Option<f64>,
    pub fluctuation_ok: bool,
}

impl DiagnosticReport {
    pub fn all_ok(&self) -> bool {
        self.dimension_ok && self.norm_ok && self.fluctuation_ok
    }
}

/// Checks the comparable-dimensions, spectral-norm and non-degeneracy
/// assumptions. A missing `approx` fails the last check.
pub fn assumption_diagnostics(
    steering: &SteeringMatrices,
    kernels: &QuadKernels,
    approx: Option<&GaussianMIApprox>,
    thresholds: &DiagnosticThresholds,
) -> DiagnosticReport {
    let dimension_ratio = steering.n_bs() as f64 / steering.n_paths() as f64;
    let norm_ratio = kernels
        .kernels
        .iter()
        .map(|c| {
            let frob = c.norm();
            if frob > 0.0 {
                spectral_norm(c) / frob
            } else {
                1.0
            }
        })
        .fold(0.0, f64::max);
    let fluctuation = approx.map(|a| a.fluctuation);
    DiagnosticReport {
        dimension_ratio,
        dimension_ok: (thresholds.min_ratio..=thresholds.max_ratio).contains(&dimension_ratio),
        norm_ratio,
        norm_ok: norm_ratio <= thresholds.max_norm_ratio,
        fluctuation,
        fluctuation_ok: fluctuation.is_some_and(|v| v >= thresholds.min_fluctuation),
    }
}

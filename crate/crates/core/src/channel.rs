//! Channel realizations, instantaneous mutual information and the
//! interference-plus-noise covariance.

use nalgebra::Cholesky;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::array::SteeringMatrices;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_asymmetry, hermitian_eigenvalues, hermitian_part, hpd_cholesky, log_det_hpd, CMatrix};

/// Path gains `α`, i.i.d. circularly-symmetric `CN(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainVector(pub Vec<Complex64>);

impl GainVector {
    pub fn draw<R: Rng + ?Sized>(n_paths: usize, rng: &mut R) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self(
            (0..n_paths)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(s * re, s * im)
                })
                .collect(),
        )
    }

    pub fn zeros(n_paths: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n_paths])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    h: CMatrix,
}

impl ChannelRealization {
    pub fn from_matrix(h: CMatrix) -> Self {
        Self { h }
    }

    /// `N_MS × N_BS`.
    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn gram(&self) -> CMatrix {
        &self.h * self.h.adjoint()
    }
}

/// `H = (1/√N)·B·diag(α)·Aᴴ`.
pub fn realize_channel(steering: &SteeringMatrices, alpha: &GainVector) -> Result<ChannelRealization> {
    let n = steering.n_paths();
    if alpha.len() != n {
        return Err(Error::DimensionMismatch(format!("{} gains for {n} paths", alpha.len())));
    }
    let mut weighted = steering.b().clone();
    for (mut column, g) in weighted.column_iter_mut().zip(&alpha.0) {
        column *= *g;
    }
    let h = (weighted * steering.a().adjoint()).unscale((n as f64).sqrt());
    Ok(ChannelRealization { h })
}

/// Interference covariance `R`, noise variance `σ²` and the derived
/// `R + σ²I` (entries `ζ_ij`) and whitening `Ω = (R + σ²I)⁻¹`.
#[derive(Debug, Clone)]
pub struct NoiseInterference {
    interference: CMatrix,
    noise_variance: f64,
    zeta: CMatrix,
    zeta_cholesky: Cholesky<Complex64, nalgebra::Dyn>,
    whitening: CMatrix,
    condition: f64,
    log_det_zeta: f64,
}

impl NoiseInterference {
    /// Validates `R` (square, Hermitian, PSD) and `σ² > 0`.
    pub fn new(interference: CMatrix, noise_variance: f64) -> Result<Self> {
        if !(noise_variance > 0.0) || !noise_variance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be positive and finite (got {noise_variance})"
            )));
        }
        if !interference.is_square() || interference.nrows() == 0 {
            return Err(Error::DimensionMismatch("interference covariance must be square and nonempty".into()));
        }
        let scale = interference.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
        let asymmetry = hermitian_asymmetry(&interference);
        if asymmetry > 1e-10 * scale {
            return Err(Error::NotHermitian { asymmetry });
        }
        let interference = hermitian_part(&interference);
        let ev = hermitian_eigenvalues(&interference);
        let min_eig = *ev.last().expect("nonempty");
        if min_eig < -1e-10 * ev[0].abs().max(1.0) {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min_eig });
        }
        let m = interference.nrows();
        let zeta = &interference + CMatrix::identity(m, m).scale(noise_variance);
        let condition = (ev[0].max(0.0) + noise_variance) / (min_eig.max(0.0) + noise_variance);
        let zeta_cholesky = hpd_cholesky(&zeta)?;
        let whitening = hermitian_part(&zeta_cholesky.inverse());
        let log_det_zeta = log_det_hpd(&zeta)?;
        Ok(Self {
            interference,
            noise_variance,
            zeta,
            zeta_cholesky,
            whitening,
            condition,
            log_det_zeta,
        })
    }

    /// No interference: `Ω = (1/σ²)·I`.
    pub fn noise_only(n_ms: usize, noise_variance: f64) -> Result<Self> {
        Self::new(CMatrix::zeros(n_ms, n_ms), noise_variance)
    }

    /// `σ² = 10^(−SNR/10)`.
    pub fn noise_variance_from_snr_db(snr_db: f64) -> f64 {
        10f64.powf(-snr_db / 10.0)
    }

    pub fn n_ms(&self) -> usize {
        self.zeta.nrows()
    }
    pub fn interference(&self) -> &CMatrix {
        &self.interference
    }
    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }
    /// `R + σ²I`.
    pub fn zeta(&self) -> &CMatrix {
        &self.zeta
    }
    /// `Ω = (R + σ²I)⁻¹`.
    pub fn whitening(&self) -> &CMatrix {
        &self.whitening
    }
    /// Spectral condition number of `R + σ²I`.
    pub fn condition_number(&self) -> f64 {
        self.condition
    }
    pub fn log_det_zeta(&self) -> f64 {
        self.log_det_zeta
    }

    fn check_rows(&self, h: &ChannelRealization) -> Result<()> {
        if h.matrix().nrows() != self.n_ms() {
            return Err(Error::DimensionMismatch(format!(
                "channel has {} receive ports but the covariance is {}×{}",
                h.matrix().nrows(),
                self.n_ms(),
                self.n_ms()
            )));
        }
        Ok(())
    }
}

/// `log det(I + (R + σ²I)⁻¹ H Hᴴ)` in nats, evaluated as
/// `log det(R + σ²I + HHᴴ) − log det(R + σ²I)`.
pub fn mutual_information(h: &ChannelRealization, ni: &NoiseInterference) -> Result<f64> {
    ni.check_rows(h)?;
    let total = ni.zeta() + h.gram();
    Ok((log_det_hpd(&total)? - ni.log_det_zeta()).max(0.0))
}

/// First-order (low SINR) approximation `Tr((R + σ²I)⁻¹ H Hᴴ)`.
pub fn low_snr_mi(h: &ChannelRealization, ni: &NoiseInterference) -> Result<f64> {
    ni.check_rows(h)?;
    let mut whitened = h.matrix().clone();
    let l = ni.zeta_cholesky.l();
    if !l.solve_lower_triangular_mut(&mut whitened) {
        return Err(Error::Singular("R + σ²I".into()));
    }
    Ok(whitened.norm_squared())
}

/// `E[H Hᴴ] = (1/N)·B·diag(d)·Bᴴ` with `d_n = [AᴴA]_nn`.
pub fn expected_gram(steering: &SteeringMatrices) -> CMatrix {
    let n = steering.n_paths();
    let mut weighted = steering.b().clone();
    for (mut column, a_col) in weighted.column_iter_mut().zip(steering.a().column_iter()) {
        column *= Complex64::new(a_col.norm_squared(), 0.0);
    }
    hermitian_part(&(weighted * steering.b().adjoint()).unscale(n as f64))
}

/// `R = Σᵢ E[Hᵢ Hᵢᴴ]` over the interfering base stations.
pub fn interference_matrix(interferers: &[SteeringMatrices], n_ms: usize) -> Result<CMatrix> {
    let mut r = CMatrix::zeros(n_ms, n_ms);
    for (i, s) in interferers.iter().enumerate() {
        if s.n_ms() != n_ms {
            return Err(Error::DimensionMismatch(format!(
                "interferer {i} has {} receive ports, expected {n_ms}",
                s.n_ms()
            )));
        }
        r += expected_gram(s);
    }
    Ok(r)
}

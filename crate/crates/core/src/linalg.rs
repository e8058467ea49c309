//! Dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Largest `|m_ij - conj(m_ji)|`.
pub fn hermitian_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + mᴴ) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).unscale(2.0)
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Eigenvalues of a real symmetric matrix, descending.
pub fn symmetric_eigenvalues(m: &RMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// `log det` of a Hermitian positive-definite matrix through its Cholesky factor.
pub fn log_det_hpd(m: &CMatrix) -> Result<f64> {
    let chol = hpd_cholesky(m)?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>())
}

/// Cholesky factor of a Hermitian positive-definite matrix. The complex
/// factorization happily takes square roots of negative pivots, so the
/// diagonal is checked explicitly.
pub fn hpd_cholesky(m: &CMatrix) -> Result<Cholesky<Complex64, Dyn>> {
    let not_pd = || Error::Singular("matrix is not positive definite".into());
    let chol = Cholesky::new(m.clone()).ok_or_else(not_pd)?;
    let positive = chol
        .l_dirty()
        .diagonal()
        .iter()
        .all(|d| d.re > 0.0 && d.re.is_finite() && d.im.abs() <= 1e-12 * d.re);
    if positive {
        Ok(chol)
    } else {
        Err(not_pd())
    }
}

/// `Tr(x y)` without forming the product.
pub fn trace_of_product(x: &RMatrix, y: &RMatrix) -> f64 {
    debug_assert_eq!(x.shape(), y.transpose().shape());
    let mut acc = 0.0;
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// `Tr(x yᵀ)`, i.e. the entrywise inner product.
pub fn trace_of_product_transposed(x: &RMatrix, y: &RMatrix) -> f64 {
    debug_assert_eq!(x.shape(), y.shape());
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

/// Largest singular value by power iteration on `mᴴ m`.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    // Deterministic start vector with no special alignment.
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + (i as f64 * 0.618).sin() * 0.5, 0.0));
    v.normalize_mut();
    let mut sigma = 0.0;
    for _ in 0..2000 {
        let w = m * &v;
        let mut u = m.adjoint() * &w;
        let norm = u.norm();
        if norm == 0.0 {
            return 0.0;
        }
        u.unscale_mut(norm);
        let next = norm.sqrt();
        let converged = (next - sigma).abs() <= 1e-12 * next;
        sigma = next;
        v = u;
        if converged {
            break;
        }
    }
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_det_matches_eigenvalues() {
        let m = CMatrix::from_row_slice(2, 2, &[c(3.0, 0.0), c(1.0, -1.0), c(1.0, 1.0), c(2.0, 0.0)]);
        let ev = hermitian_eigenvalues(&m);
        let expected: f64 = ev.iter().map(|l| l.ln()).sum();
        assert!((log_det_hpd(&m).unwrap() - expected).abs() < 1e-12);
        assert!((log_det_hpd(&m).unwrap() - 4.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn traces_match_explicit_products() {
        let x = RMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let y = RMatrix::from_row_slice(3, 2, &[1.0, -1.0, 0.5, 2.0, 3.0, 0.0]);
        assert!((trace_of_product(&x, &y) - (&x * &y).trace()).abs() < 1e-12);
        let z = RMatrix::from_row_slice(2, 3, &[0.0, 1.0, 2.0, -1.0, 0.5, 3.0]);
        assert!((trace_of_product_transposed(&x, &z) - (&x * z.transpose()).trace()).abs() < 1e-12);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(0.0, -3.0), c(2.0, 0.0)]));
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn non_positive_definite_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        assert!(log_det_hpd(&m).is_err());
    }
}

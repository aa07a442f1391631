use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::state::{Mat2, TwoSiteState, C64, PSD_TOL};

/// −x log₂ x with 0·log 0 = 0.
#[inline]
pub fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy of (p, 1 − p), in bits.
#[inline]
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// −Σ λ log₂ λ for a spectrum; eigenvalues below −PSD_TOL are rejected,
/// smaller negative round-off is treated as zero.
pub fn entropy_from_eigenvalues(eigs: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigs {
        if l < -PSD_TOL {
            return Err(Error::NotPositive(l));
        }
        s -= xlog2x(l);
    }
    Ok(s.max(0.0))
}

/// Eigenvalues of a 2×2 Hermitian matrix, descending.
#[inline]
pub fn eigenvalues2(m: &Mat2) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let half = 0.5 * (a - d);
    let disc = (half * half + m[(0, 1)].norm_sqr()).sqrt();
    let mean = 0.5 * (a + d);
    [mean + disc, mean - disc]
}

/// Entropy of a 2×2 density matrix (closed-form eigenvalues).
pub fn entropy2(m: &Mat2) -> Result<f64> {
    entropy_from_eigenvalues(&eigenvalues2(m))
}

/// Von Neumann entropy in bits of a density matrix of any dimension.
pub fn von_neumann_entropy(rho: &DMatrix<C64>) -> Result<f64> {
    if !rho.is_square() {
        return Err(Error::InvalidState("density matrix must be square".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
    }
    let herm = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
    if (&herm - rho).iter().any(|z| z.norm() > 1e-10) {
        return Err(Error::InvalidState("matrix is not Hermitian".into()));
    }
    let eig = SymmetricEigen::new(herm);
    let e: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    entropy_from_eigenvalues(&e)
}

/// S(ρ) of a pair state.
pub fn entropy4(state: &TwoSiteState) -> f64 {
    // Validated states have eigenvalues ≥ −PSD_TOL.
    entropy_from_eigenvalues(&state.eigenvalues()).unwrap_or(0.0)
}

/// I(A:B) = S(ρ_A) + S(ρ_B) − S(ρ), clamped at zero against round-off.
pub fn mutual_information(state: &TwoSiteState) -> f64 {
    let sa = entropy2(&state.marginal_a()).unwrap_or(0.0);
    let sb = entropy2(&state.marginal_b()).unwrap_or(0.0);
    (sa + sb - entropy4(state)).max(0.0)
}

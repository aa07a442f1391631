use nalgebra::{Matrix4, SymmetricEigen};

use crate::state::{kron, pauli, TwoSiteState, C64};

/// Wootters concurrence: max(0, λ1 − λ2 − λ3 − λ4), λ the descending square
/// roots of the spectrum of √ρ ρ̃ √ρ with ρ̃ = (σy ⊗ σy) ρ* (σy ⊗ σy).
pub fn concurrence(state: &TwoSiteState) -> f64 {
    let rho = *state.matrix();
    let sy = pauli()[1];
    let yy = kron(&sy, &sy);
    let tilde = yy * rho.conjugate() * yy;
    let eig = SymmetricEigen::new(rho);
    let sqrt_d = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.max(0.0).sqrt(), 0.0)));
    let sqrt_rho = eig.eigenvectors * sqrt_d * eig.eigenvectors.adjoint();
    let r = sqrt_rho * tilde * sqrt_rho;
    let r = (r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut l: Vec<f64> = SymmetricEigen::new(r).eigenvalues.iter().map(|x| x.max(0.0).sqrt()).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

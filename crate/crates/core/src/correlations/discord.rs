//! Measurement-based conditional entropy, classical correlation and
//! one-way quantum discord (projective measurements on party B).

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::entropy::{binary_entropy, entropy2, mutual_information};
use crate::optimize::{minimize_direction, NelderMeadOptions};
use crate::state::{Mat2, MeasurementBasis, TwoSiteState, C64};

/// Outcomes below this probability are dropped.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;
/// Coarse grid: π/60 steps in θ and φ.
pub const GRID_DIVISIONS: usize = 60;
pub const GRID_SEEDS: usize = 3;
/// Off-X-state entries above this mark a state as symmetry broken.
pub const X_STATE_TOL: f64 = 1e-10;

/// Pre-split blocks R_{a a'}[b, b'] = ρ[2a + b, 2a' + b'] for fast evaluation.
#[derive(Debug, Clone)]
pub struct ConditionalEntropy {
    r00: Mat2,
    r01: Mat2,
    r11: Mat2,
}

#[inline]
fn form(v: &Vector2<C64>, m: &Mat2) -> C64 {
    let w0 = m[(0, 0)] * v[0] + m[(0, 1)] * v[1];
    let w1 = m[(1, 0)] * v[0] + m[(1, 1)] * v[1];
    v[0].conj() * w0 + v[1].conj() * w1
}

impl ConditionalEntropy {
    pub fn new(state: &TwoSiteState) -> Self {
        let r = state.matrix();
        let block = |a: usize, ap: usize| Matrix2::from_fn(|b, bp| r[(2 * a + b, 2 * ap + bp)]);
        Self { r00: block(0, 0), r01: block(0, 1), r11: block(1, 1) }
    }

    /// Unnormalized conditional state of A for outcome vector `v` of B.
    #[inline]
    fn conditional(&self, v: &Vector2<C64>) -> (f64, f64, C64) {
        (form(v, &self.r00).re, form(v, &self.r11).re, form(v, &self.r01))
    }

    /// (p_k, ρ_k) for both outcomes; ρ_k is the normalized state of A
    /// (zero matrix when p_k is negligible).
    pub fn outcomes(&self, basis: &MeasurementBasis) -> [(f64, Mat2); 2] {
        basis.vectors().map(|v| {
            let (m00, m11, m01) = self.conditional(&v);
            let p = m00 + m11;
            if p < MIN_OUTCOME_PROBABILITY {
                (p.max(0.0), Mat2::zeros())
            } else {
                let s = C64::new(1.0 / p, 0.0);
                (p, Matrix2::new(C64::new(m00, 0.0), m01, m01.conj(), C64::new(m11, 0.0)) * s)
            }
        })
    }

    /// S(ρ | {B_k}) = Σ_k p_k S(ρ_k) for the basis at angles (θ, φ).
    #[inline]
    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        let (s, c) = (0.5 * theta).sin_cos();
        let e = C64::from_polar(1.0, phi);
        let vs = [Vector2::new(C64::new(c, 0.0), -e * s), Vector2::new(e.conj() * s, C64::new(c, 0.0))];
        let mut total = 0.0;
        for v in &vs {
            let (m00, m11, m01) = self.conditional(v);
            let p = m00 + m11;
            if p < MIN_OUTCOME_PROBABILITY {
                continue;
            }
            let half = 0.5 * (m00 - m11);
            let disc = (half * half + m01.norm_sqr()).sqrt();
            total += p * binary_entropy((0.5 * p + disc) / p);
        }
        total
    }
}

/// Σ_k p_k S(ρ_k) for a projective measurement on party B.
pub fn conditioned_entropy(state: &TwoSiteState, basis: &MeasurementBasis) -> f64 {
    ConditionalEntropy::new(state).eval(basis.theta, basis.phi)
}

/// J(ρ : {B_k}) = S(ρ_A) − S(ρ | {B_k}).
pub fn measured_information(state: &TwoSiteState, basis: &MeasurementBasis) -> f64 {
    entropy2(&state.marginal_a()).unwrap_or(0.0) - conditioned_entropy(state, basis)
}

/// Result of the one-way optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneWayCorrelations {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    /// I − C.
    pub discord: f64,
    /// Optimal measurement on party B.
    pub basis: MeasurementBasis,
    /// True for non-X states: projective measurements only bound the discord from above.
    pub upper_bound: bool,
    pub evaluations: usize,
    /// False if a local refinement hit its evaluation cap (the best value found is still returned).
    pub converged: bool,
}

/// Maximizes J over measurement directions on B: π/60 grid, then
/// Nelder–Mead from the best three grid minima to angle tolerance 1e-7.
pub fn one_way(state: &TwoSiteState) -> OneWayCorrelations {
    let ce = ConditionalEntropy::new(state);
    let best = minimize_direction(|t, p| ce.eval(t, p), GRID_DIVISIONS, GRID_SEEDS, &NelderMeadOptions::default());
    let mi = mutual_information(state);
    let sa = entropy2(&state.marginal_a()).unwrap_or(0.0);
    // 0 ≤ C ≤ I holds exactly; clamp round-off so that the identity survives.
    let c = (sa - best.value).clamp(0.0, mi);
    OneWayCorrelations {
        mutual_information: mi,
        classical_correlation: c,
        discord: mi - c,
        basis: MeasurementBasis::new(best.theta, best.phi),
        upper_bound: !state.is_x_state(X_STATE_TOL),
        evaluations: best.evaluations,
        converged: best.converged,
    }
}

/// Classical correlation C(ρ) and the maximizing basis.
pub fn classical_correlation(state: &TwoSiteState) -> (f64, MeasurementBasis) {
    let r = one_way(state);
    (r.classical_correlation, r.basis)
}

/// Quantum discord Q(ρ) = I − C and the minimizing basis.
pub fn quantum_discord(state: &TwoSiteState) -> (f64, MeasurementBasis) {
    let r = one_way(state);
    (r.discord, r.basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{kron, StateSource};
    use std::f64::consts::PI;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn bell() -> TwoSiteState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        TwoSiteState::pure([c(h), c(0.0), c(0.0), c(h)]).unwrap()
    }

    /// Conditional entropy by explicit (I ⊗ B_k) ρ (I ⊗ B_k) and partial trace.
    fn oracle_conditioned(state: &TwoSiteState, basis: &MeasurementBasis) -> f64 {
        let mut total = 0.0;
        for proj in basis.projectors() {
            let op = kron(&Mat2::identity(), &proj);
            let m = op * state.matrix() * op;
            let p = m.trace().re;
            if p < 1e-14 {
                continue;
            }
            let rho_k = TwoSiteState::new(m / c(p), StateSource::Synthetic).unwrap();
            let ev = crate::correlations::entropy::eigenvalues2(&rho_k.marginal_a());
            total += p * crate::correlations::entropy::entropy_from_eigenvalues(&ev).unwrap();
        }
        total
    }

    #[test]
    fn conditioned_entropy_matches_projector_oracle() {
        let mut m = Mat4Builder::default();
        m.set(0, 0, 0.4);
        m.set(1, 1, 0.1);
        m.set(2, 2, 0.2);
        m.set(3, 3, 0.3);
        m.set(0, 3, 0.15);
        m.set(1, 2, 0.05);
        m.set(0, 1, 0.02);
        let s = TwoSiteState::synthetic(m.0).unwrap();
        for (t, p) in [(0.0, 0.0), (PI / 2.0, 0.0), (0.7, 2.1), (2.9, 5.0)] {
            let b = MeasurementBasis::new(t, p);
            assert!((conditioned_entropy(&s, &b) - oracle_conditioned(&s, &b)).abs() < 1e-13);
        }
    }

    #[derive(Default)]
    struct Mat4Builder(crate::state::Mat4);
    impl Mat4Builder {
        fn set(&mut self, i: usize, j: usize, v: f64) {
            self.0[(i, j)] = c(v);
            self.0[(j, i)] = c(v);
        }
    }

    #[test]
    fn bell_and_product() {
        let r = one_way(&bell());
        assert!((r.mutual_information - 2.0).abs() < 1e-12);
        assert!((r.discord - 1.0).abs() < 1e-9);
        for (t, p) in [(0.0, 0.0), (1.0, 1.0)] {
            assert!(conditioned_entropy(&bell(), &MeasurementBasis::new(t, p)).abs() < 1e-12);
        }
        let prod = TwoSiteState::pure([c(0.6), c(0.8), c(0.0), c(0.0)]).unwrap();
        let r = one_way(&prod);
        assert!(r.classical_correlation.abs() < 1e-12 && r.discord.abs() < 1e-12);
    }

    #[test]
    fn classical_mixture_has_zero_discord() {
        let mut m = crate::state::Mat4::zeros();
        m[(0, 0)] = c(0.5);
        m[(3, 3)] = c(0.5);
        let s = TwoSiteState::synthetic(m).unwrap();
        let r = one_way(&s);
        assert_eq!(r.mutual_information, 1.0);
        assert!((r.classical_correlation - 1.0).abs() < 1e-12);
        assert!(r.discord.abs() < 1e-12);
        assert!(!r.upper_bound);
    }
}

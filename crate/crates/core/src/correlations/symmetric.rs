//! Two-sided (symmetric) discord: I(ρ) − max I(Φ(ρ)) over simultaneous
//! projective measurements on both parties. Φ(ρ) is diagonal in the
//! measured product basis, so I(Φ(ρ)) is the Shannon mutual information
//! of the outcome distribution.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::entropy::{binary_entropy, mutual_information, xlog2x};
use crate::optimize::{nelder_mead, DirectionGrid, NelderMeadOptions};
use crate::state::{MeasurementBasis, TwoSiteState, C64};

/// Coarse grid per party: π/12 steps.
pub const SYMMETRIC_GRID_DIVISIONS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricDiscord {
    pub bits: f64,
    pub basis_a: MeasurementBasis,
    pub basis_b: MeasurementBasis,
    pub evaluations: usize,
    pub converged: bool,
}

fn basis_vectors(theta: f64, phi: f64) -> [Vector2<C64>; 2] {
    MeasurementBasis { theta, phi }.vectors()
}

/// Outcome probabilities p[j][k] for measurement vectors a_j on A and b_k on B.
fn joint_probabilities(state: &TwoSiteState, a: &[Vector2<C64>; 2], b: &[Vector2<C64>; 2]) -> [[f64; 2]; 2] {
    let rho = state.matrix();
    let mut p = [[0.0; 2]; 2];
    for (j, aj) in a.iter().enumerate() {
        for (k, bk) in b.iter().enumerate() {
            let u = [aj[0] * bk[0], aj[0] * bk[1], aj[1] * bk[0], aj[1] * bk[1]];
            let mut acc = C64::new(0.0, 0.0);
            for r in 0..4 {
                let mut row = C64::new(0.0, 0.0);
                for c in 0..4 {
                    row += rho[(r, c)] * u[c];
                }
                acc += u[r].conj() * row;
            }
            p[j][k] = acc.re.max(0.0);
        }
    }
    p
}

/// Shannon mutual information of the measured outcome distribution.
fn classical_information(p: &[[f64; 2]; 2]) -> f64 {
    let pa = p[0][0] + p[0][1];
    let pb = p[0][0] + p[1][0];
    let joint: f64 = p.iter().flatten().map(|&x| -xlog2x(x)).sum();
    binary_entropy(pa) + binary_entropy(pb) - joint
}

/// I(Φ(ρ)) for product-basis angles (θ_A, φ_A, θ_B, φ_B).
pub fn dephased_information(state: &TwoSiteState, basis_a: &MeasurementBasis, basis_b: &MeasurementBasis) -> f64 {
    classical_information(&joint_probabilities(state, &basis_a.vectors(), &basis_b.vectors()))
}

pub fn symmetric_discord(state: &TwoSiteState) -> SymmetricDiscord {
    let grid = DirectionGrid::new(SYMMETRIC_GRID_DIVISIONS);
    let vectors: Vec<[Vector2<C64>; 2]> = grid.points.iter().map(|&(t, p)| basis_vectors(t, p)).collect();
    let n = grid.points.len();
    let mut values = Vec::with_capacity(n * n);
    for a in &vectors {
        for b in &vectors {
            values.push(-classical_information(&joint_probabilities(state, a, b)));
        }
    }
    let mut evaluations = values.len();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]).then(x.cmp(&y)));
    let f = |x: &[f64]| -> f64 {
        -classical_information(&joint_probabilities(state, &basis_vectors(x[0], x[1]), &basis_vectors(x[2], x[3])))
    };
    let step = grid.step;
    let mut best_val = values[order[0]];
    let (ta, pa) = grid.points[order[0] / n];
    let (tb, pb) = grid.points[order[0] % n];
    let mut best_x = [ta, pa, tb, pb];
    let mut converged = true;
    for &idx in order.iter().take(3) {
        let (ta, pa) = grid.points[idx / n];
        let (tb, pb) = grid.points[idx % n];
        let r = nelder_mead(f, &[ta, pa, tb, pb], &[step; 4], &NelderMeadOptions::default());
        evaluations += r.evaluations;
        converged &= r.converged;
        if r.value < best_val {
            best_val = r.value;
            best_x = [r.x[0], r.x[1], r.x[2], r.x[3]];
        }
    }
    let mi = mutual_information(state);
    SymmetricDiscord {
        bits: (mi + best_val).clamp(0.0, mi),
        basis_a: MeasurementBasis::new(best_x[0], best_x[1]),
        basis_b: MeasurementBasis::new(best_x[2], best_x[3]),
        evaluations,
        converged,
    }
}

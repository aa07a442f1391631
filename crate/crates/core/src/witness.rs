//! Commutator witness W = [ρ, ρ_A ⊗ ρ_B] and the projector test for
//! classical-classical states.

use nalgebra::{DMatrix, Dyn, SVD};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::family::{family_states, FamilySettings, StateFamily};
use crate::model::ModelPreset;
use crate::state::{kron, Mat2, Mat4, MeasurementBasis, TwoSiteState, C64};

/// ‖W‖ below this marks a candidate classical state.
pub const CLASSICALITY_TOL: f64 = 1e-8;

pub fn witness_operator(state: &TwoSiteState) -> Mat4 {
    let rho = state.matrix();
    let prod = kron(&state.marginal_a(), &state.marginal_b());
    rho * prod - prod * rho
}

/// Sum of singular values.
pub fn trace_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SVD::<C64, Dyn, Dyn>::new(m.clone(), false, false).singular_values.iter().sum()
}

pub fn trace_norm4(m: &Mat4) -> f64 {
    m.svd(false, false).singular_values.iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub trace_norm: f64,
    pub is_candidate_classical: bool,
    pub tolerance: f64,
}

pub fn witness(state: &TwoSiteState) -> WitnessReport {
    witness_with(state, CLASSICALITY_TOL)
}

pub fn witness_with(state: &TwoSiteState, tolerance: f64) -> WitnessReport {
    let n = trace_norm4(&witness_operator(state));
    WitnessReport { trace_norm: n, is_candidate_classical: n < tolerance, tolerance }
}

/// Product projectors Π_jk = B_j ⊗ B'_k of two local bases.
pub fn product_projectors(basis_a: &MeasurementBasis, basis_b: &MeasurementBasis) -> Vec<Mat4> {
    let (pa, pb) = (basis_a.projectors(), basis_b.projectors());
    pa.iter().flat_map(|a| pb.iter().map(move |b| kron(a, b))).collect()
}

/// max_j ‖[ρ, Π_j]‖ over the product projectors.
pub fn max_projector_commutator(state: &TwoSiteState, basis_a: &MeasurementBasis, basis_b: &MeasurementBasis) -> f64 {
    let rho = state.matrix();
    product_projectors(basis_a, basis_b)
        .iter()
        .map(|p| trace_norm4(&(rho * p - p * rho)))
        .fold(0.0, f64::max)
}

/// True iff ρ commutes with every product projector of the given bases.
pub fn classicality_commutator_check(state: &TwoSiteState, basis_a: &MeasurementBasis, basis_b: &MeasurementBasis) -> bool {
    max_projector_commutator(state, basis_a, basis_b) < CLASSICALITY_TOL
}

/// Φ(ρ) = Σ_j Π_j ρ Π_j in the product basis.
pub fn dephase(state: &TwoSiteState, basis_a: &MeasurementBasis, basis_b: &MeasurementBasis) -> Result<TwoSiteState> {
    let rho = state.matrix();
    let out = product_projectors(basis_a, basis_b).iter().fold(Mat4::zeros(), |acc, p| acc + p * rho * p);
    Ok(TwoSiteState::new(out, state.source)?.with_distance(state.r.unwrap_or(0)))
}

fn bloch(m: &Mat2) -> [f64; 3] {
    [2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re]
}

/// Local bases diagonalizing the two marginals (computational basis for a
/// maximally mixed marginal).
pub fn marginal_eigenbases(state: &TwoSiteState) -> (MeasurementBasis, MeasurementBasis) {
    let pick = |m: &Mat2| {
        let n = bloch(m);
        if n.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-12 {
            MeasurementBasis::computational()
        } else {
            MeasurementBasis::along(n)
        }
    };
    (pick(&state.marginal_a()), pick(&state.marginal_b()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessProfile {
    pub fields: Vec<f64>,
    pub norms: Vec<f64>,
    /// Fields where ‖W‖ < tolerance (resolved only to the grid spacing).
    pub zeros: Vec<f64>,
    /// Field of the largest jump in d‖W‖/dh away from zeros, if any.
    pub kink: Option<f64>,
    pub tolerance: f64,
}

impl WitnessProfile {
    /// Zeros and kink of a sampled ‖W‖(h) curve; `fields` ascending.
    pub fn from_series(fields: Vec<f64>, norms: Vec<f64>, tolerance: f64) -> Self {
        let zero_idx: Vec<usize> = (0..norms.len()).filter(|&i| norms[i] < tolerance).collect();
        let zeros = zero_idx.iter().map(|&i| fields[i]).collect();
        let mut kink = None;
        let mut best = 0.0;
        for i in 1..norms.len().saturating_sub(1) {
            if zero_idx.iter().any(|&z| z.abs_diff(i) <= 1) {
                continue;
            }
            let left = (norms[i] - norms[i - 1]) / (fields[i] - fields[i - 1]);
            let right = (norms[i + 1] - norms[i]) / (fields[i + 1] - fields[i]);
            let jump = (right - left).abs();
            if jump > best {
                best = jump;
                kink = Some(fields[i]);
            }
        }
        Self { fields, norms, zeros, kink, tolerance }
    }
}

/// ‖W‖ of the pair at distance `r` over a field grid.
pub fn witness_profile(
    preset: &ModelPreset,
    family: StateFamily,
    fields: &[f64],
    settings: &FamilySettings,
    r: usize,
) -> Result<WitnessProfile> {
    let mut norms = Vec::with_capacity(fields.len());
    for &h in fields {
        let p = family_states(preset, family, h, settings, &[r])?;
        norms.push(witness(&p.pairs[0].state).trace_norm);
    }
    let mut order: Vec<usize> = (0..fields.len()).collect();
    order.sort_by(|&a, &b| fields[a].total_cmp(&fields[b]));
    Ok(WitnessProfile::from_series(
        order.iter().map(|&i| fields[i]).collect(),
        order.iter().map(|&i| norms[i]).collect(),
        CLASSICALITY_TOL,
    ))
}

//! Closed-form correlations for symmetric XY pair states and for
//! Bell-diagonal states, plus the correlator-based X-state constructor.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::entropy::{binary_entropy, entropy_from_eigenvalues, xlog2x};
use crate::error::{Error, Result};
use crate::state::{CorrelatorSet, StateSource, TwoSiteState, C64};

/// Tolerance on g_x, g_xz for a state to count as symmetric.
pub const SYMMETRIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XyClosedForm {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    /// (1 + ⟨σz⟩)/2.
    pub p1: f64,
    /// (1 + √(gxx² + ⟨σz⟩²))/2.
    pub p2: f64,
    /// ξ1, ξ2, η1, η2.
    pub eigenvalues: [f64; 4],
}

/// Discord of a symmetric pair state measured in the {|+⟩, |−⟩} basis.
pub fn discord_closed_form_xy(c: &CorrelatorSet) -> Result<XyClosedForm> {
    if c.gx.abs() > SYMMETRIC_TOL || c.gxz.abs() > SYMMETRIC_TOL {
        return Err(Error::SymmetryBroken(format!(
            "closed form needs g_x = g_xz = 0, got g_x = {:e}, g_xz = {:e}",
            c.gx, c.gxz
        )));
    }
    let root = ((c.gxx - c.gyy).powi(2) + 4.0 * c.gz * c.gz).sqrt();
    let xi1 = (1.0 + c.gzz + root) / 4.0;
    let xi2 = (1.0 + c.gzz - root) / 4.0;
    let eta1 = (1.0 - c.gzz + (c.gxx + c.gyy)) / 4.0;
    let eta2 = (1.0 - c.gzz - (c.gxx + c.gyy)) / 4.0;
    let eigenvalues = [xi1, xi2, eta1, eta2];
    let s = entropy_from_eigenvalues(&eigenvalues)?;
    let (p1, p2) = xy_outcome_probabilities(c.gz, c.gxx);
    let (h1, h2) = (binary_entropy(p1), binary_entropy(p2));
    let mutual_information = (2.0 * h1 - s).max(0.0);
    let classical_correlation = (h1 - h2).clamp(0.0, mutual_information);
    Ok(XyClosedForm {
        mutual_information,
        classical_correlation,
        discord: mutual_information - classical_correlation,
        p1,
        p2,
        eigenvalues,
    })
}

/// p1 = (1 + ⟨σz⟩)/2 and p2 = (1 + √(gxx² + ⟨σz⟩²))/2.
pub fn xy_outcome_probabilities(gz: f64, gxx: f64) -> (f64, f64) {
    ((1.0 + gz) / 2.0, (1.0 + (gxx * gxx + gz * gz).sqrt()) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonal {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    pub eigenvalues: [f64; 4],
}

fn bell_eigenvalues(c1: f64, c2: f64, c3: f64) -> Result<[f64; 4]> {
    let l = [
        (1.0 - c1 - c2 - c3) / 4.0,
        (1.0 - c1 + c2 + c3) / 4.0,
        (1.0 + c1 - c2 + c3) / 4.0,
        (1.0 + c1 + c2 - c3) / 4.0,
    ];
    if let Some(&bad) = l.iter().find(|&&x| x < -1e-12 || !x.is_finite()) {
        return Err(Error::NotPositive(bad));
    }
    Ok(l)
}

/// Correlations of ρ = (I + Σ c_i σ_i ⊗ σ_i)/4.
pub fn bell_diagonal(c1: f64, c2: f64, c3: f64) -> Result<BellDiagonal> {
    let l = bell_eigenvalues(c1, c2, c3)?;
    let mutual_information = (2.0 + l.iter().map(|&x| xlog2x(x.max(0.0))).sum::<f64>()).max(0.0);
    let classical_correlation = classical_correlation_bell_diagonal(c1, c2, c3)?.min(mutual_information);
    Ok(BellDiagonal {
        mutual_information,
        classical_correlation,
        discord: mutual_information - classical_correlation,
        eigenvalues: l,
    })
}

/// ((1 − c)/2) log₂(1 − c) + ((1 + c)/2) log₂(1 + c), c = max |c_i|.
pub fn classical_correlation_bell_diagonal(c1: f64, c2: f64, c3: f64) -> Result<f64> {
    bell_eigenvalues(c1, c2, c3)?;
    let c = c1.abs().max(c2.abs()).max(c3.abs()).min(1.0);
    Ok(xlog2x(1.0 - c) / 2.0 + xlog2x(1.0 + c) / 2.0)
}

pub fn bell_diagonal_state(c1: f64, c2: f64, c3: f64) -> Result<TwoSiteState> {
    bell_eigenvalues(c1, c2, c3)?;
    let s = xstate_from_correlators(&CorrelatorSet { r: 0, gx: 0.0, gz: 0.0, gxx: c1, gyy: c2, gzz: c3, gxz: 0.0 })?;
    TwoSiteState::synthetic(*s.matrix())
}

/// Hellmann–Feynman correlators of the XXZ chain
/// H = −½ Σ (σxσx + σyσy + Δ σzσz): c1 = c2 = Δ ε′ − ε, c3 = −2 ε′.
pub fn xxz_correlators_from_energy(eps: f64, deps_ddelta: f64, delta: f64) -> (f64, f64, f64) {
    let c1 = delta * deps_ddelta - eps;
    (c1, c1, -2.0 * deps_ddelta)
}

/// Pair state assembled from correlators (per-site g_x, g_z):
///
/// ```text
///        | A a a F |            A = 1 + 2 g_z + g_zz   D = 1 − 2 g_z + g_zz
/// ρ = ¼  | a B C b |            B = 1 − g_zz           C = g_xx + g_yy
///        | a C B b |            F = g_xx − g_yy
///        | F b b D |            a = g_x + g_xz         b = g_x − g_xz
/// ```
pub fn xstate_from_correlators(c: &CorrelatorSet) -> Result<TwoSiteState> {
    let a_ = 1.0 + 2.0 * c.gz + c.gzz;
    let d_ = 1.0 - 2.0 * c.gz + c.gzz;
    let b_ = 1.0 - c.gzz;
    let cc = c.gxx + c.gyy;
    let f = c.gxx - c.gyy;
    let a = c.gx + c.gxz;
    let b = c.gx - c.gxz;
    #[rustfmt::skip]
    let m = Matrix4::new(
        a_, a,  a,  f,
        a,  b_, cc, b,
        a,  cc, b_, b,
        f,  b,  b,  d_,
    ) / 4.0;
    let source = if c.gx == 0.0 && c.gxz == 0.0 { StateSource::ClosedForm } else { StateSource::Synthetic };
    Ok(TwoSiteState::new(m.map(|x| C64::new(x, 0.0)), source)?.with_distance(c.r))
}

use crate::error::{Error, Result};
use crate::model::{Boundary, ChainSpec};

use super::hamiltonian::{build_hamiltonian, HamiltonianMatrix};
use super::lanczos::{dense_lowest, lowest_eigenpairs, LanczosOptions};
use super::reduce::ChainState;
use super::sector::{Momentum, Parity, SectorBasis, SectorLabel};

pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;

/// When to reduce periodic chains with translation momenta k = 0, π.
///
/// Only these two momenta are searched, so the reported gap is the gap
/// within them. For hx = 0 the parity sectors alone already give the
/// exact two lowest levels, which is why `WhenPinned` is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslationUse {
    Never,
    WhenPinned,
    Always,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdOptions {
    pub degeneracy_tol: f64,
    /// Sectors up to this dimension are diagonalized densely.
    pub dense_sector_max: usize,
    pub lanczos: LanczosOptions,
    pub translation: TranslationUse,
}

impl Default for EdOptions {
    fn default() -> Self {
        Self {
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            dense_sector_max: 256,
            lanczos: LanczosOptions::default(),
            translation: TranslationUse::WhenPinned,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundStateBundle {
    pub n_sites: usize,
    /// Lowest (up to two) total energies, ascending.
    pub energies: Vec<f64>,
    /// Full-space real amplitudes, unit norm, matching `energies`.
    pub states: Vec<Vec<f64>>,
    pub sectors: Vec<SectorLabel>,
    pub energy_density: f64,
    /// E1 − E0 (infinite for a one-dimensional problem).
    pub gap: f64,
    pub degenerate: bool,
    pub pinning: f64,
}

impl GroundStateBundle {
    /// The lowest eigenvector as a pure state.
    pub fn ground(&self) -> ChainState {
        ChainState::pure(self.n_sites, self.states[0].clone())
    }
}

fn sectors_for(h: &HamiltonianMatrix, opts: &EdOptions) -> Vec<SectorLabel> {
    let spec = h.spec();
    let pinned = h.pinning() != 0.0;
    let translation = spec.boundary == Boundary::Periodic
        && spec.n_sites % 2 == 0
        && spec.n_sites >= 4
        && match opts.translation {
            TranslationUse::Never => false,
            TranslationUse::WhenPinned => pinned,
            TranslationUse::Always => true,
        };
    let parities: Vec<Option<Parity>> = if pinned { vec![None] } else { vec![Some(Parity::Even), Some(Parity::Odd)] };
    let momenta: Vec<Option<Momentum>> = if translation { vec![Some(Momentum::Zero), Some(Momentum::Pi)] } else { vec![None] };
    let mut out = Vec::new();
    for &parity in &parities {
        for &momentum in &momenta {
            out.push(SectorLabel { parity, momentum });
        }
    }
    out
}

/// Two lowest eigenpairs, found sector by sector.
pub fn ground_state_with(h: &HamiltonianMatrix, opts: &EdOptions) -> Result<GroundStateBundle> {
    let mut found: Vec<(f64, usize, SectorLabel, Vec<f64>)> = Vec::new();
    for (idx, label) in sectors_for(h, opts).into_iter().enumerate() {
        let basis = SectorBasis::new(h.n_sites(), label);
        if basis.dimension() == 0 {
            continue;
        }
        let op = basis.operator(h);
        let pairs = if basis.dimension() <= opts.dense_sector_max {
            dense_lowest(&op.to_dense(), 2)
        } else {
            lowest_eigenpairs(&op, 2, &opts.lanczos)
                .map_err(|e| Error::NonConvergence(format!("sector {label}: {e}")))?
        };
        for (e, v) in pairs.values.into_iter().zip(pairs.vectors) {
            found.push((e, idx, label, basis.expand(&v)));
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    found.truncate(2);
    if found.is_empty() {
        return Err(Error::NonConvergence("no eigenpairs found".into()));
    }
    let energies: Vec<f64> = found.iter().map(|f| f.0).collect();
    let gap = if energies.len() > 1 { energies[1] - energies[0] } else { f64::INFINITY };
    Ok(GroundStateBundle {
        n_sites: h.n_sites(),
        energy_density: energies[0] / h.n_sites() as f64,
        degenerate: gap < opts.degeneracy_tol,
        gap,
        sectors: found.iter().map(|f| f.2).collect(),
        states: found.into_iter().map(|f| f.3).collect(),
        energies,
        pinning: h.pinning(),
    })
}

/// Two lowest eigenpairs with default solver settings.
pub fn ground_state(h: &HamiltonianMatrix, degeneracy_tol: f64) -> Result<GroundStateBundle> {
    ground_state_with(h, &EdOptions { degeneracy_tol, ..EdOptions::default() })
}

/// T → 0 symmetric state: the equal mixture of the lowest doublet when it
/// is (quasi-)degenerate, otherwise the unique ground state.
pub fn thermal_state(bundle: &GroundStateBundle) -> Result<ChainState> {
    if bundle.pinning != 0.0 {
        return Err(Error::Unsupported(format!("thermal state requires hx = 0, got hx = {}", bundle.pinning)));
    }
    if bundle.degenerate && bundle.states.len() > 1 {
        Ok(ChainState::mixture(
            bundle.n_sites,
            vec![(0.5, bundle.states[0].clone()), (0.5, bundle.states[1].clone())],
        ))
    } else {
        Ok(bundle.ground())
    }
}

/// Ground state with the pinning field `spec.hx > 0` selecting one branch
/// of the ordered doublet (positive ⟨σx⟩).
pub fn broken_state_with(spec: &ChainSpec, opts: &EdOptions) -> Result<GroundStateBundle> {
    if spec.hx <= 0.0 {
        return Err(Error::Unsupported("broken-symmetry state requires hx > 0".into()));
    }
    ground_state_with(&build_hamiltonian(spec)?, opts)
}

pub fn broken_state(spec: &ChainSpec) -> Result<GroundStateBundle> {
    broken_state_with(spec, &EdOptions::default())
}

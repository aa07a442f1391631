//! Exact diagonalization of finite XYZ chains.

pub mod ground;
pub mod hamiltonian;
pub mod lanczos;
pub mod reduce;
pub mod sector;

pub use ground::{
    broken_state, broken_state_with, ground_state, ground_state_with, thermal_state, EdOptions, GroundStateBundle,
    TranslationUse, DEFAULT_DEGENERACY_TOL,
};
pub use hamiltonian::{build_hamiltonian, HamiltonianMatrix, Storage, MAX_DENSE_SITES, MAX_SITES};
pub use reduce::{correlators, correlators_at, pair_sites, reduce_one_site, reduce_two_site, ChainState};

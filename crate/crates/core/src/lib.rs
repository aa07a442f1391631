//! Pairwise quantum discord, classical correlation, concurrence and a
//! commutator-based nonclassicality witness for ground states of
//! spin-1/2 XYZ chains.

pub mod analysis;
pub mod config;
pub mod correlations;
pub mod ed;
pub mod error;
pub mod family;
pub mod model;
pub mod optimize;
pub mod quad;
pub mod state;
pub mod sweep;
pub mod witness;
pub mod xy;

pub use error::{Error, ErrorKind, Result};
pub use model::{convert_convention, critical_field, factorizing_field, Boundary, ChainSpec, Convention, ModelPreset};
pub use state::{CorrelatorSet, MeasurementBasis, StateSource, TwoSiteState};

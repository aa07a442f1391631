//! Information-theoretic measures on two-qubit states.

pub mod closed_form;
pub mod concurrence;
pub mod discord;
pub mod entropy;
pub mod symmetric;

use serde::{Deserialize, Serialize};

pub use closed_form::{
    bell_diagonal, bell_diagonal_state, classical_correlation_bell_diagonal, discord_closed_form_xy,
    xstate_from_correlators, xxz_correlators_from_energy, xy_outcome_probabilities, BellDiagonal, XyClosedForm,
};
pub use concurrence::concurrence;
pub use discord::{classical_correlation, conditioned_entropy, measured_information, one_way, quantum_discord, OneWayCorrelations};
pub use entropy::{binary_entropy, mutual_information, von_neumann_entropy};
pub use symmetric::{dephased_information, symmetric_discord, SymmetricDiscord};

use crate::state::{MeasurementBasis, TwoSiteState};

/// Optimizer that produced C and Q.
pub const METHOD: &str = "grid+nelder_mead";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    pub symmetric_discord: Option<f64>,
    pub concurrence: f64,
    /// Optimal measurement on party B.
    pub basis: MeasurementBasis,
    pub evaluations: usize,
    pub converged: bool,
    /// Discord is only an upper bound (state is not an X-state).
    pub upper_bound: bool,
}

/// All measures for one state. The two-sided discord is a four-angle
/// search and noticeably slower, so it is optional.
pub fn analyze(state: &TwoSiteState, with_symmetric: bool) -> CorrelationReport {
    let ow = one_way(state);
    let (symmetric_discord, extra, sym_ok) = if with_symmetric {
        let s = symmetric::symmetric_discord(state);
        (Some(s.bits), s.evaluations, s.converged)
    } else {
        (None, 0, true)
    };
    CorrelationReport {
        mutual_information: ow.mutual_information,
        classical_correlation: ow.classical_correlation,
        discord: ow.discord,
        symmetric_discord,
        concurrence: concurrence::concurrence(state),
        basis: ow.basis,
        evaluations: ow.evaluations + extra,
        converged: ow.converged && sym_ok,
        upper_bound: ow.upper_bound,
    }
}

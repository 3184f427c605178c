//! Exact complex statevector engine.
//!
//! Amplitudes are stored with qubit 0 as the most significant bit of the basis
//! index, so `|10>` on two qubits is index 2.

mod exact;
mod hamiltonian;
mod pauli;
mod state;

use serde::{Deserialize, Serialize};

pub use exact::{exact_evolve, ExactPropagator};
pub use hamiltonian::{Hamiltonian, HamiltonianTerm};
pub use pauli::{Pauli, PauliString};
pub use state::{
    apply_pauli_string, apply_unitary, distance_sq, pauli_expectation, transition_amplitude, State,
};

pub(crate) use state::{apply_1q, apply_cnot, apply_controlled_1q, inner_slices};

use crate::{Result, C64};

/// Largest register handled by the dense eigendecomposition oracle.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Largest register handled by the Lanczos ground-energy solver.
pub const MAX_LANCZOS_QUBITS: usize = 20;

/// Real time `exp(-itH)` or imaginary time `exp(-tH)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeKind {
    Real,
    Imaginary,
}

/// Action of one product-formula factor on a state.
///
/// For a Pauli string `P` and `angle = tau * h`, real time returns
/// `cos(angle) psi - i sin(angle) P psi` (unitary). Imaginary time returns the
/// unnormalized `cosh(angle) psi - sinh(angle) P psi`.
pub fn exp_pauli_action(
    state: &State,
    p: &PauliString,
    angle: f64,
    kind: TimeKind,
) -> Result<State> {
    let ppsi = apply_pauli_string(state, p)?;
    let (a, b) = match kind {
        TimeKind::Real => (C64::new(angle.cos(), 0.0), C64::new(0.0, -angle.sin())),
        TimeKind::Imaginary => (C64::new(angle.cosh(), 0.0), C64::new(-angle.sinh(), 0.0)),
    };
    Ok(state.combine(a, &ppsi, b))
}

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::hamiltonian::Hamiltonian;
use super::state::State;
use super::TimeKind;
use crate::{Result, C64};

/// Exact propagator from a dense eigendecomposition of `H`; reusable across
/// many evolution times.
#[derive(Clone, Debug)]
pub struct ExactPropagator {
    n_qubits: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl ExactPropagator {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        h.check_dense()?;
        let eig = SymmetricEigen::new(h.dense_matrix()?);
        Ok(Self {
            n_qubits: h.n_qubits(),
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `exp(-itH)|psi>` for real time, `exp(-tH)|psi> / norm` for imaginary time.
    pub fn evolve(&self, state: &State, t: f64, kind: TimeKind) -> Result<State> {
        state.check_qubits(self.n_qubits)?;
        let coeffs = self.eigenvectors.adjoint() * state.as_column();
        let shift = self.ground_energy();
        let scaled = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&self.eigenvalues)
                .map(|(c, &e)| match kind {
                    TimeKind::Real => c * C64::from_polar(1.0, -e * t),
                    // Shifting by the ground energy only changes the norm.
                    TimeKind::Imaginary => c * (-(e - shift) * t).exp(),
                }),
        );
        let out = &self.eigenvectors * scaled;
        let mut s = State::from_amplitudes(out.iter().copied().collect())?;
        if kind == TimeKind::Imaginary {
            s.normalize();
        }
        Ok(s)
    }
}

/// One-shot exact evolution; see [`ExactPropagator`] for repeated use.
pub fn exact_evolve(h: &Hamiltonian, state: &State, t: f64, kind: TimeKind) -> Result<State> {
    state.check_qubits(h.n_qubits())?;
    ExactPropagator::new(h)?.evolve(state, t, kind)
}

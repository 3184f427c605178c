use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pauli::PauliString;
use super::state::{apply_pauli, State};
use super::{MAX_DENSE_QUBITS, MAX_LANCZOS_QUBITS};
use crate::{Error, Result, C64};

/// One weighted Pauli term `coeff * operator`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerm {
    pub coeff: f64,
    pub operator: PauliString,
}

/// `H = sum_k h_k P_k` with real coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<HamiltonianTerm>,
}

impl Hamiltonian {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(
        n_qubits: usize,
        terms: impl IntoIterator<Item = (f64, PauliString)>,
    ) -> Result<Self> {
        let mut h = Self::new(n_qubits);
        for (coeff, op) in terms {
            h.push(coeff, op)?;
        }
        Ok(h)
    }

    pub fn push(&mut self, coeff: f64, operator: PauliString) -> Result<()> {
        if !coeff.is_finite() {
            return Err(Error::NonFinite("Hamiltonian coefficient"));
        }
        if operator.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: operator.n_qubits(),
            });
        }
        self.terms.push(HamiltonianTerm { coeff, operator });
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    /// True when every term has an even number of `Y` factors.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.operator.y_count() % 2 == 0)
    }

    /// `H|psi>`.
    pub fn apply(&self, state: &State) -> Result<State> {
        state.check_qubits(self.n_qubits)?;
        let mut out = State::from_amplitudes(vec![C64::new(0.0, 0.0); state.dim()])?;
        let mut scratch = state.clone();
        for t in &self.terms {
            scratch.amplitudes_mut().copy_from_slice(state.amplitudes());
            apply_pauli(scratch.amplitudes_mut(), &t.operator);
            for (o, s) in out.amplitudes_mut().iter_mut().zip(scratch.amplitudes()) {
                *o += s * t.coeff;
            }
        }
        Ok(out)
    }

    pub fn expectation(&self, state: &State) -> Result<f64> {
        let mut e = 0.0;
        for t in &self.terms {
            e += t.coeff * super::state::pauli_expectation(state, &t.operator)?;
        }
        Ok(e)
    }

    pub fn dense_matrix(&self) -> Result<DMatrix<C64>> {
        self.check_dense()?;
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for t in &self.terms {
            let masks = t.operator.masks();
            for i in 0..dim {
                m[(i ^ masks.flip, i)] += masks.phase(i) * t.coeff;
            }
        }
        Ok(m)
    }

    /// Lowest eigenvalue: dense diagonalization up to 8 qubits, Lanczos with
    /// full reorthogonalization above.
    pub fn ground_energy(&self) -> Result<f64> {
        if self.n_qubits <= 8 {
            self.ground_energy_dense()
        } else {
            self.ground_energy_lanczos()
        }
    }

    pub fn ground_energy_dense(&self) -> Result<f64> {
        self.check_dense()?;
        let eigenvalues = if self.is_real() {
            let m = self.dense_matrix()?.map(|z| z.re);
            SymmetricEigen::new(m).eigenvalues
        } else {
            SymmetricEigen::new(self.dense_matrix()?).eigenvalues
        };
        Ok(eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
    }

    pub fn ground_energy_lanczos(&self) -> Result<f64> {
        if self.n_qubits > MAX_LANCZOS_QUBITS {
            return Err(Error::TooLarge {
                n_qubits: self.n_qubits,
                limit: MAX_LANCZOS_QUBITS,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let start = State::random(self.n_qubits, &mut rng);
        let mut basis: Vec<State> = vec![start];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let max_iter = dim.min(400);
        for k in 0..max_iter {
            let mut w = self.apply(&basis[k])?;
            let alpha = basis[k].inner(&w)?.re;
            alphas.push(alpha);
            // Full reorthogonalization, twice for stability.
            for _ in 0..2 {
                for v in &basis {
                    let c = v.inner(&w)?;
                    w = w.combine(C64::new(1.0, 0.0), v, -c);
                }
            }
            let beta = w.norm();
            let (ritz, last_component) = tridiagonal_min(&alphas, &betas);
            // Residual norm of the Ritz pair is |beta * y_last|.
            if beta * last_component.abs() < 1e-11 || beta < 1e-12 || k + 1 == max_iter {
                return Ok(ritz);
            }
            betas.push(beta);
            w.normalize();
            basis.push(w);
        }
        unreachable!("loop returns on its final iteration")
    }

    pub(crate) fn check_dense(&self) -> Result<()> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooLarge {
                n_qubits: self.n_qubits,
                limit: MAX_DENSE_QUBITS,
            });
        }
        Ok(())
    }
}

/// Lowest eigenvalue of the Lanczos matrix and the last component of its eigenvector.
fn tridiagonal_min(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let k = alphas.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let i = eig.eigenvalues.imin();
    (eig.eigenvalues[i], eig.eigenvectors[(k - 1, i)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_matrix_is_hermitian() {
        let h = Hamiltonian::from_terms(
            3,
            [
                (0.7, "XYZ".parse().unwrap()),
                (-1.2, "ZZI".parse().unwrap()),
                (0.3, "IYI".parse().unwrap()),
            ],
        )
        .unwrap();
        let m = h.dense_matrix().unwrap();
        assert!((&m - m.adjoint()).norm() < 1e-14);
        assert!(!h.is_real());
    }

    #[test]
    fn rejects_mismatched_terms() {
        let mut h = Hamiltonian::new(2);
        assert!(h.push(1.0, "ZZZ".parse().unwrap()).is_err());
        assert!(h.push(f64::NAN, "ZZ".parse().unwrap()).is_err());
    }

    #[test]
    fn lanczos_matches_dense() {
        let mut h = Hamiltonian::new(6);
        for q in 0..5 {
            let mut f = vec![crate::simcore::Pauli::I; 6];
            f[q] = crate::simcore::Pauli::Z;
            f[q + 1] = crate::simcore::Pauli::Z;
            h.push(-1.0, PauliString::new(f).unwrap()).unwrap();
        }
        for q in 0..6 {
            let mut f = vec![crate::simcore::Pauli::I; 6];
            f[q] = crate::simcore::Pauli::X;
            h.push(-0.7, PauliString::new(f.clone()).unwrap()).unwrap();
            f[q] = crate::simcore::Pauli::Y;
            h.push(0.3 * q as f64, PauliString::new(f).unwrap())
                .unwrap();
        }
        let dense = h.ground_energy_dense().unwrap();
        let lanczos = h.ground_energy_lanczos().unwrap();
        assert!((dense - lanczos).abs() < 1e-10, "{dense} vs {lanczos}");
    }

    #[test]
    fn ground_energy_of_single_bond() {
        let h = Hamiltonian::from_terms(2, [(-1.0, "ZZ".parse().unwrap())]).unwrap();
        assert!((h.ground_energy().unwrap() + 1.0).abs() < 1e-12);
    }
}

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::pauli::PauliString;
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Statevector of `n` qubits. Qubit 0 is the most significant bit of the
/// basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl State {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = C64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "{len} amplitudes is not a qubit register"
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("amplitudes"));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// Haar-like random normalized state (normalized complex Gaussian).
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << n_qubits)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut s = Self { n_qubits, amps };
        s.normalize();
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &State) -> Result<C64> {
        self.check_dim(other)?;
        Ok(inner_slices(&self.amps, &other.amps))
    }

    pub(crate) fn check_dim(&self, other: &State) -> Result<()> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: other.amps.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_qubits(&self, n_qubits: usize) -> Result<()> {
        if self.n_qubits != n_qubits {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: self.n_qubits,
            });
        }
        Ok(())
    }

    /// `a * self + b * other`, used for unnormalized imaginary-time targets.
    pub(crate) fn combine(&self, a: C64, other: &State, b: C64) -> State {
        let amps = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| a * x + b * y)
            .collect();
        State {
            n_qubits: self.n_qubits,
            amps,
        }
    }

    pub fn as_column(&self) -> nalgebra::DVector<C64> {
        nalgebra::DVector::from_column_slice(&self.amps)
    }
}

#[inline]
pub(crate) fn inner_slices(bra: &[C64], ket: &[C64]) -> C64 {
    bra.iter()
        .zip(ket)
        .fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

/// `||a - b||^2`.
pub fn distance_sq(a: &State, b: &State) -> Result<f64> {
    a.check_dim(b)?;
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum())
}

#[inline]
pub(crate) fn qubit_bit(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// Applies a 2x2 matrix to `qubit`.
pub(crate) fn apply_1q(amps: &mut [C64], n_qubits: usize, qubit: usize, m: &[[C64; 2]; 2]) {
    let bit = qubit_bit(n_qubits, qubit);
    for i in 0..amps.len() {
        if i & bit == 0 {
            let a0 = amps[i];
            let a1 = amps[i | bit];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

pub(crate) fn apply_cnot(amps: &mut [C64], n_qubits: usize, control: usize, target: usize) {
    let c = qubit_bit(n_qubits, control);
    let t = qubit_bit(n_qubits, target);
    for i in 0..amps.len() {
        if i & c != 0 && i & t == 0 {
            amps.swap(i, i | t);
        }
    }
}

/// Applies a 2x2 matrix to `target` on the subspace where `control` is 1.
pub(crate) fn apply_controlled_1q(
    amps: &mut [C64],
    n_qubits: usize,
    control: usize,
    target: usize,
    m: &[[C64; 2]; 2],
) {
    let c = qubit_bit(n_qubits, control);
    let bit = qubit_bit(n_qubits, target);
    for i in 0..amps.len() {
        if i & c != 0 && i & bit == 0 {
            let a0 = amps[i];
            let a1 = amps[i | bit];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

/// Multiplies by a Pauli string in place.
pub(crate) fn apply_pauli(amps: &mut [C64], p: &PauliString) {
    let masks = p.masks();
    if masks.flip == 0 {
        for (i, a) in amps.iter_mut().enumerate() {
            *a *= masks.phase(i);
        }
        return;
    }
    for i in 0..amps.len() {
        let j = i ^ masks.flip;
        if i < j {
            let ai = amps[i];
            let aj = amps[j];
            amps[j] = masks.phase(i) * ai;
            amps[i] = masks.phase(j) * aj;
        }
    }
}

/// Applies a dense `2^k x 2^k` matrix to `targets`; `targets[0]` is the most
/// significant bit of the matrix index.
pub(crate) fn apply_dense(amps: &mut [C64], n_qubits: usize, targets: &[usize], u: &DMatrix<C64>) {
    let k = targets.len();
    let bits: Vec<usize> = targets.iter().map(|&q| qubit_bit(n_qubits, q)).collect();
    let target_mask: usize = bits.iter().sum();
    let sub = 1usize << k;
    let offsets: Vec<usize> = (0..sub)
        .map(|local| {
            (0..k)
                .filter(|&j| local & (1 << (k - 1 - j)) != 0)
                .map(|j| bits[j])
                .sum()
        })
        .collect();
    let mut buf = vec![ZERO; sub];
    for base in 0..amps.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (b, off) in buf.iter_mut().zip(&offsets) {
            *b = amps[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            amps[base + off] = (0..sub).fold(ZERO, |acc, c| acc + u[(r, c)] * buf[c]);
        }
    }
}

/// Applies a dense unitary to the listed target qubits.
pub fn apply_unitary(state: &State, u: &DMatrix<C64>, targets: &[usize]) -> Result<State> {
    let n = state.n_qubits;
    let mut seen = 0usize;
    for &q in targets {
        if q >= n || seen & (1 << q) != 0 {
            return Err(Error::InvalidTargets {
                targets: targets.to_vec(),
                n_qubits: n,
            });
        }
        seen |= 1 << q;
    }
    let dim = 1usize << targets.len();
    if targets.is_empty() || u.nrows() != dim || u.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: u.nrows(),
        });
    }
    let deviation = (u.adjoint() * u - DMatrix::<C64>::identity(dim, dim)).norm();
    if deviation.is_nan() || deviation >= 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    let mut out = state.clone();
    apply_dense(&mut out.amps, n, targets, u);
    Ok(out)
}

/// `<psi|P|psi>`.
pub fn pauli_expectation(state: &State, p: &PauliString) -> Result<f64> {
    Ok(transition_amplitude(state, p, state)?.re)
}

/// `<bra|P|ket>`.
pub fn transition_amplitude(bra: &State, p: &PauliString, ket: &State) -> Result<C64> {
    bra.check_dim(ket)?;
    ket.check_qubits(p.n_qubits())?;
    let masks = p.masks();
    Ok(ket.amps.iter().enumerate().fold(ZERO, |acc, (i, k)| {
        acc + bra.amps[i ^ masks.flip].conj() * masks.phase(i) * k
    }))
}

/// `P|psi>` as a new state.
pub fn apply_pauli_string(state: &State, p: &PauliString) -> Result<State> {
    state.check_qubits(p.n_qubits())?;
    let mut out = state.clone();
    apply_pauli(&mut out.amps, p);
    Ok(out)
}

//! Flat gate lists: fixed CNOTs and parameterized rotations `exp(-iθG)` with
//! `G` one of the Pauli matrices, so that `G² = 1` and `∂θ exp(-iθG) = -iG exp(-iθG)`.

use serde::{Deserialize, Serialize};

use crate::simcore::{apply_1q, apply_cnot, Pauli, State};
use crate::{Error, Result, C64};

/// Rotation generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }

    /// Matrix of `exp(-iθG)`.
    pub fn rotation(self, theta: f64) -> [[C64; 2]; 2] {
        let (s, c) = theta.sin_cos();
        let o = C64::new(0.0, 0.0);
        match self {
            Axis::X => [
                [C64::new(c, 0.0), C64::new(0.0, -s)],
                [C64::new(0.0, -s), C64::new(c, 0.0)],
            ],
            Axis::Y => [
                [C64::new(c, 0.0), C64::new(-s, 0.0)],
                [C64::new(s, 0.0), C64::new(c, 0.0)],
            ],
            Axis::Z => [[C64::new(c, -s), o], [o, C64::new(c, s)]],
        }
    }

    pub fn generator(self) -> [[C64; 2]; 2] {
        self.pauli().matrix()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    /// `exp(-i params[param] G)` on `qubit`.
    Rotation {
        qubit: usize,
        axis: Axis,
        param: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

impl Gate {
    pub fn param(&self) -> Option<usize> {
        match self {
            Gate::Rotation { param, .. } => Some(*param),
            Gate::Cnot { .. } => None,
        }
    }

    pub(crate) fn apply(&self, amps: &mut [C64], n_qubits: usize, params: &[f64]) {
        match *self {
            Gate::Rotation { qubit, axis, param } => {
                apply_1q(amps, n_qubits, qubit, &axis.rotation(params[param]))
            }
            Gate::Cnot { control, target } => apply_cnot(amps, n_qubits, control, target),
        }
    }

    pub(crate) fn apply_adjoint(&self, amps: &mut [C64], n_qubits: usize, params: &[f64]) {
        match *self {
            Gate::Rotation { qubit, axis, param } => {
                apply_1q(amps, n_qubits, qubit, &axis.rotation(-params[param]))
            }
            Gate::Cnot { control, target } => apply_cnot(amps, n_qubits, control, target),
        }
    }

    /// Multiplies by the generator `G` of a rotation; CNOTs are left alone.
    pub(crate) fn apply_generator(&self, amps: &mut [C64], n_qubits: usize) {
        if let Gate::Rotation { qubit, axis, .. } = *self {
            apply_1q(amps, n_qubits, qubit, &axis.generator());
        }
    }
}

/// Ordered gate list over a fixed register. Parameters are addressed by index
/// into an external angle slice, so one circuit serves many angle vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut n_params = 0;
        for g in &gates {
            let qubits = match *g {
                Gate::Rotation { qubit, param, .. } => {
                    n_params = n_params.max(param + 1);
                    vec![qubit]
                }
                Gate::Cnot { control, target } => vec![control, target],
            };
            if qubits.iter().any(|&q| q >= n_qubits)
                || (qubits.len() == 2 && qubits[0] == qubits[1])
            {
                return Err(Error::InvalidTargets {
                    targets: qubits,
                    n_qubits,
                });
            }
        }
        Ok(Self {
            n_qubits,
            gates,
            n_params,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    fn check(&self, state: &State, params: &[f64]) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: state.n_qubits(),
            });
        }
        if params.len() < self.n_params {
            return Err(Error::WrongArity {
                expected: self.n_params,
                found: params.len(),
            });
        }
        Ok(())
    }

    /// `U(params)|0...0>`.
    pub fn run(&self, params: &[f64]) -> Result<State> {
        self.apply(&State::zero(self.n_qubits), params)
    }

    pub fn apply(&self, state: &State, params: &[f64]) -> Result<State> {
        self.check(state, params)?;
        let mut out = state.clone();
        self.apply_range(out.amplitudes_mut(), params, 0, self.gates.len());
        Ok(out)
    }

    /// `U(params)^† |state>`.
    pub fn apply_adjoint(&self, state: &State, params: &[f64]) -> Result<State> {
        self.check(state, params)?;
        let mut out = state.clone();
        self.apply_range_adjoint(out.amplitudes_mut(), params, 0, self.gates.len());
        Ok(out)
    }

    /// Applies gates `lo..hi` in order.
    pub(crate) fn apply_range(&self, amps: &mut [C64], params: &[f64], lo: usize, hi: usize) {
        for g in &self.gates[lo..hi] {
            g.apply(amps, self.n_qubits, params);
        }
    }

    /// Applies the adjoint of gates `lo..hi` (last gate first).
    pub(crate) fn apply_range_adjoint(
        &self,
        amps: &mut [C64],
        params: &[f64],
        lo: usize,
        hi: usize,
    ) {
        for g in self.gates[lo..hi].iter().rev() {
            g.apply_adjoint(amps, self.n_qubits, params);
        }
    }

    /// Position of the rotation gate carrying each parameter.
    pub fn param_gate_positions(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.n_params];
        for (i, g) in self.gates.iter().enumerate() {
            if let Some(p) = g.param() {
                pos[p] = i;
            }
        }
        pos
    }

    /// Exact derivative states `∂_j U|0>` for every parameter, obtained by
    /// inserting `-iG` after the rotation carrying parameter `j`.
    pub fn derivative_states(&self, params: &[f64]) -> Result<Vec<State>> {
        let zero = State::zero(self.n_qubits);
        self.check(&zero, params)?;
        let mut prefix = zero;
        let mut out = vec![None; self.n_params];
        let minus_i = C64::new(0.0, -1.0);
        for (i, g) in self.gates.iter().enumerate() {
            g.apply(prefix.amplitudes_mut(), self.n_qubits, params);
            if let Some(p) = g.param() {
                let mut d = prefix.clone();
                g.apply_generator(d.amplitudes_mut(), self.n_qubits);
                d.amplitudes_mut().iter_mut().for_each(|a| *a *= minus_i);
                self.apply_range(d.amplitudes_mut(), params, i + 1, self.gates.len());
                out[p] = Some(d);
            }
        }
        out.into_iter()
            .map(|d| {
                d.ok_or_else(|| Error::InvalidArgument("parameter not used by any gate".into()))
            })
            .collect()
    }
}

//! Circuit-level oracles: emulated Hadamard tests between two circuits that
//! differ only in rotation angles, and compute-uncompute overlaps.
//!
//! Both are simulated gate by gate on an explicit register, independently of
//! the closed-form amplitudes used by the optimizers.

use serde::{Deserialize, Serialize};

use crate::ansatz::Ansatz;
use crate::circuit::{Circuit, Gate};
use crate::simcore::{
    apply_1q, apply_cnot, apply_controlled_1q, pauli_expectation, Pauli, PauliString, State,
};
use crate::{Error, Result, C64};

/// Which part of `<0|V† M U|0>` a Hadamard test measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Real,
    Imag,
}

/// Two circuits with identical gate structure, evaluated at angles `u_params`
/// and `v_params`, plus the observable sandwiched between them.
#[derive(Clone, Debug, PartialEq)]
pub struct HadamardTestSpec {
    pub u: Circuit,
    pub u_params: Vec<f64>,
    pub v: Circuit,
    pub v_params: Vec<f64>,
    pub observable: PauliString,
    pub part: Part,
}

impl HadamardTestSpec {
    /// Spec on the compact register of the causal cone of `sites`, which must
    /// contain the observable's support. `U` carries the angles of `current`
    /// and `V` those of `reference`.
    pub fn for_cone(
        reference: &Ansatz,
        current: &Ansatz,
        sites: &[usize],
        observable: &PauliString,
        part: Part,
    ) -> Result<Self> {
        check_same_layout(reference, current)?;
        let cone = current.causal_cone(sites)?;
        let circuit = cone.circuit(current);
        Ok(Self {
            u: circuit.clone(),
            u_params: cone.params(current),
            v: circuit,
            v_params: cone.params(reference),
            observable: observable.restrict(cone.register())?,
            part,
        })
    }

    /// Spec on the full register of two ansätze with the same layout.
    pub fn for_ansatz(
        reference: &Ansatz,
        current: &Ansatz,
        observable: &PauliString,
        part: Part,
    ) -> Result<Self> {
        check_same_layout(reference, current)?;
        let circuit = current.circuit();
        Ok(Self {
            u: circuit.clone(),
            u_params: current.params(),
            v: circuit,
            v_params: reference.params(),
            observable: observable.clone(),
            part,
        })
    }

    /// Rotations whose angle differs between `U` and `V`, as
    /// `(gate position, angle difference v - u)`.
    pub fn substitutions(&self) -> Result<Vec<(usize, f64)>> {
        let n = self.u.n_qubits();
        if self.v.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.v.n_qubits(),
            });
        }
        if self.observable.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.observable.n_qubits(),
            });
        }
        for (c, p) in [(&self.u, &self.u_params), (&self.v, &self.v_params)] {
            if p.len() < c.n_params() {
                return Err(Error::WrongArity {
                    expected: c.n_params(),
                    found: p.len(),
                });
            }
        }
        if self.u.gates().len() != self.v.gates().len() {
            return Err(Error::CircuitMismatch(format!(
                "{} gates against {}",
                self.u.gates().len(),
                self.v.gates().len()
            )));
        }
        let mut out = Vec::new();
        for (i, (gu, gv)) in self.u.gates().iter().zip(self.v.gates()).enumerate() {
            match (*gu, *gv) {
                (
                    Gate::Rotation {
                        qubit: qu,
                        axis: au,
                        param: pu,
                    },
                    Gate::Rotation {
                        qubit: qv,
                        axis: av,
                        param: pv,
                    },
                ) if qu == qv && au == av => {
                    let d = self.v_params[pv] - self.u_params[pu];
                    if d != 0.0 {
                        out.push((i, d));
                    }
                }
                (Gate::Cnot { .. }, Gate::Cnot { .. }) if gu == gv => {}
                _ => {
                    return Err(Error::CircuitMismatch(format!(
                        "gate {i} is not a local angle substitution"
                    )))
                }
            }
        }
        Ok(out)
    }
}

fn check_same_layout(a: &Ansatz, b: &Ansatz) -> Result<()> {
    if a.n_qubits() != b.n_qubits() || a.depth() != b.depth() || a.boundary() != b.boundary() {
        return Err(Error::CircuitMismatch(
            "ansätze have different layouts".into(),
        ));
    }
    Ok(())
}

/// Emulates the ancilla circuit `H, [S†], U with controlled substitutions, H`
/// and returns the exact `<Z ⊗ M>`, mapped to `Re` or `Im` of
/// `<0|V† M U|0>`.
///
/// The ancilla is qubit 0 of the extended register. With the ancilla in `|1>`
/// each differing rotation is followed by a controlled rotation by the angle
/// difference, so that branch carries `V|0>`. For the imaginary part `S†`
/// puts a phase `-i` on that branch, which makes `<Z ⊗ M> = -Im<V|M|U>`.
pub fn hadamard_test(spec: &HadamardTestSpec) -> Result<f64> {
    let subs = spec.substitutions()?;
    let n = spec.u.n_qubits();
    let m = n + 1;
    let mut state = State::zero(m);
    let amps = state.amplitudes_mut();

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = [
        [C64::new(h, 0.0), C64::new(h, 0.0)],
        [C64::new(h, 0.0), C64::new(-h, 0.0)],
    ];
    let s_dag = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
    ];

    apply_1q(amps, m, 0, &hadamard);
    if spec.part == Part::Imag {
        apply_1q(amps, m, 0, &s_dag);
    }
    let mut next = subs.iter().peekable();
    for (i, g) in spec.u.gates().iter().enumerate() {
        match *g {
            Gate::Rotation { qubit, axis, param } => {
                apply_1q(amps, m, qubit + 1, &axis.rotation(spec.u_params[param]));
                if let Some(&&(_, d)) = next.peek().filter(|(pos, _)| *pos == i) {
                    apply_controlled_1q(amps, m, 0, qubit + 1, &axis.rotation(d));
                    next.next();
                }
            }
            Gate::Cnot { control, target } => apply_cnot(amps, m, control + 1, target + 1),
        }
    }
    apply_1q(amps, m, 0, &hadamard);

    let mut factors = vec![Pauli::Z];
    factors.extend_from_slice(spec.observable.factors());
    let zm = pauli_expectation(&state, &PauliString::new(factors)?)?;
    Ok(match spec.part {
        Part::Real => zm,
        Part::Imag => -zm,
    })
}

/// Number of controlled gates the Hadamard test needs: one per differing
/// rotation.
pub fn controlled_gate_count(spec: &HadamardTestSpec) -> Result<usize> {
    Ok(spec.substitutions()?.len())
}

/// Probability of reading all zeros after `V† U |0...0>`, i.e.
/// `|<0|V† U|0>|²`.
pub fn compute_uncompute_overlap(
    u: &Circuit,
    u_params: &[f64],
    v: &Circuit,
    v_params: &[f64],
) -> Result<f64> {
    if u.n_qubits() != v.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: u.n_qubits(),
            found: v.n_qubits(),
        });
    }
    let forward = u.run(u_params)?;
    let back = v.apply_adjoint(&forward, v_params)?;
    Ok(back.amplitudes()[0].norm_sqr())
}

use std::f64::consts::FRAC_PI_4;

use super::{coordinate_max, TrotterTerm};
use crate::ansatz::{Ansatz, CausalCone, BLOCK_PARAMS};
use crate::circuit::Circuit;
use crate::simcore::{pauli_expectation, PauliString, State, TimeKind};
use crate::{Error, Result};

/// Closed-form single-angle updates against the current state, using only
/// expectation values of the term's operator on the cone.
#[derive(Clone, Debug)]
pub struct AngleUpdater {
    cone: CausalCone,
    circuit: Circuit,
    positions: Vec<usize>,
    local_op: PauliString,
}

impl AngleUpdater {
    pub fn new(a: &Ansatz, t: &TrotterTerm) -> Result<Self> {
        if t.operator.n_qubits() != a.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: a.n_qubits(),
                found: t.operator.n_qubits(),
            });
        }
        let cone = a.causal_cone(&t.sites)?;
        let circuit = cone.circuit(a);
        let positions = circuit.param_gate_positions();
        let local_op = t.operator.restrict(cone.register())?;
        Ok(Self {
            cone,
            circuit,
            positions,
            local_op,
        })
    }

    pub fn cone(&self) -> &CausalCone {
        &self.cone
    }

    /// State after gates `0..=pos` with parameter `j` shifted by `shift`.
    fn head(&self, params: &[f64], j: usize, shift: f64) -> State {
        let mut p = params.to_vec();
        p[j] += shift;
        let mut s = State::zero(self.circuit.n_qubits());
        self.circuit
            .apply_range(s.amplitudes_mut(), &p, 0, self.positions[j] + 1);
        s
    }

    fn tail_expectation(&self, mut s: State, params: &[f64], j: usize) -> f64 {
        self.circuit.apply_range(
            s.amplitudes_mut(),
            params,
            self.positions[j] + 1,
            self.circuit.gates().len(),
        );
        pauli_expectation(&s, &self.local_op).expect("cone register matches operator")
    }

    /// `<P>` with parameter `j` shifted.
    pub fn shifted_expectation(&self, params: &[f64], j: usize, shift: f64) -> f64 {
        self.tail_expectation(self.head(params, j, shift), params, j)
    }

    /// `(<H+>, <H->)` with `H± = (1 ± G)† W† P W (1 ± G) / 2` inserted after
    /// the rotation carrying parameter `j`.
    pub fn projected_expectations(&self, params: &[f64], j: usize) -> (f64, f64) {
        let n = self.circuit.n_qubits();
        let beta = self.head(params, j, 0.0);
        let mut g_beta = beta.clone();
        self.circuit.gates()[self.positions[j]].apply_generator(g_beta.amplitudes_mut(), n);
        let one = crate::C64::new(1.0, 0.0);
        let plus = beta.combine(one, &g_beta, one);
        let minus = beta.combine(one, &g_beta, -one);
        (
            0.5 * self.tail_expectation(plus, params, j),
            0.5 * self.tail_expectation(minus, params, j),
        )
    }

    /// `(f(θ), f(θ + π/2))` for the objective against the current state.
    pub fn samples(&self, params: &[f64], j: usize, t: &TrotterTerm) -> (f64, f64) {
        let x = t.angle();
        match t.kind {
            TimeKind::Real => {
                let (hp, hm) = self.projected_expectations(params, j);
                (x.cos(), 0.5 * x.sin() * (hp - hm))
            }
            TimeKind::Imaginary => {
                let h0 = self.shifted_expectation(params, j, 0.0);
                let hp = self.shifted_expectation(params, j, FRAC_PI_4);
                let hm = self.shifted_expectation(params, j, -FRAC_PI_4);
                (x.cosh() - x.sinh() * h0, -0.5 * x.sinh() * (hp - hm))
            }
        }
    }

    /// Maximizing angle for cone-local parameter `j`.
    ///
    /// With `recycled = Some(f)`, `f` replaces the evaluation of `f(θ)` for
    /// imaginary time (an approximation: it is the maximum reached by the
    /// previous update against a slightly different reference).
    pub fn update(&self, params: &[f64], j: usize, t: &TrotterTerm, recycled: Option<f64>) -> f64 {
        let (mut f0, f1) = self.samples(params, j, t);
        if t.kind == TimeKind::Imaginary {
            if t.angle() == 0.0 {
                return params[j];
            }
            if let Some(r) = recycled {
                f0 = r;
            }
        }
        coordinate_max(f0, f1, params[j])
    }
}

fn global_update(a: &Ansatz, t: &TrotterTerm, d: usize, kind: TimeKind) -> Result<f64> {
    if t.kind != kind {
        return Err(Error::InvalidArgument(format!(
            "term has {:?} time, expected {kind:?}",
            t.kind
        )));
    }
    if d >= a.n_params() {
        return Err(Error::InvalidArgument(format!(
            "parameter {d} out of range"
        )));
    }
    let upd = AngleUpdater::new(a, t)?;
    let (block, k) = (d / BLOCK_PARAMS, d % BLOCK_PARAMS);
    match upd.cone().blocks().iter().position(|&b| b == block) {
        // Only cone parameters are updated for a term.
        None => Ok(a.angle(block, k)),
        Some(local) => Ok(upd.update(&upd.cone().params(a), local * BLOCK_PARAMS + k, t, None)),
    }
}

/// Closed-form real-time update of ansatz parameter `d` (index `15 * block + k`)
/// from two projected expectations. Parameters outside the term's cone are
/// returned unchanged.
pub fn angle_update_real(a: &Ansatz, t: &TrotterTerm, d: usize) -> Result<f64> {
    global_update(a, t, d, TimeKind::Real)
}

/// Closed-form imaginary-time update of ansatz parameter `d` from three
/// shifted expectations. A zero step leaves the angle unchanged.
pub fn angle_update_imag(a: &Ansatz, t: &TrotterTerm, d: usize) -> Result<f64> {
    global_update(a, t, d, TimeKind::Imaginary)
}

use serde::{Deserialize, Serialize};

use super::{coordinate_max, fit_sinusoid, TrotterTerm, FLAT_AMPLITUDE};
use crate::ansatz::{Ansatz, CausalCone};
use crate::circuit::Circuit;
use crate::simcore::{inner_slices, State};
use crate::{Error, Result, C64};

/// One coordinate update inside a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateRecord {
    /// Cone-local parameter index.
    pub param: usize,
    /// Value carried over from the previous update.
    pub recycled_before: f64,
    /// Value recomputed from scratch at the old angle.
    pub fresh_before: f64,
    pub after: f64,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub ansatz: Ansatz,
    pub objective: f64,
    /// Objective evaluations charged: one per sweep plus one per parameter.
    pub evaluations: usize,
    pub trace: Vec<UpdateRecord>,
}

/// Cyclic coordinate ascent of `Re <target|U(params)|0>` over the parameters
/// selected by `visit`, in gate order.
///
/// The objective at the current angle is recycled from the previous update;
/// only `f(θ + π/2)` is evaluated per parameter. Returns the final objective and
/// the number of evaluations charged.
pub fn sweep_params(
    circuit: &Circuit,
    target: &State,
    params: &mut [f64],
    visit: &dyn Fn(usize) -> bool,
    mut trace: Option<&mut Vec<UpdateRecord>>,
) -> Result<(f64, usize)> {
    let n = circuit.n_qubits();
    if target.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target.n_qubits(),
        });
    }
    if params.len() < circuit.n_params() {
        return Err(Error::WrongArity {
            expected: circuit.n_params(),
            found: params.len(),
        });
    }
    let gates = circuit.gates();
    // alpha = (gates from i onward)^† target, beta = (gates before i)|0>.
    let mut alpha = target.clone();
    circuit.apply_range_adjoint(alpha.amplitudes_mut(), params, 0, gates.len());
    let mut beta = State::zero(n);
    let mut f_cur = inner_slices(alpha.amplitudes(), beta.amplitudes()).re;
    let mut evaluations = 1;
    let mut g_beta = beta.clone();
    for g in gates {
        g.apply(alpha.amplitudes_mut(), n, params);
        if let Some(p) = g.param().filter(|&p| visit(p)) {
            g_beta.amplitudes_mut().copy_from_slice(beta.amplitudes());
            g.apply_generator(g_beta.amplitudes_mut(), n);
            let c0 = inner_slices(alpha.amplitudes(), beta.amplitudes()).re;
            let c1 = inner_slices(alpha.amplitudes(), g_beta.amplitudes()).im;
            let f = |x: f64| c0 * x.cos() + c1 * x.sin();
            let theta = params[p];
            let f_shift = f(theta + std::f64::consts::FRAC_PI_2);
            evaluations += 1;
            let fit = fit_sinusoid(f_cur, f_shift, theta);
            let before = f_cur;
            if fit.amplitude >= FLAT_AMPLITUDE {
                params[p] = coordinate_max(f_cur, f_shift, theta);
                f_cur = fit.amplitude;
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(UpdateRecord {
                    param: p,
                    recycled_before: before,
                    fresh_before: f(theta),
                    after: f(params[p]),
                });
            }
        }
        g.apply(beta.amplitudes_mut(), n, params);
    }
    Ok((f_cur, evaluations))
}

/// Objective of one Trotter term restricted to its causal cone.
#[derive(Clone, Debug)]
pub struct ConeObjective {
    cone: CausalCone,
    circuit: Circuit,
    target: State,
}

impl ConeObjective {
    /// Uses the cone state of `reference` as the previous state.
    pub fn new(reference: &Ansatz, t: &TrotterTerm) -> Result<Self> {
        if t.operator.n_qubits() != reference.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: reference.n_qubits(),
                found: t.operator.n_qubits(),
            });
        }
        let cone = reference.causal_cone(&t.sites)?;
        let circuit = cone.circuit(reference);
        let prev = circuit.run(&cone.params(reference))?;
        let target = Self::local_target(&cone, &prev, t)?;
        Ok(Self {
            cone,
            circuit,
            target,
        })
    }

    fn local_target(cone: &CausalCone, prev: &State, t: &TrotterTerm) -> Result<State> {
        let local = TrotterTerm {
            operator: t.operator.restrict(cone.register())?,
            ..t.clone()
        };
        local.target(prev)
    }

    pub fn cone(&self) -> &CausalCone {
        &self.cone
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// `φ` on the compact register.
    pub fn target(&self) -> &State {
        &self.target
    }

    /// Replaces the previous state by the cone state at `params`, with term `t`.
    pub fn set_reference(&mut self, params: &[f64], t: &TrotterTerm) -> Result<()> {
        let prev = self.circuit.run(params)?;
        self.target = Self::local_target(&self.cone, &prev, t)?;
        Ok(())
    }

    /// Objective at cone parameters `params`.
    pub fn value(&self, params: &[f64]) -> Result<f64> {
        Ok(self.target.inner(&self.circuit.run(params)?)?.re)
    }

    /// Complex overlap `<φ|U(params)|0>`.
    pub fn amplitude(&self, params: &[f64]) -> Result<C64> {
        self.target.inner(&self.circuit.run(params)?)
    }

    pub fn sweep(
        &self,
        params: &mut [f64],
        visit: &dyn Fn(usize) -> bool,
        trace: Option<&mut Vec<UpdateRecord>>,
    ) -> Result<(f64, usize)> {
        sweep_params(&self.circuit, &self.target, params, visit, trace)
    }
}

/// Runs `n_sweeps` full sweeps over the cone of `t`, with the cone state of
/// `prev` frozen as the previous state.
pub fn sweep_cone(
    prev: &Ansatz,
    a: &Ansatz,
    t: &TrotterTerm,
    n_sweeps: usize,
) -> Result<SweepOutcome> {
    if (prev.n_qubits(), prev.depth(), prev.boundary()) != (a.n_qubits(), a.depth(), a.boundary()) {
        return Err(Error::InvalidAnsatz(
            "reference and trial ansatz have different layouts".into(),
        ));
    }
    let obj = ConeObjective::new(prev, t)?;
    let mut params = obj.cone().params(a);
    let mut trace = Vec::new();
    let mut objective = obj.value(&params)?;
    let mut evaluations = 0;
    for _ in 0..n_sweeps {
        let (f, e) = obj.sweep(&mut params, &|_| true, Some(&mut trace))?;
        objective = f;
        evaluations += e;
    }
    let mut ansatz = a.clone();
    obj.cone().write_params(&mut ansatz, &params);
    Ok(SweepOutcome {
        ansatz,
        objective,
        evaluations,
        trace,
    })
}

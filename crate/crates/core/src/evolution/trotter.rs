use serde::{Deserialize, Serialize};

use crate::ansatz::Boundary;
use crate::objective::TrotterTerm;
use crate::simcore::{exp_pauli_action, Hamiltonian, Pauli, PauliString, State, TimeKind};
use crate::{Error, Result};

/// `H = -J Σ Z_j Z_{j+1} - Jλ Σ X_j`; bonds first (left to right, then the wrap
/// bond for a periodic chain), then sites.
pub fn ising_hamiltonian(n: usize, j: f64, lambda: f64, boundary: Boundary) -> Result<Hamiltonian> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Ising chain needs at least 2 sites, got {n}"
        )));
    }
    let mut h = Hamiltonian::new(n);
    for q in 0..n - 1 {
        h.push(
            -j,
            PauliString::from_sparse(n, &[(q, Pauli::Z), (q + 1, Pauli::Z)])?,
        )?;
    }
    if boundary == Boundary::Periodic && n > 2 {
        h.push(
            -j,
            PauliString::from_sparse(n, &[(n - 1, Pauli::Z), (0, Pauli::Z)])?,
        )?;
    }
    for q in 0..n {
        h.push(-j * lambda, PauliString::from_sparse(n, &[(q, Pauli::X)])?)?;
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrotterOrder {
    First,
    Second,
}

/// Factors of one product-formula step, in application order.
///
/// Two-site terms form one commuting group and one-site terms the other.
/// First order applies the two-site group then the one-site group; second order
/// sandwiches the one-site group between two half-weight two-site groups.
pub fn trotter_sequence(
    h: &Hamiltonian,
    tau: f64,
    order: TrotterOrder,
    kind: TimeKind,
) -> Result<Vec<TrotterTerm>> {
    let mut pairs = Vec::new();
    let mut singles = Vec::new();
    for t in h.terms() {
        let support = t.operator.support();
        let term = TrotterTerm::new(t.coeff, t.operator.clone(), tau, kind)
            .map_err(|_| Error::NonLocalTerm(support.clone()))?;
        match support.len() {
            1 => singles.push(term),
            2 => pairs.push(term),
            _ => return Err(Error::NonLocalTerm(support)),
        }
    }
    Ok(match order {
        TrotterOrder::First => pairs.into_iter().chain(singles).collect(),
        TrotterOrder::Second => {
            let half: Vec<_> = pairs
                .iter()
                .map(|t| TrotterTerm {
                    coeff: t.coeff / 2.0,
                    ..t.clone()
                })
                .collect();
            half.iter()
                .cloned()
                .chain(singles)
                .chain(half.iter().cloned())
                .collect()
        }
    })
}

/// A product formula over a fixed time window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub order: TrotterOrder,
    pub terms: Vec<TrotterTerm>,
    pub steps: usize,
    pub tau: f64,
}

impl TrotterPlan {
    pub fn new(
        h: &Hamiltonian,
        t: f64,
        tau: f64,
        order: TrotterOrder,
        kind: TimeKind,
    ) -> Result<Self> {
        let steps = step_count(t, tau)?;
        Ok(Self {
            order,
            terms: trotter_sequence(h, tau, order, kind)?,
            steps,
            tau,
        })
    }

    pub fn total_time(&self) -> f64 {
        self.steps as f64 * self.tau
    }
}

/// `N` with `N τ = t`; fails unless `t / τ` is an integer up to rounding.
pub fn step_count(t: f64, tau: f64) -> Result<usize> {
    if !(t >= 0.0 && tau > 0.0 && t.is_finite() && tau.is_finite()) {
        return Err(Error::NonIntegerSteps { t, tau });
    }
    let n = (t / tau).round();
    if (n * tau - t).abs() > 1e-12 * t.max(1.0) {
        return Err(Error::NonIntegerSteps { t, tau });
    }
    Ok(n as usize)
}

/// Pure product-formula evolution of a state with no variational layer.
/// Imaginary-time output is normalized.
pub fn trotter_product(
    h: &Hamiltonian,
    state: &State,
    t: f64,
    tau: f64,
    order: TrotterOrder,
    kind: TimeKind,
) -> Result<State> {
    let plan = TrotterPlan::new(h, t, tau, order, kind)?;
    let mut s = state.clone();
    for _ in 0..plan.steps {
        for term in &plan.terms {
            s = exp_pauli_action(&s, &term.operator, term.angle(), kind)?;
        }
        if kind == TimeKind::Imaginary {
            s.normalize();
        }
    }
    Ok(s)
}

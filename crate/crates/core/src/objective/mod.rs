//! Per-term variational objective and its closed-form coordinate maximization.
//!
//! For a product-formula factor with Pauli operator `P`, coefficient `h` and
//! step `τ`, the objective of a trial state `ψ(θ)` against a reference `prev` is
//! `Re <φ|ψ(θ)>` with `φ = exp(-iτhP)|prev>` (real time) or
//! `φ = (cosh τh - sinh τh P)|prev>` (imaginary time). As a function of any single
//! rotation angle it is an exact sinusoid.

mod angle;
mod sweep;

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

pub use angle::{angle_update_imag, angle_update_real, AngleUpdater};
pub use sweep::{sweep_cone, sweep_params, ConeObjective, SweepOutcome, UpdateRecord};

use crate::ansatz::{wrap_angle, Ansatz};
use crate::simcore::{exp_pauli_action, PauliString, State, TimeKind};
use crate::{Error, Result};

/// Below this amplitude a coordinate objective is treated as flat.
pub const FLAT_AMPLITUDE: f64 = 1e-14;

/// One product-formula factor `exp(-iζ h P)`.
///
/// `sites` is where the factor lives; it fixes the causal cone and may be larger
/// than the operator support (for instance `X⊗1` placed on a bond).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterTerm {
    pub coeff: f64,
    pub operator: PauliString,
    pub sites: Vec<usize>,
    pub tau: f64,
    pub kind: TimeKind,
}

impl TrotterTerm {
    /// Term located on the operator's own support.
    pub fn new(coeff: f64, operator: PauliString, tau: f64, kind: TimeKind) -> Result<Self> {
        let sites = operator.support();
        Self::at_sites(coeff, operator, sites, tau, kind)
    }

    /// Term located on explicit `sites` (one site or two neighbouring sites).
    pub fn at_sites(
        coeff: f64,
        operator: PauliString,
        sites: Vec<usize>,
        tau: f64,
        kind: TimeKind,
    ) -> Result<Self> {
        if !coeff.is_finite() || !tau.is_finite() {
            return Err(Error::NonFinite("Trotter term"));
        }
        if tau < 0.0 {
            return Err(Error::InvalidArgument(format!("negative time step {tau}")));
        }
        let n = operator.n_qubits();
        let mut s = sites.clone();
        s.sort_unstable();
        s.dedup();
        let ok = match s.as_slice() {
            [q] => *q < n,
            [p, q] => *q < n && (q - p == 1 || (*p == 0 && *q == n - 1)),
            _ => false,
        };
        if !ok || operator.support().iter().any(|q| !s.contains(q)) {
            return Err(Error::NonLocalTerm(sites));
        }
        Ok(Self {
            coeff,
            operator,
            sites: s,
            tau,
            kind,
        })
    }

    /// `τh`.
    pub fn angle(&self) -> f64 {
        self.tau * self.coeff
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        Self {
            tau,
            ..self.clone()
        }
    }

    /// `φ` for the given reference state.
    pub fn target(&self, prev: &State) -> Result<State> {
        exp_pauli_action(prev, &self.operator, self.angle(), self.kind)
    }
}

/// `A sin(x + B)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub phase: f64,
}

impl Sinusoid {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * (x + self.phase).sin()
    }

    /// Location of the maximum in `(-π, π]`.
    pub fn argmax(&self) -> f64 {
        wrap_angle(FRAC_PI_2 - self.phase)
    }
}

/// Recovers `A sin(x + B)` from samples at `φ` and `φ + π/2`.
pub fn fit_sinusoid(f_at_phi: f64, f_at_phi_plus_half_pi: f64, phi: f64) -> Sinusoid {
    Sinusoid {
        amplitude: f_at_phi.hypot(f_at_phi_plus_half_pi),
        phase: wrap_angle(f_at_phi.atan2(f_at_phi_plus_half_pi) - phi),
    }
}

/// Angle maximizing the sinusoid through `f(θ)` and `f(θ + π/2)`. A flat
/// objective (amplitude below [`FLAT_AMPLITUDE`]) returns `θ` unchanged.
pub fn coordinate_max(f_at_theta: f64, f_at_theta_plus_half_pi: f64, theta: f64) -> f64 {
    if f_at_theta.hypot(f_at_theta_plus_half_pi) < FLAT_AMPLITUDE {
        return theta;
    }
    wrap_angle(FRAC_PI_2 - f_at_theta.atan2(f_at_theta_plus_half_pi) + theta)
}

/// Objective of `a` against an arbitrary full-register reference state.
pub fn objective(prev: &State, a: &Ansatz, t: &TrotterTerm) -> Result<f64> {
    if prev.n_qubits() != a.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: a.n_qubits(),
            found: prev.n_qubits(),
        });
    }
    Ok(t.target(prev)?.inner(&a.prepare_state())?.re)
}

/// `|<prev|exp(iζ̄hP)|ψ(θ)>|²` by compute-uncompute: apply `U(θ)`, the factor
/// and `V(prev)^†` to `|0...0>` and read the all-zeros amplitude.
pub fn overlap_objective(prev: &Ansatz, a: &Ansatz, t: &TrotterTerm) -> Result<f64> {
    if prev.n_qubits() != a.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: a.n_qubits(),
            found: prev.n_qubits(),
        });
    }
    let psi = a.prepare_state();
    // exp(iζ̄hP) is exp(+iτhP) for real time and exp(-τhP) for imaginary time.
    let angle = match t.kind {
        TimeKind::Real => -t.angle(),
        TimeKind::Imaginary => t.angle(),
    };
    let moved = exp_pauli_action(&psi, &t.operator, angle, t.kind)?;
    let back = prev.circuit().apply_adjoint(&moved, &prev.params())?;
    Ok(back.amplitudes()[0].norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn fit_examples() {
        let s = fit_sinusoid(0.0, 1.0, 0.0);
        assert!((s.amplitude - 1.0).abs() < 1e-15 && s.phase.abs() < 1e-15);
        let c = fit_sinusoid(1.0, 0.0, 0.0);
        assert!((c.amplitude - 1.0).abs() < 1e-15 && (c.phase - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn coordinate_max_examples() {
        assert!((coordinate_max(0.0, 1.0, 0.0) - PI / 2.0).abs() < 1e-15);
        // Already at the maximum.
        let theta = 0.4;
        assert!((coordinate_max(2.0, 0.0, theta) - theta).abs() < 1e-15);
        assert_eq!(coordinate_max(1e-16, -1e-16, 0.3), 0.3);
    }

    #[test]
    fn term_validation() {
        let zz: PauliString = "IZZI".parse().unwrap();
        assert!(TrotterTerm::new(1.0, zz.clone(), 0.1, TimeKind::Real).is_ok());
        assert!(TrotterTerm::new(1.0, "ZIZI".parse().unwrap(), 0.1, TimeKind::Real).is_err());
        assert!(TrotterTerm::new(1.0, "ZIIZ".parse().unwrap(), 0.1, TimeKind::Real).is_ok());
        assert!(TrotterTerm::at_sites(
            1.0,
            "IIII".parse().unwrap(),
            vec![1, 2],
            0.1,
            TimeKind::Real
        )
        .is_ok());
        assert!(TrotterTerm::at_sites(1.0, zz, vec![0, 1], 0.1, TimeKind::Real).is_err());
    }
}

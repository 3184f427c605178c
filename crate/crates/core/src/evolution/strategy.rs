use serde::{Deserialize, Serialize};

use crate::ansatz::{Ansatz, BLOCK_PARAMS};
use crate::objective::{coordinate_max, AngleUpdater, ConeObjective, TrotterTerm, FLAT_AMPLITUDE};
use crate::simcore::TimeKind;
use crate::{Error, Result};

/// When the previous state used in the objective is refreshed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    /// Never: all cone parameters are optimized against the state before the factor.
    Cone,
    /// After every block.
    Block,
    /// After every angle, using the closed-form expectation-value updates.
    Angle,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub sweeps: usize,
    /// ANGLE in imaginary time only: reuse the previous maximum as `f(θ)`
    /// instead of measuring it. Approximate.
    #[serde(default)]
    pub approximate_recycle: bool,
}

impl Strategy {
    pub fn new(kind: StrategyKind, sweeps: usize) -> Self {
        Self {
            kind,
            sweeps,
            approximate_recycle: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub ansatz: Ansatz,
    /// Objective of the result against the state before the factor, full step.
    pub objective: f64,
}

/// Applies one product-formula factor to the ansatz with the given strategy.
///
/// For real time, BLOCK splits the step over `sweeps · blocks` refreshes and
/// ANGLE over `sweeps · blocks · 15`. Imaginary time keeps the full step.
pub fn step_strategy(a: &Ansatz, term: &TrotterTerm, s: &Strategy) -> Result<StepOutcome> {
    if s.sweeps == 0 {
        return Err(Error::InvalidArgument(
            "strategy needs at least one sweep".into(),
        ));
    }
    let reference = ConeObjective::new(a, term)?;
    let cone = reference.cone().clone();
    let n_blocks = cone.n_blocks();
    let mut params = cone.params(a);
    let split = |parts: usize| match term.kind {
        TimeKind::Real => term.with_tau(term.tau / parts as f64),
        TimeKind::Imaginary => term.clone(),
    };
    match s.kind {
        StrategyKind::Cone => {
            for _ in 0..s.sweeps {
                reference.sweep(&mut params, &|_| true, None)?;
            }
        }
        StrategyKind::Block => {
            let small = split(s.sweeps * n_blocks);
            let mut moving = reference.clone();
            for _ in 0..s.sweeps {
                for b in 0..n_blocks {
                    moving.set_reference(&params, &small)?;
                    moving.sweep(&mut params, &|p| p / BLOCK_PARAMS == b, None)?;
                }
            }
        }
        StrategyKind::Angle => {
            let small = split(s.sweeps * n_blocks * BLOCK_PARAMS);
            let upd = AngleUpdater::new(a, term)?;
            let recycle = s.approximate_recycle && term.kind == TimeKind::Imaginary;
            let mut last_max: Option<f64> = None;
            for _ in 0..s.sweeps {
                for j in 0..params.len() {
                    let (mut f0, f1) = upd.samples(&params, j, &small);
                    if recycle {
                        if let Some(m) = last_max {
                            f0 = m;
                        }
                    }
                    if small.kind == TimeKind::Imaginary && small.angle() == 0.0 {
                        continue;
                    }
                    let amp = f0.hypot(f1);
                    if amp >= FLAT_AMPLITUDE {
                        params[j] = coordinate_max(f0, f1, params[j]);
                        last_max = Some(amp);
                    }
                }
            }
        }
    }
    let objective = reference.value(&params)?;
    let mut ansatz = a.clone();
    cone.write_params(&mut ansatz, &params);
    Ok(StepOutcome { ansatz, objective })
}

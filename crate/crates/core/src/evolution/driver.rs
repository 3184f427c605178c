use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::strategy::{step_strategy, Strategy};
use super::trotter::{step_count, trotter_sequence, TrotterOrder};
use crate::ansatz::Ansatz;
use crate::simcore::{distance_sq, ExactPropagator, Hamiltonian, State, TimeKind};
use crate::{Error, Result};

/// Everything about a run except the Hamiltonian and the schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSettings {
    pub order: TrotterOrder,
    pub strategy: Strategy,
    pub kind: TimeKind,
    /// Track the squared distance to exact evolution (dense, n ≤ 12).
    pub oracle: bool,
}

/// `steps` consecutive steps of size `tau`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSegment {
    pub steps: usize,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub step: usize,
    pub time: f64,
    /// Step size that produced this row; zero for the initial row.
    pub tau: f64,
    pub energy: f64,
    pub distance_sq: Option<f64>,
    /// Objective reached for each factor of the step, in application order.
    pub objectives: Vec<f64>,
}

/// Time series of one evolution run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub rows: Vec<RunRow>,
    pub seed: Option<u64>,
    pub config_hash: Option<String>,
    /// Seconds since the start of the run, per row. Not part of the CSV so that
    /// the CSV is reproducible byte for byte.
    pub wall_clock_s: Vec<f64>,
}

impl RunRecord {
    pub fn last(&self) -> Option<&RunRow> {
        self.rows.last()
    }

    /// Writes one line per row:
    /// `step,time,tau,energy,distance_sq,objective_min,objective_mean,obj_0,...,obj_{K-1}`.
    /// Missing values are empty fields.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let k = self
            .rows
            .iter()
            .map(|r| r.objectives.len())
            .max()
            .unwrap_or(0);
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = [
            "step",
            "time",
            "tau",
            "energy",
            "distance_sq",
            "objective_min",
            "objective_mean",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((0..k).map(|i| format!("obj_{i}")));
        out.write_record(&header)?;
        for r in &self.rows {
            let opt = |x: Option<f64>| x.map(csv_float).unwrap_or_default();
            let (min, mean) = if r.objectives.is_empty() {
                (None, None)
            } else {
                let min = r.objectives.iter().copied().fold(f64::INFINITY, f64::min);
                (
                    Some(min),
                    Some(r.objectives.iter().sum::<f64>() / r.objectives.len() as f64),
                )
            };
            let mut rec = vec![
                r.step.to_string(),
                csv_float(r.time),
                csv_float(r.tau),
                csv_float(r.energy),
                opt(r.distance_sq),
                opt(min),
                opt(mean),
            ];
            rec.extend((0..k).map(|i| opt(r.objectives.get(i).copied())));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Shortest round-trip text for a float, in exponent form outside
/// `[1e-4, 1e16)` so tiny values stay readable.
pub fn csv_float(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Everything needed to continue an interrupted run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub step: usize,
    pub time: f64,
    pub initial: Ansatz,
    pub current: Ansatz,
}

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

/// Step-by-step evolution driver.
pub struct Evolver<'h> {
    h: &'h Hamiltonian,
    settings: EvolutionSettings,
    initial: Ansatz,
    ansatz: Ansatz,
    step: usize,
    time: f64,
    exact: Option<(ExactPropagator, State)>,
    started: Instant,
}

impl<'h> Evolver<'h> {
    pub fn new(h: &'h Hamiltonian, initial: Ansatz, settings: EvolutionSettings) -> Result<Self> {
        let current = initial.clone();
        Self::resume(
            h,
            Checkpoint {
                schema_version: CHECKPOINT_SCHEMA_VERSION,
                step: 0,
                time: 0.0,
                initial,
                current,
            },
            settings,
        )
    }

    pub fn resume(h: &'h Hamiltonian, cp: Checkpoint, settings: EvolutionSettings) -> Result<Self> {
        if cp.schema_version != CHECKPOINT_SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported checkpoint version {}",
                cp.schema_version
            )));
        }
        if h.n_qubits() != cp.initial.n_qubits() || h.n_qubits() != cp.current.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: h.n_qubits(),
                found: cp.current.n_qubits(),
            });
        }
        if settings.strategy.sweeps == 0 {
            return Err(Error::InvalidArgument(
                "strategy needs at least one sweep".into(),
            ));
        }
        let exact = if settings.oracle {
            Some((ExactPropagator::new(h)?, cp.initial.prepare_state()))
        } else {
            None
        };
        Ok(Self {
            h,
            settings,
            initial: cp.initial,
            ansatz: cp.current,
            step: cp.step,
            time: cp.time,
            exact,
            started: Instant::now(),
        })
    }

    pub fn ansatz(&self) -> &Ansatz {
        &self.ansatz
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn elapsed_s(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            step: self.step,
            time: self.time,
            initial: self.initial.clone(),
            current: self.ansatz.clone(),
        }
    }

    fn row(&self, tau: f64, objectives: Vec<f64>) -> Result<RunRow> {
        let energy = self.ansatz.energy(self.h)?;
        if !energy.is_finite() {
            return Err(Error::NonFinite("energy"));
        }
        let distance_sq = match &self.exact {
            Some((prop, psi0)) => {
                let target = prop.evolve(psi0, self.time, self.settings.kind)?;
                Some(distance_sq(&self.ansatz.prepare_state(), &target)?)
            }
            None => None,
        };
        Ok(RunRow {
            step: self.step,
            time: self.time,
            tau,
            energy,
            distance_sq,
            objectives,
        })
    }

    /// Row describing the current state without stepping.
    pub fn current_row(&self) -> Result<RunRow> {
        self.row(0.0, Vec::new())
    }

    /// One full product-formula step of size `tau`.
    pub fn step(&mut self, tau: f64) -> Result<RunRow> {
        let terms = trotter_sequence(self.h, tau, self.settings.order, self.settings.kind)?;
        let mut objectives = Vec::with_capacity(terms.len());
        for term in &terms {
            let out = step_strategy(&self.ansatz, term, &self.settings.strategy)?;
            self.ansatz = out.ansatz;
            objectives.push(out.objective);
        }
        self.step += 1;
        self.time += tau;
        self.row(tau, objectives)
    }

    /// Runs a schedule, calling `on_row` after each step. Returning `false`
    /// from the callback stops the run at that step boundary.
    pub fn run(
        &mut self,
        schedule: &[ScheduleSegment],
        record: &mut RunRecord,
        mut on_row: impl FnMut(&Self, &RunRow) -> bool,
    ) -> Result<()> {
        let mut done = 0;
        for seg in schedule {
            for _ in 0..seg.steps {
                done += 1;
                // Skip steps already taken before a resume.
                if done <= self.step {
                    continue;
                }
                let row = self.step(seg.tau)?;
                record.rows.push(row.clone());
                record.wall_clock_s.push(self.elapsed_s());
                if !on_row(self, &row) {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

/// Runs a schedule from `a`; the record starts with the initial row.
pub fn evolve_schedule(
    a: &Ansatz,
    h: &Hamiltonian,
    schedule: &[ScheduleSegment],
    settings: EvolutionSettings,
) -> Result<(RunRecord, Ansatz)> {
    let mut ev = Evolver::new(h, a.clone(), settings)?;
    let mut record = RunRecord::default();
    record.rows.push(ev.current_row()?);
    record.wall_clock_s.push(ev.elapsed_s());
    ev.run(schedule, &mut record, |_, _| true)?;
    Ok((record, ev.ansatz))
}

/// Evolves for total time `t = N τ`.
#[allow(clippy::too_many_arguments)]
pub fn evolve(
    a: &Ansatz,
    h: &Hamiltonian,
    t: f64,
    tau: f64,
    order: TrotterOrder,
    strategy: Strategy,
    kind: TimeKind,
    oracle: bool,
) -> Result<(RunRecord, Ansatz)> {
    let steps = step_count(t, tau)?;
    evolve_schedule(
        a,
        h,
        &[ScheduleSegment { steps, tau }],
        EvolutionSettings {
            order,
            strategy,
            kind,
            oracle,
        },
    )
}

/// Final squared distance to exact real-time evolution for each step size.
pub fn trotter_error_curve(
    a: &Ansatz,
    h: &Hamiltonian,
    t: f64,
    taus: &[f64],
    order: TrotterOrder,
    strategy: Strategy,
) -> Result<Vec<(f64, f64)>> {
    taus.par_iter()
        .map(|&tau| {
            let (rec, _) = evolve(a, h, t, tau, order, strategy, TimeKind::Real, true)?;
            let d = rec
                .last()
                .and_then(|r| r.distance_sq)
                .expect("oracle enabled");
            Ok((tau, d))
        })
        .collect()
}

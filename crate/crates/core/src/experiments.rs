//! Seeded drivers for the numerical studies. Each returns plain data; the
//! command-line harness serializes it and the acceptance suite checks it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{Ansatz, Boundary};
use crate::evolution::{
    evolve, evolve_schedule, ising_hamiltonian, step_strategy, trotter_error_curve,
    EvolutionSettings, RunRecord, ScheduleSegment, Strategy, StrategyKind, TrotterOrder,
};
use crate::objective::TrotterTerm;
use crate::simcore::{Pauli, PauliString, TimeKind};
use crate::tdvp::{
    condition_study, noise_scaling, representative_system, ConditionSample, NoisePoint,
};
use crate::Result;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateRun {
    pub n: usize,
    pub seed: u64,
    pub lambda: f64,
    pub ground_energy: f64,
    pub record: RunRecord,
}

impl GroundStateRun {
    pub fn final_energy(&self) -> f64 {
        self.record
            .last()
            .expect("record has an initial row")
            .energy
    }

    /// `(E - E_gs) / |E_gs|` at the end of the run.
    pub fn relative_error(&self) -> f64 {
        relative_error(self.final_energy(), self.ground_energy)
    }
}

pub fn relative_error(e: f64, e_gs: f64) -> f64 {
    (e - e_gs) / e_gs.abs()
}

/// Imaginary-time ground-state search on the open Ising chain from a random
/// depth-`depth` ansatz.
#[allow(clippy::too_many_arguments)]
pub fn imaginary_ground_state(
    n: usize,
    depth: usize,
    j: f64,
    lambda: f64,
    boundary: Boundary,
    schedule: &[ScheduleSegment],
    strategy: Strategy,
    seed: u64,
) -> Result<GroundStateRun> {
    let h = ising_hamiltonian(n, j, lambda, boundary)?;
    let ground_energy = h.ground_energy()?;
    let a = Ansatz::random(n, depth, boundary, &mut rng(seed))?;
    let settings = EvolutionSettings {
        order: TrotterOrder::First,
        strategy,
        kind: TimeKind::Imaginary,
        oracle: false,
    };
    let (mut record, _) = evolve_schedule(&a, &h, schedule, settings)?;
    record.seed = Some(seed);
    Ok(GroundStateRun {
        n,
        seed,
        lambda,
        ground_energy,
        record,
    })
}

/// Three-stage imaginary-time schedule: 50 × 0.05, 50 × 0.03, 50 × 0.01.
pub fn fig1a_schedule() -> Vec<ScheduleSegment> {
    vec![
        ScheduleSegment {
            steps: 50,
            tau: 0.05,
        },
        ScheduleSegment {
            steps: 50,
            tau: 0.03,
        },
        ScheduleSegment {
            steps: 50,
            tau: 0.01,
        },
    ]
}

/// Seed known to avoid domain-wall local minima with [`fig1a_schedule`] for
/// `n ∈ {8, 10, 12}`, λ = 0.2, depth 2.
pub const FIG1A_SEED: u64 = 3;

/// Real-time evolution of `|0...0>` (identity ansatz) with the exact oracle on.
#[allow(clippy::too_many_arguments)]
pub fn real_time_from_zero(
    n: usize,
    depth: usize,
    lambda: f64,
    t: f64,
    tau: f64,
    order: TrotterOrder,
    strategy: Strategy,
) -> Result<RunRecord> {
    let h = ising_hamiltonian(n, 1.0, lambda, Boundary::Open)?;
    let a = Ansatz::identity(n, depth, Boundary::Open)?;
    Ok(evolve(&a, &h, t, tau, order, strategy, TimeKind::Real, true)?.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterErrorCurves {
    pub first: Vec<(f64, f64)>,
    pub second: Vec<(f64, f64)>,
}

pub fn trotter_error(
    n: usize,
    lambda: f64,
    t: f64,
    taus: &[f64],
    sweeps: usize,
) -> Result<TrotterErrorCurves> {
    let h = ising_hamiltonian(n, 1.0, lambda, Boundary::Open)?;
    let a = Ansatz::identity(n, 2, Boundary::Open)?;
    let s = Strategy::new(StrategyKind::Cone, sweeps);
    Ok(TrotterErrorCurves {
        first: trotter_error_curve(&a, &h, t, taus, TrotterOrder::First, s)?,
        second: trotter_error_curve(&a, &h, t, taus, TrotterOrder::Second, s)?,
    })
}

/// Step sizes dividing `t = 2` that span `[0.01, 0.5]`.
pub fn default_taus() -> Vec<f64> {
    vec![0.01, 0.02, 0.025, 0.04, 0.05, 0.1, 0.2, 0.25, 0.5]
}

/// Settings for the single-factor accuracy study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeAccuracyConfig {
    pub n: usize,
    pub boundary: Boundary,
    pub tau: f64,
    pub seeds: usize,
    pub max_sweeps: usize,
    /// First qubit of the bond carrying the factor, one entry per cone studied.
    pub bonds: Vec<usize>,
    pub first_seed: u64,
}

impl Default for ConeAccuracyConfig {
    fn default() -> Self {
        // On an 8-qubit depth-2 brickwork, bond (1,2) has a 4-qubit cone and
        // bond (2,3) a 6-qubit cone.
        Self {
            n: 8,
            boundary: Boundary::Periodic,
            tau: 0.1,
            seeds: 25,
            max_sweeps: 8,
            bonds: vec![1, 2],
            first_seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub bond: usize,
    pub cone_width: usize,
    pub strategy: StrategyKind,
    pub sweeps: usize,
    pub mean: f64,
    pub std: f64,
    pub std_error: f64,
}

/// Random factor `exp(-iτ σ⊗σ')` on `(q, q+1)` with `σ, σ'` drawn from `{1, X, Y, Z}`.
pub fn random_bond_term(n: usize, q: usize, tau: f64, rng: &mut impl Rng) -> Result<TrotterTerm> {
    let a = Pauli::ALL[rng.random_range(0..4)];
    let b = Pauli::ALL[rng.random_range(0..4)];
    let op = PauliString::from_sparse(n, &[(q, a), (q + 1, b)])?;
    TrotterTerm::at_sites(1.0, op, vec![q, q + 1], tau, TimeKind::Real)
}

/// Objective reached by each strategy on one random factor from random
/// initial states, for sweep counts `1..=max_sweeps`.
pub fn cone_accuracy(cfg: &ConeAccuracyConfig) -> Result<Vec<AccuracyRow>> {
    let kinds = [StrategyKind::Cone, StrategyKind::Block, StrategyKind::Angle];
    let mut rows = Vec::new();
    for &bond in &cfg.bonds {
        // values[kind][sweeps-1][seed]
        let per_seed: Vec<Vec<Vec<f64>>> = (cfg.first_seed..cfg.first_seed + cfg.seeds as u64)
            .into_par_iter()
            .map(|seed| {
                let mut r = rng(seed);
                let a = Ansatz::random(cfg.n, 2, cfg.boundary, &mut r)?;
                let term = random_bond_term(cfg.n, bond, cfg.tau, &mut r)?;
                kinds
                    .iter()
                    .map(|&k| {
                        (1..=cfg.max_sweeps)
                            .map(|s| Ok(step_strategy(&a, &term, &Strategy::new(k, s))?.objective))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let width = Ansatz::identity(cfg.n, 2, cfg.boundary)?
            .causal_cone(&[bond, bond + 1])?
            .width();
        for (ki, &kind) in kinds.iter().enumerate() {
            for s in 0..cfg.max_sweeps {
                let xs: Vec<f64> = per_seed.iter().map(|v| v[ki][s]).collect();
                let (mean, std) = mean_std(&xs);
                rows.push(AccuracyRow {
                    bond,
                    cone_width: width,
                    strategy: kind,
                    sweeps: s + 1,
                    mean,
                    std,
                    std_error: std / (xs.len() as f64).sqrt(),
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsingGroundConfig {
    pub n: usize,
    pub tau: f64,
    pub steps: usize,
    pub seeds: usize,
    pub lambdas: Vec<f64>,
    pub sweeps: usize,
    pub first_seed: u64,
}

impl Default for IsingGroundConfig {
    fn default() -> Self {
        Self {
            n: 8,
            tau: 0.1,
            steps: 20,
            seeds: 20,
            lambdas: vec![1.0, 4.0],
            sweeps: 1,
            first_seed: 0,
        }
    }
}

/// Mean/std trajectory of the relative energy error for one (λ, strategy).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTrajectory {
    pub lambda: f64,
    pub strategy: StrategyKind,
    pub ground_energy: f64,
    /// Per step: (step, mean energy, std energy, mean relative error, std relative error).
    pub rows: Vec<(usize, f64, f64, f64, f64)>,
}

impl GroundTrajectory {
    pub fn final_mean_relative_error(&self) -> f64 {
        self.rows.last().expect("trajectory has rows").3
    }
}

/// Imaginary-time ground-state search from random initial ansätze for each
/// strategy and transverse field.
pub fn ising_ground(cfg: &IsingGroundConfig) -> Result<Vec<GroundTrajectory>> {
    let schedule = [ScheduleSegment {
        steps: cfg.steps,
        tau: cfg.tau,
    }];
    let mut out = Vec::new();
    for &lambda in &cfg.lambdas {
        for kind in [StrategyKind::Cone, StrategyKind::Block, StrategyKind::Angle] {
            let runs: Vec<GroundStateRun> = (cfg.first_seed..cfg.first_seed + cfg.seeds as u64)
                .into_par_iter()
                .map(|seed| {
                    imaginary_ground_state(
                        cfg.n,
                        2,
                        1.0,
                        lambda,
                        Boundary::Open,
                        &schedule,
                        Strategy::new(kind, cfg.sweeps),
                        seed,
                    )
                })
                .collect::<Result<_>>()?;
            let e_gs = runs[0].ground_energy;
            let rows = (0..=cfg.steps)
                .map(|k| {
                    let es: Vec<f64> = runs.iter().map(|r| r.record.rows[k].energy).collect();
                    let rel: Vec<f64> = es.iter().map(|&e| relative_error(e, e_gs)).collect();
                    let (me, se) = mean_std(&es);
                    let (mr, sr) = mean_std(&rel);
                    (k, me, se, mr, sr)
                })
                .collect();
            out.push(GroundTrajectory {
                lambda,
                strategy: kind,
                ground_energy: e_gs,
                rows,
            });
        }
    }
    Ok(out)
}

/// Settings shared by the conditioning studies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionConfig {
    pub n: usize,
    pub samples: usize,
    pub cutoff: f64,
    pub first_seed: u64,
}

impl Default for ConditionConfig {
    fn default() -> Self {
        Self {
            n: 8,
            samples: 100,
            cutoff: 1e-7,
            first_seed: 0,
        }
    }
}

/// Median condition numbers for cones of 1, 3 and 5 blocks.
pub fn tdvp_condition(cfg: &ConditionConfig) -> Result<Vec<ConditionSample>> {
    condition_study(cfg.n, &[1, 3, 5], cfg.first_seed, cfg.samples, cfg.cutoff)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub condition: ConditionConfig,
    pub m_values: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            condition: ConditionConfig::default(),
            m_values: (0..7).map(|k| 10f64.powi(10 + k)).collect(),
            trials: 200,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseCurve {
    pub blocks: usize,
    pub n_params: usize,
    pub kappa: f64,
    pub points: Vec<NoisePoint>,
    pub slope: f64,
}

/// Relative error of the TDVP solution under sampling noise, for the
/// median-conditioned system of each cone size.
pub fn tdvp_noise(cfg: &NoiseConfig) -> Result<Vec<NoiseCurve>> {
    [1usize, 3, 5]
        .par_iter()
        .map(|&blocks| {
            let system = representative_system(
                cfg.condition.n,
                blocks,
                cfg.condition.first_seed,
                cfg.condition.samples,
                cfg.condition.cutoff,
            )?;
            let (points, slope) = noise_scaling(&system, &cfg.m_values, cfg.trials, cfg.seed)?;
            Ok(NoiseCurve {
                blocks,
                n_params: system.c.len(),
                kappa: system.kappa,
                points,
                slope,
            })
        })
        .collect()
}

//! Time-dependent variational principle baseline.
//!
//! For `ψ(θ)` built from `exp(-iθG)` rotations, real-time McLachlan dynamics
//! gives `A θ̇ = C` with `A_jk = Re <∂_jψ|∂_kψ>` and `C_j = Im <∂_jψ|H|ψ>`.
//! The system is solved with an SVD pseudo-inverse that drops singular values
//! below an absolute cutoff.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{Ansatz, Boundary};
use crate::circuit::Circuit;
use crate::evolution::ising_hamiltonian;
use crate::simcore::{Hamiltonian, State};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TdvpSystem {
    pub a: DMatrix<f64>,
    pub c: DVector<f64>,
    /// Largest over smallest singular value of `A` among those above the cutoff.
    pub kappa: f64,
    /// Number of singular values above the cutoff.
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Which part of the ansatz the system is built on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scope {
    Full,
    /// Cone of the given support on its compact register; Hamiltonian terms
    /// that fit inside the cone are kept, the rest dropped.
    Cone(Vec<usize>),
}

/// Descending singular values of a matrix.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// `(κ, rank)` from singular values, keeping those `>= cutoff`.
pub fn condition_number(singular: &[f64], cutoff: f64) -> (f64, usize) {
    let kept: Vec<f64> = singular.iter().copied().filter(|&s| s >= cutoff).collect();
    match (kept.first(), kept.last()) {
        (Some(&max), Some(&min)) => (max / min, kept.len()),
        _ => (f64::INFINITY, 0),
    }
}

/// Builds `A` and `C` for an arbitrary circuit with exact derivative states.
pub fn build_from_circuit(
    circuit: &Circuit,
    params: &[f64],
    h: &Hamiltonian,
    cutoff: f64,
) -> Result<TdvpSystem> {
    if h.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.n_qubits(),
            found: h.n_qubits(),
        });
    }
    let psi = circuit.run(params)?;
    let h_psi = h.apply(&psi)?;
    let derivs = circuit.derivative_states(params)?;
    let p = derivs.len();
    let mut a = DMatrix::zeros(p, p);
    for j in 0..p {
        for k in j..p {
            let v = derivs[j].inner(&derivs[k])?.re;
            a[(j, k)] = v;
            a[(k, j)] = v;
        }
    }
    let c = DVector::from_iterator(
        p,
        derivs
            .iter()
            .map(|d| d.inner(&h_psi).map(|z| z.im))
            .collect::<Result<Vec<_>>>()?,
    );
    let singular_values = singular_values(&a);
    let (kappa, rank) = condition_number(&singular_values, cutoff);
    Ok(TdvpSystem {
        a,
        c,
        kappa,
        rank,
        singular_values,
    })
}

/// Builds the system for an ansatz over the requested scope.
pub fn build_system(a: &Ansatz, h: &Hamiltonian, scope: &Scope, cutoff: f64) -> Result<TdvpSystem> {
    match scope {
        Scope::Full => build_from_circuit(&a.circuit(), &a.params(), h, cutoff),
        Scope::Cone(support) => {
            let cone = a.causal_cone(support)?;
            let mut local = Hamiltonian::new(cone.width());
            for t in h.terms() {
                if t.operator
                    .support()
                    .iter()
                    .all(|q| cone.qubits().contains(q))
                {
                    local.push(t.coeff, t.operator.restrict(cone.register())?)?;
                }
            }
            build_from_circuit(&cone.circuit(a), &cone.params(a), &local, cutoff)
        }
    }
}

/// Solution of `A B = C` keeping the `rank` largest singular values.
pub fn solve_rank(a: &DMatrix<f64>, c: &DVector<f64>, rank: usize) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let mut b = DVector::zeros(a.ncols());
    for &i in order.iter().take(rank) {
        let coef = u.column(i).dot(c) / svd.singular_values[i];
        b += vt.row(i).transpose() * coef;
    }
    b
}

/// Pseudo-inverse solution with an absolute singular-value cutoff.
pub fn solve(system: &TdvpSystem) -> DVector<f64> {
    solve_rank(&system.a, &system.c, system.rank)
}

#[derive(Clone, Debug)]
pub struct TdvpStep {
    pub ansatz: Ansatz,
    /// Every singular value was below the cutoff; the ansatz is unchanged.
    pub degenerate: bool,
}

/// One explicit Euler step `θ ← θ + τ A⁺C` on the full register.
pub fn tdvp_step(a: &Ansatz, h: &Hamiltonian, tau: f64, cutoff: f64) -> Result<TdvpStep> {
    let system = build_system(a, h, &Scope::Full, cutoff)?;
    if system.rank == 0 {
        return Ok(TdvpStep {
            ansatz: a.clone(),
            degenerate: true,
        });
    }
    let b = solve(&system);
    if b.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("TDVP velocity"));
    }
    let params: Vec<f64> = a
        .params()
        .iter()
        .zip(b.iter())
        .map(|(t, v)| t + tau * v)
        .collect();
    let mut out = a.clone();
    out.set_params(&params)?;
    Ok(TdvpStep {
        ansatz: out,
        degenerate: false,
    })
}

/// Support whose cone on a depth-2 open brickwork holds 1, 3 or 5 blocks.
pub fn cone_support(blocks: usize) -> Result<Vec<usize>> {
    match blocks {
        1 => Ok(vec![0]),
        3 => Ok(vec![1, 2]),
        5 => Ok(vec![2, 3]),
        _ => Err(Error::InvalidArgument(format!(
            "no depth-2 cone with {blocks} blocks"
        ))),
    }
}

/// TDVP system of a cone of a random depth-2 open ansatz on `n` qubits, with
/// the `λ = 1` Ising chain as Hamiltonian.
pub fn cone_system(n: usize, blocks: usize, seed: u64, cutoff: f64) -> Result<TdvpSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Ansatz::random(n, 2, Boundary::Open, &mut rng)?;
    let h = ising_hamiltonian(n, 1.0, 1.0, Boundary::Open)?;
    build_system(&a, &h, &Scope::Cone(cone_support(blocks)?), cutoff)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionSample {
    pub blocks: usize,
    pub n_params: usize,
    pub median_kappa: f64,
    pub median_rank: usize,
    pub kappas: Vec<f64>,
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

/// Median condition number over seeds `0..samples` for each cone size.
pub fn condition_study(
    n: usize,
    block_counts: &[usize],
    first_seed: u64,
    samples: usize,
    cutoff: f64,
) -> Result<Vec<ConditionSample>> {
    block_counts
        .iter()
        .map(|&blocks| {
            let systems: Vec<TdvpSystem> = (first_seed..first_seed + samples as u64)
                .into_par_iter()
                .map(|seed| cone_system(n, blocks, seed, cutoff))
                .collect::<Result<_>>()?;
            let kappas: Vec<f64> = systems.iter().map(|s| s.kappa).collect();
            let ranks: Vec<f64> = systems.iter().map(|s| s.rank as f64).collect();
            Ok(ConditionSample {
                blocks,
                n_params: blocks * crate::ansatz::BLOCK_PARAMS,
                median_kappa: median(&kappas),
                median_rank: median(&ranks).round() as usize,
                kappas,
            })
        })
        .collect()
}

/// The sample whose condition number is closest to the median (lower middle).
pub fn representative_system(
    n: usize,
    blocks: usize,
    first_seed: u64,
    samples: usize,
    cutoff: f64,
) -> Result<TdvpSystem> {
    let systems: Vec<TdvpSystem> = (first_seed..first_seed + samples.max(1) as u64)
        .into_par_iter()
        .map(|seed| cone_system(n, blocks, seed, cutoff))
        .collect::<Result<_>>()?;
    let mut idx: Vec<usize> = (0..systems.len()).collect();
    idx.sort_by(|&i, &j| systems[i].kappa.total_cmp(&systems[j].kappa));
    Ok(systems[idx[(idx.len() - 1) / 2]].clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub m: f64,
    /// Mean of `‖δB‖ / ‖B‖` over trials.
    pub relative_error: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Sampling-noise model: every entry of `A` (symmetrically) and `C` gets
/// zero-mean Gaussian noise with standard deviation `c / √m`, where `c` is the
/// root-mean-square entry of the respective noiseless quantity. The noisy
/// system is solved at the noiseless rank. Returns the mean relative error in
/// `B` per `m` and the fitted log-log slope.
pub fn noise_scaling(
    system: &TdvpSystem,
    m_values: &[f64],
    trials: usize,
    seed: u64,
) -> Result<(Vec<NoisePoint>, f64)> {
    if system.rank == 0 {
        return Err(Error::InvalidArgument(
            "system has no singular value above the cutoff".into(),
        ));
    }
    let b = solve(system);
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return Err(Error::InvalidArgument("noiseless solution is zero".into()));
    }
    let p = system.c.len();
    let rms = |xs: &mut dyn Iterator<Item = f64>, len: usize| {
        (xs.map(|x| x * x).sum::<f64>() / len as f64).sqrt()
    };
    let scale_a = rms(&mut system.a.iter().copied(), p * p);
    let scale_c = rms(&mut system.c.iter().copied(), p);
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let points: Vec<NoisePoint> = m_values
        .iter()
        .enumerate()
        .map(|(mi, &m)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((mi as u64) << 32));
            let total: f64 = (0..trials)
                .map(|_| {
                    let mut a = system.a.clone();
                    for j in 0..p {
                        for k in j..p {
                            let e = scale_a / m.sqrt() * std.sample(&mut rng);
                            a[(j, k)] += e;
                            if j != k {
                                a[(k, j)] += e;
                            }
                        }
                    }
                    let c = DVector::from_iterator(
                        p,
                        system
                            .c
                            .iter()
                            .map(|x| x + scale_c / m.sqrt() * std.sample(&mut rng)),
                    );
                    (solve_rank(&a, &c, system.rank) - &b).norm() / b_norm
                })
                .sum();
            NoisePoint {
                m,
                relative_error: total / trials as f64,
            }
        })
        .collect();
    let slope = loglog_slope(
        &points
            .iter()
            .map(|p| (p.m, p.relative_error))
            .collect::<Vec<_>>(),
    );
    Ok((points, slope))
}

/// Exact expectation `<ψ|H|ψ>` of a full ansatz, for drift checks.
pub fn full_energy(a: &Ansatz, h: &Hamiltonian) -> Result<f64> {
    let psi: State = a.prepare_state();
    h.expectation(&psi)
}

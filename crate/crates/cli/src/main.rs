//! `varqte <experiment> [--config PATH] [--seed N] [--out DIR] [--resume]`
//!
//! Runs one experiment, writes plot-ready CSV files plus a JSON sidecar with
//! the resolved config, its hash, the build and the seed, and prints a one-line
//! summary.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use varqte::ansatz::Ansatz;
use varqte::evolution::{
    csv_float, ising_hamiltonian, Checkpoint, EvolutionSettings, Evolver, RunRecord,
};
use varqte::experiments::{
    cone_accuracy, ising_ground, relative_error, tdvp_condition, tdvp_noise, trotter_error,
    ConditionConfig, ConeAccuracyConfig, IsingGroundConfig, NoiseConfig,
};
use varqte::simcore::TimeKind;

use config::{ConfigError, EvolveConfig, Experiment, Init, Resolved, TrotterErrorConfig};

/// Default output directory when neither `--out` nor the config sets one.
const OUT_ENV: &str = "VARQTE_OUT";
const DEFAULT_OUT: &str = "results";

#[derive(Parser, Debug)]
#[command(
    name = "varqte",
    version,
    about = "Variational time-evolution experiments"
)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON config; fields not given take the experiment's defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed (initial ansatz or first sample seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory. Falls back to the config's `out`, then $VARQTE_OUT,
    /// then `results`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Continue an evolution run from its checkpoint.
    #[arg(long)]
    resume: bool,
    /// Stop an evolution run after this many steps (checkpoint kept).
    #[arg(long, value_name = "STEPS")]
    stop_after: Option<usize>,
}

/// What a runner hands back: a printable line, machine-readable summary
/// values and the files it wrote.
struct Outcome {
    line: String,
    summary: Value,
    files: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run(cli: &Cli) -> Result<String> {
    let text = match &cli.config {
        Some(p) => {
            Some(fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?)
        }
        None => None,
    };
    let (resolved, envelope) = config::resolve(cli.experiment, text.as_deref(), cli.seed)?;
    if (cli.resume || cli.stop_after.is_some()) && !matches!(resolved, Resolved::Evolve(_)) {
        bail!(ConfigError {
            field: "--resume/--stop-after".into(),
            message: format!("`{}` is not a step-wise evolution run", cli.experiment),
        });
    }

    let out = cli
        .out
        .clone()
        .or(envelope.out.map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    fs::create_dir_all(&out)
        .with_context(|| format!("output directory {} is not writable", out.display()))?;

    let canonical = serde_json::to_string(&resolved)?;
    let hash = hex::encode(Sha256::digest(canonical.as_bytes()));
    let name = cli.experiment.name();
    let started = Instant::now();

    let outcome = match &resolved {
        Resolved::Evolve(c) => run_evolve(name, c, &hash, &out, cli.resume, cli.stop_after)?,
        Resolved::TrotterError(c) => run_trotter_error(name, c, &out)?,
        Resolved::ConeAccuracy(c) => run_cone_accuracy(name, c, &out)?,
        Resolved::IsingGround(c) => run_ising_ground(name, c, &out)?,
        Resolved::TdvpCondition(c) => run_condition(name, c, &out)?,
        Resolved::TdvpNoise(c) => run_noise(name, c, &out)?,
    };

    let sidecar = json!({
        "experiment": name,
        "schema_version": config::CONFIG_SCHEMA_VERSION,
        "config": resolved,
        "config_sha256": hash,
        "build": { "version": env!("CARGO_PKG_VERSION"), "git": env!("VARQTE_GIT_REV") },
        "seed": seed_of(&resolved),
        "wall_clock_s": started.elapsed().as_secs_f64(),
        "summary": outcome.summary,
        "outputs": outcome.files.iter().map(|p| p.file_name().unwrap().to_string_lossy()).collect::<Vec<_>>(),
    });
    let path = out.join(format!("{name}.json"));
    write_atomic(&path, serde_json::to_string_pretty(&sidecar)?.as_bytes())?;
    Ok(outcome.line)
}

fn seed_of(r: &Resolved) -> Option<u64> {
    match r {
        Resolved::Evolve(c) => (c.ansatz.init == Init::Random).then_some(c.seed),
        Resolved::TrotterError(_) => None,
        Resolved::ConeAccuracy(c) => Some(c.first_seed),
        Resolved::IsingGround(c) => Some(c.first_seed),
        Resolved::TdvpCondition(c) => Some(c.first_seed),
        Resolved::TdvpNoise(c) => Some(c.seed),
    }
}

/// Writes through a temporary file so an interrupted run never leaves a
/// truncated output behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f =
        fs::File::create(&tmp).with_context(|| format!("cannot write {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    write_atomic(path, &w.into_inner()?)
}

/// Checkpoint file of an evolution run: the library checkpoint plus the rows
/// recorded so far, tied to the config that produced them.
#[derive(Serialize, Deserialize)]
struct SavedRun {
    config_sha256: String,
    checkpoint: Checkpoint,
    record: RunRecord,
}

fn run_evolve(
    name: &str,
    c: &EvolveConfig,
    hash: &str,
    out: &Path,
    resume: bool,
    stop_after: Option<usize>,
) -> Result<Outcome> {
    let m = c.model;
    let h = ising_hamiltonian(m.n, m.j, m.lambda, m.boundary)?;
    let settings = EvolutionSettings {
        order: c.order,
        strategy: c.strategy,
        kind: c.time,
        oracle: c.oracle,
    };
    let cp_path = out.join(format!("{name}.checkpoint.json"));

    let (mut ev, mut record) = if resume {
        let text = fs::read_to_string(&cp_path)
            .with_context(|| format!("no checkpoint at {}", cp_path.display()))?;
        let saved: SavedRun = serde_json::from_str(&text).context("corrupt checkpoint")?;
        if saved.config_sha256 != hash {
            bail!(
                "checkpoint {} was written for a different config",
                cp_path.display()
            );
        }
        (
            Evolver::resume(&h, saved.checkpoint, settings)?,
            saved.record,
        )
    } else {
        let initial = match c.ansatz.init {
            Init::Random => Ansatz::random(
                m.n,
                c.ansatz.depth,
                m.boundary,
                &mut varqte::experiments::rng(c.seed),
            )?,
            Init::Identity => Ansatz::identity(m.n, c.ansatz.depth, m.boundary)?,
        };
        let ev = Evolver::new(&h, initial, settings)?;
        let mut record = RunRecord {
            seed: (c.ansatz.init == Init::Random).then_some(c.seed),
            config_hash: Some(hash.to_string()),
            ..RunRecord::default()
        };
        record.rows.push(ev.current_row()?);
        record.wall_clock_s.push(0.0);
        (ev, record)
    };
    let offset = record.wall_clock_s.last().copied().unwrap_or(0.0);

    let save = |ev: &Evolver, record: &RunRecord| -> Result<()> {
        let saved = SavedRun {
            config_sha256: hash.to_string(),
            checkpoint: ev.checkpoint(),
            record: record.clone(),
        };
        write_atomic(&cp_path, serde_json::to_string(&saved)?.as_bytes())
    };
    save(&ev, &record)?;

    let total: usize = c.schedule.iter().map(|s| s.steps).sum();
    let mut done = 0;
    'schedule: for seg in &c.schedule {
        for _ in 0..seg.steps {
            done += 1;
            if done <= ev.step_index() {
                continue;
            }
            if stop_after.is_some_and(|s| ev.step_index() >= s) {
                break 'schedule;
            }
            let row = ev.step(seg.tau)?;
            record.rows.push(row);
            record.wall_clock_s.push(offset + ev.elapsed_s());
            save(&ev, &record)?;
        }
    }

    let csv_path = out.join(format!("{name}.csv"));
    let mut buf = Vec::new();
    record.write_csv(&mut buf)?;
    write_atomic(&csv_path, &buf)?;

    let last = record.last().expect("record has an initial row");
    let mut summary = json!({
        "steps": last.step,
        "scheduled_steps": total,
        "time": last.time,
        "final_energy": last.energy,
        "final_distance_sq": last.distance_sq,
    });
    let mut line = format!(
        "{name}: n={} step {}/{} t={:.4} energy {:.10}",
        m.n, last.step, total, last.time, last.energy
    );
    if c.time == TimeKind::Imaginary {
        let e_gs = h.ground_energy()?;
        let rel = relative_error(last.energy, e_gs);
        summary["ground_energy"] = json!(e_gs);
        summary["relative_error"] = json!(rel);
        line += &format!(" relative error {rel:.3e}");
    }
    if let Some(d) = last.distance_sq {
        line += &format!(" distance² {d:.4e}");
    }
    if last.step < total {
        line += " (stopped; continue with --resume)";
    }
    Ok(Outcome {
        line,
        summary,
        files: vec![csv_path, cp_path],
    })
}

fn run_trotter_error(name: &str, c: &TrotterErrorConfig, out: &Path) -> Result<Outcome> {
    let curves = trotter_error(c.n, c.lambda, c.total_time, &c.taus, c.sweeps)?;
    let path = out.join(format!("{name}.csv"));
    let rows = [("first", &curves.first), ("second", &curves.second)]
        .into_iter()
        .flat_map(|(order, pts)| {
            pts.iter()
                .map(move |(tau, d)| vec![order.to_string(), csv_float(*tau), csv_float(*d)])
        });
    write_csv(&path, &["order", "tau", "distance_sq"], rows)?;

    let argmin = |pts: &[(f64, f64)]| {
        pts.iter()
            .copied()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("taus non-empty")
    };
    let (t1, d1) = argmin(&curves.first);
    let (t2, d2) = argmin(&curves.second);
    let below = curves
        .first
        .iter()
        .zip(&curves.second)
        .all(|(a, b)| b.1 < a.1);
    let line = format!(
        "{name}: n={} best first order τ={t1} ({d1:.4e}), best second order τ={t2} ({d2:.4e}), second below first everywhere: {below}",
        c.n
    );
    let summary =
        json!({ "best_first": [t1, d1], "best_second": [t2, d2], "second_below_first": below });
    Ok(Outcome {
        line,
        summary,
        files: vec![path],
    })
}

fn run_cone_accuracy(name: &str, c: &ConeAccuracyConfig, out: &Path) -> Result<Outcome> {
    let rows = cone_accuracy(c)?;
    let path = out.join(format!("{name}.csv"));
    write_csv(
        &path,
        &[
            "bond",
            "cone_width",
            "strategy",
            "sweeps",
            "mean",
            "std",
            "std_error",
        ],
        rows.iter().map(|r| {
            vec![
                r.bond.to_string(),
                r.cone_width.to_string(),
                format!("{:?}", r.strategy).to_lowercase(),
                r.sweeps.to_string(),
                csv_float(r.mean),
                csv_float(r.std),
                csv_float(r.std_error),
            ]
        }),
    )?;
    let best: Vec<Value> = rows
        .iter()
        .filter(|r| r.sweeps == c.max_sweeps)
        .map(|r| json!({ "cone_width": r.cone_width, "strategy": r.strategy, "mean": r.mean }))
        .collect();
    let parts: Vec<String> = rows
        .iter()
        .filter(|r| r.sweeps == c.max_sweeps)
        .map(|r| format!("w{} {:?} {:.5}", r.cone_width, r.strategy, r.mean).to_lowercase())
        .collect();
    let line = format!(
        "{name}: mean objective at {} sweeps: {}",
        c.max_sweeps,
        parts.join(", ")
    );
    Ok(Outcome {
        line,
        summary: json!({ "final": best }),
        files: vec![path],
    })
}

fn run_ising_ground(name: &str, c: &IsingGroundConfig, out: &Path) -> Result<Outcome> {
    let trajectories = ising_ground(c)?;
    let path = out.join(format!("{name}.csv"));
    let rows = trajectories.iter().flat_map(|t| {
        t.rows.iter().map(move |&(step, me, se, mr, sr)| {
            vec![
                csv_float(t.lambda),
                format!("{:?}", t.strategy).to_lowercase(),
                step.to_string(),
                csv_float(me),
                csv_float(se),
                csv_float(mr),
                csv_float(sr),
                csv_float(t.ground_energy),
            ]
        })
    });
    write_csv(
        &path,
        &[
            "lambda",
            "strategy",
            "step",
            "energy_mean",
            "energy_std",
            "relative_error_mean",
            "relative_error_std",
            "ground_energy",
        ],
        rows,
    )?;
    let finals: Vec<Value> = trajectories
        .iter()
        .map(|t| json!({ "lambda": t.lambda, "strategy": t.strategy, "relative_error": t.final_mean_relative_error() }))
        .collect();
    let parts: Vec<String> = trajectories
        .iter()
        .map(|t| {
            format!(
                "λ={} {:?} {:.3e}",
                t.lambda,
                t.strategy,
                t.final_mean_relative_error()
            )
            .to_lowercase()
        })
        .collect();
    let line = format!(
        "{name}: mean relative error after {} steps: {}",
        c.steps,
        parts.join(", ")
    );
    Ok(Outcome {
        line,
        summary: json!({ "final": finals }),
        files: vec![path],
    })
}

fn run_condition(name: &str, c: &ConditionConfig, out: &Path) -> Result<Outcome> {
    let samples = tdvp_condition(c)?;
    let path = out.join(format!("{name}.csv"));
    write_csv(
        &path,
        &[
            "blocks",
            "n_params",
            "median_kappa",
            "median_rank",
            "samples",
        ],
        samples.iter().map(|s| {
            vec![
                s.blocks.to_string(),
                s.n_params.to_string(),
                csv_float(s.median_kappa),
                s.median_rank.to_string(),
                s.kappas.len().to_string(),
            ]
        }),
    )?;
    let raw = out.join(format!("{name}_samples.csv"));
    write_csv(
        &raw,
        &["blocks", "seed", "kappa"],
        samples.iter().flat_map(|s| {
            s.kappas.iter().enumerate().map(move |(i, k)| {
                vec![
                    s.blocks.to_string(),
                    (c.first_seed + i as u64).to_string(),
                    csv_float(*k),
                ]
            })
        }),
    )?;
    let parts: Vec<String> = samples
        .iter()
        .map(|s| format!("{}p {:.4e}", s.n_params, s.median_kappa))
        .collect();
    let line = format!(
        "{name}: median κ over {} seeds: {}",
        c.samples,
        parts.join(", ")
    );
    let summary = json!(samples
        .iter()
        .map(|s| json!({ "n_params": s.n_params, "median_kappa": s.median_kappa }))
        .collect::<Vec<_>>());
    Ok(Outcome {
        line,
        summary,
        files: vec![path, raw],
    })
}

fn run_noise(name: &str, c: &NoiseConfig, out: &Path) -> Result<Outcome> {
    let curves = tdvp_noise(c)?;
    let path = out.join(format!("{name}.csv"));
    write_csv(
        &path,
        &["blocks", "n_params", "kappa", "m", "relative_error"],
        curves.iter().flat_map(|cv| {
            cv.points.iter().map(move |p| {
                vec![
                    cv.blocks.to_string(),
                    cv.n_params.to_string(),
                    csv_float(cv.kappa),
                    csv_float(p.m),
                    csv_float(p.relative_error),
                ]
            })
        }),
    )?;
    let parts: Vec<String> = curves
        .iter()
        .map(|cv| format!("{}p κ={:.3e} slope {:.3}", cv.n_params, cv.kappa, cv.slope))
        .collect();
    let line = format!("{name}: {}", parts.join(", "));
    let summary = json!(curves
        .iter()
        .map(|cv| json!({ "n_params": cv.n_params, "kappa": cv.kappa, "slope": cv.slope }))
        .collect::<Vec<_>>());
    Ok(Outcome {
        line,
        summary,
        files: vec![path],
    })
}

//! Experiment configuration: per-experiment defaults merged with a user JSON
//! document, then parsed into a typed config and validated.

use std::fmt;

use clap::ValueEnum;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::{json, Value};
use varqte::ansatz::Boundary;
use varqte::evolution::{ScheduleSegment, Strategy, TrotterOrder};
use varqte::experiments::{
    default_taus, fig1a_schedule, ConditionConfig, ConeAccuracyConfig, IsingGroundConfig,
    NoiseConfig, FIG1A_SEED,
};
use varqte::simcore::{TimeKind, MAX_DENSE_QUBITS, MAX_LANCZOS_QUBITS};

pub const CONFIG_SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    Evolve,
    Fig1a,
    Fig1b,
    TrotterError,
    ConeAccuracy,
    IsingGround,
    TdvpCondition,
    TdvpNoise,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Evolve => "evolve",
            Experiment::Fig1a => "fig1a",
            Experiment::Fig1b => "fig1b",
            Experiment::TrotterError => "trotter_error",
            Experiment::ConeAccuracy => "cone_accuracy",
            Experiment::IsingGround => "ising_ground",
            Experiment::TdvpCondition => "tdvp_condition",
            Experiment::TdvpNoise => "tdvp_noise",
        }
    }

    /// Path of the field that `--seed` overrides, if the experiment is random.
    fn seed_field(self) -> Option<&'static [&'static str]> {
        match self {
            Experiment::Evolve | Experiment::Fig1a | Experiment::Fig1b => Some(&["seed"]),
            Experiment::ConeAccuracy | Experiment::IsingGround | Experiment::TdvpCondition => {
                Some(&["first_seed"])
            }
            Experiment::TdvpNoise => Some(&["seed"]),
            Experiment::TrotterError => None,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A configuration problem, reported with the offending field.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn bad(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    pub j: f64,
    pub lambda: f64,
    pub boundary: Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    Random,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzConfig {
    pub depth: usize,
    pub init: Init,
}

/// Settings of a single evolution run (`evolve`, `fig1a`, `fig1b`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub model: ModelConfig,
    pub ansatz: AnsatzConfig,
    /// Seed for a random initial ansatz.
    pub seed: u64,
    pub strategy: Strategy,
    pub time: TimeKind,
    pub order: TrotterOrder,
    pub schedule: Vec<ScheduleSegment>,
    /// Track the distance to the exact state.
    pub oracle: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterErrorConfig {
    pub n: usize,
    pub lambda: f64,
    pub total_time: f64,
    pub taus: Vec<f64>,
    pub sweeps: usize,
}

/// Fully resolved configuration of one invocation.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Resolved {
    Evolve(EvolveConfig),
    TrotterError(TrotterErrorConfig),
    ConeAccuracy(ConeAccuracyConfig),
    IsingGround(IsingGroundConfig),
    TdvpCondition(ConditionConfig),
    TdvpNoise(NoiseConfig),
}

fn evolve_defaults() -> EvolveConfig {
    EvolveConfig {
        model: ModelConfig {
            n: 8,
            j: 1.0,
            lambda: 0.2,
            boundary: Boundary::Open,
        },
        ansatz: AnsatzConfig {
            depth: 2,
            init: Init::Random,
        },
        seed: 0,
        strategy: Strategy::new(varqte::evolution::StrategyKind::Cone, 1),
        time: TimeKind::Imaginary,
        order: TrotterOrder::First,
        schedule: vec![ScheduleSegment {
            steps: 20,
            tau: 0.1,
        }],
        oracle: false,
    }
}

fn defaults(e: Experiment) -> Value {
    use varqte::evolution::StrategyKind;
    let v = match e {
        Experiment::Evolve => serde_json::to_value(evolve_defaults()),
        Experiment::Fig1a => serde_json::to_value(EvolveConfig {
            seed: FIG1A_SEED,
            strategy: Strategy::new(StrategyKind::Angle, 1),
            schedule: fig1a_schedule(),
            ..evolve_defaults()
        }),
        Experiment::Fig1b => serde_json::to_value(EvolveConfig {
            ansatz: AnsatzConfig {
                depth: 2,
                init: Init::Identity,
            },
            strategy: Strategy::new(StrategyKind::Cone, 6),
            time: TimeKind::Real,
            schedule: vec![ScheduleSegment {
                steps: 200,
                tau: 0.01,
            }],
            oracle: true,
            ..evolve_defaults()
        }),
        Experiment::TrotterError => serde_json::to_value(TrotterErrorConfig {
            n: 6,
            lambda: 0.2,
            total_time: 2.0,
            taus: default_taus(),
            sweeps: 6,
        }),
        Experiment::ConeAccuracy => serde_json::to_value(ConeAccuracyConfig::default()),
        Experiment::IsingGround => serde_json::to_value(IsingGroundConfig::default()),
        Experiment::TdvpCondition => serde_json::to_value(ConditionConfig::default()),
        Experiment::TdvpNoise => serde_json::to_value(NoiseConfig::default()),
    };
    v.expect("defaults serialize")
}

/// Recursively overlays `over` onto `base`; objects merge key by key, any
/// other value replaces.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Keys handled by the harness rather than the experiment.
#[derive(Debug, Default)]
pub struct Envelope {
    pub out: Option<String>,
}

/// Parses a user document (possibly empty) for `experiment`, applies the
/// seed override and validates the result.
pub fn resolve(
    experiment: Experiment,
    text: Option<&str>,
    seed: Option<u64>,
) -> Result<(Resolved, Envelope), ConfigError> {
    let mut user = match text {
        Some(t) => {
            serde_json::from_str::<Value>(t).map_err(|e| bad("<document>", e.to_string()))?
        }
        None => json!({}),
    };
    let obj = user
        .as_object_mut()
        .ok_or_else(|| bad("<document>", "expected a JSON object"))?;

    if let Some(v) = obj.remove("schema_version") {
        if v.as_u64() != Some(CONFIG_SCHEMA_VERSION) {
            return Err(bad(
                "schema_version",
                format!("unsupported version {v}, expected {CONFIG_SCHEMA_VERSION}"),
            ));
        }
    }
    if let Some(v) = obj.remove("experiment") {
        let named: Experiment = serde_json::from_value(v.clone())
            .map_err(|_| bad("experiment", format!("unknown experiment {v}")))?;
        if named != experiment {
            return Err(bad(
                "experiment",
                format!("config is for `{named}` but `{experiment}` was requested"),
            ));
        }
    }
    let mut envelope = Envelope::default();
    if let Some(v) = obj.remove("out") {
        envelope.out = Some(
            v.as_str()
                .ok_or_else(|| bad("out", "expected a string path"))?
                .to_string(),
        );
    }

    let mut merged = defaults(experiment);
    merge(&mut merged, user);
    if let (Some(seed), Some(path)) = (seed, experiment.seed_field()) {
        let mut slot = &mut merged;
        for key in path {
            slot = &mut slot[*key];
        }
        *slot = json!(seed);
    }

    let resolved = match experiment {
        Experiment::Evolve | Experiment::Fig1a | Experiment::Fig1b => {
            Resolved::Evolve(parse(merged)?)
        }
        Experiment::TrotterError => Resolved::TrotterError(parse(merged)?),
        Experiment::ConeAccuracy => Resolved::ConeAccuracy(parse(merged)?),
        Experiment::IsingGround => Resolved::IsingGround(parse(merged)?),
        Experiment::TdvpCondition => Resolved::TdvpCondition(parse(merged)?),
        Experiment::TdvpNoise => Resolved::TdvpNoise(parse(merged)?),
    };
    validate(&resolved)?;
    Ok((resolved, envelope))
}

fn parse<T: DeserializeOwned>(v: Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(v)
        .map_err(|e| bad(e.path().to_string(), e.inner().to_string()))
}

fn check_n(field: &str, n: usize, limit: usize) -> Result<(), ConfigError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(bad(field, format!("must be even and at least 4, got {n}")));
    }
    if n > limit {
        return Err(bad(
            field,
            format!("at most {limit} qubits are supported, got {n}"),
        ));
    }
    Ok(())
}

fn positive(field: &str, x: f64) -> Result<(), ConfigError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(bad(field, format!("must be positive and finite, got {x}")));
    }
    Ok(())
}

fn nonzero(field: &str, x: usize) -> Result<(), ConfigError> {
    if x == 0 {
        return Err(bad(field, "must be at least 1"));
    }
    Ok(())
}

fn finite(field: &str, x: f64) -> Result<(), ConfigError> {
    if !x.is_finite() {
        return Err(bad(field, format!("must be finite, got {x}")));
    }
    Ok(())
}

pub fn validate(r: &Resolved) -> Result<(), ConfigError> {
    match r {
        Resolved::Evolve(c) => {
            let limit = if c.oracle {
                MAX_DENSE_QUBITS
            } else {
                MAX_LANCZOS_QUBITS
            };
            check_n("model.n", c.model.n, limit)?;
            finite("model.j", c.model.j)?;
            finite("model.lambda", c.model.lambda)?;
            nonzero("ansatz.depth", c.ansatz.depth)?;
            nonzero("strategy.sweeps", c.strategy.sweeps)?;
            if c.schedule.is_empty() {
                return Err(bad("schedule", "needs at least one segment"));
            }
            for (i, s) in c.schedule.iter().enumerate() {
                nonzero(&format!("schedule[{i}].steps"), s.steps)?;
                positive(&format!("schedule[{i}].tau"), s.tau)?;
            }
        }
        Resolved::TrotterError(c) => {
            check_n("n", c.n, MAX_DENSE_QUBITS)?;
            finite("lambda", c.lambda)?;
            positive("total_time", c.total_time)?;
            nonzero("sweeps", c.sweeps)?;
            if c.taus.is_empty() {
                return Err(bad("taus", "needs at least one step size"));
            }
            for (i, &tau) in c.taus.iter().enumerate() {
                positive(&format!("taus[{i}]"), tau)?;
                varqte::evolution::step_count(c.total_time, tau)
                    .map_err(|e| bad(format!("taus[{i}]"), e.to_string()))?;
            }
        }
        Resolved::ConeAccuracy(c) => {
            check_n("n", c.n, MAX_LANCZOS_QUBITS)?;
            positive("tau", c.tau)?;
            nonzero("seeds", c.seeds)?;
            nonzero("max_sweeps", c.max_sweeps)?;
            if c.bonds.is_empty() {
                return Err(bad("bonds", "needs at least one bond"));
            }
            for (i, &b) in c.bonds.iter().enumerate() {
                if b + 1 >= c.n {
                    return Err(bad(
                        format!("bonds[{i}]"),
                        format!("bond ({b}, {}) leaves the {}-qubit chain", b + 1, c.n),
                    ));
                }
            }
        }
        Resolved::IsingGround(c) => {
            check_n("n", c.n, MAX_LANCZOS_QUBITS)?;
            positive("tau", c.tau)?;
            nonzero("steps", c.steps)?;
            nonzero("seeds", c.seeds)?;
            nonzero("sweeps", c.sweeps)?;
            if c.lambdas.is_empty() {
                return Err(bad("lambdas", "needs at least one field strength"));
            }
            for (i, &l) in c.lambdas.iter().enumerate() {
                finite(&format!("lambdas[{i}]"), l)?;
            }
        }
        Resolved::TdvpCondition(c) => validate_condition("", c)?,
        Resolved::TdvpNoise(c) => {
            validate_condition("condition.", &c.condition)?;
            nonzero("trials", c.trials)?;
            if c.m_values.len() < 2 {
                return Err(bad(
                    "m_values",
                    "needs at least two measurement counts to fit a slope",
                ));
            }
            for (i, &m) in c.m_values.iter().enumerate() {
                positive(&format!("m_values[{i}]"), m)?;
            }
        }
    }
    Ok(())
}

fn validate_condition(prefix: &str, c: &ConditionConfig) -> Result<(), ConfigError> {
    // The 5-block cone needs a chain of at least 8 qubits.
    if c.n < 8 || !c.n.is_multiple_of(2) || c.n > MAX_LANCZOS_QUBITS {
        return Err(bad(
            format!("{prefix}n"),
            format!("must be even and in 8..={MAX_LANCZOS_QUBITS}, got {}", c.n),
        ));
    }
    nonzero(&format!("{prefix}samples"), c.samples)?;
    positive(&format!("{prefix}cutoff"), c.cutoff)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_for_every_experiment() {
        for e in Experiment::value_variants() {
            resolve(*e, None, None).unwrap();
        }
    }

    #[test]
    fn nested_fields_merge_over_defaults() {
        let (r, env) = resolve(
            Experiment::Fig1a,
            Some(r#"{"model": {"n": 10}, "out": "x"}"#),
            Some(9),
        )
        .unwrap();
        let Resolved::Evolve(c) = r else {
            panic!("wrong kind")
        };
        assert_eq!(c.model.n, 10);
        assert_eq!(c.model.lambda, 0.2);
        assert_eq!(c.seed, 9);
        assert_eq!(env.out.as_deref(), Some("x"));
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (Experiment::Evolve, r#"{"model": {"n": 7}}"#, "model.n"),
            (
                Experiment::Evolve,
                r#"{"schedule": [{"steps": 0, "tau": 0.1}]}"#,
                "schedule[0].steps",
            ),
            (
                Experiment::Evolve,
                r#"{"schedule": [{"steps": 3, "tau": -1.0}]}"#,
                "schedule[0].tau",
            ),
            (
                Experiment::Evolve,
                r#"{"model": {"lamda": 1.0}}"#,
                "model.lamda",
            ),
            (
                Experiment::Evolve,
                r#"{"strategy": {"kind": "fast"}}"#,
                "strategy.kind",
            ),
            (Experiment::TrotterError, r#"{"taus": [0.3]}"#, "taus[0]"),
            (Experiment::ConeAccuracy, r#"{"bonds": [7]}"#, "bonds[0]"),
            (
                Experiment::Fig1b,
                r#"{"experiment": "fig1a"}"#,
                "experiment",
            ),
            (Experiment::TdvpNoise, r#"{"m_values": [1e6]}"#, "m_values"),
        ];
        for (e, text, field) in cases {
            let err = resolve(e, Some(text), None).unwrap_err();
            assert_eq!(err.field, field, "{err}");
        }
    }
}

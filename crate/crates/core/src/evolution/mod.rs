//! Product-formula sequencing, update strategies and the evolution driver.

mod driver;
mod strategy;
mod trotter;

pub use driver::{
    csv_float, evolve, evolve_schedule, trotter_error_curve, Checkpoint, EvolutionSettings,
    Evolver, RunRecord, RunRow, ScheduleSegment, CHECKPOINT_SCHEMA_VERSION,
};
pub use strategy::{step_strategy, StepOutcome, Strategy, StrategyKind};
pub use trotter::{
    ising_hamiltonian, step_count, trotter_product, trotter_sequence, TrotterOrder, TrotterPlan,
};

//! Variational real- and imaginary-time evolution of brickwork parameterized
//! circuits, simulated on exact statevectors.
//!
//! The crate is organised bottom-up:
//!
//! - [`simcore`]: statevectors, Pauli algebra, Hamiltonians and the dense
//!   exact-evolution oracle.
//! - [`circuit`]: flat gate lists of fixed CNOTs and `exp(-iθG)` rotations.
//! - [`ansatz`]: the brickwork of 15-parameter two-qubit blocks, causal cones
//!   and cone-restricted expectations.
//! - [`objective`]: the per-Trotter-term objective, its sinusoidal coordinate
//!   form and the closed-form coordinate updates.
//! - [`evolution`]: Trotter sequencing, the cone/block/angle update strategies
//!   and the evolution driver.
//! - [`tdvp`]: the linear-system baseline and its conditioning studies.
//! - [`verify`]: emulated Hadamard tests and compute-uncompute overlaps.
//! - [`experiments`]: seeded drivers for the numerical studies, shared by the
//!   command-line harness and the acceptance suite.

pub mod ansatz;
pub mod circuit;
mod error;
pub mod evolution;
pub mod experiments;
pub mod objective;
pub mod simcore;
pub mod tdvp;
pub mod verify;

pub use error::{Error, Result};
pub use nalgebra::Complex;

/// Complex amplitude type used throughout the crate.
pub type C64 = Complex<f64>;

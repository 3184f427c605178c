//! Brickwork circuit of two-qubit blocks.
//!
//! Columns are numbered from 1. Odd columns hold blocks on `(0,1), (2,3), ...`;
//! even columns hold blocks on `(1,2), (3,4), ...` plus, for a periodic
//! boundary, one wrap block on `(n-1, 0)`. Blocks are stored column by column,
//! rows top to bottom, which is also the order in which they are applied.

mod block;
mod cone;

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use block::{block_gates, block_unitary, BLOCK_PARAMS, IDENTITY_ANGLES};
pub use cone::CausalCone;

use crate::circuit::Circuit;
use crate::simcore::{pauli_expectation, Hamiltonian, PauliString, State};
use crate::{Error, Result};

/// Maps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = x - 2.0 * PI * ((x - PI) / (2.0 * PI)).ceil();
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Position of a block. `qubits.0` is the first qubit of the pair, so the wrap
/// block is `(n-1, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockId {
    pub column: usize,
    pub row: usize,
    pub qubits: (usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub id: BlockId,
    pub angles: [f64; BLOCK_PARAMS],
}

/// Brickwork layout for `depth` columns.
pub fn layout(n_qubits: usize, depth: usize, boundary: Boundary) -> Vec<BlockId> {
    (1..=depth)
        .flat_map(|c| column_layout(n_qubits, c, boundary))
        .collect()
}

fn column_layout(n: usize, column: usize, boundary: Boundary) -> Vec<BlockId> {
    let mut ids = Vec::new();
    if column % 2 == 1 {
        for r in 1..=n / 2 {
            ids.push(BlockId {
                column,
                row: r,
                qubits: (2 * r - 2, 2 * r - 1),
            });
        }
    } else {
        for r in 1..n / 2 {
            ids.push(BlockId {
                column,
                row: r,
                qubits: (2 * r - 1, 2 * r),
            });
        }
        if boundary == Boundary::Periodic {
            ids.push(BlockId {
                column,
                row: n / 2,
                qubits: (n - 1, 0),
            });
        }
    }
    ids
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AnsatzFile", into = "AnsatzFile")]
pub struct Ansatz {
    n_qubits: usize,
    depth: usize,
    boundary: Boundary,
    blocks: Vec<Block>,
}

impl Ansatz {
    /// All blocks at [`IDENTITY_ANGLES`], so the prepared state is `|0...0>`.
    pub fn identity(n_qubits: usize, depth: usize, boundary: Boundary) -> Result<Self> {
        Self::check_shape(n_qubits, depth)?;
        let blocks = layout(n_qubits, depth, boundary)
            .into_iter()
            .map(|id| Block {
                id,
                angles: IDENTITY_ANGLES,
            })
            .collect();
        Ok(Self {
            n_qubits,
            depth,
            boundary,
            blocks,
        })
    }

    /// Every angle drawn independently and uniformly from `(-π, π]`.
    pub fn random<R: Rng + ?Sized>(
        n_qubits: usize,
        depth: usize,
        boundary: Boundary,
        rng: &mut R,
    ) -> Result<Self> {
        let mut a = Self::identity(n_qubits, depth, boundary)?;
        for b in &mut a.blocks {
            for x in &mut b.angles {
                *x = PI - 2.0 * PI * rng.random::<f64>();
            }
        }
        Ok(a)
    }

    fn check_shape(n_qubits: usize, depth: usize) -> Result<()> {
        if n_qubits < 4 || !n_qubits.is_multiple_of(2) {
            return Err(Error::InvalidAnsatz(format!(
                "n_qubits must be even and at least 4, got {n_qubits}"
            )));
        }
        if depth == 0 {
            return Err(Error::InvalidAnsatz("depth must be at least 1".into()));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn n_params(&self) -> usize {
        self.blocks.len() * BLOCK_PARAMS
    }

    /// Flat angle vector, block-major.
    pub fn params(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| b.angles).collect()
    }

    /// Replaces all angles, wrapping each into `(-π, π]`.
    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::WrongArity {
                expected: self.n_params(),
                found: params.len(),
            });
        }
        if params.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("ansatz angles"));
        }
        for (b, chunk) in self.blocks.iter_mut().zip(params.chunks(BLOCK_PARAMS)) {
            for (x, &v) in b.angles.iter_mut().zip(chunk) {
                *x = wrap_angle(v);
            }
        }
        Ok(())
    }

    pub fn angle(&self, block: usize, k: usize) -> f64 {
        self.blocks[block].angles[k]
    }

    pub fn set_angle(&mut self, block: usize, k: usize, value: f64) {
        self.blocks[block].angles[k] = wrap_angle(value);
    }

    /// Full-register circuit; parameter `15 * block + k` is angle `k` of `block`.
    pub fn circuit(&self) -> Circuit {
        let gates = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| block_gates(b.id.qubits.0, b.id.qubits.1, i * BLOCK_PARAMS))
            .collect();
        Circuit::new(self.n_qubits, gates).expect("layout qubits are in range")
    }

    /// `U(θ)|0...0>` on the full register.
    pub fn prepare_state(&self) -> State {
        self.circuit()
            .run(&self.params())
            .expect("parameter count matches circuit")
    }

    /// Blocks that can influence an observable on `support`.
    pub fn causal_cone(&self, support: &[usize]) -> Result<CausalCone> {
        CausalCone::new(self, support)
    }

    /// `<ψ(θ)|P|ψ(θ)>` evaluated on the causal cone of `P` only.
    pub fn cone_expectation(&self, p: &PauliString) -> Result<f64> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: p.n_qubits(),
            });
        }
        if p.is_identity() {
            return Ok(1.0);
        }
        let cone = self.causal_cone(&p.support())?;
        let state = cone.prepare_state(self);
        pauli_expectation(&state, &p.restrict(cone.register())?)
    }

    /// `Σ_k h_k <P_k>` using cone-restricted expectations.
    pub fn energy(&self, h: &Hamiltonian) -> Result<f64> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: h.n_qubits(),
            });
        }
        h.terms()
            .iter()
            .map(|t| Ok(t.coeff * self.cone_expectation(&t.operator)?))
            .sum()
    }

    /// Appends one column of identity blocks.
    pub fn grow_depth(&self) -> Ansatz {
        let mut out = self.clone();
        out.depth += 1;
        out.blocks.extend(
            column_layout(self.n_qubits, out.depth, self.boundary)
                .into_iter()
                .map(|id| Block {
                    id,
                    angles: IDENTITY_ANGLES,
                }),
        );
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Version of the on-disk ansatz schema.
pub const ANSATZ_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct AnsatzFile {
    schema_version: u32,
    n_qubits: usize,
    depth: usize,
    boundary: Boundary,
    blocks: Vec<BlockFile>,
}

#[derive(Serialize, Deserialize)]
struct BlockFile {
    column: usize,
    row: usize,
    qubits: [usize; 2],
    angles: Vec<f64>,
}

impl From<Ansatz> for AnsatzFile {
    fn from(a: Ansatz) -> Self {
        AnsatzFile {
            schema_version: ANSATZ_SCHEMA_VERSION,
            n_qubits: a.n_qubits,
            depth: a.depth,
            boundary: a.boundary,
            blocks: a
                .blocks
                .iter()
                .map(|b| BlockFile {
                    column: b.id.column,
                    row: b.id.row,
                    qubits: [b.id.qubits.0, b.id.qubits.1],
                    angles: b.angles.to_vec(),
                })
                .collect(),
        }
    }
}

impl TryFrom<AnsatzFile> for Ansatz {
    type Error = Error;

    fn try_from(f: AnsatzFile) -> Result<Self> {
        if f.schema_version != ANSATZ_SCHEMA_VERSION {
            return Err(Error::InvalidAnsatz(format!(
                "unsupported schema version {}",
                f.schema_version
            )));
        }
        let mut a = Ansatz::identity(f.n_qubits, f.depth, f.boundary)?;
        if f.blocks.len() != a.blocks.len() {
            return Err(Error::InvalidAnsatz(format!(
                "expected {} blocks, found {}",
                a.blocks.len(),
                f.blocks.len()
            )));
        }
        for (b, fb) in a.blocks.iter_mut().zip(&f.blocks) {
            let id = BlockId {
                column: fb.column,
                row: fb.row,
                qubits: (fb.qubits[0], fb.qubits[1]),
            };
            if id != b.id {
                return Err(Error::InvalidAnsatz(format!(
                    "block {id:?} does not match layout {:?}",
                    b.id
                )));
            }
            if fb.angles.len() != BLOCK_PARAMS || fb.angles.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidAnsatz(format!(
                    "block {id:?} needs {BLOCK_PARAMS} finite angles"
                )));
            }
            for (x, &v) in b.angles.iter_mut().zip(&fb.angles) {
                *x = wrap_angle(v);
            }
        }
        Ok(a)
    }
}

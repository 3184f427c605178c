use super::{block_gates, Ansatz, BlockId, Boundary, BLOCK_PARAMS};
use crate::circuit::Circuit;
use crate::simcore::State;
use crate::{Error, Result};

/// Blocks in the backward light cone of a one- or two-site support, with a
/// compact register for simulating only those qubits.
///
/// The compact register lists cone qubits along the chain (around the ring for
/// a periodic boundary), so every cone block acts on neighbouring local qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct CausalCone {
    support: Vec<usize>,
    blocks: Vec<usize>,
    qubits: Vec<usize>,
    register: Vec<usize>,
}

impl CausalCone {
    pub(crate) fn new(a: &Ansatz, support: &[usize]) -> Result<Self> {
        let n = a.n_qubits();
        let mut sup = support.to_vec();
        sup.sort_unstable();
        sup.dedup();
        match sup.as_slice() {
            [] => return Err(Error::EmptySupport),
            [q] if *q < n => {}
            [p, q]
                if *q < n
                    && (q - p == 1
                        || (a.boundary() == Boundary::Periodic && *p == 0 && *q == n - 1)) => {}
            _ => return Err(Error::NonAdjacentSupport(support.to_vec())),
        }

        let mut inside = vec![false; n];
        for &q in &sup {
            inside[q] = true;
        }
        let mut blocks = Vec::new();
        for (i, b) in a.blocks().iter().enumerate().rev() {
            let (p, q) = b.id.qubits;
            if inside[p] || inside[q] {
                inside[p] = true;
                inside[q] = true;
                blocks.push(i);
            }
        }
        blocks.reverse();
        let qubits: Vec<usize> = (0..n).filter(|&q| inside[q]).collect();

        // Start the register where the ring arc begins.
        let start = if qubits.len() == n {
            0
        } else {
            *qubits
                .iter()
                .find(|&&q| !inside[(q + n - 1) % n])
                .expect("proper subset has an arc start")
        };
        let register = (0..n)
            .map(|k| (start + k) % n)
            .filter(|&q| inside[q])
            .collect();
        Ok(Self {
            support: sup,
            blocks,
            qubits,
            register,
        })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Indices into [`Ansatz::blocks`], in application order.
    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_ids(&self, a: &Ansatz) -> Vec<BlockId> {
        self.blocks.iter().map(|&i| a.blocks()[i].id).collect()
    }

    /// Cone qubits in ascending order.
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    /// `register()[k]` is the global qubit simulated at local position `k`.
    pub fn register(&self) -> &[usize] {
        &self.register
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn n_params(&self) -> usize {
        self.blocks.len() * BLOCK_PARAMS
    }

    pub fn local(&self, global: usize) -> Option<usize> {
        self.register.iter().position(|&g| g == global)
    }

    /// Cone blocks on the compact register. Parameter `15 * j + k` is angle `k`
    /// of the `j`-th cone block.
    pub fn circuit(&self, a: &Ansatz) -> Circuit {
        let gates = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(j, &i)| {
                let (p, q) = a.blocks()[i].id.qubits;
                block_gates(
                    self.local(p).unwrap(),
                    self.local(q).unwrap(),
                    j * BLOCK_PARAMS,
                )
            })
            .collect();
        Circuit::new(self.width(), gates).expect("cone qubits are in the register")
    }

    /// Angles of the cone blocks, in the order used by [`CausalCone::circuit`].
    pub fn params(&self, a: &Ansatz) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|&i| a.blocks()[i].angles)
            .collect()
    }

    /// Writes cone angles back into the ansatz, wrapping into `(-π, π]`.
    pub fn write_params(&self, a: &mut Ansatz, params: &[f64]) {
        for (j, &i) in self.blocks.iter().enumerate() {
            for k in 0..BLOCK_PARAMS {
                a.set_angle(i, k, params[j * BLOCK_PARAMS + k]);
            }
        }
    }

    /// Cone state on the compact register.
    pub fn prepare_state(&self, a: &Ansatz) -> State {
        self.circuit(a)
            .run(&self.params(a))
            .expect("parameter count matches circuit")
    }
}

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> [[C64; 2]; 2] {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of Pauli factors, one per qubit. Qubit 0 is the leftmost
/// factor and the most significant bit of a basis index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    factors: Vec<Pauli>,
}

/// Bit masks describing the action `P|i> = phase(i) |i ^ flip>`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PauliMasks {
    pub flip: usize,
    pub sign: usize,
    pub y_count: usize,
}

impl PauliMasks {
    #[inline]
    pub fn phase(&self, index: usize) -> C64 {
        let base = match self.y_count % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        if (index & self.sign).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }
}

impl PauliString {
    pub fn new(factors: Vec<Pauli>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument(
                "Pauli string needs at least one qubit".into(),
            ));
        }
        Ok(Self { factors })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            factors: vec![Pauli::I; n_qubits.max(1)],
        }
    }

    /// Builds a string from `(qubit, factor)` pairs; unlisted qubits are `I`.
    pub fn from_sparse(n_qubits: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut out = Self::identity(n_qubits);
        for &(q, p) in factors {
            if q >= n_qubits {
                return Err(Error::InvalidTargets {
                    targets: vec![q],
                    n_qubits,
                });
            }
            out.factors[q] = p;
        }
        Ok(out)
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    pub fn factor(&self, qubit: usize) -> Pauli {
        self.factors[qubit]
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|p| *p == Pauli::I)
    }

    /// Number of `Y` factors; the matrix is real iff this is even.
    pub fn y_count(&self) -> usize {
        self.factors.iter().filter(|p| **p == Pauli::Y).count()
    }

    /// Re-expresses the string on a smaller register. `register[k]` is the
    /// global qubit placed at local position `k`; the support must be covered.
    pub fn restrict(&self, register: &[usize]) -> Result<PauliString> {
        let mut local = vec![Pauli::I; register.len().max(1)];
        for q in self.support() {
            let k = register
                .iter()
                .position(|&g| g == q)
                .ok_or_else(|| Error::InvalidTargets {
                    targets: vec![q],
                    n_qubits: register.len(),
                })?;
            local[k] = self.factors[q];
        }
        Ok(PauliString { factors: local })
    }

    pub(crate) fn masks(&self) -> PauliMasks {
        let n = self.factors.len();
        let mut flip = 0;
        let mut sign = 0;
        let mut y_count = 0;
        for (q, p) in self.factors.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Z => sign |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    y_count += 1;
                }
            }
        }
        PauliMasks {
            flip,
            sign,
            y_count,
        }
    }

    /// Dense `2^n x 2^n` matrix built from Kronecker products.
    pub fn dense_matrix(&self) -> DMatrix<C64> {
        let mut out = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for p in &self.factors {
            let m = p.matrix();
            let f = DMatrix::from_fn(2, 2, |r, c| m[r][c]);
            out = out.kronecker(&f);
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.factors {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let factors = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidArgument(format!(
                    "unknown Pauli factor '{other}'"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(factors)
    }
}

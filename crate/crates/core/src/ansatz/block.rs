use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;

use crate::circuit::{Axis, Circuit, Gate};
use crate::{Error, Result, C64};

/// Number of angles in one two-qubit block.
pub const BLOCK_PARAMS: usize = 15;

/// Angles for which [`block_unitary`] is `exp(3iπ/4) · 1`.
pub const IDENTITY_ANGLES: [f64; BLOCK_PARAMS] = [
    -FRAC_PI_4,
    0.0,
    0.0,
    -3.0 * FRAC_PI_4,
    0.0,
    0.0,
    -3.0 * FRAC_PI_4,
    -3.0 * FRAC_PI_4,
    -FRAC_PI_4,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
];

/// Gate sequence of one block acting on qubits `a` (first of the pair) and `b`,
/// with parameters numbered from `offset` in gate order:
///
/// ```text
/// a: Rz0 Rx1 Rz2 ─⊕─ Rz6 ──●── ─────── ─⊕─ Rz9  Rx10 Rz11
/// b: Rz3 Rx4 Rz5 ─●─ Ry7 ──⊕── Ry8 ─── ─●─ Rz12 Rx13 Rz14
/// ```
///
/// Every rotation is `exp(-iθG)`. The two middle rotations on `b` use the `Y`
/// generator; with `X` there instead, the map from angles to `U(4)` loses rank.
pub fn block_gates(a: usize, b: usize, offset: usize) -> Vec<Gate> {
    let rot = |qubit, axis, k: usize| Gate::Rotation {
        qubit,
        axis,
        param: offset + k,
    };
    vec![
        rot(a, Axis::Z, 0),
        rot(a, Axis::X, 1),
        rot(a, Axis::Z, 2),
        rot(b, Axis::Z, 3),
        rot(b, Axis::X, 4),
        rot(b, Axis::Z, 5),
        Gate::Cnot {
            control: b,
            target: a,
        },
        rot(a, Axis::Z, 6),
        rot(b, Axis::Y, 7),
        Gate::Cnot {
            control: a,
            target: b,
        },
        rot(b, Axis::Y, 8),
        Gate::Cnot {
            control: b,
            target: a,
        },
        rot(a, Axis::Z, 9),
        rot(a, Axis::X, 10),
        rot(a, Axis::Z, 11),
        rot(b, Axis::Z, 12),
        rot(b, Axis::X, 13),
        rot(b, Axis::Z, 14),
    ]
}

/// Dense 4x4 matrix of one block; qubit `a` is the most significant bit.
pub fn block_unitary(angles: &[f64]) -> Result<DMatrix<C64>> {
    if angles.len() != BLOCK_PARAMS {
        return Err(Error::WrongArity {
            expected: BLOCK_PARAMS,
            found: angles.len(),
        });
    }
    if angles.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("block angles"));
    }
    let circuit = Circuit::new(2, block_gates(0, 1, 0))?;
    let mut u = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
    for col in 0..4 {
        let s = circuit.apply(&crate::simcore::State::basis(2, col), angles)?;
        for (row, amp) in s.amplitudes().iter().enumerate() {
            u[(row, col)] = *amp;
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_angles_give_phase_times_identity() {
        let u = block_unitary(&IDENTITY_ANGLES).unwrap();
        let phase = C64::from_polar(1.0, 3.0 * FRAC_PI_4);
        let target = DMatrix::<C64>::identity(4, 4) * phase;
        assert!((u - target).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_angles() {
        assert!(block_unitary(&[0.0; 14]).is_err());
        let mut a = [0.0; 15];
        a[3] = f64::INFINITY;
        assert!(block_unitary(&a).is_err());
    }
}

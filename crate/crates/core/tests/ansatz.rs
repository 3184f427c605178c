use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varqte::ansatz::{
    block_unitary, layout, wrap_angle, Ansatz, Boundary, BLOCK_PARAMS, IDENTITY_ANGLES,
};
use varqte::evolution::ising_hamiltonian;
use varqte::simcore::{apply_unitary, distance_sq, pauli_expectation, Pauli, PauliString, State};
use varqte::C64;

fn boundaries() -> [Boundary; 2] {
    [Boundary::Open, Boundary::Periodic]
}

/// `min_φ ‖U − e^{iφ} 1‖_F`, attained at `φ = arg tr U`.
fn identity_deviation(u: &DMatrix<C64>) -> f64 {
    let tr = u.trace();
    let phase = tr / tr.norm();
    (u - DMatrix::<C64>::identity(4, 4) * phase).norm()
}

/// Unit-modulus overlap: the two states agree up to a global phase.
fn same_ray(a: &State, b: &State) -> f64 {
    1.0 - a.inner(b).unwrap().norm()
}

#[test]
fn identity_angles_can_be_rederived_numerically() {
    // |tr U|² restricted to one angle is A + B cos 2x + C sin 2x, so each
    // coordinate has a closed-form maximizer from three evaluations.
    let f = |th: &[f64]| block_unitary(th).unwrap().trace().norm_sqr();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut best = f64::INFINITY;
    for _ in 0..20 {
        let mut th: Vec<f64> = (0..BLOCK_PARAMS)
            .map(|_| rng.random_range(-PI..PI))
            .collect();
        for _ in 0..400 {
            for k in 0..BLOCK_PARAMS {
                let mut at = |x: f64| {
                    th[k] = x;
                    f(&th)
                };
                let (f0, f1, f2) = (at(0.0), at(FRAC_PI_4), at(FRAC_PI_2));
                let (a, b) = ((f0 + f2) / 2.0, (f0 - f2) / 2.0);
                let c = f1 - a;
                th[k] = 0.5 * c.atan2(b);
            }
        }
        best = best.min(identity_deviation(&block_unitary(&th).unwrap()));
        if best < 1e-10 {
            break;
        }
    }
    assert!(best < 1e-10, "best deviation {best:e}");
    assert!(identity_deviation(&block_unitary(&IDENTITY_ANGLES).unwrap()) < 1e-10);
}

#[test]
fn zero_angles_leave_the_three_cnots() {
    // CNOT(b→a), CNOT(a→b), CNOT(b→a) compose to SWAP.
    let u = block_unitary(&[0.0; BLOCK_PARAMS]).unwrap();
    let one = C64::new(1.0, 0.0);
    let mut swap = DMatrix::<C64>::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[(r, c)] = one;
    }
    assert!((u - swap).norm() < 1e-15);
}

#[test]
fn block_unitaries_have_unit_singular_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let th: Vec<f64> = (0..BLOCK_PARAMS)
            .map(|_| rng.random_range(-PI..PI))
            .collect();
        let u = block_unitary(&th).unwrap();
        for s in u.singular_values().iter() {
            assert!((s - 1.0).abs() < 1e-10);
        }
        assert!((u.adjoint() * &u - DMatrix::<C64>::identity(4, 4)).norm() < 1e-10);
    }
}

#[test]
fn layout_counts_follow_the_brickwork() {
    for n in [4, 6, 8, 10, 12] {
        for depth in 1usize..=4 {
            let odd = depth.div_ceil(2);
            let even = depth / 2;
            let open = odd * (n / 2) + even * (n / 2 - 1);
            assert_eq!(layout(n, depth, Boundary::Open).len(), open);
            assert_eq!(layout(n, depth, Boundary::Periodic).len(), open + even);
        }
    }
    let ids = layout(8, 2, Boundary::Periodic);
    let pairs: Vec<(usize, usize)> = ids.iter().map(|b| b.qubits).collect();
    assert_eq!(
        pairs,
        vec![
            (0, 1),
            (2, 3),
            (4, 5),
            (6, 7),
            (1, 2),
            (3, 4),
            (5, 6),
            (7, 0)
        ]
    );
}

#[test]
fn prepare_state_examples() {
    for b in boundaries() {
        let a = Ansatz::identity(8, 2, b).unwrap();
        assert!(same_ray(&a.prepare_state(), &State::zero(8)) < 1e-12);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut a = Ansatz::identity(4, 1, Boundary::Open).unwrap();
    let th: Vec<f64> = (0..BLOCK_PARAMS)
        .map(|_| rng.random_range(-PI..PI))
        .collect();
    for (k, &x) in th.iter().enumerate() {
        a.set_angle(0, k, x);
    }
    assert_eq!(a.blocks()[0].id.qubits, (0, 1));
    let want = apply_unitary(&State::zero(4), &block_unitary(&th).unwrap(), &[0, 1]).unwrap();
    assert!(same_ray(&a.prepare_state(), &want) < 1e-12);

    let a = Ansatz::random(8, 2, Boundary::Open, &mut rng).unwrap();
    assert!((a.prepare_state().norm() - 1.0).abs() < 1e-12);
}

#[test]
fn cone_examples() {
    let a = Ansatz::identity(8, 2, Boundary::Open).unwrap();
    let c = a.causal_cone(&[1, 2]).unwrap();
    assert_eq!((c.n_blocks(), c.width()), (3, 4));
    let c = a.causal_cone(&[2, 3]).unwrap();
    assert_eq!((c.n_blocks(), c.width()), (5, 6));
    let c = a.causal_cone(&[0]).unwrap();
    assert_eq!((c.n_blocks(), c.width()), (1, 2));

    // The wrap pair's cone is laid out along the ring arc, so every cone block
    // acts on neighbouring positions of the compact register.
    let a = Ansatz::identity(8, 2, Boundary::Periodic).unwrap();
    let c = a.causal_cone(&[7, 0]).unwrap();
    assert!(c.width() <= 6);
    assert_eq!(c.register(), &[6, 7, 0, 1]);
    for id in c.block_ids(&a) {
        let (p, q) = id.qubits;
        assert_eq!(c.local(q).unwrap(), c.local(p).unwrap() + 1);
    }
    assert!(a.causal_cone(&[2, 5]).is_err());
    assert!(a.causal_cone(&[]).is_err());
}

#[test]
fn nearest_neighbour_cones_have_width_four_or_six() {
    for n in [4, 6, 8, 10, 12] {
        for b in boundaries() {
            let a = Ansatz::identity(n, 2, b).unwrap();
            let bonds = if b == Boundary::Periodic { n } else { n - 1 };
            for q in 0..bonds {
                let c = a.causal_cone(&[q, (q + 1) % n]).unwrap();
                assert!(
                    c.width() == 4 || c.width() == 6,
                    "n={n} {b:?} bond {q}: width {}",
                    c.width()
                );
                if c.width() < n {
                    assert_eq!(c.n_blocks(), if c.width() == 4 { 3 } else { 5 });
                }
            }
        }
    }
}

fn random_two_site(n: usize, q: usize, rng: &mut ChaCha8Rng) -> PauliString {
    let pick = |rng: &mut ChaCha8Rng| [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)];
    let (a, b) = (pick(rng), pick(rng));
    PauliString::from_sparse(n, &[(q, a), ((q + 1) % n, b)]).unwrap()
}

#[test]
fn cone_expectation_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = Ansatz::random(8, 2, Boundary::Open, &mut rng).unwrap();
    assert_eq!(a.cone_expectation(&PauliString::identity(8)).unwrap(), 1.0);
    let zz = PauliString::from_sparse(8, &[(2, Pauli::Z), (3, Pauli::Z)]).unwrap();
    let full = pauli_expectation(&a.prepare_state(), &zz).unwrap();
    assert!((a.cone_expectation(&zz).unwrap() - full).abs() < 1e-12);

    let a = Ansatz::random(12, 2, Boundary::Open, &mut rng).unwrap();
    let p = PauliString::from_sparse(12, &[(5, Pauli::X), (6, Pauli::Y)]).unwrap();
    assert!(a.causal_cone(&[5, 6]).unwrap().width() <= 6);
    let full = pauli_expectation(&a.prepare_state(), &p).unwrap();
    assert!((a.cone_expectation(&p).unwrap() - full).abs() < 1e-12);
}

#[test]
fn cone_expectations_match_full_state_on_100_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = 2 * rng.random_range(2..=5);
        let b = if rng.random_bool(0.5) {
            Boundary::Open
        } else {
            Boundary::Periodic
        };
        let a = Ansatz::random(n, 2, b, &mut rng).unwrap();
        let bonds = if b == Boundary::Periodic { n } else { n - 1 };
        let p = if rng.random_bool(0.2) {
            PauliString::from_sparse(n, &[(rng.random_range(0..n), Pauli::X)]).unwrap()
        } else {
            random_two_site(n, rng.random_range(0..bonds), &mut rng)
        };
        let full = pauli_expectation(&a.prepare_state(), &p).unwrap();
        assert!((a.cone_expectation(&p).unwrap() - full).abs() < 1e-12);
    }
}

#[test]
fn blocks_outside_the_cone_do_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let b = if rng.random_bool(0.5) {
            Boundary::Open
        } else {
            Boundary::Periodic
        };
        let a = Ansatz::random(8, 2, b, &mut rng).unwrap();
        let bonds = if b == Boundary::Periodic { 8 } else { 7 };
        let q = rng.random_range(0..bonds);
        let p = random_two_site(8, q, &mut rng);
        let cone = a.causal_cone(&[q, (q + 1) % 8]).unwrap();
        let before_cone = a.cone_expectation(&p).unwrap();
        let before_full = pauli_expectation(&a.prepare_state(), &p).unwrap();

        let mut moved = a.clone();
        for i in (0..a.blocks().len()).filter(|i| !cone.blocks().contains(i)) {
            for k in 0..BLOCK_PARAMS {
                moved.set_angle(i, k, rng.random_range(-PI..PI));
            }
        }
        assert!((moved.cone_expectation(&p).unwrap() - before_cone).abs() < 1e-12);
        assert!(
            (pauli_expectation(&moved.prepare_state(), &p).unwrap() - before_full).abs() < 1e-12
        );
    }
}

#[test]
fn grow_depth_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for b in boundaries() {
        let a = Ansatz::random(6, 2, b, &mut rng).unwrap();
        let g = a.grow_depth();
        assert_eq!(g.depth(), 3);
        assert!(same_ray(&g.prepare_state(), &a.prepare_state()) < 1e-12);
        let gg = g.grow_depth();
        assert_eq!(gg.blocks().len(), layout(6, 4, b).len());
        assert_eq!(
            gg.blocks().len() - a.blocks().len(),
            3 + if b == Boundary::Periodic { 3 } else { 2 }
        );

        // One appended angle moved by ε moves the state by O(ε).
        let eps = 1e-3;
        let last = g.blocks().len() - 1;
        let mut p = g.clone();
        p.set_angle(last, 4, g.angle(last, 4) + eps);
        let d = distance_sq(&p.prepare_state(), &g.prepare_state())
            .unwrap()
            .sqrt();
        assert!(d > 0.0 && d <= 2.0 * eps, "moved by {d:e}");
    }
}

#[test]
fn energy_examples() {
    let a = Ansatz::identity(4, 2, Boundary::Open).unwrap();
    for lambda in [0.0, 0.2] {
        let h = ising_hamiltonian(4, 1.0, lambda, Boundary::Open).unwrap();
        assert!((a.energy(&h).unwrap() + 3.0).abs() < 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for b in boundaries() {
        let a = Ansatz::random(6, 2, b, &mut rng).unwrap();
        let h = ising_hamiltonian(6, 1.0, 0.8, b).unwrap();
        let psi = a.prepare_state().as_column();
        let dense = (psi.adjoint() * h.dense_matrix().unwrap() * &psi)[(0, 0)].re;
        assert!((a.energy(&h).unwrap() - dense).abs() < 1e-12);
    }
}

#[test]
fn invalid_shapes_are_rejected() {
    assert!(Ansatz::identity(5, 2, Boundary::Open).is_err());
    assert!(Ansatz::identity(2, 2, Boundary::Open).is_err());
    assert!(Ansatz::identity(4, 0, Boundary::Open).is_err());
    assert!(block_unitary(&[0.0; 14]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_turns_leave_the_state_unchanged(seed in any::<u64>(), turns in -3i32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Ansatz::random(6, 2, Boundary::Periodic, &mut rng).unwrap();
        let block = rng.random_range(0..a.blocks().len());
        let k = rng.random_range(0..BLOCK_PARAMS);
        let mut b = a.clone();
        b.set_angle(block, k, a.angle(block, k) + 2.0 * PI * f64::from(turns));
        prop_assert!(distance_sq(&a.prepare_state(), &b.prepare_state()).unwrap() < 1e-24);
    }

    #[test]
    fn stored_angles_stay_in_range(x in -100.0f64..100.0) {
        let mut a = Ansatz::identity(4, 1, Boundary::Open).unwrap();
        a.set_angle(1, 3, x);
        let y = a.angle(1, 3);
        prop_assert!(y > -PI && y <= PI);
        prop_assert!(((x - y) / (2.0 * PI)).fract().abs() < 1e-9 || ((x - y) / (2.0 * PI)).fract().abs() > 1.0 - 1e-9);
        prop_assert_eq!(wrap_angle(y), y);
    }

    #[test]
    fn json_round_trip_preserves_angles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Ansatz::random(6, 3, Boundary::Periodic, &mut rng).unwrap();
        prop_assert_eq!(Ansatz::from_json(&a.to_json().unwrap()).unwrap(), a);
    }
}

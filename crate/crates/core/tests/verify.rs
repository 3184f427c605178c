use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varqte::ansatz::{Ansatz, Boundary};
use varqte::objective::{objective, TrotterTerm};
use varqte::simcore::{transition_amplitude, Pauli, PauliString, TimeKind};
use varqte::verify::{
    compute_uncompute_overlap, controlled_gate_count, hadamard_test, HadamardTestSpec, Part,
};

fn random_pauli(n: usize, sites: &[usize], rng: &mut ChaCha8Rng) -> PauliString {
    let f: Vec<(usize, Pauli)> = sites
        .iter()
        .map(|&q| {
            (
                q,
                [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)],
            )
        })
        .collect();
    PauliString::from_sparse(n, &f).unwrap()
}

fn random_bond(n: usize, boundary: Boundary, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let bonds = if boundary == Boundary::Periodic {
        n
    } else {
        n - 1
    };
    let p = rng.random_range(0..bonds);
    vec![p, (p + 1) % n]
}

/// Copy of `a` with every angle of the cone of `sites` redrawn.
fn perturb_cone(a: &Ansatz, sites: &[usize], rng: &mut ChaCha8Rng) -> Ansatz {
    let cone = a.causal_cone(sites).unwrap();
    let mut b = a.clone();
    let p: Vec<f64> = (0..cone.n_params())
        .map(|_| rng.random_range(-3.0..3.0))
        .collect();
    cone.write_params(&mut b, &p);
    b
}

#[test]
fn identical_circuits_give_trivial_parts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = Ansatz::random(4, 2, Boundary::Open, &mut rng).unwrap();
    let one = HadamardTestSpec::for_ansatz(&a, &a, &PauliString::identity(4), Part::Real).unwrap();
    assert!((hadamard_test(&one).unwrap() - 1.0).abs() < 1e-12);
    for _ in 0..10 {
        let p = random_pauli(4, &[0, 1, 2, 3], &mut rng);
        let spec = HadamardTestSpec::for_ansatz(&a, &a, &p, Part::Imag).unwrap();
        assert!(hadamard_test(&spec).unwrap().abs() < 1e-12);
        assert_eq!(controlled_gate_count(&spec).unwrap(), 0);
    }
}

#[test]
fn full_register_test_matches_direct_amplitude() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let n = 2 * rng.random_range(2..=3);
        let boundary = if rng.random_bool(0.5) {
            Boundary::Open
        } else {
            Boundary::Periodic
        };
        let u = Ansatz::random(n, 2, boundary, &mut rng).unwrap();
        let v = Ansatz::random(n, 2, boundary, &mut rng).unwrap();
        let sites: Vec<usize> = (0..n).collect();
        let p = random_pauli(n, &sites, &mut rng);
        let direct = transition_amplitude(&v.prepare_state(), &p, &u.prepare_state()).unwrap();
        let re =
            hadamard_test(&HadamardTestSpec::for_ansatz(&v, &u, &p, Part::Real).unwrap()).unwrap();
        let im =
            hadamard_test(&HadamardTestSpec::for_ansatz(&v, &u, &p, Part::Imag).unwrap()).unwrap();
        assert!((re - direct.re).abs() < 1e-12, "{re} vs {}", direct.re);
        assert!((im - direct.im).abs() < 1e-12, "{im} vs {}", direct.im);
    }
}

#[test]
fn cone_test_matches_full_amplitude_on_100_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let n = 2 * rng.random_range(2..=4);
        let boundary = if rng.random_bool(0.5) {
            Boundary::Open
        } else {
            Boundary::Periodic
        };
        let v = Ansatz::random(n, 2, boundary, &mut rng).unwrap();
        let sites = random_bond(n, boundary, &mut rng);
        let u = perturb_cone(&v, &sites, &mut rng);
        let p = random_pauli(n, &sites, &mut rng);
        let direct = transition_amplitude(&v.prepare_state(), &p, &u.prepare_state()).unwrap();
        for (part, want) in [(Part::Real, direct.re), (Part::Imag, direct.im)] {
            let spec = HadamardTestSpec::for_cone(&v, &u, &sites, &p, part).unwrap();
            let got = hadamard_test(&spec).unwrap();
            assert!((got - want).abs() < 1e-12, "{part:?}: {got} vs {want}");
        }
    }
}

#[test]
fn hadamard_parts_assemble_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..40 {
        let n = 2 * rng.random_range(2..=3);
        let v = Ansatz::random(n, 2, Boundary::Open, &mut rng).unwrap();
        let sites = random_bond(n, Boundary::Open, &mut rng);
        let u = perturb_cone(&v, &sites, &mut rng);
        let p = random_pauli(n, &sites, &mut rng);
        let h: f64 = rng.random_range(-2.0..2.0);
        let tau: f64 = rng.random_range(0.0..0.5);
        let part = |obs: &PauliString, part| {
            hadamard_test(&HadamardTestSpec::for_cone(&v, &u, &sites, obs, part).unwrap()).unwrap()
        };
        let id = PauliString::identity(n);
        let overlap = part(&id, Part::Real);
        let (x, c, s) = (tau * h, (tau * h).cos(), (tau * h).sin());

        let real = c * overlap - s * part(&p, Part::Imag);
        let t = TrotterTerm::at_sites(h, p.clone(), sites.clone(), tau, TimeKind::Real).unwrap();
        let want = objective(&v.prepare_state(), &u, &t).unwrap();
        assert!((real - want).abs() < 1e-12, "real: {real} vs {want}");

        let imag = x.cosh() * overlap - x.sinh() * part(&p, Part::Real);
        let t =
            TrotterTerm::at_sites(h, p.clone(), sites.clone(), tau, TimeKind::Imaginary).unwrap();
        let want = objective(&v.prepare_state(), &u, &t).unwrap();
        assert!((imag - want).abs() < 1e-12, "imag: {imag} vs {want}");
    }
}

#[test]
fn controlled_gate_counts_follow_update_granularity() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let v = Ansatz::random(8, 2, Boundary::Open, &mut rng).unwrap();
    let sites = [1, 2];
    let cone = v.causal_cone(&sites).unwrap();
    assert_eq!(cone.n_blocks(), 3);
    let p = PauliString::from_sparse(8, &[(1, Pauli::Z), (2, Pauli::Z)]).unwrap();
    let count = |u: &Ansatz| {
        controlled_gate_count(&HadamardTestSpec::for_cone(&v, u, &sites, &p, Part::Real).unwrap())
    };

    // Cone update: every cone angle moves.
    let u = perturb_cone(&v, &sites, &mut rng);
    assert_eq!(count(&u).unwrap(), 45);

    // Block update: one block's angles move.
    let mut u = v.clone();
    let b = cone.blocks()[1];
    for k in 0..15 {
        u.set_angle(b, k, v.angle(b, k) + 0.1);
    }
    assert_eq!(count(&u).unwrap(), 15);

    // Angle update: a single angle moves.
    let mut u = v.clone();
    u.set_angle(cone.blocks()[0], 7, v.angle(cone.blocks()[0], 7) + 0.3);
    assert_eq!(count(&u).unwrap(), 1);

    assert_eq!(count(&v).unwrap(), 0);
}

#[test]
fn structural_differences_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let a = Ansatz::random(4, 2, Boundary::Open, &mut rng).unwrap();
    let b = Ansatz::random(4, 1, Boundary::Open, &mut rng).unwrap();
    let p = PauliString::identity(4);
    assert!(HadamardTestSpec::for_ansatz(&a, &b, &p, Part::Real).is_err());

    let mut spec = HadamardTestSpec::for_ansatz(&a, &a, &p, Part::Real).unwrap();
    spec.v = b.circuit();
    spec.v_params = b.params();
    assert!(hadamard_test(&spec).is_err());

    let mut spec = HadamardTestSpec::for_ansatz(&a, &a, &p, Part::Real).unwrap();
    spec.observable = PauliString::identity(3);
    assert!(hadamard_test(&spec).is_err());
}

#[test]
fn compute_uncompute_matches_inner_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..30 {
        let n = 2 * rng.random_range(2..=3);
        let u = Ansatz::random(n, 2, Boundary::Open, &mut rng).unwrap();
        let v = Ansatz::random(n, 2, Boundary::Open, &mut rng).unwrap();
        let got = compute_uncompute_overlap(&u.circuit(), &u.params(), &v.circuit(), &v.params())
            .unwrap();
        let want = v
            .prepare_state()
            .inner(&u.prepare_state())
            .unwrap()
            .norm_sqr();
        assert!((got - want).abs() < 1e-12);
        let same = compute_uncompute_overlap(&u.circuit(), &u.params(), &u.circuit(), &u.params())
            .unwrap();
        assert!((same - 1.0).abs() < 1e-12);
    }
}

#[test]
fn compute_uncompute_detects_orthogonal_states() {
    let a = Ansatz::identity(4, 2, Boundary::Open).unwrap();
    let mut b = a.clone();
    // Rx(π/2) on the last block's first qubit maps |0> to -i|1>.
    let last = b.blocks().len() - 1;
    b.set_angle(last, 10, std::f64::consts::FRAC_PI_2);
    let got =
        compute_uncompute_overlap(&a.circuit(), &a.params(), &b.circuit(), &b.params()).unwrap();
    assert!(got < 1e-24);
    let c = Ansatz::identity(6, 2, Boundary::Open).unwrap();
    assert!(
        compute_uncompute_overlap(&a.circuit(), &a.params(), &c.circuit(), &c.params()).is_err()
    );
}

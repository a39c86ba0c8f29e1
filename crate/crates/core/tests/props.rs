use proptest::prelude::*;

use qfimlab::channels::{compose, verify_cptp, Channel};
use qfimlab::dla::lie_closure;
use qfimlab::experiments::output::fmt_f64;
use qfimlab::experiments::verify::{local_depol_pauli, random_instance};
use qfimlab::qfim::{bures_distance, qfim_of_circuit, trace_distance, uhlmann_fidelity, RankTolerance};
use qfimlab::qnn::{derivative_fd, evolve, evolve_with_derivatives, toy_model, ParameterVector};
use qfimlab::rng::CounterRng;
use qfimlab::sampling::{random_density, random_hermitian, random_pauli_channel, random_unitary};
use qfimlab::tensor::{hermitian_eig, kron, partial_trace, DensityMatrix};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), dim in 1usize..9) {
        let mut rng = CounterRng::new(seed);
        let a = random_hermitian(dim, &mut rng);
        let eig = hermitian_eig(&a).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&a) < 1e-12 * a.frobenius_norm().max(1.0));
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn partial_trace_inverts_kron(seed in any::<u64>()) {
        let mut rng = CounterRng::new(seed);
        let a = random_density(2, 2, &mut rng);
        let b = random_density(4, 3, &mut rng);
        let ab = DensityMatrix::new(kron(a.op(), b.op())).unwrap();
        prop_assert!(partial_trace(&ab, &[2, 3]).unwrap().op().max_abs_diff(a.op()) < 1e-13);
        prop_assert!(partial_trace(&ab, &[1]).unwrap().op().max_abs_diff(b.op()) < 1e-13);
    }

    #[test]
    fn random_channels_are_cptp_and_compose(seed in any::<u64>(), n in 1usize..3, p in 0.0f64..1.0) {
        let mut rng = CounterRng::new(seed);
        let a = local_depol_pauli(n, p, &mut rng).unwrap();
        let b = Channel::Pauli(random_pauli_channel(n, 3, &mut rng));
        prop_assert!(verify_cptp(&a).unwrap().is_cptp());
        let ab = compose(&a, &b).unwrap();
        let product = a.superoperator().unwrap().matmul(&b.superoperator().unwrap());
        prop_assert!(ab.superoperator().unwrap().max_abs_diff(&product) < 1e-12);
    }

    #[test]
    fn noisy_evolution_returns_a_state(seed in any::<u64>(), p in 0.0f64..1.0) {
        let mut rng = CounterRng::new(seed);
        let inst = random_instance(&mut rng, 3);
        let c = inst.circuit.clone().with_uniform_noise(local_depol_pauli(inst.circuit.n_qubits(), p, &mut rng).unwrap()).unwrap();
        let out = evolve(&c, &inst.theta, &inst.rho).unwrap();
        prop_assert!(DensityMatrix::new(out.op().clone()).is_ok());
        prop_assert!((out.op().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_noise_is_bit_identical(seed in any::<u64>()) {
        let mut rng = CounterRng::new(seed);
        let inst = random_instance(&mut rng, 3);
        let c = inst.circuit.clone().with_uniform_noise(Channel::identity(inst.circuit.n_qubits())).unwrap();
        let a = evolve(&c, &inst.theta, &inst.rho).unwrap();
        let b = evolve(&inst.circuit, &inst.theta, &inst.rho).unwrap();
        prop_assert_eq!(a.op().data(), b.op().data());
    }

    #[test]
    fn derivatives_are_traceless_hermitian_and_match_finite_differences(seed in any::<u64>(), p in 0.0f64..0.5) {
        let mut rng = CounterRng::new(seed);
        let inst = random_instance(&mut rng, 2);
        let c = inst.circuit.clone().with_uniform_noise(Channel::local_depol_uniform(inst.circuit.n_qubits(), p).unwrap()).unwrap();
        let (_, derivs) = evolve_with_derivatives(&c, &inst.theta, &inst.rho).unwrap();
        for (i, d) in derivs.iter().enumerate() {
            prop_assert!(d.trace().norm() < 1e-12);
            prop_assert!(d.hermitian_deviation() < 1e-12);
            let fd = derivative_fd(&c, &inst.theta, &inst.rho, i, 1e-5).unwrap();
            prop_assert!(d.max_abs_diff(&fd) < 1e-6);
        }
    }

    #[test]
    fn qfim_is_symmetric_psd_and_rank_bounded(seed in any::<u64>(), p in 0.0f64..0.5) {
        let mut rng = CounterRng::new(seed);
        let inst = random_instance(&mut rng, 3);
        let c = inst.circuit.clone().with_uniform_noise(Channel::local_depol_uniform(inst.circuit.n_qubits(), p).unwrap()).unwrap();
        let r = qfim_of_circuit(&c, &inst.theta, &inst.rho, RankTolerance::default()).unwrap();
        prop_assert!(r.matrix.symmetry_deviation() < 1e-12);
        prop_assert!(r.lambda_min() > -1e-9 * r.lambda_max().max(1.0));
        prop_assert!(r.rank <= inst.circuit.num_params());
    }

    #[test]
    fn toy_rank_never_exceeds_algebra_dimension(seed in any::<u64>(), p in 0.0f64..0.45) {
        let mut rng = CounterRng::new(seed);
        let (c, rho) = toy_model();
        let c = c.with_uniform_noise(Channel::bit_flip(1, p).unwrap()).unwrap();
        let r = qfim_of_circuit(&c, &ParameterVector::new(rng.angles(4)), &rho, RankTolerance::default()).unwrap();
        prop_assert!(r.rank <= 3);
    }

    // at large p the whole matrix sinks below the absolute rank floor
    #[test]
    fn global_depolarization_keeps_rank(seed in any::<u64>(), p in 0.0f64..0.5) {
        let mut rng = CounterRng::new(seed);
        let inst = random_instance(&mut rng, 2);
        let c = inst.circuit.clone().with_uniform_noise(Channel::global_depol(inst.circuit.n_qubits(), p).unwrap()).unwrap();
        let tol = RankTolerance::default();
        let clean = qfim_of_circuit(&inst.circuit, &inst.theta, &inst.rho, tol).unwrap();
        let noisy = qfim_of_circuit(&c, &inst.theta, &inst.rho, tol).unwrap();
        prop_assert_eq!(clean.rank, noisy.rank);
    }

    #[test]
    fn distances_are_consistent(seed in any::<u64>(), dim in prop::sample::select(vec![2usize, 4, 8])) {
        let mut rng = CounterRng::new(seed);
        let a = random_density(dim, 1 + rng.below(dim), &mut rng);
        let b = random_density(dim, 1 + rng.below(dim), &mut rng);
        let f = uhlmann_fidelity(&a, &b).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        // √ of roundoff-level eigenvalues limits symmetry on rank-deficient pairs to ~√ε
        prop_assert!((f - uhlmann_fidelity(&b, &a).unwrap()).abs() < 1e-7);
        prop_assert!(bures_distance(&a, &b).unwrap() <= 2.0 * trace_distance(&a, &b).unwrap() + 1e-10);
        prop_assert!(bures_distance(&a, &a).unwrap().abs() < 1e-9);
    }

    #[test]
    fn algebra_dimension_is_conjugation_invariant(seed in any::<u64>()) {
        let mut rng = CounterRng::new(seed);
        let z = qfimlab::tensor::Operator::pauli_z();
        let x = qfimlab::tensor::Operator::pauli_x();
        let g = vec![kron(&z, &z), kron(&x, &qfimlab::tensor::Operator::identity(2))];
        let u = random_unitary(4, &mut rng);
        let conj: Vec<_> = g.iter().map(|a| a.conjugate_by(&u).hermitian_part()).collect();
        prop_assert_eq!(lie_closure(&g, None).unwrap().dim(), lie_closure(&conj, None).unwrap().dim());
    }

    #[test]
    fn float_cells_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let back: f64 = fmt_f64(x).parse().unwrap();
        prop_assert_eq!(back, x + 0.0);
    }

    #[test]
    fn rng_streams_are_reproducible(seed in any::<u64>(), label in any::<u64>()) {
        let mut a = CounterRng::new(seed).fork(label);
        let mut b = CounterRng::new(seed).fork(label);
        for _ in 0..16 {
            let u = a.uniform();
            prop_assert_eq!(u, b.uniform());
            prop_assert!((0.0..1.0).contains(&u));
        }
        let angles = CounterRng::new(seed).angles(8);
        prop_assert!(angles.iter().all(|t| (0.0..std::f64::consts::TAU).contains(t)));
    }
}

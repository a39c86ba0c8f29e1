//! Acceptance criteria, one test each. Every test prints a single `PASS`/`FAIL` line before
//! asserting. Run with `--nocapture` to see the lines.

use std::time::{Duration, Instant};

use qfimlab::channels::Channel;
use qfimlab::experiments::algebra::dla_report;
use qfimlab::experiments::config::{CircuitSpec, ExperimentConfig, ExperimentKind, NoiseModel, NoiseSpec, SweepSpec};
use qfimlab::experiments::output::Table;
use qfimlab::experiments::sweeps::scaling_slopes;
use qfimlab::experiments::verify::{self, PropertyResult, VerifyContext};
use qfimlab::experiments::{group_gap_ratio, run, Artifact};
use qfimlab::qfim::{qfim_of_circuit, RankTolerance};
use qfimlab::qnn::{toy_model, toy_parameter_points};

const SEED: u64 = 42;

fn verdict(k: usize, passed: bool, detail: &str) {
    println!("{} criterion {k}: {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {k}: {detail}");
}

fn from_property(k: usize, results: &[PropertyResult]) {
    let passed = results.iter().all(|r| r.passed);
    let detail: Vec<String> = results.iter().map(|r| r.line()).collect();
    verdict(k, passed, &detail.join("; "));
}

fn table(cfg: &ExperimentConfig) -> Table {
    match run(cfg).expect("run succeeds").artifact {
        Artifact::Table(t) => t,
        other => panic!("expected a table, got {other:?}"),
    }
}

#[test]
fn criterion_01_toy_rank_table() {
    let start = Instant::now();
    let (clean, rho) = toy_model();
    let noisy = clean.clone().with_uniform_noise(Channel::bit_flip(1, 0.1).unwrap()).unwrap();
    let tol = RankTolerance::default();
    let ranks = |c| -> Vec<usize> {
        toy_parameter_points().iter().map(|t| qfim_of_circuit(c, t, &rho, tol).unwrap().rank).collect()
    };
    let (r0, r1) = (ranks(&clean), ranks(&noisy));
    let elapsed = start.elapsed();
    let passed = r0 == [1, 2, 2] && r1 == [1, 2, 3] && elapsed < Duration::from_secs(1);
    verdict(1, passed, &format!("noiseless ranks {r0:?} (want [1, 2, 2]), bit-flip p=0.1 ranks {r1:?} (want [1, 2, 3]), {elapsed:?}"));
}

#[test]
fn criterion_02_dla_dimensions() {
    let start = Instant::now();
    let toy = dla_report(&CircuitSpec::Toy {}).unwrap();
    let mut ok = toy.compared == 3;
    let mut parts = vec![format!("toy {}", toy.compared)];
    for (n, want) in [(2, 3), (4, 6), (6, 9)] {
        let r = dla_report(&CircuitSpec::HvaTfim { n, layers: 1 }).unwrap();
        ok &= r.compared == want;
        parts.push(format!("hva n={n}: {} (want {want}, full space {})", r.compared, r.full_dim));
    }
    let elapsed = start.elapsed();
    verdict(2, ok && elapsed < Duration::from_secs(30), &format!("{}, {elapsed:?}", parts.join(", ")));
}

#[test]
fn criterion_03_closed_form() {
    from_property(3, &[verify::check_closed_form(&VerifyContext::new(SEED)).unwrap()]);
}

#[test]
fn criterion_04_global_depol_rank() {
    let r = verify::check_global_depol_rank(&VerifyContext::new(SEED)).unwrap();
    assert!(r.trials >= 20);
    from_property(4, &[r]);
}

#[test]
fn criterion_05_global_depol_bound() {
    let r = verify::check_global_depol_eigenvalue_bound(&VerifyContext::new(SEED)).unwrap();
    assert!(r.trials >= 20);
    from_property(5, &[r]);
}

#[test]
fn criterion_06_pauli_noise_bound() {
    let ctx = VerifyContext::new(SEED);
    assert_eq!(ctx.spec.directions, 100);
    assert!(ctx.spec.max_qubits <= 3);
    from_property(6, &[verify::check_pauli_noise_quadratic_bound(&ctx).unwrap()]);
}

#[test]
fn criterion_07_contraction() {
    let r = verify::check_relative_entropy_contraction(&VerifyContext::new(SEED)).unwrap();
    assert!(r.trials >= 100);
    from_property(7, &[r]);
}

#[test]
fn criterion_08_axioms() {
    let ctx = VerifyContext::new(SEED);
    let results = [
        verify::check_symmetry(&ctx).unwrap(),
        verify::check_psd(&ctx).unwrap(),
        verify::check_convexity(&ctx).unwrap(),
        verify::check_unitary_invariance(&ctx).unwrap(),
        verify::check_monotonicity(&ctx).unwrap(),
    ];
    assert!(results.iter().all(|r| r.trials >= 50));
    from_property(8, &results);
}

#[test]
fn criterion_09_derivative_oracle() {
    let r = verify::check_derivative_oracle(&VerifyContext::new(SEED)).unwrap();
    assert!(r.trials >= 50);
    from_property(9, &[r]);
}

#[test]
fn criterion_10_loss_flattening() {
    from_property(10, &[verify::check_loss_flattening(&VerifyContext::new(SEED)).unwrap()]);
}

#[test]
fn criterion_11_quasi_overparametrization() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Spectrum);
    cfg.seed = Some(SEED);
    cfg.circuit = Some(CircuitSpec::HvaTfim { n: 4, layers: 6 });
    cfg.noise = Some(NoiseSpec { model: NoiseModel::LocalDepol, p: vec![0.0, 1e-5, 0.08], placement: None, pauli_terms: None });
    let t = table(&cfg);
    let ps = t.floats("p").unwrap();
    let eig = t.floats("eigenvalue").unwrap();
    let spectrum = |p: f64| -> Vec<f64> { (0..ps.len()).filter(|&k| ps[k] == p).map(|k| eig[k]).collect() };
    let clean = spectrum(0.0);
    let lmax = clean[0];
    let r0 = clean.iter().filter(|&&l| l > RankTolerance::default().threshold(lmax)).count();
    let small = group_gap_ratio(&spectrum(1e-5), r0).unwrap_or(0.0);
    let strong = spectrum(0.08);
    let strong_gap = group_gap_ratio(&strong, r0).unwrap_or(0.0);
    let strong_rel = strong[0] / lmax;
    let passed = small >= 10.0 && strong_gap < 10.0 && strong_rel < 1e-2;
    verdict(
        11,
        passed,
        &format!(
            "noiseless rank {r0}; p=1e-5 gap {small:.3e} (want >= 10); p=0.08 gap {strong_gap:.3e} (want < 10), max eigenvalue / noiseless max {strong_rel:.3e} (want < 1e-2)"
        ),
    );
}

#[test]
fn criterion_12_scaling_slope() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::new(ExperimentKind::Scaling);
    cfg.seed = Some(SEED);
    cfg.circuit = Some(CircuitSpec::HvaTfim { n: 4, layers: 12 });
    cfg.noise = Some(NoiseSpec { model: NoiseModel::GlobalDepol, p: vec![], placement: None, pauli_terms: None });
    cfg.sweep = Some(SweepSpec { p: Some(vec![0.05]), layers: Some((1..=12).collect()) });
    let t = table(&cfg);
    let elapsed = start.elapsed();
    let (slope, normalized) = scaling_slopes(&t, 0.05).unwrap();
    let expected = (1.0f64 - 0.05).ln();
    let err = ((slope - expected) / expected).abs();
    let passed = err <= 0.15 && elapsed < Duration::from_secs(600);
    verdict(
        12,
        passed,
        &format!(
            "slope {slope:.5e} vs ln(1-p) {expected:.5e}, relative error {err:.3} (want <= 0.15); noise-normalized slope {normalized:.5e}; sweep took {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_13_depol_decomposition() {
    from_property(13, &[verify::check_depol_decomposition(&VerifyContext::new(SEED)).unwrap()]);
}

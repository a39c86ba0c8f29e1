//! Randomized checks of the QFIM axioms, the noise theorems and their supporting inequalities.
//!
//! Every check reports its worst margin: `bound − observed`, so a check passes iff the
//! margin is non-negative.

use serde::Serialize;

use super::config::VerifySpec;
use crate::channels::{compose, decompose_local_depol, Channel};
use crate::error::Result;
use crate::qfim::{
    bures_distance, classical_fim, noisy_qfim_closed_form_global_depol, qfim_of_circuit, qfim_pure,
    relative_entropy_to_mixed, trace_distance, RankTolerance,
};
use crate::qnn::{
    derivative_fd, evolve, evolve_with_derivatives, hva_tfim, loss_linear, plus_product_state, toy_model, NoisyCircuit,
    ParameterVector,
};
use crate::rng::CounterRng;
use crate::sampling::{random_density, random_pauli_channel, random_pure_state, random_traceless_hermitian, random_unit_vector, random_unitary};
use crate::tensor::{DensityMatrix, Operator};

/// Noise probabilities cycled through by the theorem checks; instance `k` uses entry `(k/2) mod 4`
/// so both circuit families meet every value.
pub const THEOREM_P: [f64; 4] = [0.01, 0.05, 0.1, 0.3];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub trials: usize,
    /// Trials with a negative margin.
    pub violations: usize,
    pub worst_margin: f64,
    pub tolerance_name: String,
    pub tolerance: f64,
    pub detail: String,
}

impl PropertyResult {
    fn from_margins(name: &str, margins: &[f64], tolerance_name: &str, tolerance: f64, detail: String) -> Self {
        let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
        // + 0.0 keeps −0.0 out of the report
        let worst = if margins.is_empty() { 0.0 } else { worst + 0.0 };
        Self {
            name: name.to_string(),
            passed: !margins.is_empty() && worst >= 0.0 && worst.is_finite(),
            trials: margins.len(),
            violations: margins.iter().filter(|&&m| !(m >= 0.0)).count(),
            worst_margin: worst,
            tolerance_name: tolerance_name.to_string(),
            tolerance,
            detail,
        }
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{verdict} {} (trials {}, violated {}, worst margin {:.3e})",
            self.name, self.trials, self.violations, self.worst_margin
        );
        if !self.passed {
            s.push_str(&format!(" [tolerance {} = {:e}]", self.tolerance_name, self.tolerance));
        }
        if !self.detail.is_empty() {
            s.push_str(&format!(": {}", self.detail));
        }
        s
    }
}

fn rank_detail(ctx: &VerifyContext) -> String {
    format!("rank_abs = {:e}, rank_rel = {:e}", ctx.tolerance.abs, ctx.tolerance.rel)
}

/// Shared inputs of every check.
#[derive(Clone, Debug)]
pub struct VerifyContext {
    pub seed: u64,
    pub spec: VerifySpec,
    pub tolerance: RankTolerance,
}

impl VerifyContext {
    pub fn new(seed: u64) -> Self {
        Self { seed, spec: VerifySpec::default(), tolerance: RankTolerance::default() }
    }

    fn rng(&self, label: u64) -> CounterRng {
        CounterRng::new(self.seed).fork(label)
    }
}

/// Noiseless circuit, input state and angles.
#[derive(Clone, Debug)]
pub struct Instance {
    pub label: String,
    pub circuit: NoisyCircuit,
    pub rho: DensityMatrix,
    pub theta: ParameterVector,
}

/// Random generators, depth, input state and angles on `1..=max_qubits` qubits.
pub fn random_instance(rng: &mut CounterRng, max_qubits: usize) -> Instance {
    let n = 1 + rng.below(max_qubits.max(1));
    let d = 1 << n;
    let k = 2 + rng.below(2);
    let generators: Vec<Operator> = (0..k).map(|_| random_traceless_hermitian(d, rng).scale_real(2.0)).collect();
    let m = 2 + rng.below(5);
    let layers = (0..m).map(|_| rng.below(k)).collect();
    let circuit = NoisyCircuit::new(n, generators, layers).expect("random generators are valid");
    let rho = random_density(d, 1 + rng.below(d), rng);
    let theta = ParameterVector::new(rng.angles(m));
    Instance { label: format!("random n={n} M={m}"), circuit, rho, theta }
}

/// Even `k`: the toy model; odd `k`: the 3-qubit HVA with 1 to 3 layers. Random angles.
pub fn family_instance(k: usize, rng: &mut CounterRng) -> Instance {
    if k.is_multiple_of(2) {
        let (circuit, rho) = toy_model();
        let theta = ParameterVector::new(rng.angles(4));
        Instance { label: "toy".into(), circuit, rho, theta }
    } else {
        let layers = 1 + rng.below(3);
        let circuit = hva_tfim(3, layers).expect("valid HVA");
        let theta = ParameterVector::new(rng.angles(2 * layers));
        Instance { label: format!("hva n=3 L={layers}"), circuit, rho: plus_product_state(3), theta }
    }
}

/// Local depolarization at `p` after a random unital Pauli channel.
pub fn local_depol_pauli(n: usize, p: f64, rng: &mut CounterRng) -> Result<Channel> {
    let terms = 1 + rng.below(4);
    compose(&Channel::local_depol_uniform(n, p)?, &Channel::Pauli(random_pauli_channel(n, terms, rng)))
}

fn noisy_slots(c: &NoisyCircuit, p: f64, rng: &mut CounterRng) -> Result<NoisyCircuit> {
    let slots = (0..=c.num_params()).map(|_| local_depol_pauli(c.n_qubits(), p, rng)).collect::<Result<Vec<_>>>()?;
    c.clone().with_noise_slots(slots)
}

fn random_noisy_instance(rng: &mut CounterRng, max_qubits: usize) -> Result<Instance> {
    let mut inst = random_instance(rng, max_qubits);
    let p = rng.uniform_range(0.01, 0.3);
    inst.circuit = noisy_slots(&inst.circuit, p, rng)?;
    inst.label.push_str(&format!(" p={p:.3}"));
    Ok(inst)
}

/// Appends `extra` after the circuit's final noise slot.
fn with_terminal(c: &NoisyCircuit, extra: &Channel) -> Result<NoisyCircuit> {
    let mut slots = c.noise_slots().to_vec();
    let last = slots.pop().expect("at least one slot");
    slots.push(compose(extra, &last)?);
    c.clone().with_noise_slots(slots)
}

fn min_eigenvalue(m: &crate::tensor::RealMatrix) -> Result<f64> {
    Ok(m.eigenvalues()?[0])
}

/// Property 1: `F = Fᵀ`.
pub fn check_symmetry(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(1);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials {
        let inst = random_noisy_instance(&mut rng, ctx.spec.max_qubits)?;
        let r = qfim_of_circuit(&inst.circuit, &inst.theta, &inst.rho, ctx.tolerance)?;
        margins.push(1e-10 - r.matrix.symmetry_deviation());
    }
    Ok(PropertyResult::from_margins("qfim_symmetric", &margins, "symmetry", 1e-10, String::new()))
}

/// Property 2: `F ⪰ 0`.
pub fn check_psd(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(2);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials {
        let inst = random_noisy_instance(&mut rng, ctx.spec.max_qubits)?;
        let r = qfim_of_circuit(&inst.circuit, &inst.theta, &inst.rho, ctx.tolerance)?;
        margins.push(r.lambda_min() + 1e-9);
    }
    Ok(PropertyResult::from_margins("qfim_positive_semidefinite", &margins, "psd", 1e-9, String::new()))
}

/// Property 3: `F(qρ + (1−q)σ) ⪯ qF(ρ) + (1−q)F(σ)` for two inputs through one circuit.
pub fn check_convexity(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(3);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials {
        let inst = random_noisy_instance(&mut rng, ctx.spec.max_qubits)?;
        let d = inst.rho.dim();
        let sigma = random_density(d, 1 + rng.below(d), &mut rng);
        let q = rng.uniform();
        let mix = inst.rho.mix(q, &sigma)?;
        let f_rho = qfim_of_circuit(&inst.circuit, &inst.theta, &inst.rho, ctx.tolerance)?.matrix;
        let f_sigma = qfim_of_circuit(&inst.circuit, &inst.theta, &sigma, ctx.tolerance)?.matrix;
        let f_mix = qfim_of_circuit(&inst.circuit, &inst.theta, &mix, ctx.tolerance)?.matrix;
        let gap = f_rho.combine(q, &f_sigma, 1.0 - q).combine(1.0, &f_mix, -1.0);
        margins.push(min_eigenvalue(&gap)? + 1e-8);
    }
    Ok(PropertyResult::from_margins("qfim_convexity", &margins, "convexity", 1e-8, String::new()))
}

/// Property 4: a parameter-independent unitary at the end leaves `F` unchanged.
pub fn check_unitary_invariance(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(4);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials {
        let inst = random_noisy_instance(&mut rng, ctx.spec.max_qubits)?;
        let u = Channel::unitary(random_unitary(inst.rho.dim(), &mut rng))?;
        let before = qfim_of_circuit(&inst.circuit, &inst.theta, &inst.rho, ctx.tolerance)?.matrix;
        let after = qfim_of_circuit(&with_terminal(&inst.circuit, &u)?, &inst.theta, &inst.rho, ctx.tolerance)?.matrix;
        margins.push(1e-10 - before.max_abs_diff(&after));
    }
    Ok(PropertyResult::from_margins("qfim_unitary_invariance", &margins, "unitary_invariance", 1e-10, String::new()))
}

/// Property 5: `F(Φ(ρ_θ)) ⪯ F(ρ_θ)` for a fixed channel `Φ`.
pub fn check_monotonicity(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(5);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials {
        let inst = random_noisy_instance(&mut rng, ctx.spec.max_qubits)?;
        let phi = local_depol_pauli(inst.circuit.n_qubits(), rng.uniform_range(0.01, 0.5), &mut rng)?;
        let before = qfim_of_circuit(&inst.circuit, &inst.theta, &inst.rho, ctx.tolerance)?.matrix;
        let after = qfim_of_circuit(&with_terminal(&inst.circuit, &phi)?, &inst.theta, &inst.rho, ctx.tolerance)?.matrix;
        margins.push(min_eigenvalue(&before.combine(1.0, &after, -1.0))? + 1e-8);
    }
    Ok(PropertyResult::from_margins("qfim_monotonicity", &margins, "monotonicity", 1e-8, String::new()))
}

/// Mixed-state formula on a pure input equals the pure-state formula.
pub fn check_pure_mixed_consistency(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(6);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials {
        let inst = random_instance(&mut rng, ctx.spec.max_qubits);
        let psi = random_pure_state(inst.rho.dim(), &mut rng);
        let rho = DensityMatrix::from_pure(&psi)?;
        let mixed = qfim_of_circuit(&inst.circuit, &inst.theta, &rho, ctx.tolerance)?.matrix;
        let (out, derivs) = pure_state_derivatives(&inst.circuit, &inst.theta, &psi);
        let pure = qfim_pure(&out, &derivs, ctx.tolerance)?.matrix;
        margins.push(1e-8 - mixed.max_abs_diff(&pure));
    }
    Ok(PropertyResult::from_margins("pure_mixed_consistency", &margins, "pure_mixed", 1e-8, String::new()))
}

/// State vector and `∂_i|ψ(θ)⟩` of a noiseless circuit.
pub fn pure_state_derivatives(c: &NoisyCircuit, theta: &ParameterVector, psi: &[num_complex::Complex64]) -> (Vec<num_complex::Complex64>, Vec<Vec<num_complex::Complex64>>) {
    let minus_i = num_complex::Complex64::new(0.0, -1.0);
    let mut out = psi.to_vec();
    let mut derivs: Vec<Vec<num_complex::Complex64>> = Vec::new();
    for m in 0..c.num_params() {
        let u = c.gate_unitary(m, theta.as_slice()[m]);
        out = u.matvec(&out);
        for d in derivs.iter_mut() {
            *d = u.matvec(d);
        }
        derivs.push(c.gate_generator(m).matvec(&out).into_iter().map(|x| x * minus_i).collect());
    }
    (out, derivs)
}

/// A single channel at the end never raises the rank.
pub fn check_terminal_channel_rank(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(7);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials {
        let inst = random_instance(&mut rng, ctx.spec.max_qubits);
        let n = inst.circuit.n_qubits();
        let ch = match rng.below(3) {
            0 => local_depol_pauli(n, rng.uniform_range(0.01, 0.5), &mut rng)?,
            1 => Channel::Pauli(random_pauli_channel(n, 1 + rng.below(4), &mut rng)),
            _ => Channel::local_depol((0..n).map(|_| rng.uniform_range(0.01, 0.9)).collect())?,
        };
        let mut slots = vec![Channel::identity(n); inst.circuit.num_params()];
        slots.push(ch);
        let noisy = inst.circuit.clone().with_noise_slots(slots)?;
        let clean = qfim_of_circuit(&inst.circuit, &inst.theta, &inst.rho, ctx.tolerance)?.rank;
        let dirty = qfim_of_circuit(&noisy, &inst.theta, &inst.rho, ctx.tolerance)?.rank;
        margins.push(clean as f64 - dirty as f64);
    }
    Ok(PropertyResult::from_margins("terminal_channel_rank", &margins, "rank_abs/rank_rel", ctx.tolerance.rel, rank_detail(ctx)))
}

/// Global depolarization in all slots leaves the rank unchanged.
pub fn check_global_depol_rank(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(8);
    let mut margins = Vec::new();
    for k in 0..ctx.spec.trials {
        let inst = family_instance(k, &mut rng);
        let p = THEOREM_P[(k / 2) % THEOREM_P.len()];
        let noisy = inst.circuit.clone().with_uniform_noise(Channel::global_depol(inst.circuit.n_qubits(), p)?)?;
        let clean = qfim_of_circuit(&inst.circuit, &inst.theta, &inst.rho, ctx.tolerance)?.rank;
        let dirty = qfim_of_circuit(&noisy, &inst.theta, &inst.rho, ctx.tolerance)?.rank;
        margins.push(-(clean as f64 - dirty as f64).abs());
    }
    Ok(PropertyResult::from_margins("global_depol_rank_unchanged", &margins, "rank_abs/rank_rel", ctx.tolerance.rel, rank_detail(ctx)))
}

/// Global depolarization: every eigenvalue is at most `(1−p)^{M+1} λ_max(noiseless)`.
pub fn check_global_depol_eigenvalue_bound(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(9);
    let mut margins = Vec::new();
    for k in 0..ctx.spec.trials {
        let inst = family_instance(k, &mut rng);
        let p = THEOREM_P[(k / 2) % THEOREM_P.len()];
        let m = inst.circuit.num_params();
        let noisy = inst.circuit.clone().with_uniform_noise(Channel::global_depol(inst.circuit.n_qubits(), p)?)?;
        let clean = qfim_of_circuit(&inst.circuit, &inst.theta, &inst.rho, ctx.tolerance)?;
        let dirty = qfim_of_circuit(&noisy, &inst.theta, &inst.rho, ctx.tolerance)?;
        let bound = (1.0 - p).powi(m as i32 + 1) * clean.lambda_max() + 1e-9;
        margins.push(bound - dirty.lambda_max());
    }
    Ok(PropertyResult::from_margins("global_depol_eigenvalue_bound", &margins, "eigenvalue_bound", 1e-9, String::new()))
}

/// Direct simulation against the closed form for `n = 2`, `M = 4`.
pub fn check_closed_form(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(10);
    let mut margins = Vec::new();
    for k in 0..ctx.spec.trials.max(2) {
        let p = [0.05, 0.2][k % 2];
        let generators: Vec<Operator> = (0..3).map(|_| random_traceless_hermitian(4, &mut rng).scale_real(2.0)).collect();
        let layers = (0..4).map(|_| rng.below(3)).collect();
        let c = NoisyCircuit::new(2, generators, layers)?;
        let rho = random_density(4, 1 + rng.below(4), &mut rng);
        let theta = ParameterVector::new(rng.angles(4));
        let (out, derivs) = evolve_with_derivatives(&c, &theta, &rho)?;
        let closed = noisy_qfim_closed_form_global_depol(&out, &derivs, p, 4)?;
        let noisy = c.with_uniform_noise(Channel::global_depol(2, p)?)?;
        let direct = qfim_of_circuit(&noisy, &theta, &rho, ctx.tolerance)?.matrix;
        margins.push(1e-8 - closed.max_abs_diff(&direct));
    }
    Ok(PropertyResult::from_margins("global_depol_closed_form", &margins, "closed_form", 1e-8, String::new()))
}

/// `δᵀF̃δ ≤ 8 ln 2 · (1−p)^{2(M+1)} · S(ρ‖I/d)` for random unit `δ`, local depolarization
/// after random Pauli channels in every slot.
pub fn check_pauli_noise_quadratic_bound(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(11);
    let mut margins = Vec::new();
    let mut worst_label = String::new();
    let mut worst = f64::INFINITY;
    for k in 0..ctx.spec.trials {
        let inst = family_instance(k, &mut rng);
        let p = THEOREM_P[(k / 2) % THEOREM_P.len()];
        let m = inst.circuit.num_params();
        let noisy = noisy_slots(&inst.circuit, p, &mut rng)?;
        let f = qfim_of_circuit(&noisy, &inst.theta, &inst.rho, ctx.tolerance)?.matrix;
        let bound = 8.0 * 2f64.ln() * (1.0 - p).powi(2 * (m as i32 + 1)) * relative_entropy_to_mixed(&inst.rho)?;
        for _ in 0..ctx.spec.directions {
            let delta = random_unit_vector(m, &mut rng);
            let margin = bound - f.quadratic_form(&delta);
            if margin < worst {
                worst = margin;
                worst_label = format!("{} p={p}", inst.label);
            }
            margins.push(margin);
        }
    }
    let detail = format!("worst instance {worst_label}");
    Ok(PropertyResult::from_margins("pauli_noise_quadratic_form_bound", &margins, "bound", 0.0, detail))
}

/// `D(ρ, I/d) ≤ √(S(ρ‖I/d)/2)` on noisy circuit outputs.
pub fn check_pinsker(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(12);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials {
        let inst = random_noisy_instance(&mut rng, ctx.spec.max_qubits)?;
        let out = evolve(&inst.circuit, &inst.theta, &inst.rho)?;
        let mixed = DensityMatrix::maximally_mixed(out.dim());
        let s = relative_entropy_to_mixed(&out)?;
        margins.push((s / 2.0).sqrt() + 1e-12 - trace_distance(&out, &mixed)?);
    }
    Ok(PropertyResult::from_margins("pinsker", &margins, "pinsker", 1e-12, String::new()))
}

/// `B ≤ 2D` on random pairs.
pub fn check_bures_trace(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(13);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials.max(200) {
        let n = 1 + rng.below(ctx.spec.max_qubits.max(1));
        let d = 1 << n;
        let a = random_density(d, 1 + rng.below(d), &mut rng);
        let b = random_density(d, 1 + rng.below(d), &mut rng);
        margins.push(2.0 * trace_distance(&a, &b)? + 1e-10 - bures_distance(&a, &b)?);
    }
    Ok(PropertyResult::from_margins("bures_below_twice_trace_distance", &margins, "bures_trace", 1e-10, String::new()))
}

/// `S(N(ρ)‖I/d) ≤ (1−p)² S(ρ‖I/d)` for `N` = local depolarization after a random Pauli channel.
pub fn check_relative_entropy_contraction(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(14);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.contraction_trials {
        let n = 1 + rng.below(ctx.spec.max_qubits.max(1));
        let d = 1 << n;
        let rho = random_density(d, 1 + rng.below(d), &mut rng);
        let p = rng.uniform_range(0.001, 0.999);
        let ch = local_depol_pauli(n, p, &mut rng)?;
        let after = relative_entropy_to_mixed(&ch.apply(&rho)?)?;
        let before = relative_entropy_to_mixed(&rho)?;
        margins.push((1.0 - p).powi(2) * before + 1e-10 - after);
    }
    Ok(PropertyResult::from_margins("relative_entropy_contraction", &margins, "contraction", 1e-10, String::new()))
}

/// Qubit-dependent local depolarization equals uniform depolarization at `q = min p_j` followed
/// by the residual channel, as superoperators.
pub fn check_depol_decomposition(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(15);
    let mut margins = Vec::new();
    for _ in 0..20 {
        let probs: Vec<f64> = (0..2).map(|_| rng.uniform_range(0.001, 0.999)).collect();
        let original = Channel::local_depol(probs.clone())?;
        let (uniform, residual) = decompose_local_depol(&probs)?;
        let composed = compose(&uniform, &residual)?;
        margins.push(1e-12 - original.superoperator()?.max_abs_diff(&composed.superoperator()?));
    }
    Ok(PropertyResult::from_margins("local_depol_decomposition", &margins, "superoperator", 1e-12, String::new()))
}

/// Analytic derivative against a central difference with `h = 1e-5`.
pub fn check_derivative_oracle(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(16);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials {
        let inst = random_noisy_instance(&mut rng, ctx.spec.max_qubits)?;
        let (_, derivs) = evolve_with_derivatives(&inst.circuit, &inst.theta, &inst.rho)?;
        let mut worst: f64 = 0.0;
        for (i, d) in derivs.iter().enumerate() {
            let fd = derivative_fd(&inst.circuit, &inst.theta, &inst.rho, i, 1e-5)?;
            worst = worst.max(d.max_abs_diff(&fd));
        }
        margins.push(1e-6 - worst);
    }
    Ok(PropertyResult::from_margins("derivative_matches_finite_difference", &margins, "fd", 1e-6, String::new()))
}

/// Linear loss with a traceless observable shrinks by exactly `(1−p)^{M+1}`.
pub fn check_loss_flattening(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(17);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials {
        let inst = random_instance(&mut rng, ctx.spec.max_qubits);
        let obs = random_traceless_hermitian(inst.rho.dim(), &mut rng);
        let p = rng.uniform_range(0.0, 0.5);
        let m = inst.circuit.num_params();
        let noisy = inst.circuit.clone().with_uniform_noise(Channel::global_depol(inst.circuit.n_qubits(), p)?)?;
        let clean = loss_linear(&inst.circuit, &inst.theta, &inst.rho, &obs)?;
        let dirty = loss_linear(&noisy, &inst.theta, &inst.rho, &obs)?;
        margins.push(1e-12 - (dirty - (1.0 - p).powi(m as i32 + 1) * clean).abs());
    }
    Ok(PropertyResult::from_margins("linear_loss_flattening", &margins, "loss", 1e-12, String::new()))
}

/// `rank F ≥ rank I` for the computational-basis classical Fisher information.
pub fn check_classical_rank(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(18);
    let mut margins = Vec::new();
    for _ in 0..ctx.spec.trials {
        let inst = random_noisy_instance(&mut rng, ctx.spec.max_qubits)?;
        let q = qfim_of_circuit(&inst.circuit, &inst.theta, &inst.rho, ctx.tolerance)?;
        let c = crate::qfim::QfimReport::from_matrix(classical_fim(&inst.circuit, &inst.theta, &inst.rho)?, ctx.tolerance)?;
        margins.push(q.rank as f64 - c.rank as f64);
    }
    Ok(PropertyResult::from_margins("quantum_rank_bounds_classical_rank", &margins, "rank_abs/rank_rel", ctx.tolerance.rel, rank_detail(ctx)))
}

/// Fitted exponent of `B(ρ̃_θ, ρ̃_{θ+tδ})` against `t ∈ {1e-2, 1e-3, 1e-4}` lies in `[1.95, 2.05]`.
/// The detail reports the constant `B / (t² δᵀF̃δ)` at the smallest step.
pub fn check_bures_scaling(ctx: &VerifyContext) -> Result<PropertyResult> {
    let mut rng = ctx.rng(19);
    let mut margins = Vec::new();
    let mut constants = Vec::new();
    for _ in 0..ctx.spec.trials.min(20) {
        let inst = random_noisy_instance(&mut rng, ctx.spec.max_qubits.min(2))?;
        let m = inst.circuit.num_params();
        let f = qfim_of_circuit(&inst.circuit, &inst.theta, &inst.rho, ctx.tolerance)?;
        // stay inside the range of F so the quadratic term is present
        let delta = f.eigenvectors[0].clone();
        if f.lambda_max() < 1e-6 || delta.len() != m {
            continue;
        }
        let base = evolve(&inst.circuit, &inst.theta, &inst.rho)?;
        let steps = [1e-2, 1e-3, 1e-4];
        let mut logs = Vec::new();
        for &t in &steps {
            let moved = evolve(&inst.circuit, &inst.theta.displaced(&delta, t), &inst.rho)?;
            logs.push((t.ln(), bures_distance(&base, &moved)?.ln()));
        }
        let slope = super::fit_slope(&logs.iter().map(|x| x.0).collect::<Vec<_>>(), &logs.iter().map(|x| x.1).collect::<Vec<_>>());
        margins.push(0.05 - (slope - 2.0).abs());
        constants.push(logs[2].1.exp() / (1e-8 * f.matrix.quadratic_form(&delta)));
    }
    let mean_c = constants.iter().sum::<f64>() / constants.len().max(1) as f64;
    Ok(PropertyResult::from_margins("bures_quadratic_scaling", &margins, "exponent", 0.05, format!("mean B/(t²·δᵀFδ) = {mean_c:.4}")))
}

/// Every check, in a fixed order.
pub fn run_all(ctx: &VerifyContext) -> Result<Vec<PropertyResult>> {
    let checks: [fn(&VerifyContext) -> Result<PropertyResult>; 19] = [
        check_symmetry,
        check_psd,
        check_convexity,
        check_unitary_invariance,
        check_monotonicity,
        check_pure_mixed_consistency,
        check_terminal_channel_rank,
        check_global_depol_rank,
        check_global_depol_eigenvalue_bound,
        check_closed_form,
        check_pauli_noise_quadratic_bound,
        check_pinsker,
        check_bures_trace,
        check_relative_entropy_contraction,
        check_depol_decomposition,
        check_derivative_oracle,
        check_loss_flattening,
        check_classical_rank,
        check_bures_scaling,
    ];
    use rayon::prelude::*;
    checks.par_iter().map(|f| f(ctx)).collect()
}

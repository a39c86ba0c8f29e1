//! Parametrized circuits `U(θ) = ∏ e^{−iθ_m H_m}` with noise slots interleaved around every gate.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::tensor::{exp_from_eig, hermitian_eig, kron_vec, DensityMatrix, EigenDecomposition, Operator, TAU_HERM};

/// Trainable angles, one per gate (radians).
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector {
    values: Vec<f64>,
}

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(m: usize) -> Self {
        Self { values: vec![0.0; m] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// `θ + t·e_i`
    pub fn shifted(&self, i: usize, t: f64) -> Self {
        let mut values = self.values.clone();
        values[i] += t;
        Self { values }
    }

    /// `θ + t·direction`
    pub fn displaced(&self, direction: &[f64], t: f64) -> Self {
        Self { values: self.values.iter().zip(direction).map(|(a, b)| a + t * b).collect() }
    }
}

impl From<Vec<f64>> for ParameterVector {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

/// Gate sequence over a generator set, with `M + 1` noise slots.
///
/// Slot `m` acts before gate `m` and slot `M` acts after the last gate, so the output is
/// `N_{M+1} ∘ C_M ∘ N_M ∘ … ∘ C_1 ∘ N_1 (ρ)`.
#[derive(Clone, Debug)]
pub struct NoisyCircuit {
    n_qubits: usize,
    generators: Vec<Operator>,
    generator_eigs: Vec<EigenDecomposition>,
    layers: Vec<usize>,
    noise_slots: Vec<Channel>,
}

impl NoisyCircuit {
    /// Noiseless circuit. Generators must be Hermitian and traceless; `layers` indexes into them.
    pub fn new(n_qubits: usize, generators: Vec<Operator>, layers: Vec<usize>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut generator_eigs = Vec::with_capacity(generators.len());
        for g in &generators {
            if g.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, found: g.dim() });
            }
            let dev = g.hermitian_deviation();
            if dev > TAU_HERM {
                return Err(Error::NotHermitian { deviation: dev });
            }
            let tr = g.trace().norm();
            if tr > 1e-9 {
                return Err(Error::NotTraceless { trace: tr });
            }
            generator_eigs.push(hermitian_eig(g)?);
        }
        if let Some(&bad) = layers.iter().find(|&&l| l >= generators.len()) {
            return Err(Error::IndexOutOfRange { index: bad, len: generators.len() });
        }
        let noise_slots = vec![Channel::identity(n_qubits); layers.len() + 1];
        Ok(Self { n_qubits, generators, generator_eigs, layers, noise_slots })
    }

    /// Replaces all `M + 1` noise slots.
    pub fn with_noise_slots(mut self, slots: Vec<Channel>) -> Result<Self> {
        if slots.len() != self.layers.len() + 1 {
            return Err(Error::LengthMismatch { expected: self.layers.len() + 1, found: slots.len() });
        }
        if let Some(bad) = slots.iter().find(|s| s.n_qubits() != self.n_qubits) {
            return Err(Error::DimMismatch { expected: self.n_qubits, found: bad.n_qubits() });
        }
        self.noise_slots = slots;
        Ok(self)
    }

    /// Places the same channel before and after every gate.
    pub fn with_uniform_noise(self, channel: Channel) -> Result<Self> {
        let slots = vec![channel; self.layers.len() + 1];
        self.with_noise_slots(slots)
    }

    /// Same gates, identity noise everywhere.
    pub fn noiseless(&self) -> Self {
        let mut c = self.clone();
        c.noise_slots = vec![Channel::identity(self.n_qubits); self.layers.len() + 1];
        c
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Number of gates (and parameters) `M`.
    pub fn num_params(&self) -> usize {
        self.layers.len()
    }

    pub fn generators(&self) -> &[Operator] {
        &self.generators
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn noise_slots(&self) -> &[Channel] {
        &self.noise_slots
    }

    pub fn is_noiseless(&self) -> bool {
        self.noise_slots.iter().all(Channel::is_identity)
    }

    /// Generator of gate `m` (0-based).
    pub fn gate_generator(&self, m: usize) -> &Operator {
        &self.generators[self.layers[m]]
    }

    /// `e^{−iθ H_m}`
    pub fn gate_unitary(&self, m: usize, theta: f64) -> Operator {
        exp_from_eig(&self.generator_eigs[self.layers[m]], theta)
    }

    fn check_inputs(&self, theta: &ParameterVector, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: rho.dim() });
        }
        if theta.len() != self.num_params() {
            return Err(Error::LengthMismatch { expected: self.num_params(), found: theta.len() });
        }
        Ok(())
    }

    fn apply_slot(&self, slot: usize, a: Operator) -> Result<Operator> {
        let ch = &self.noise_slots[slot];
        if ch.is_identity() {
            Ok(a)
        } else {
            ch.apply_operator(&a)
        }
    }
}

/// Output state `ρ̃_θ` of the noisy circuit.
pub fn evolve(c: &NoisyCircuit, theta: &ParameterVector, rho: &DensityMatrix) -> Result<DensityMatrix> {
    c.check_inputs(theta, rho)?;
    let mut state = c.apply_slot(0, rho.op().clone())?;
    for m in 0..c.num_params() {
        state = state.conjugate_by(&c.gate_unitary(m, theta.as_slice()[m]));
        state = c.apply_slot(m + 1, state)?;
    }
    Ok(DensityMatrix::new_unchecked(state))
}

/// Intermediate states: entry `m` is the state just before gate `m` (after slot `m`), and the
/// last entry is the output.
pub fn evolve_trace(c: &NoisyCircuit, theta: &ParameterVector, rho: &DensityMatrix) -> Result<Vec<DensityMatrix>> {
    c.check_inputs(theta, rho)?;
    let mut states = Vec::with_capacity(c.num_params() + 1);
    let mut state = c.apply_slot(0, rho.op().clone())?;
    for m in 0..c.num_params() {
        states.push(DensityMatrix::new_unchecked(state.clone()));
        state = state.conjugate_by(&c.gate_unitary(m, theta.as_slice()[m]));
        state = c.apply_slot(m + 1, state)?;
    }
    states.push(DensityMatrix::new_unchecked(state));
    Ok(states)
}

/// Analytic `∂ρ̃_θ/∂θ_i` (0-based `i`): the gate derivative `−i[H_i, ·]` is inserted right
/// after gate `i` and the remainder of the channel chain is applied to it.
pub fn derivative(c: &NoisyCircuit, theta: &ParameterVector, rho: &DensityMatrix, i: usize) -> Result<Operator> {
    c.check_inputs(theta, rho)?;
    if i >= c.num_params() {
        return Err(Error::IndexOutOfRange { index: i, len: c.num_params() });
    }
    let th = theta.as_slice();
    let mut state = c.apply_slot(0, rho.op().clone())?;
    for m in 0..i {
        state = state.conjugate_by(&c.gate_unitary(m, th[m]));
        state = c.apply_slot(m + 1, state)?;
    }
    state = state.conjugate_by(&c.gate_unitary(i, th[i]));
    let mut deriv = commutator_derivative(c.gate_generator(i), &state);
    deriv = c.apply_slot(i + 1, deriv)?;
    for m in i + 1..c.num_params() {
        deriv = deriv.conjugate_by(&c.gate_unitary(m, th[m]));
        deriv = c.apply_slot(m + 1, deriv)?;
    }
    Ok(deriv)
}

/// Output state and all `M` analytic derivatives in one forward pass.
pub fn evolve_with_derivatives(
    c: &NoisyCircuit,
    theta: &ParameterVector,
    rho: &DensityMatrix,
) -> Result<(DensityMatrix, Vec<Operator>)> {
    c.check_inputs(theta, rho)?;
    let th = theta.as_slice();
    let mut state = c.apply_slot(0, rho.op().clone())?;
    let mut derivs: Vec<Operator> = Vec::with_capacity(c.num_params());
    for m in 0..c.num_params() {
        let u = c.gate_unitary(m, th[m]);
        state = state.conjugate_by(&u);
        for d in derivs.iter_mut() {
            *d = d.conjugate_by(&u);
        }
        derivs.push(commutator_derivative(c.gate_generator(m), &state));
        state = c.apply_slot(m + 1, state)?;
        for d in derivs.iter_mut() {
            *d = c.apply_slot(m + 1, std::mem::replace(d, Operator::zeros(0)))?;
        }
    }
    Ok((DensityMatrix::new_unchecked(state), derivs))
}

/// `−i[H, ρ]`
fn commutator_derivative(h: &Operator, rho: &Operator) -> Operator {
    Operator::commutator(h, rho).scale(C64::new(0.0, -1.0))
}

/// Central difference `(ρ̃_{θ+h e_i} − ρ̃_{θ−h e_i}) / 2h`.
pub fn derivative_fd(c: &NoisyCircuit, theta: &ParameterVector, rho: &DensityMatrix, i: usize, h: f64) -> Result<Operator> {
    if !(h > 0.0) {
        return Err(Error::OutOfRange { what: "finite-difference step", value: h });
    }
    if i >= theta.len() {
        return Err(Error::IndexOutOfRange { index: i, len: theta.len() });
    }
    let plus = evolve(c, &theta.shifted(i, h), rho)?;
    let minus = evolve(c, &theta.shifted(i, -h), rho)?;
    Ok((plus.op() - minus.op()).scale_real(0.5 / h))
}

/// `|+⟩`
pub fn plus_state() -> Vec<C64> {
    let s = 1.0 / 2f64.sqrt();
    vec![C64::new(s, 0.0), C64::new(s, 0.0)]
}

/// Single-qubit model: `ρ = 0.9|+⟩⟨+| + 0.1·I/2` through `R_x(θ₄)R_z(θ₃)R_x(θ₂)R_z(θ₁)` with
/// generators `Z/2` and `X/2`.
pub fn toy_model() -> (NoisyCircuit, DensityMatrix) {
    let z = Operator::pauli_z().scale_real(0.5);
    let x = Operator::pauli_x().scale_real(0.5);
    let circuit = NoisyCircuit::new(1, vec![z, x], vec![0, 1, 0, 1]).expect("toy generators are valid");
    let plus = plus_state();
    let rho = &Operator::outer(&plus, &plus).scale_real(0.9) + &Operator::identity(2).scale_real(0.05);
    (circuit, DensityMatrix::new(rho).expect("toy state is valid"))
}

/// The three parameter points of the single-qubit study.
pub fn toy_parameter_points() -> [ParameterVector; 3] {
    [
        ParameterVector::new(vec![0.0; 4]),
        ParameterVector::new(vec![PI / 2.0, 0.0, 0.0, 0.0]),
        ParameterVector::new(vec![PI / 2.0, PI / 4.0, PI / 4.0, PI / 4.0]),
    ]
}

/// Hamiltonian variational ansatz for the periodic transverse-field Ising model:
/// `H₀ = Σ Z_i Z_{i+1}` (with `Z_{n+1} ≡ Z_1`), `H₁ = Σ X_i`, gate order `(H₀, H₁)` repeated `layers` times.
pub fn hva_tfim(n: usize, layers: usize) -> Result<NoisyCircuit> {
    if n < 2 {
        return Err(Error::OutOfRange { what: "HVA qubit count", value: n as f64 });
    }
    if layers < 1 {
        return Err(Error::OutOfRange { what: "HVA layer count", value: layers as f64 });
    }
    let (h0, h1) = tfim_generators(n)?;
    let seq = (0..layers).flat_map(|_| [0usize, 1]).collect();
    NoisyCircuit::new(n, vec![h0, h1], seq)
}

/// `(Σ Z_i Z_{i+1}, Σ X_i)` with periodic boundary.
pub fn tfim_generators(n: usize) -> Result<(Operator, Operator)> {
    let d = 1usize << n;
    let mut h0 = Operator::zeros(d);
    for k in 0..d {
        let mut e = 0.0;
        for i in 0..n {
            let a = (k >> (n - 1 - i)) & 1;
            let b = (k >> (n - 1 - (i + 1) % n)) & 1;
            e += if a == b { 1.0 } else { -1.0 };
        }
        h0.set(k, k, C64::new(e, 0.0));
    }
    let mut h1 = Operator::zeros(d);
    for q in 1..=n {
        h1 = &h1 + &Operator::single_qubit(n, q, &Operator::pauli_x())?;
    }
    Ok((h0, h1))
}

/// `|+⟩^{⊗n}`
pub fn plus_product_state(n: usize) -> DensityMatrix {
    let mut v = vec![C64::new(1.0, 0.0)];
    for _ in 0..n {
        v = kron_vec(&v, &plus_state());
    }
    DensityMatrix::from_pure(&v).expect("normalized")
}

/// `Tr[ρ̃_θ O]` for a Hermitian observable.
pub fn loss_linear(c: &NoisyCircuit, theta: &ParameterVector, rho: &DensityMatrix, obs: &Operator) -> Result<f64> {
    let dev = obs.hermitian_deviation();
    if dev > TAU_HERM {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let out = evolve(c, theta, rho)?;
    if obs.dim() != out.dim() {
        return Err(Error::DimMismatch { expected: out.dim(), found: obs.dim() });
    }
    Ok(out.op().matmul(obs).trace().re)
}

/// `(Tr[ρX], Tr[ρY], Tr[ρZ])` of a single-qubit state.
pub fn bloch_coords(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, found: rho.dim() });
    }
    let r = rho.op();
    Ok([
        2.0 * r.get(0, 1).re,
        -2.0 * r.get(0, 1).im,
        (r.get(0, 0) - r.get(1, 1)).re,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::UnitalPauliChannel;

    fn toy_noisy(p: f64) -> (NoisyCircuit, DensityMatrix) {
        let (c, rho) = toy_model();
        let c = c.with_uniform_noise(Channel::Pauli(UnitalPauliChannel::bit_flip(p).unwrap())).unwrap();
        (c, rho)
    }

    #[test]
    fn zero_angles_without_noise_is_identity() {
        let (c, rho) = toy_model();
        let out = evolve(&c, &ParameterVector::zeros(4), &rho).unwrap();
        assert!(out.op().max_abs_diff(rho.op()) < 1e-15);
    }

    #[test]
    fn bit_flip_leaves_toy_state_fixed_at_theta1() {
        let (c, rho) = toy_noisy(0.3);
        let out = evolve(&c, &toy_parameter_points()[0], &rho).unwrap();
        assert!(out.op().max_abs_diff(rho.op()) < 1e-15);
    }

    #[test]
    fn rz_pi_maps_plus_to_minus_component() {
        let (c, rho) = toy_model();
        let out = evolve(&c, &ParameterVector::new(vec![PI, 0.0, 0.0, 0.0]), &rho).unwrap();
        // 0.9|−⟩⟨−| + 0.05 I
        let expected = Operator::from_real(2, &[0.5, -0.45, -0.45, 0.5]).unwrap();
        assert!(out.op().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn evolve_checks_lengths() {
        let (c, rho) = toy_model();
        assert!(matches!(evolve(&c, &ParameterVector::zeros(3), &rho), Err(Error::LengthMismatch { .. })));
        assert!(matches!(evolve(&c, &ParameterVector::zeros(4), &plus_product_state(2)), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn x_generator_derivatives_vanish_at_theta1() {
        let (c, rho) = toy_model();
        let theta = &toy_parameter_points()[0];
        for i in [1, 3] {
            let d = derivative(&c, theta, &rho, i).unwrap();
            assert!(d.max_abs() < 1e-15, "gate {i}");
        }
    }

    #[test]
    fn rz_derivative_on_plus() {
        let plus = plus_state();
        let rho = DensityMatrix::from_pure(&plus).unwrap();
        let c = NoisyCircuit::new(1, vec![Operator::pauli_z().scale_real(0.5)], vec![0]).unwrap();
        let d = derivative(&c, &ParameterVector::zeros(1), &rho, 0).unwrap();
        // −i[Z/2, |+⟩⟨+|] = [[0, −i/2], [i/2, 0]] = Y/2
        let expected = Operator::pauli_y().scale_real(0.5);
        assert!(d.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn commuting_generator_gives_zero() {
        let rho = DensityMatrix::maximally_mixed(2);
        let c = NoisyCircuit::new(1, vec![Operator::pauli_x()], vec![0]).unwrap();
        assert!(derivative(&c, &ParameterVector::new(vec![0.4]), &rho, 0).unwrap().max_abs() < 1e-16);
        assert!(matches!(derivative(&c, &ParameterVector::new(vec![0.4]), &rho, 1), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn single_pass_derivatives_match_individual() {
        let (c, rho) = toy_noisy(0.1);
        let theta = &toy_parameter_points()[2];
        let (_, all) = evolve_with_derivatives(&c, theta, &rho).unwrap();
        for (i, d) in all.iter().enumerate() {
            assert!(d.max_abs_diff(&derivative(&c, theta, &rho, i).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn fd_converges_quadratically() {
        let (c, rho) = toy_noisy(0.1);
        let theta = ParameterVector::new(vec![0.3, 1.1, -0.7, 2.0]);
        let exact = derivative(&c, &theta, &rho, 1).unwrap();
        let e3 = derivative_fd(&c, &theta, &rho, 1, 1e-3).unwrap().max_abs_diff(&exact);
        let e4 = derivative_fd(&c, &theta, &rho, 1, 1e-4).unwrap().max_abs_diff(&exact);
        // h² scaling: a tenfold smaller step shrinks the error about a hundredfold
        assert!(e4 < e3 / 50.0, "e3={e3:e} e4={e4:e}");
        assert!(derivative_fd(&c, &theta, &rho, 1, 0.0).is_err());
    }

    #[test]
    fn toy_model_shape() {
        let (c, rho) = toy_model();
        assert_eq!(c.num_params(), 4);
        let e = hermitian_eig(rho.op()).unwrap().eigenvalues;
        assert!((e[0] - 0.05).abs() < 1e-14 && (e[1] - 0.95).abs() < 1e-14);
    }

    #[test]
    fn hva_shapes() {
        let c = hva_tfim(4, 3).unwrap();
        assert_eq!(c.num_params(), 6);
        let (h0, h1) = tfim_generators(2).unwrap();
        let zz = crate::tensor::kron(&Operator::pauli_z(), &Operator::pauli_z());
        assert!(h0.max_abs_diff(&zz.scale_real(2.0)) < 1e-15);
        let e = hermitian_eig(&h1).unwrap().eigenvalues;
        for (a, b) in e.iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(hva_tfim(1, 2).is_err());
        assert!(hva_tfim(3, 0).is_err());
    }

    #[test]
    fn loss_cases() {
        let (c, rho) = toy_model();
        let theta = &toy_parameter_points()[2];
        let id = Operator::identity(2);
        assert!((loss_linear(&c, theta, &rho, &id).unwrap() - 1.0).abs() < 1e-15);
        let p = 0.2;
        let noisy = c.clone().with_uniform_noise(Channel::global_depol(1, p).unwrap()).unwrap();
        let z = Operator::pauli_z();
        let clean = loss_linear(&c, theta, &rho, &z).unwrap();
        let dirty = loss_linear(&noisy, theta, &rho, &z).unwrap();
        assert!((dirty - (1.0 - p).powi(5) * clean).abs() < 1e-12);
        assert!((loss_linear(&noisy, theta, &rho, &id).unwrap() - 1.0).abs() < 1e-15);
        let bad = Operator::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(loss_linear(&c, theta, &rho, &bad), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn bloch_cases() {
        assert_eq!(bloch_coords(&DensityMatrix::maximally_mixed(2)).unwrap(), [0.0, 0.0, 0.0]);
        let plus = DensityMatrix::from_pure(&plus_state()).unwrap();
        let b = bloch_coords(&plus).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-15 && b[1].abs() < 1e-15 && b[2].abs() < 1e-15);
        let (_, rho) = toy_model();
        let b = bloch_coords(&rho).unwrap();
        assert!((b[0] - 0.9).abs() < 1e-15 && b[1].abs() < 1e-15 && b[2].abs() < 1e-15);
        assert!(bloch_coords(&DensityMatrix::maximally_mixed(4)).is_err());
    }

    #[test]
    fn rejects_non_traceless_generators() {
        assert!(matches!(NoisyCircuit::new(1, vec![Operator::identity(2)], vec![0]), Err(Error::NotTraceless { .. })));
    }
}

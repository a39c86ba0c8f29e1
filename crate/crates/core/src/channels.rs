//! Quantum channels: unital Pauli mixtures, depolarizing noise, unitary channels and
//! compositions of those, together with superoperator and Choi materialization.
//!
//! All channels act on operators through their linear extension, so they can be applied
//! to derivative operators as well as to states.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eig, DensityMatrix, Operator, TAU_UNIT};

/// Largest register for superoperator and Choi materialization (`d² = 1024`).
pub const MAX_SUPEROPERATOR_QUBITS: usize = 5;

/// Tolerance on the probability sum of a Pauli channel.
pub const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// Complete-positivity tolerance on the Choi matrix spectrum.
pub const CHOI_TOL: f64 = 1e-9;

/// Pauli string `X^α Z^β`.
///
/// Bit `n − j` of `x`/`z` holds the exponent on qubit `j` (1-based), matching the
/// basis-index convention of [`crate::tensor`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    /// Builds `X^α Z^β` from per-qubit exponents (qubit 1 first).
    pub fn new(alpha: &[bool], beta: &[bool]) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::LengthMismatch { expected: alpha.len(), found: beta.len() });
        }
        let n = alpha.len();
        if n > 63 {
            return Err(Error::TooLarge { n_qubits: n, max: 63 });
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for j in 0..n {
            if alpha[j] {
                x |= 1 << (n - 1 - j);
            }
            if beta[j] {
                z |= 1 << (n - 1 - j);
            }
        }
        Ok(Self { n, x, z })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, x: 0, z: 0 }
    }

    /// Parses labels such as `"XIZ"`. `Y` stands for `X·Z` (that is `−iY`), which has the
    /// same conjugation action as `Y`.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        for ch in label.chars() {
            let (a, b) = match ch {
                'I' | 'i' => (false, false),
                'X' | 'x' => (true, false),
                'Z' | 'z' => (false, true),
                'Y' | 'y' => (true, true),
                other => return Err(Error::InvalidChannel(format!("unknown Pauli label {other:?}"))),
            };
            alpha.push(a);
            beta.push(b);
        }
        Self::new(&alpha, &beta)
    }

    /// Single-qubit Pauli label (`'X'`, `'Y'`, `'Z'`) on `qubit` (1-based) of an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, label: char) -> Result<Self> {
        if qubit == 0 || qubit > n {
            return Err(Error::IndexOutOfRange { index: qubit, len: n + 1 });
        }
        let s: String = (1..=n).map(|q| if q == qubit { label } else { 'I' }).collect();
        Self::from_label(&s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> Vec<bool> {
        (0..self.n).map(|j| (self.x >> (self.n - 1 - j)) & 1 == 1).collect()
    }

    pub fn beta(&self) -> Vec<bool> {
        (0..self.n).map(|j| (self.z >> (self.n - 1 - j)) & 1 == 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn label(&self) -> String {
        self.alpha()
            .into_iter()
            .zip(self.beta())
            .map(|(a, b)| match (a, b) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            })
            .collect()
    }

    /// Dense `X^α Z^β`; `P|k⟩ = (−1)^{β·k} |k ⊕ α⟩`.
    pub fn materialize(&self) -> Operator {
        let d = 1usize << self.n;
        let mut op = Operator::zeros(d);
        for k in 0..d {
            let sign = if (self.z & k as u64).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            op.set(k ^ self.x as usize, k, C64::new(sign, 0.0));
        }
        op
    }

    /// `P A P†` in `O(d²)`: entry `(i, j)` is `(−1)^{β·(i⊕j)} A[i⊕α, j⊕α]`.
    pub fn conjugate(&self, a: &Operator) -> Operator {
        let d = a.dim();
        let mut out = Operator::zeros(d);
        let x = self.x as usize;
        for i in 0..d {
            for j in 0..d {
                let v = a.get(i ^ x, j ^ x);
                let odd = (self.z & (i ^ j) as u64).count_ones() % 2 == 1;
                out.set(i, j, if odd { -v } else { v });
            }
        }
        out
    }

    /// `+1` if the strings commute, `−1` otherwise.
    pub fn commutation_sign(&self, other: &PauliString) -> f64 {
        let k = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        if k.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

/// Probability mixture of Pauli conjugations, stored sparsely.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitalPauliChannel {
    n_qubits: usize,
    terms: Vec<(PauliString, f64)>,
}

impl UnitalPauliChannel {
    pub fn new(n_qubits: usize, terms: Vec<(PauliString, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidChannel("Pauli channel needs at least one term".into()));
        }
        let mut sum = 0.0;
        for (s, p) in &terms {
            if s.n_qubits() != n_qubits {
                return Err(Error::DimMismatch { expected: n_qubits, found: s.n_qubits() });
            }
            if !(*p >= 0.0) || *p > 1.0 {
                return Err(Error::InvalidChannel(format!("probability {p} outside [0, 1]")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
            return Err(Error::InvalidChannel(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { n_qubits, terms })
    }

    /// `(1−p)ρ + p XρX` on a single qubit.
    pub fn bit_flip(p: f64) -> Result<Self> {
        Self::bit_flip_on(1, 1, p)
    }

    /// Bit flip on one qubit (1-based) of an `n`-qubit register.
    pub fn bit_flip_on(n: usize, qubit: usize, p: f64) -> Result<Self> {
        check_probability("bit-flip probability", p)?;
        Self::new(n, vec![(PauliString::identity(n), 1.0 - p), (PauliString::single(n, qubit, 'X')?, p)])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(PauliString, f64)] {
        &self.terms
    }

    /// `c_{α'β'} = Σ (−1)^{α'·β} (−1)^{α·β'} p_{αβ}`, the eigenvalue of `X^α' Z^β'` under this channel.
    pub fn transfer_coefficient(&self, target: &PauliString) -> Result<f64> {
        if target.n_qubits() != self.n_qubits {
            return Err(Error::DimMismatch { expected: self.n_qubits, found: target.n_qubits() });
        }
        Ok(self.terms.iter().map(|(s, p)| target.commutation_sign(s) * p).sum())
    }

    /// True when every non-identity transfer coefficient lies in `(−1 + slack, 1 − slack)`.
    /// Enumerates all `4ⁿ` strings.
    pub fn has_unique_fixed_point(&self, slack: f64) -> bool {
        let n = self.n_qubits;
        let d = 1u64 << n;
        for x in 0..d {
            for z in 0..d {
                if x == 0 && z == 0 {
                    continue;
                }
                let s = PauliString { n, x, z };
                let c = self.transfer_coefficient(&s).expect("same register");
                if c.abs() >= 1.0 - slack {
                    return false;
                }
            }
        }
        true
    }

    fn apply_op(&self, a: &Operator) -> Operator {
        let mut out = Operator::zeros(a.dim());
        for (s, p) in &self.terms {
            if *p == 0.0 {
                continue;
            }
            let term = if s.is_identity() { a.clone() } else { s.conjugate(a) };
            for (o, t) in out.data_mut().iter_mut().zip(term.data()) {
                *o += t * *p;
            }
        }
        out
    }
}

fn check_probability(what: &'static str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { what, value: p });
    }
    Ok(())
}

/// A completely positive trace-preserving map on an `n`-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub enum Channel {
    Unitary(Operator),
    Pauli(UnitalPauliChannel),
    /// `(1−p)ρ + p Tr[ρ] I/d`
    GlobalDepol { n_qubits: usize, p: f64 },
    /// `(1−p_j)ρ + p_j I_j/2 ⊗ Tr_j ρ` applied on every qubit `j`.
    LocalDepol { probs: Vec<f64> },
    /// Channels applied in list order (index 0 acts first). Empty means identity.
    Composite { n_qubits: usize, channels: Vec<Channel> },
}

impl Channel {
    pub fn identity(n_qubits: usize) -> Self {
        Channel::Composite { n_qubits, channels: Vec::new() }
    }

    pub fn unitary(u: Operator) -> Result<Self> {
        if u.n_qubits().is_none() {
            return Err(Error::InvalidChannel(format!("dimension {} is not a power of two", u.dim())));
        }
        let dev = u.unitary_deviation();
        if dev > TAU_UNIT {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Channel::Unitary(u))
    }

    pub fn global_depol(n_qubits: usize, p: f64) -> Result<Self> {
        check_probability("depolarizing probability", p)?;
        Ok(Channel::GlobalDepol { n_qubits, p })
    }

    pub fn local_depol(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidChannel("local depolarizing channel needs at least one qubit".into()));
        }
        for &p in &probs {
            check_probability("depolarizing probability", p)?;
        }
        Ok(Channel::LocalDepol { probs })
    }

    pub fn local_depol_uniform(n_qubits: usize, p: f64) -> Result<Self> {
        Self::local_depol(vec![p; n_qubits])
    }

    /// Independent bit flips with probability `p` on every qubit.
    pub fn bit_flip(n_qubits: usize, p: f64) -> Result<Self> {
        if n_qubits == 1 {
            return Ok(Channel::Pauli(UnitalPauliChannel::bit_flip(p)?));
        }
        let channels = (1..=n_qubits)
            .map(|q| UnitalPauliChannel::bit_flip_on(n_qubits, q, p).map(Channel::Pauli))
            .collect::<Result<Vec<_>>>()?;
        Ok(Channel::Composite { n_qubits, channels })
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            Channel::Unitary(u) => u.n_qubits().expect("validated at construction"),
            Channel::Pauli(p) => p.n_qubits(),
            Channel::GlobalDepol { n_qubits, .. } => *n_qubits,
            Channel::LocalDepol { probs } => probs.len(),
            Channel::Composite { n_qubits, .. } => *n_qubits,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Channel::Composite { channels, .. } => channels.iter().all(Channel::is_identity),
            Channel::GlobalDepol { p, .. } => *p == 0.0,
            Channel::LocalDepol { probs } => probs.iter().all(|&p| p == 0.0),
            _ => false,
        }
    }

    /// Applies the channel to a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::new_unchecked(self.apply_operator(rho.op())?))
    }

    /// Applies the linear extension of the channel to an arbitrary operator.
    pub fn apply_operator(&self, a: &Operator) -> Result<Operator> {
        if a.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: a.dim() });
        }
        Ok(match self {
            Channel::Unitary(u) => a.conjugate_by(u),
            Channel::Pauli(p) => p.apply_op(a),
            Channel::GlobalDepol { p, .. } => {
                let d = a.dim();
                let tr = a.trace();
                let mut out = a.scale_real(1.0 - p);
                for i in 0..d {
                    let v = out.get(i, i) + tr * (*p / d as f64);
                    out.set(i, i, v);
                }
                out
            }
            Channel::LocalDepol { probs } => {
                let mut out = a.clone();
                for (j, &p) in probs.iter().enumerate() {
                    if p != 0.0 {
                        out = local_depolarize_qubit(&out, probs.len(), j + 1, p);
                    }
                }
                out
            }
            Channel::Composite { channels, .. } => {
                let mut out = a.clone();
                for ch in channels {
                    out = ch.apply_operator(&out)?;
                }
                out
            }
        })
    }

    /// `d² × d²` matrix acting on column-stacked operators: `vec(A)[i + d·j] = A[i, j]`.
    pub fn superoperator(&self) -> Result<Operator> {
        let n = self.n_qubits();
        if n > MAX_SUPEROPERATOR_QUBITS {
            return Err(Error::TooLarge { n_qubits: n, max: MAX_SUPEROPERATOR_QUBITS });
        }
        let d = self.dim();
        let dd = d * d;
        let mut s = Operator::zeros(dd);
        for j in 0..d {
            for i in 0..d {
                let mut e = Operator::zeros(d);
                e.set(i, j, C64::new(1.0, 0.0));
                let image = self.apply_operator(&e)?;
                let col = i + d * j;
                for b in 0..d {
                    for a in 0..d {
                        s.set(a + d * b, col, image.get(a, b));
                    }
                }
            }
        }
        Ok(s)
    }

    /// Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ N(|i⟩⟨j|)`.
    pub fn choi(&self) -> Result<Operator> {
        let n = self.n_qubits();
        if n > MAX_SUPEROPERATOR_QUBITS {
            return Err(Error::TooLarge { n_qubits: n, max: MAX_SUPEROPERATOR_QUBITS });
        }
        let d = self.dim();
        let mut j_op = Operator::zeros(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = Operator::zeros(d);
                e.set(i, j, C64::new(1.0, 0.0));
                let image = self.apply_operator(&e)?;
                for a in 0..d {
                    for b in 0..d {
                        j_op.set(i * d + a, j * d + b, image.get(a, b));
                    }
                }
            }
        }
        Ok(j_op)
    }

    /// Weight `∏(1−p)` kept on the input by a global depolarizing channel, `None` for other variants.
    pub fn retained_weight(&self) -> Option<f64> {
        match self {
            Channel::GlobalDepol { p, .. } => Some(1.0 - p),
            _ => None,
        }
    }
}

/// `(1−p)A + p I_j/2 ⊗ Tr_j A` for qubit `j` (1-based) of `n`.
fn local_depolarize_qubit(a: &Operator, n: usize, qubit: usize, p: f64) -> Operator {
    let d = a.dim();
    let mask = 1usize << (n - qubit);
    let mut out = a.scale_real(1.0 - p);
    for i in 0..d {
        for k in 0..d {
            if (i & mask) != (k & mask) {
                continue;
            }
            let (i0, k0) = (i & !mask, k & !mask);
            let reduced = a.get(i0, k0) + a.get(i0 | mask, k0 | mask);
            let v = out.get(i, k) + reduced * (0.5 * p);
            out.set(i, k, v);
        }
    }
    out
}

/// Sequential composition: `inner` acts first, then `outer`.
pub fn compose(outer: &Channel, inner: &Channel) -> Result<Channel> {
    let n = inner.n_qubits();
    if outer.n_qubits() != n {
        return Err(Error::DimMismatch { expected: n, found: outer.n_qubits() });
    }
    let mut channels = Vec::new();
    for ch in [inner, outer] {
        match ch {
            Channel::Composite { channels: inner_list, .. } => channels.extend(inner_list.iter().cloned()),
            other => channels.push(other.clone()),
        }
    }
    Ok(Channel::Composite { n_qubits: n, channels })
}

/// Single global depolarizing channel equivalent to the sequence with probabilities `probs`.
pub fn effective_global_depol(n_qubits: usize, probs: &[f64]) -> Result<Channel> {
    if probs.is_empty() {
        return Err(Error::InvalidChannel("no depolarizing probabilities given".into()));
    }
    let mut retained = 1.0;
    for &p in probs {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::OutOfRange { what: "depolarizing probability", value: p });
        }
        retained *= 1.0 - p;
    }
    Channel::global_depol(n_qubits, 1.0 - retained)
}

/// Splits qubit-dependent local depolarization into a uniform part with `q = min_j p_j`
/// and a residual with `τ_j = (p_j − q)/(1 − q)`. The original channel equals
/// `compose(uniform, residual)` (the two parts commute).
pub fn decompose_local_depol(probs: &[f64]) -> Result<(Channel, Channel)> {
    if probs.is_empty() {
        return Err(Error::InvalidChannel("no depolarizing probabilities given".into()));
    }
    for &p in probs {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::OutOfRange { what: "depolarizing probability", value: p });
        }
    }
    let q = probs.iter().copied().fold(f64::INFINITY, f64::min);
    let tau: Vec<f64> = probs.iter().map(|&p| (p - q) / (1.0 - q)).collect();
    Ok((Channel::local_depol(vec![q; probs.len()])?, Channel::local_depol(tau)?))
}

/// Outcome of [`verify_cptp`].
#[derive(Clone, Debug, Serialize)]
pub struct CptpReport {
    pub trace_preserving: bool,
    /// `max |S† vec(I) − vec(I)|`
    pub trace_deviation: f64,
    pub completely_positive: bool,
    pub choi_min_eigenvalue: f64,
    pub unital: bool,
    /// `max |S vec(I) − vec(I)|`
    pub unital_deviation: f64,
}

impl CptpReport {
    pub fn is_cptp(&self) -> bool {
        self.trace_preserving && self.completely_positive
    }
}

pub fn verify_cptp(ch: &Channel) -> Result<CptpReport> {
    let s = ch.superoperator()?;
    let d = ch.dim();
    let dd = d * d;
    let vec_id: Vec<C64> = (0..dd).map(|k| if k % (d + 1) == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect();
    let dual = s.dagger().matvec(&vec_id);
    let forward = s.matvec(&vec_id);
    let trace_deviation = dual.iter().zip(&vec_id).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let unital_deviation = forward.iter().zip(&vec_id).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let choi = ch.choi()?;
    let choi_min_eigenvalue = hermitian_eig(&choi.hermitian_part())?.eigenvalues[0];
    Ok(CptpReport {
        trace_preserving: trace_deviation <= 1e-10,
        trace_deviation,
        completely_positive: choi_min_eigenvalue >= -CHOI_TOL,
        choi_min_eigenvalue,
        unital: unital_deviation <= 1e-10,
        unital_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;
    use crate::sampling::{random_density, random_pauli_channel, random_unitary};
    use crate::tensor::kron;

    fn ket0() -> DensityMatrix {
        DensityMatrix::new(Operator::diagonal(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])).unwrap()
    }

    #[test]
    fn bit_flip_on_zero() {
        let p = 0.3;
        let ch = Channel::Pauli(UnitalPauliChannel::bit_flip(p).unwrap());
        let out = ch.apply(&ket0()).unwrap();
        let expected = Operator::diagonal(&[C64::new(1.0 - p, 0.0), C64::new(p, 0.0)]);
        assert!(out.op().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn global_depol_fixes_maximally_mixed() {
        let ch = Channel::global_depol(2, 0.4).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(ch.apply(&mixed).unwrap().op().max_abs_diff(mixed.op()) < 1e-16);
    }

    #[test]
    fn local_depol_shrinks_traceless_operator() {
        let p = 0.25;
        let ch = Channel::local_depol_uniform(1, p).unwrap();
        let x = Operator::pauli_x();
        let out = ch.apply_operator(&x).unwrap();
        assert!(out.max_abs_diff(&x.scale_real(1.0 - p)) < 1e-15);
    }

    #[test]
    fn local_depol_matches_kraus_form() {
        let p = 0.2;
        let mut rng = CounterRng::new(3);
        let rho = random_density(4, 4, &mut rng);
        let ch = Channel::local_depol(vec![p, 0.0]).unwrap();
        let out = ch.apply(&rho).unwrap();
        let paulis = [Operator::pauli_x(), Operator::pauli_y(), Operator::pauli_z()];
        let mut expected = rho.op().scale_real(1.0 - 0.75 * p);
        for s in &paulis {
            let s1 = kron(s, &Operator::identity(2));
            expected = &expected + &rho.op().conjugate_by(&s1).scale_real(p / 4.0);
        }
        assert!(out.op().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn transfer_coefficients_of_bit_flip() {
        let p = 0.3;
        let bf = UnitalPauliChannel::bit_flip(p).unwrap();
        let one = |l: &str| bf.transfer_coefficient(&PauliString::from_label(l).unwrap()).unwrap();
        assert_eq!(one("I"), 1.0);
        assert!((one("Z") - (1.0 - 2.0 * p)).abs() < 1e-15);
        assert_eq!(one("X"), 1.0);
        assert!(!bf.has_unique_fixed_point(1e-12));
    }

    #[test]
    fn pauli_channel_is_diagonal_in_pauli_basis() {
        let mut rng = CounterRng::new(11);
        for n in 1..=3 {
            let ch = random_pauli_channel(n, 4, &mut rng);
            let channel = Channel::Pauli(ch.clone());
            let d = 1u64 << n;
            for x in 0..d {
                for z in 0..d {
                    let s = PauliString { n, x, z };
                    let c = ch.transfer_coefficient(&s).unwrap();
                    assert!(c.abs() <= 1.0 + 1e-15);
                    let p = s.materialize();
                    let out = channel.apply_operator(&p).unwrap();
                    assert!(out.max_abs_diff(&p.scale_real(c)) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pauli_strings_materialize() {
        let y = PauliString::from_label("Y").unwrap().materialize();
        // X·Z = −iY
        assert!(y.max_abs_diff(&Operator::pauli_y().scale(C64::new(0.0, -1.0))) < 1e-15);
        let s = PauliString::from_label("XZ").unwrap();
        assert!(s.materialize().max_abs_diff(&kron(&Operator::pauli_x(), &Operator::pauli_z())) < 1e-15);
        assert_eq!(PauliString::identity(3).materialize(), Operator::identity(8));
        assert_eq!(s.label(), "XZ");
        assert!(s.materialize().is_unitary(1e-14));
    }

    #[test]
    fn pauli_channel_rejects_bad_sum() {
        let terms = vec![(PauliString::identity(1), 0.5), (PauliString::from_label("X").unwrap(), 0.4)];
        assert!(UnitalPauliChannel::new(1, terms).is_err());
        let terms = vec![(PauliString::identity(1), 1.1), (PauliString::from_label("X").unwrap(), -0.1)];
        assert!(UnitalPauliChannel::new(1, terms).is_err());
    }

    #[test]
    fn superoperator_identity_and_unitary() {
        let id = Channel::identity(2).superoperator().unwrap();
        assert_eq!(id, Operator::identity(16));

        let mut rng = CounterRng::new(5);
        let u = random_unitary(4, &mut rng);
        let s = Channel::unitary(u.clone()).unwrap().superoperator().unwrap();
        assert!(s.max_abs_diff(&kron(&u.conj(), &u)) < 1e-13);
    }

    #[test]
    fn superoperator_reproduces_apply() {
        let mut rng = CounterRng::new(8);
        let ch = compose(&Channel::global_depol(2, 0.3).unwrap(), &Channel::local_depol(vec![0.1, 0.2]).unwrap()).unwrap();
        let s = ch.superoperator().unwrap();
        let rho = random_density(4, 2, &mut rng);
        let vec_rho: Vec<C64> = (0..16).map(|k| rho.op().get(k % 4, k / 4)).collect();
        let out = s.matvec(&vec_rho);
        let direct = ch.apply(&rho).unwrap();
        for k in 0..16 {
            assert!((out[k] - direct.op().get(k % 4, k / 4)).norm() < 1e-12);
        }
    }

    #[test]
    fn superoperator_size_cap() {
        let ch = Channel::global_depol(6, 0.1).unwrap();
        assert!(matches!(ch.superoperator(), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn compose_global_depolarizers() {
        let p = 0.15;
        let a = Channel::global_depol(2, p).unwrap();
        let twice = compose(&a, &a).unwrap();
        let single = Channel::global_depol(2, 1.0 - (1.0 - p) * (1.0 - p)).unwrap();
        assert!(twice.superoperator().unwrap().max_abs_diff(&single.superoperator().unwrap()) < 1e-15);
    }

    #[test]
    fn compose_unitaries_and_identity() {
        let mut rng = CounterRng::new(9);
        let u = random_unitary(2, &mut rng);
        let v = random_unitary(2, &mut rng);
        let cu = Channel::unitary(u.clone()).unwrap();
        let cv = Channel::unitary(v.clone()).unwrap();
        let composed = compose(&cu, &cv).unwrap();
        let direct = Channel::unitary(u.matmul(&v)).unwrap();
        assert!(composed.superoperator().unwrap().max_abs_diff(&direct.superoperator().unwrap()) < 1e-13);

        let with_id = compose(&Channel::identity(1), &cu).unwrap();
        assert!(with_id.superoperator().unwrap().max_abs_diff(&cu.superoperator().unwrap()) < 1e-15);
        assert!(matches!(compose(&Channel::identity(2), &cu), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn effective_global_depol_weights() {
        let ch = effective_global_depol(1, &[0.3]).unwrap();
        assert!((ch.retained_weight().unwrap() - 0.7).abs() < 1e-15);
        let ch = effective_global_depol(1, &[0.1, 0.2]).unwrap();
        assert!((ch.retained_weight().unwrap() - 0.72).abs() < 1e-15);
        let p: f64 = 0.05;
        let m = 6;
        let ch = effective_global_depol(2, &vec![p; m + 1]).unwrap();
        assert!((ch.retained_weight().unwrap() - (1.0 - p).powi(m as i32 + 1)).abs() < 1e-15);
        assert!(effective_global_depol(1, &[0.0]).is_err());
        assert!(effective_global_depol(1, &[1.2]).is_err());
    }

    #[test]
    fn decompose_local_depol_cases() {
        let (u, r) = decompose_local_depol(&[0.2, 0.2]).unwrap();
        assert_eq!(u, Channel::LocalDepol { probs: vec![0.2, 0.2] });
        assert!(r.is_identity());

        let (u, r) = decompose_local_depol(&[0.1, 0.3]).unwrap();
        assert_eq!(u, Channel::LocalDepol { probs: vec![0.1, 0.1] });
        match r {
            Channel::LocalDepol { probs } => {
                assert_eq!(probs[0], 0.0);
                assert!((probs[1] - 0.2 / 0.9).abs() < 1e-15);
            }
            other => panic!("unexpected residual {other:?}"),
        }
        assert!(decompose_local_depol(&[0.0, 0.3]).is_err());
        assert!(decompose_local_depol(&[1.0, 0.3]).is_err());
    }

    #[test]
    fn decomposition_superoperator_equality() {
        let mut rng = CounterRng::new(21);
        for _ in 0..10 {
            let probs = vec![rng.uniform_range(0.01, 0.99), rng.uniform_range(0.01, 0.99)];
            let (u, r) = decompose_local_depol(&probs).unwrap();
            let lhs = compose(&u, &r).unwrap().superoperator().unwrap();
            let rhs = Channel::local_depol(probs).unwrap().superoperator().unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn cptp_reports() {
        let bf = Channel::Pauli(UnitalPauliChannel::bit_flip(0.3).unwrap());
        let r = verify_cptp(&bf).unwrap();
        assert!(r.is_cptp() && r.unital);
        let gd = Channel::global_depol(2, 0.5).unwrap();
        let r = verify_cptp(&gd).unwrap();
        assert!(r.is_cptp() && r.unital);
        assert!(r.choi_min_eigenvalue >= -1e-12);
    }

    #[test]
    fn apply_rejects_wrong_dimension() {
        let ch = Channel::global_depol(2, 0.1).unwrap();
        assert!(matches!(ch.apply(&DensityMatrix::maximally_mixed(2)), Err(Error::DimMismatch { .. })));
    }
}

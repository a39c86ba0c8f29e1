//! Dense complex linear algebra kernel.
//!
//! Everything here works on row-major square matrices of `Complex64`. Qubit 1 is the
//! most significant bit of a basis index, so `kron(a, b)` places `a` on qubit 1.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Hermiticity tolerance.
pub const TAU_HERM: f64 = 1e-9;
/// Unitarity tolerance.
pub const TAU_UNIT: f64 = 1e-9;
/// Eigendecomposition reconstruction tolerance.
pub const TAU_EIG: f64 = 1e-9;
/// Unit-trace tolerance for density matrices.
pub const TAU_TRACE: f64 = 1e-9;
/// Smallest admissible eigenvalue of a density matrix.
pub const TAU_PSD: f64 = 1e-9;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this fraction of the
/// full Frobenius norm.
pub const JACOBI_OFF_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Dense complex square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.data[i * dim + i] = ONE;
        }
        op
    }

    /// Builds an operator from row-major entries; fails unless `data.len() == dim²`.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::LengthMismatch { expected: dim * dim, found: data.len() });
        }
        Ok(Self { dim, data })
    }

    /// Builds an operator from real row-major entries.
    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut op = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            op.data[i * diag.len() + i] = x;
        }
        op
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let d = v.len();
        let mut op = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                op.data[i * d + j] = v[i] * w[j].conj();
            }
        }
        op
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self::from_vec(2, vec![ZERO, -C64::i(), C64::i(), ZERO]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    /// Embeds a single-qubit operator on `qubit` (1-based) of an `n`-qubit register.
    pub fn single_qubit(n: usize, qubit: usize, op: &Operator) -> Result<Self> {
        if qubit == 0 || qubit > n {
            return Err(Error::IndexOutOfRange { index: qubit, len: n + 1 });
        }
        let mut out = Self::identity(1);
        for q in 1..=n {
            out = if q == qubit { kron(&out, op) } else { kron(&out, &Self::identity(2)) };
        }
        Ok(out)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits if the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        if self.dim.is_power_of_two() {
            Some(self.dim.trailing_zeros() as usize)
        } else {
            None
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| x.conj()).collect() }
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j];
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// `self · other`; panics on dimension mismatch (use [`Operator::try_matmul`] for a checked product).
    pub fn matmul(&self, other: &Operator) -> Operator {
        self.try_matmul(other).expect("matmul dimension mismatch")
    }

    pub fn try_matmul(&self, other: &Operator) -> Result<Operator> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: other.dim });
        }
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            let row = &mut out[i * d..(i + 1) * d];
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * d..(k + 1) * d];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Operator { dim: d, data: out })
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim;
        (0..d)
            .map(|i| self.data[i * d..(i + 1) * d].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `U ρ U†`
    pub fn conjugate_by(&self, u: &Operator) -> Operator {
        u.matmul(self).matmul(&u.dagger())
    }

    /// `[a, b] = ab − ba`
    pub fn commutator(a: &Operator, b: &Operator) -> Operator {
        &a.matmul(b) - &b.matmul(a)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|A[i,j] − conj(A[j,i])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                dev = dev.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn unitary_deviation(&self) -> f64 {
        self.dagger().matmul(self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitary_deviation() <= tol
    }

    /// `(A + A†)/2`
    pub fn hermitian_part(&self) -> Operator {
        (self + &self.dagger()).scale_real(0.5)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator add dimension mismatch");
        Operator { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "operator sub dimension mismatch");
        Operator { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}

/// Real dense square matrix, used for Fisher information matrices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn from_vec(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::LengthMismatch { expected: dim * dim, found: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs_diff(&self, other: &RealMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn symmetry_deviation(&self) -> f64 {
        let d = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..d {
            for j in i + 1..d {
                dev = dev.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        dev
    }

    /// Linear combination `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &RealMatrix, b: f64) -> RealMatrix {
        RealMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> RealMatrix {
        RealMatrix { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// `xᵀ A x`
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let d = self.dim;
        (0..d).map(|i| x[i] * (0..d).map(|j| self.get(i, j) * x[j]).sum::<f64>()).sum()
    }

    pub fn to_operator(&self) -> Operator {
        Operator { dim: self.dim, data: self.data.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    /// Ascending eigenvalues of the symmetrized matrix.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.to_operator().hermitian_part())?.eigenvalues)
    }
}

/// Hermitian, positive-semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants.
    pub fn new(op: Operator) -> Result<Self> {
        let dev = op.hermitian_deviation();
        if dev > TAU_HERM {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > TAU_TRACE || tr.im.abs() > TAU_TRACE {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eig(&op)?.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -TAU_PSD {
            return Err(Error::InvalidDensityMatrix(format!("minimum eigenvalue {min:.3e} is negative")));
        }
        Ok(Self { op })
    }

    /// Wraps an operator already known to be a valid state (outputs of CPTP maps).
    pub(crate) fn new_unchecked(op: Operator) -> Self {
        Self { op }
    }

    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { op: Operator::outer(psi, psi) })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { op: Operator::identity(dim).scale_real(1.0 / dim as f64) }
    }

    /// Convex combination `q·self + (1−q)·other`.
    pub fn mix(&self, q: f64, other: &DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::OutOfRange { what: "mixing weight", value: q });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self { op: &self.op.scale_real(q) + &other.op.scale_real(1.0 - q) })
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim
    }

    pub fn n_qubits(&self) -> Option<usize> {
        self.op.n_qubits()
    }

    /// `Tr[ρ²]`
    pub fn purity(&self) -> f64 {
        self.op.data.iter().map(|x| x.norm_sqr()).sum()
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as the columns of `eigenvectors`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Operator,
}

impl EigenDecomposition {
    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        let d = self.eigenvectors.dim;
        (0..d).map(|i| self.eigenvectors.get(i, k)).collect()
    }

    /// `V f(Λ) V†`
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> Operator {
        let v = &self.eigenvectors;
        let d = v.dim;
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = Operator::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += v.get(i, k) * fl[k] * v.get(j, k).conj();
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Operator {
        self.apply_fn(|l| C64::new(l, 0.0))
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (da, db) = (a.dim, b.dim);
    let d = da * db;
    let mut out = Operator::zeros(d);
    for i in 0..da {
        for j in 0..da {
            let x = a.get(i, j);
            if x == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.data[(i * db + k) * d + j * db + l] = x * b.get(k, l);
                }
            }
        }
    }
    out
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eig(a: &Operator) -> Result<EigenDecomposition> {
    let dev = a.hermitian_deviation();
    if dev > TAU_HERM {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let d = a.dim;
    let mut m = a.hermitian_part();
    for i in 0..d {
        let x = m.get(i, i).re;
        m.set(i, i, C64::new(x, 0.0));
    }
    let mut v = Operator::identity(d);
    let total = m.frobenius_norm();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= JACOBI_OFF_TOL * total {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > JACOBI_OFF_TOL * total {
        return Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m.get(i, i).re.total_cmp(&m.get(j, j).re).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| m.get(i, i).re).collect();
    let mut vecs = Operator::zeros(d);
    for (new, &old) in order.iter().enumerate() {
        for r in 0..d {
            vecs.set(r, new, v.get(r, old));
        }
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: vecs })
}

fn off_diagonal_norm(m: &Operator) -> f64 {
    let d = m.dim;
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += m.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `m[p,q]` with the unitary `G = diag(1, e^{-iφ}) · [[c, s], [−s, c]]`,
/// updating `m ← G† m G` and `v ← v G`.
fn jacobi_rotate(m: &mut Operator, v: &mut Operator, p: usize, q: usize) {
    let b = m.get(p, q);
    let babs = b.norm();
    if babs == 0.0 {
        return;
    }
    let phase = b / babs;
    let (alpha, beta) = (m.get(p, p).re, m.get(q, q).re);
    let theta = (beta - alpha) / (2.0 * babs);
    let t = if theta.is_finite() {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e = phase.conj();
    let (gpp, gpq, gqp, gqq) = (C64::new(c, 0.0), C64::new(s, 0.0), -e * s, e * c);

    let d = m.dim;
    for k in 0..d {
        let (mp, mq) = (m.get(k, p), m.get(k, q));
        m.set(k, p, mp * gpp + mq * gqp);
        m.set(k, q, mp * gpq + mq * gqq);
    }
    for k in 0..d {
        let (mp, mq) = (m.get(p, k), m.get(q, k));
        m.set(p, k, gpp.conj() * mp + gqp.conj() * mq);
        m.set(q, k, gpq.conj() * mp + gqq.conj() * mq);
    }
    m.set(p, q, ZERO);
    m.set(q, p, ZERO);
    let (app, aqq) = (m.get(p, p).re, m.get(q, q).re);
    m.set(p, p, C64::new(app, 0.0));
    m.set(q, q, C64::new(aqq, 0.0));

    for k in 0..d {
        let (vp, vq) = (v.get(k, p), v.get(k, q));
        v.set(k, p, vp * gpp + vq * gqp);
        v.set(k, q, vp * gpq + vq * gqq);
    }
}

/// `e^{−iθH}` computed through the eigendecomposition of `h`.
pub fn herm_exp(h: &Operator, theta: f64) -> Result<Operator> {
    let eig = hermitian_eig(h)?;
    Ok(exp_from_eig(&eig, theta))
}

/// `e^{−iθH}` from a precomputed decomposition of `H`.
pub fn exp_from_eig(eig: &EigenDecomposition, theta: f64) -> Operator {
    eig.apply_fn(|l| C64::from_polar(1.0, -theta * l))
}

/// Partial trace of an operator on `n` qubits over the 1-based qubit indices in `traced`.
pub fn partial_trace_op(op: &Operator, traced: &[usize]) -> Result<Operator> {
    let n = op.n_qubits().ok_or(Error::DimMismatch { expected: op.dim.next_power_of_two(), found: op.dim })?;
    let mut traced_sorted: Vec<usize> = traced.to_vec();
    traced_sorted.sort_unstable();
    traced_sorted.dedup();
    for &q in &traced_sorted {
        if q == 0 || q > n {
            return Err(Error::IndexOutOfRange { index: q, len: n + 1 });
        }
    }
    let kept: Vec<usize> = (1..=n).filter(|q| !traced_sorted.contains(q)).collect();
    let bit = |q: usize| n - q;
    let dk = 1usize << kept.len();
    let dt = 1usize << traced_sorted.len();

    let scatter = |kidx: usize, tidx: usize| -> usize {
        let mut full = 0usize;
        for (pos, &q) in kept.iter().enumerate() {
            if (kidx >> (kept.len() - 1 - pos)) & 1 == 1 {
                full |= 1 << bit(q);
            }
        }
        for (pos, &q) in traced_sorted.iter().enumerate() {
            if (tidx >> (traced_sorted.len() - 1 - pos)) & 1 == 1 {
                full |= 1 << bit(q);
            }
        }
        full
    };

    let mut out = Operator::zeros(dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = ZERO;
            for t in 0..dt {
                acc += op.get(scatter(i, t), scatter(j, t));
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Reduced state after tracing out the 1-based qubits in `traced`.
pub fn partial_trace(rho: &DensityMatrix, traced: &[usize]) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(partial_trace_op(rho.op(), traced)?))
}

/// `Tr[a† b]`
pub fn frobenius_inner(a: &Operator, b: &Operator) -> Result<C64> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch { expected: a.dim, found: b.dim });
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// Square root of a positive-semidefinite operator; negative roundoff eigenvalues are clamped to zero.
pub fn sqrt_psd(op: &Operator) -> Result<Operator> {
    let eig = hermitian_eig(op)?;
    Ok(eig.apply_fn(|l| C64::new(l.max(0.0).sqrt(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i4 = kron(&Operator::identity(2), &Operator::identity(2));
        assert_eq!(i4, Operator::identity(4));
    }

    #[test]
    fn kron_x_z_entries() {
        let k = kron(&Operator::pauli_x(), &Operator::pauli_z());
        let mut expected = Operator::zeros(4);
        expected.set(0, 2, c(1.0, 0.0));
        expected.set(1, 3, c(-1.0, 0.0));
        expected.set(2, 0, c(1.0, 0.0));
        expected.set(3, 1, c(-1.0, 0.0));
        assert_eq!(k, expected);
    }

    #[test]
    fn kron_z_z_diagonal() {
        let k = kron(&Operator::pauli_z(), &Operator::pauli_z());
        let diag: Vec<f64> = (0..4).map(|i| k.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn eig_of_paulis() {
        let ez = hermitian_eig(&Operator::pauli_z()).unwrap();
        assert_eq!(ez.eigenvalues, vec![-1.0, 1.0]);
        let ex = hermitian_eig(&Operator::pauli_x()).unwrap();
        assert!((ex.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((ex.eigenvalues[1] - 1.0).abs() < 1e-14);
        let ey = hermitian_eig(&Operator::pauli_y()).unwrap();
        assert!(ey.reconstruct().max_abs_diff(&Operator::pauli_y()) < 1e-14);
    }

    #[test]
    fn eig_of_toy_state() {
        let plus = [c(1.0 / 2f64.sqrt(), 0.0), c(1.0 / 2f64.sqrt(), 0.0)];
        let rho = &Operator::outer(&plus, &plus).scale_real(0.9) + &Operator::identity(2).scale_real(0.05);
        let e = hermitian_eig(&rho).unwrap();
        assert!((e.eigenvalues[0] - 0.05).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 0.95).abs() < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = Operator::from_real(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_handles_degenerate_and_zero() {
        let z = Operator::zeros(3);
        let e = hermitian_eig(&z).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
        let i = Operator::identity(4);
        assert!(hermitian_eig(&i).unwrap().reconstruct().max_abs_diff(&i) < 1e-15);
    }

    #[test]
    fn eig_is_deterministic() {
        let a = Operator::from_vec(
            3,
            vec![c(2.0, 0.0), c(0.5, 0.3), c(-1.0, 0.2), c(0.5, -0.3), c(1.0, 0.0), c(0.1, 0.0), c(-1.0, -0.2), c(0.1, 0.0), c(0.5, 0.0)],
        )
        .unwrap();
        let e1 = hermitian_eig(&a).unwrap();
        let e2 = hermitian_eig(&a).unwrap();
        assert_eq!(e1.eigenvalues, e2.eigenvalues);
        assert_eq!(e1.eigenvectors, e2.eigenvectors);
        assert!(e1.reconstruct().max_abs_diff(&a) < 1e-13);
    }

    #[test]
    fn herm_exp_cases() {
        let h = Operator::pauli_x();
        assert!(herm_exp(&h, 0.0).unwrap().max_abs_diff(&Operator::identity(2)) < 1e-15);

        let theta = 0.37;
        let ez = herm_exp(&Operator::pauli_z(), theta).unwrap();
        let expected = Operator::diagonal(&[C64::from_polar(1.0, -theta), C64::from_polar(1.0, theta)]);
        assert!(ez.max_abs_diff(&expected) < 1e-15);

        let ex = herm_exp(&Operator::pauli_x().scale_real(0.5), PI).unwrap();
        let expected = Operator::pauli_x().scale(c(0.0, -1.0));
        assert!(ex.max_abs_diff(&expected) < 1e-14);
        assert!(ex.is_unitary(TAU_UNIT));
    }

    #[test]
    fn partial_trace_cases() {
        let mixed = DensityMatrix::maximally_mixed(4);
        let r = partial_trace(&mixed, &[1]).unwrap();
        assert!(r.op().max_abs_diff(&Operator::identity(2).scale_real(0.5)) < 1e-15);

        let mut zz = Operator::zeros(4);
        zz.set(0, 0, c(1.0, 0.0));
        let r = partial_trace(&DensityMatrix::new(zz).unwrap(), &[2]).unwrap();
        let mut zero = Operator::zeros(2);
        zero.set(0, 0, c(1.0, 0.0));
        assert_eq!(r.op(), &zero);

        let s = 1.0 / 2f64.sqrt();
        let bell = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let r = partial_trace(&DensityMatrix::from_pure(&bell).unwrap(), &[1]).unwrap();
        assert!(r.op().max_abs_diff(&Operator::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_keeps_qubit_order() {
        // |0⟩⟨0| ⊗ |+⟩⟨+| ⊗ |1⟩⟨1|, trace out the middle qubit.
        let zero = Operator::diagonal(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let one = Operator::diagonal(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let plus = Operator::from_real(2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let full = kron(&kron(&zero, &plus), &one);
        let r = partial_trace_op(&full, &[2]).unwrap();
        assert!(r.max_abs_diff(&kron(&zero, &one)) < 1e-15);
        let r = partial_trace_op(&full, &[1, 3]).unwrap();
        assert!(r.max_abs_diff(&plus) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_index() {
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(matches!(partial_trace(&mixed, &[3]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(partial_trace(&mixed, &[0]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn frobenius_cases() {
        let x = Operator::pauli_x();
        let z = Operator::pauli_z();
        assert_eq!(frobenius_inner(&x, &x).unwrap(), c(2.0, 0.0));
        assert_eq!(frobenius_inner(&x, &z).unwrap(), c(0.0, 0.0));
        let zz = kron(&z, &z);
        assert_eq!(frobenius_inner(&Operator::identity(4), &zz).unwrap(), c(0.0, 0.0));
        assert!(matches!(frobenius_inner(&x, &zz), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(Operator::identity(2)).is_err());
        assert!(DensityMatrix::new(Operator::from_real(2, &[1.5, 0.0, 0.0, -0.5]).unwrap()).is_err());
        assert!(DensityMatrix::new(Operator::identity(2).scale_real(0.5)).is_ok());
    }
}

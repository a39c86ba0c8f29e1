//! Dynamical Lie algebra `span_ℝ ⟨iG⟩_Lie` by iterated commutators.

use std::collections::VecDeque;

use num_complex::Complex64 as C64;

use crate::channels::PauliString;
use crate::error::{Error, Result};
use crate::tensor::{Operator, TAU_HERM};

/// Residual norm above which a commutator counts as a new direction.
pub const TAU_INDEP: f64 = 1e-8;

/// Orthonormal basis of skew-Hermitian operators under `Re Tr[a†b]`.
#[derive(Clone, Debug)]
pub struct LieBasis {
    elements: Vec<Operator>,
}

impl LieBasis {
    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Norm of the component of `a` orthogonal to the span.
    pub fn residual_norm(&self, a: &Operator) -> f64 {
        project_out(&self.elements, a).frobenius_norm()
    }

    /// Largest residual of `[a, b]` over all basis pairs.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.elements.iter().enumerate() {
            for b in &self.elements[i + 1..] {
                worst = worst.max(self.residual_norm(&Operator::commutator(a, b)));
            }
        }
        worst
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((real_inner(a, b) - target).abs());
            }
        }
        worst
    }
}

/// `Re Tr[a†b]`
fn real_inner(a: &Operator, b: &Operator) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn project_out(basis: &[Operator], a: &Operator) -> Operator {
    let mut r = a.clone();
    // second pass restores orthogonality lost to cancellation
    for _ in 0..2 {
        for e in basis {
            let c = real_inner(e, &r);
            for (x, y) in r.data_mut().iter_mut().zip(e.data()) {
                *x -= y * c;
            }
        }
    }
    r
}

fn skew_part(a: &Operator) -> Operator {
    (a - &a.dagger()).scale_real(0.5)
}

struct Closure {
    elements: Vec<Operator>,
    cap: usize,
}

impl Closure {
    /// Adds the normalized residual of `a` if it exceeds the independence threshold.
    fn try_add(&mut self, a: &Operator) -> Result<bool> {
        let r = project_out(&self.elements, a);
        let norm = r.frobenius_norm();
        if norm <= TAU_INDEP {
            return Ok(false);
        }
        if self.elements.len() >= self.cap {
            return Err(Error::CapExceeded { partial_dim: self.elements.len(), cap: self.cap });
        }
        self.elements.push(skew_part(&r.scale_real(1.0 / norm)));
        Ok(true)
    }
}

/// Lie closure of `iG`. `max_dim` defaults to `d²` when `None`.
pub fn lie_closure(generators: &[Operator], max_dim: Option<usize>) -> Result<LieBasis> {
    let Some(first) = generators.first() else {
        return Ok(LieBasis { elements: Vec::new() });
    };
    let d = first.dim();
    let cap = max_dim.unwrap_or(d * d);
    if cap < 1 {
        return Err(Error::OutOfRange { what: "Lie closure cap", value: cap as f64 });
    }
    let mut closure = Closure { elements: Vec::new(), cap };
    let mut queue = VecDeque::new();
    for g in generators {
        if g.dim() != d {
            return Err(Error::DimMismatch { expected: d, found: g.dim() });
        }
        let dev = g.hermitian_deviation();
        if dev > TAU_HERM {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = g.trace().norm();
        if tr > TAU_HERM {
            return Err(Error::NotTraceless { trace: tr });
        }
        let norm = g.frobenius_norm();
        if norm <= TAU_INDEP {
            continue;
        }
        let a = g.scale(C64::new(0.0, 1.0 / norm));
        if closure.try_add(&a)? {
            queue.push_back(closure.elements.len() - 1);
        }
    }
    loop {
        while let Some(k) = queue.pop_front() {
            let mut j = 0;
            while j < closure.elements.len() {
                if j != k {
                    let c = Operator::commutator(&closure.elements[k], &closure.elements[j]);
                    if closure.try_add(&c)? {
                        queue.push_back(closure.elements.len() - 1);
                    }
                }
                j += 1;
            }
        }
        // termination check: every pair once more
        let n = closure.elements.len();
        for i in 0..n {
            for j in i + 1..n {
                let c = Operator::commutator(&closure.elements[i], &closure.elements[j]);
                if closure.try_add(&c)? {
                    queue.push_back(closure.elements.len() - 1);
                }
            }
        }
        if queue.is_empty() {
            break;
        }
    }
    Ok(LieBasis { elements: closure.elements })
}

pub fn dla_dimension(generators: &[Operator]) -> Result<usize> {
    Ok(lie_closure(generators, None)?.dim())
}

/// Orthonormal basis of the `sign = ±1` eigenspace of `X^{⊗n}`: `(|k⟩ ± |k̄⟩)/√2` for `k < d/2`.
pub fn x_parity_sector(n: usize, sign: f64) -> Vec<Vec<C64>> {
    let d = 1usize << n;
    let s = 1.0 / 2f64.sqrt();
    (0..d / 2)
        .map(|k| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[k] = C64::new(s, 0.0);
            v[k ^ (d - 1)] = C64::new(sign * s, 0.0);
            v
        })
        .collect()
}

/// `V† A V` for an invariant subspace spanned by the orthonormal columns `basis`, with the
/// trace removed so the result is a valid generator.
pub fn restrict_generator(a: &Operator, basis: &[Vec<C64>]) -> Result<Operator> {
    let k = basis.len();
    let mut r = Operator::zeros(k);
    let mut leak: f64 = 0.0;
    let images: Vec<Vec<C64>> = basis.iter().map(|v| a.matvec(v)).collect();
    for (j, av) in images.iter().enumerate() {
        let mut rem = av.clone();
        for (i, u) in basis.iter().enumerate() {
            let c: C64 = u.iter().zip(av).map(|(x, y)| x.conj() * y).sum();
            r.set(i, j, c);
            for (x, y) in rem.iter_mut().zip(u) {
                *x -= c * y;
            }
        }
        leak = leak.max(rem.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt());
    }
    if leak > TAU_HERM {
        return Err(Error::NotInvariant { deviation: leak });
    }
    let shift = r.trace() / k as f64;
    Ok(&r - &Operator::identity(k).scale(shift))
}

/// Closure of the generators restricted to an invariant subspace: the algebra that acts on
/// states supported there.
pub fn sector_lie_closure(generators: &[Operator], basis: &[Vec<C64>], max_dim: Option<usize>) -> Result<LieBasis> {
    let restricted = generators.iter().map(|g| restrict_generator(g, basis)).collect::<Result<Vec<_>>>()?;
    lie_closure(&restricted, max_dim)
}

/// Coefficients `c_P` of `a = i Σ_P c_P σ_P` over Hermitian Pauli strings, dropping entries below `cutoff`.
pub fn pauli_expansion(a: &Operator, cutoff: f64) -> Result<Vec<(String, f64)>> {
    let d = a.dim();
    let n = a.n_qubits().ok_or(Error::DimMismatch { expected: d.next_power_of_two(), found: d })?;
    if n > 8 {
        return Err(Error::TooLarge { n_qubits: n, max: 8 });
    }
    let mut out = Vec::new();
    for x in 0..d {
        for z in 0..d {
            let alpha: Vec<bool> = (0..n).map(|j| (x >> (n - 1 - j)) & 1 == 1).collect();
            let beta: Vec<bool> = (0..n).map(|j| (z >> (n - 1 - j)) & 1 == 1).collect();
            let p = PauliString::new(&alpha, &beta)?;
            let n_y = (x & z).count_ones();
            // X^α Z^β = (−i)^{#Y} σ_P
            let phase = C64::new(0.0, 1.0).powu(n_y);
            // Tr[X^α Z^β a] = Σ_k (−1)^{β·k} a[k, k ⊕ α]
            let mut tr = C64::new(0.0, 0.0);
            for k in 0..d {
                let sign = if (z & k).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                tr += a.get(k, k ^ x) * sign;
            }
            let c = phase * tr / C64::new(0.0, d as f64);
            if c.re.abs() > cutoff {
                out.push((p.label(), c.re));
            }
        }
    }
    Ok(out)
}

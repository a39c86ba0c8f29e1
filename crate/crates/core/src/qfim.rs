//! Quantum Fisher information of circuit outputs, its spectrum and numerical rank, the
//! computational-basis classical Fisher information, and state distances.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qnn::{evolve_with_derivatives, NoisyCircuit, ParameterVector};
use crate::tensor::{hermitian_eig, sqrt_psd, DensityMatrix, Operator, RealMatrix, TAU_HERM};

/// Pairs `(μ, ν)` with `r_μ + r_ν` at or below this are dropped from the mixed-state sum.
pub const SPECTRAL_CUTOFF: f64 = 1e-12;
/// Outcomes with probability at or below this are dropped from the classical Fisher sum.
pub const TAU_PROB: f64 = 1e-12;

/// An eigenvalue counts toward the rank iff `λ > abs + rel·λ_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankTolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-10 }
    }
}

impl RankTolerance {
    pub fn threshold(&self, lambda_max: f64) -> f64 {
        self.abs + self.rel * lambda_max.max(0.0)
    }
}

/// Count of eigenvalues above a user-chosen cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpsilonCount {
    pub epsilon: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct QfimReport {
    pub matrix: RealMatrix,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors, `eigenvectors[k]` belongs to `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub rank: usize,
    pub tolerance: RankTolerance,
    pub d1: usize,
    pub d1_epsilon: Option<EpsilonCount>,
}

impl QfimReport {
    /// Symmetrizes `matrix` and diagonalizes it.
    pub fn from_matrix(matrix: RealMatrix, tolerance: RankTolerance) -> Result<Self> {
        let m = matrix.dim();
        let sym = matrix.combine(0.5, &transpose(&matrix), 0.5);
        let eig = hermitian_eig(&sym.to_operator())?;
        let mut eigenvalues = Vec::with_capacity(m);
        let mut eigenvectors = Vec::with_capacity(m);
        for k in (0..m).rev() {
            eigenvalues.push(eig.eigenvalues[k]);
            eigenvectors.push(real_unit_vector(&eig.eigenvector(k)));
        }
        let rank = count_rank(&eigenvalues, &tolerance);
        Ok(Self { matrix: sym, eigenvalues, eigenvectors, rank, tolerance, d1: rank, d1_epsilon: None })
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        let count = self.eigenvalues.iter().filter(|&&l| l > epsilon).count();
        self.d1_epsilon = Some(EpsilonCount { epsilon, count });
        self
    }
}

fn transpose(a: &RealMatrix) -> RealMatrix {
    let m = a.dim();
    let mut t = RealMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            t.set(i, j, a.get(j, i));
        }
    }
    t
}

/// Eigenvectors of a real symmetric matrix come out of the Jacobi sweep real up to a global
/// phase; this removes the phase and drops the imaginary residue.
fn real_unit_vector(v: &[C64]) -> Vec<f64> {
    let pivot = v.iter().copied().fold(C64::new(0.0, 0.0), |best, x| if x.norm() > best.norm() { x } else { best });
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
    let mut out: Vec<f64> = v.iter().map(|x| (x * phase).re).collect();
    let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        out.iter_mut().for_each(|x| *x /= norm);
    }
    out
}

fn count_rank(descending: &[f64], tol: &RankTolerance) -> usize {
    let lmax = descending.first().copied().unwrap_or(0.0);
    let t = tol.threshold(lmax);
    descending.iter().filter(|&&l| l > t).count()
}

/// `F_ij = 4 Re[⟨∂_iψ|∂_jψ⟩ − ⟨∂_iψ|ψ⟩⟨ψ|∂_jψ⟩]`
pub fn qfim_pure(state: &[C64], derivs: &[Vec<C64>], tolerance: RankTolerance) -> Result<QfimReport> {
    let norm = state.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized { norm });
    }
    if let Some(bad) = derivs.iter().find(|d| d.len() != state.len()) {
        return Err(Error::DimMismatch { expected: state.len(), found: bad.len() });
    }
    let inner = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let overlaps: Vec<C64> = derivs.iter().map(|d| inner(d, state)).collect();
    let m = derivs.len();
    let mut f = RealMatrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            let v = 4.0 * (inner(&derivs[i], &derivs[j]) - overlaps[i] * overlaps[j].conj()).re;
            f.set(i, j, v);
            f.set(j, i, v);
        }
    }
    QfimReport::from_matrix(f, tolerance)
}

/// `F_ij = Σ_{r_μ+r_ν > τ} 2 Re[⟨r_μ|∂_iρ|r_ν⟩⟨r_ν|∂_jρ|r_μ⟩] / (r_μ + r_ν)`
pub fn qfim_mixed(rho: &DensityMatrix, derivs: &[Operator], tolerance: RankTolerance) -> Result<QfimReport> {
    let eig = hermitian_eig(rho.op()).map_err(|e| Error::SpectralFailure(e.to_string()))?;
    let r = &eig.eigenvalues;
    let d = rho.dim();
    let weights: Vec<f64> = (0..d * d)
        .map(|k| {
            let s = r[k / d] + r[k % d];
            if s > SPECTRAL_CUTOFF {
                2.0 / s
            } else {
                0.0
            }
        })
        .collect();
    mixed_from_weights(&eig.eigenvectors, derivs, d, &weights, 1.0, tolerance)
}

/// `Σ_{μν} w_μν · scale · Re[A_i[μν] conj(A_j[μν])]` with `A = V† ∂ρ V`.
fn mixed_from_weights(
    v: &Operator,
    derivs: &[Operator],
    d: usize,
    weights: &[f64],
    scale: f64,
    tolerance: RankTolerance,
) -> Result<QfimReport> {
    let vd = v.dagger();
    let mut rotated = Vec::with_capacity(derivs.len());
    for a in derivs {
        if a.dim() != d {
            return Err(Error::DimMismatch { expected: d, found: a.dim() });
        }
        let dev = a.hermitian_deviation();
        if dev > TAU_HERM {
            return Err(Error::NotHermitian { deviation: dev });
        }
        rotated.push(vd.matmul(a).matmul(v));
    }
    let m = derivs.len();
    let mut f = RealMatrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            let mut acc = 0.0;
            for (k, w) in weights.iter().enumerate() {
                if *w != 0.0 {
                    acc += w * (rotated[i].data()[k] * rotated[j].data()[k].conj()).re;
                }
            }
            f.set(i, j, scale * acc);
            f.set(j, i, scale * acc);
        }
    }
    QfimReport::from_matrix(f, tolerance)
}

/// Evolves `ρ`, differentiates analytically and assembles the mixed-state QFIM.
pub fn qfim_of_circuit(
    c: &NoisyCircuit,
    theta: &ParameterVector,
    rho: &DensityMatrix,
    tolerance: RankTolerance,
) -> Result<QfimReport> {
    let (out, derivs) = evolve_with_derivatives(c, theta, rho)?;
    qfim_mixed(&out, &derivs, tolerance)
}

/// QFIM of `a·ρ + (1 − a)·I/d` with `a = (1 − p)^{M+1}`, from the noiseless output and its
/// derivatives: the output of `M` gates with global depolarization in all `M + 1` slots.
pub fn noisy_qfim_closed_form_global_depol(
    noiseless_state: &DensityMatrix,
    noiseless_derivs: &[Operator],
    p: f64,
    m: usize,
) -> Result<RealMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { what: "depolarizing probability", value: p });
    }
    let eig = hermitian_eig(noiseless_state.op()).map_err(|e| Error::SpectralFailure(e.to_string()))?;
    let r = &eig.eigenvalues;
    let d = noiseless_state.dim();
    let a = (1.0 - p).powi(m as i32 + 1);
    let floor = 2.0 * (1.0 - a) / d as f64;
    let weights: Vec<f64> = (0..d * d)
        .map(|k| {
            let den = a * (r[k / d] + r[k % d]) + floor;
            if den > SPECTRAL_CUTOFF {
                2.0 / den
            } else {
                0.0
            }
        })
        .collect();
    Ok(mixed_from_weights(&eig.eigenvectors, noiseless_derivs, d, &weights, a * a, RankTolerance::default())?.matrix)
}

/// `D₁`: the rank by default, or the count above `epsilon` when given.
pub fn effective_dim_d1(report: &QfimReport, epsilon: Option<f64>) -> usize {
    match epsilon {
        None => report.rank,
        Some(eps) => report.eigenvalues.iter().filter(|&&l| l > eps).count(),
    }
}

/// Classical Fisher information of a computational-basis measurement of the circuit output.
pub fn classical_fim(c: &NoisyCircuit, theta: &ParameterVector, rho: &DensityMatrix) -> Result<RealMatrix> {
    let (out, derivs) = evolve_with_derivatives(c, theta, rho)?;
    let d = out.dim();
    let probs: Vec<f64> = (0..d).map(|y| out.op().get(y, y).re).collect();
    let support: Vec<usize> = (0..d).filter(|&y| probs[y] > TAU_PROB).collect();
    if support.is_empty() {
        return Err(Error::DegenerateDistribution);
    }
    let dp: Vec<Vec<f64>> = derivs.iter().map(|a| (0..d).map(|y| a.get(y, y).re).collect()).collect();
    let m = derivs.len();
    let mut f = RealMatrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            let v: f64 = support.iter().map(|&y| dp[i][y] * dp[j][y] / probs[y]).sum();
            f.set(i, j, v);
            f.set(j, i, v);
        }
    }
    Ok(f)
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    Ok(())
}

/// `(Tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let s = sqrt_psd(rho.op())?;
    let inner = s.matmul(sigma.op()).matmul(&s).hermitian_part();
    let root_trace: f64 = hermitian_eig(&inner)?.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// `2(1 − √F)`
pub fn bures_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let f = uhlmann_fidelity(rho, sigma)?;
    Ok((2.0 * (1.0 - f.sqrt())).max(0.0))
}

/// `½ ‖ρ − σ‖₁`
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let diff = (rho.op() - sigma.op()).hermitian_part();
    Ok(0.5 * hermitian_eig(&diff)?.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}

/// `S(ρ‖I/d) = Tr[ρ ln ρ] + ln d`
pub fn relative_entropy_to_mixed(rho: &DensityMatrix) -> Result<f64> {
    let eig = hermitian_eig(rho.op())?;
    let neg_entropy: f64 = eig.eigenvalues.iter().filter(|&&l| l > SPECTRAL_CUTOFF).map(|&l| l * l.ln()).sum();
    Ok((neg_entropy + (rho.dim() as f64).ln()).max(0.0))
}

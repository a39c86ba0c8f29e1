//! Random operators, states and channels for randomized property checks.

use num_complex::Complex64 as C64;

use crate::channels::{PauliString, UnitalPauliChannel};
use crate::rng::CounterRng;
use crate::tensor::{herm_exp, DensityMatrix, Operator};

/// Hermitian matrix with independent Gaussian entries.
pub fn random_hermitian(dim: usize, rng: &mut CounterRng) -> Operator {
    let mut g = Operator::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            g.set(i, j, C64::new(rng.normal(), rng.normal()));
        }
    }
    g.hermitian_part()
}

/// Traceless Hermitian matrix, normalized to unit Frobenius norm.
pub fn random_traceless_hermitian(dim: usize, rng: &mut CounterRng) -> Operator {
    let h = random_hermitian(dim, rng);
    let shift = h.trace().re / dim as f64;
    let h = &h - &Operator::identity(dim).scale_real(shift);
    let norm = h.frobenius_norm();
    h.scale_real(1.0 / norm)
}

/// `e^{−iH}` for a random Hermitian `H`.
pub fn random_unitary(dim: usize, rng: &mut CounterRng) -> Operator {
    herm_exp(&random_hermitian(dim, rng), 1.0).expect("random Hermitian is Hermitian")
}

/// `G G† / Tr[G G†]` with `G` a `dim × rank` Gaussian matrix.
pub fn random_density(dim: usize, rank: usize, rng: &mut CounterRng) -> DensityMatrix {
    let rank = rank.clamp(1, dim);
    let mut g = Operator::zeros(dim);
    for i in 0..dim {
        for j in 0..rank {
            g.set(i, j, C64::new(rng.normal(), rng.normal()));
        }
    }
    let w = g.matmul(&g.dagger());
    let tr = w.trace().re;
    DensityMatrix::new_unchecked(w.scale_real(1.0 / tr).hermitian_part())
}

pub fn random_pure_state(dim: usize, rng: &mut CounterRng) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.normal(), rng.normal())).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Real unit vector of length `m`.
pub fn random_unit_vector(m: usize, rng: &mut CounterRng) -> Vec<f64> {
    let v: Vec<f64> = (0..m).map(|_| rng.normal()).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

/// Unital Pauli channel supported on `terms` random Pauli strings with Dirichlet(1) weights.
pub fn random_pauli_channel(n: usize, terms: usize, rng: &mut CounterRng) -> UnitalPauliChannel {
    let weights: Vec<f64> = (0..terms.max(1)).map(|_| -(1.0 - rng.uniform()).ln()).collect();
    let total: f64 = weights.iter().sum();
    let entries = weights
        .into_iter()
        .map(|w| {
            let alpha: Vec<bool> = (0..n).map(|_| rng.uniform() < 0.5).collect();
            let beta: Vec<bool> = (0..n).map(|_| rng.uniform() < 0.5).collect();
            (PauliString::new(&alpha, &beta).expect("equal lengths"), w / total)
        })
        .collect();
    UnitalPauliChannel::new(n, entries).expect("weights normalized")
}

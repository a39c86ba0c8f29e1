//! Bloch-sphere trajectories of the single-qubit model.
//!
//! Two kinds of rows share one table. Gate rows follow the state through the circuit, rotating
//! each gate from angle 0 to `θ_m` in `steps_per_gate` points; noise acts between gates. Path
//! rows follow the output state while `θ` moves along an integral curve of a QFIM eigenvector
//! field, `dθ/dt = v_k(θ)`, for `t ∈ [−span, span]`.

use super::config::{ExperimentConfig, NoiseModel};
use super::output::{fmt_f64, Table};
use super::RunOutcome;
use crate::error::Result;
use crate::qfim::{qfim_of_circuit, RankTolerance};
use crate::qnn::{bloch_coords, evolve, evolve_trace, toy_model, toy_parameter_points, NoisyCircuit, ParameterVector};
use crate::rng::CounterRng;
use crate::tensor::DensityMatrix;

pub const COLUMNS: [&str; 7] = ["gate_index", "step", "x", "y", "z", "purity", "label"];

/// Relative width of an eigenvalue cluster along a path.
const CLUSTER_REL: f64 = 1e-8;

struct Row {
    gate_index: usize,
    step: i64,
    state: DensityMatrix,
    label: String,
}

fn push_row(table: &mut Table, row: &Row) -> Result<()> {
    let [x, y, z] = bloch_coords(&row.state)?;
    table.push(vec![
        row.gate_index.to_string(),
        row.step.to_string(),
        fmt_f64(x),
        fmt_f64(y),
        fmt_f64(z),
        fmt_f64(row.state.purity()),
        row.label.clone(),
    ]);
    Ok(())
}

/// Gate-by-gate evolution: rows `(m, s)` for `s < steps` hold gate `m` partially applied at angle
/// `θ_m·s/steps`; one closing row `(M, 0)` holds the output.
fn gate_rows(c: &NoisyCircuit, theta: &ParameterVector, rho: &DensityMatrix, steps: usize, label: &str) -> Result<Vec<Row>> {
    let trace = evolve_trace(c, theta, rho)?;
    let mut rows = Vec::new();
    for m in 0..c.num_params() {
        for s in 0..steps {
            let angle = theta.as_slice()[m] * s as f64 / steps as f64;
            let state = DensityMatrix::new_unchecked(trace[m].op().conjugate_by(&c.gate_unitary(m, angle)));
            rows.push(Row { gate_index: m, step: s as i64, state, label: label.to_string() });
        }
    }
    let out = trace.last().expect("trace has the output").clone();
    rows.push(Row { gate_index: c.num_params(), step: 0, state: out, label: label.to_string() });
    Ok(rows)
}

/// Unit direction at `theta` continuing `prev`: its projection onto the eigenspace cluster that
/// captures most of it. The null space is one cluster; nonzero eigenvalues cluster when they
/// agree within `CLUSTER_REL·λ_max`.
fn eigen_direction(c: &NoisyCircuit, theta: &ParameterVector, rho: &DensityMatrix, prev: &[f64], tol: RankTolerance) -> Result<Vec<f64>> {
    let report = qfim_of_circuit(c, theta, rho, tol)?;
    let m = prev.len();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let width = CLUSTER_REL * report.lambda_max().max(f64::MIN_POSITIVE);
    for k in 0..report.rank {
        match clusters.last_mut() {
            Some(cl) if report.eigenvalues[*cl.last().unwrap()] - report.eigenvalues[k] <= width => cl.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    if report.rank < m {
        clusters.push((report.rank..m).collect());
    }
    let mut best = prev.to_vec();
    let mut best_norm = 0.0;
    for cl in &clusters {
        let mut proj = vec![0.0; m];
        for &k in cl {
            let v = &report.eigenvectors[k];
            let dot: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
            proj.iter_mut().zip(v).for_each(|(p, x)| *p += dot * x);
        }
        let norm = proj.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > best_norm {
            best_norm = norm;
            best = proj;
        }
    }
    if best_norm > 1e-12 {
        best.iter_mut().for_each(|x| *x /= best_norm);
        Ok(best)
    } else {
        Ok(prev.to_vec())
    }
}

/// One side of an eigenvector path: `points` RK4 outputs spaced `span/points` apart in `t`,
/// starting in direction `start` (already signed).
fn integrate_side(
    c: &NoisyCircuit,
    theta0: &ParameterVector,
    rho: &DensityMatrix,
    start: &[f64],
    span: f64,
    points: usize,
    substeps: usize,
    tol: RankTolerance,
) -> Result<Vec<ParameterVector>> {
    let h = span / (points * substeps) as f64;
    let mut theta = theta0.clone();
    let mut dir = start.to_vec();
    let mut out = Vec::with_capacity(points);
    for _ in 0..points {
        for _ in 0..substeps {
            let k1 = eigen_direction(c, &theta, rho, &dir, tol)?;
            let k2 = eigen_direction(c, &theta.displaced(&k1, h / 2.0), rho, &k1, tol)?;
            let k3 = eigen_direction(c, &theta.displaced(&k2, h / 2.0), rho, &k2, tol)?;
            let k4 = eigen_direction(c, &theta.displaced(&k3, h), rho, &k3, tol)?;
            let step: Vec<f64> = (0..dir.len()).map(|i| (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0).collect();
            theta = theta.displaced(&step, h);
            dir = k4;
        }
        out.push(theta.clone());
    }
    Ok(out)
}

/// Rows for the path along eigenvector `k` at `theta`, steps `−points..=points`.
fn eigen_path_rows(
    c: &NoisyCircuit,
    theta: &ParameterVector,
    rho: &DensityMatrix,
    k: usize,
    cfg: &super::config::TrajectorySpec,
    tol: RankTolerance,
    label: &str,
) -> Result<Vec<Row>> {
    let report = qfim_of_circuit(c, theta, rho, tol)?;
    let v = report.eigenvectors[k].clone();
    let neg: Vec<f64> = v.iter().map(|x| -x).collect();
    let forward = integrate_side(c, theta, rho, &v, cfg.span, cfg.path_steps, cfg.substeps, tol)?;
    let backward = integrate_side(c, theta, rho, &neg, cfg.span, cfg.path_steps, cfg.substeps, tol)?;
    let m = c.num_params();
    let mut rows = Vec::with_capacity(2 * cfg.path_steps + 1);
    for (s, th) in backward.iter().enumerate().rev() {
        rows.push(Row { gate_index: m, step: -(s as i64 + 1), state: evolve(c, th, rho)?, label: label.to_string() });
    }
    rows.push(Row { gate_index: m, step: 0, state: evolve(c, theta, rho)?, label: label.to_string() });
    for (s, th) in forward.iter().enumerate() {
        rows.push(Row { gate_index: m, step: s as i64 + 1, state: evolve(c, th, rho)?, label: label.to_string() });
    }
    Ok(rows)
}

/// Parameter points: `theta1..3`, or `custom` when the config gives explicit angles.
pub fn parameter_points(cfg: &ExperimentConfig) -> Result<Vec<(String, ParameterVector)>> {
    match &cfg.theta {
        Some(_) => Ok(vec![("custom".to_string(), ParameterVector::new(super::angles_for(cfg, 4)?))]),
        None => Ok(toy_parameter_points().into_iter().enumerate().map(|(k, p)| (format!("theta{}", k + 1), p)).collect()),
    }
}

pub fn run_trajectory(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    use rayon::prelude::*;

    let spec = cfg.trajectory.clone().unwrap_or_default();
    let noise = cfg.noise_or(NoiseModel::BitFlip);
    let mut ps = cfg.p_grid();
    if ps.is_empty() {
        ps = vec![0.0, 0.1];
    }
    let tol = cfg.rank_tolerance();
    let (base, rho) = toy_model();
    let points = parameter_points(cfg)?;

    let mut jobs = Vec::new();
    for (pi, &p) in ps.iter().enumerate() {
        let mut rng = CounterRng::new(cfg.seed()).fork(pi as u64);
        let circuit = noise.attach(base.clone(), p, &mut rng)?;
        for (label, theta) in &points {
            let tag = format!("{label}/p={p}");
            jobs.push((circuit.clone(), theta.clone(), format!("{tag}/gates"), None));
            for k in 0..theta.len() {
                jobs.push((circuit.clone(), theta.clone(), format!("{tag}/eig{k}"), Some(k)));
            }
        }
    }
    let blocks: Vec<Vec<Row>> = jobs
        .par_iter()
        .map(|(c, theta, label, eig)| match eig {
            None => gate_rows(c, theta, &rho, spec.steps_per_gate, label),
            Some(k) => eigen_path_rows(c, theta, &rho, *k, &spec, tol, label),
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new("trajectory", COLUMNS.iter().map(|s| s.to_string()).collect());
    let mut summary = Vec::new();
    for (block, (_, _, label, eig)) in blocks.iter().zip(&jobs) {
        for row in block {
            push_row(&mut table, row)?;
        }
        if eig.is_some() {
            let purities: Vec<f64> = block.iter().map(|r| r.state.purity()).collect();
            let lo = purities.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = purities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            summary.push(format!("{label}: purity range {:.3e}", hi - lo));
        }
    }
    Ok(RunOutcome::table(table, summary))
}

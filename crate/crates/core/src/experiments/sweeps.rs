//! Parameter sweeps: eigenvalues against noise strength, full spectra, and depth/noise scaling.

use rayon::prelude::*;

use super::config::{CircuitSpec, ExperimentConfig, NoiseModel};
use super::output::{fmt_f64, Table};
use super::trajectory::parameter_points;
use super::{angles_for, fit_slope, group_gap_ratio, RunOutcome};
use crate::error::Result;
use crate::qfim::{qfim_of_circuit, QfimReport};
use crate::qnn::{toy_model, ParameterVector};
use crate::rng::CounterRng;

/// `0, 0.025, …, 0.45`. At `p = 1/2` bit-flip noise is a full dephasing projection and every
/// derivative of the toy model vanishes, so the grid stops short of it.
pub fn default_eig_p_grid() -> Vec<f64> {
    (0..=18).map(|k| k as f64 / 40.0).collect()
}

pub const DEFAULT_SPECTRUM_P: [f64; 6] = [0.0, 1e-5, 1e-4, 1e-3, 1e-2, 0.08];

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// One row per `(θ label, p, eigenvalue index)`, eigenvalues descending.
pub fn run_eig_vs_p(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let noise = cfg.noise_or(NoiseModel::BitFlip);
    let mut ps = cfg.p_grid();
    if ps.is_empty() {
        ps = default_eig_p_grid();
    }
    let tol = cfg.rank_tolerance();
    let (base, rho) = toy_model();
    let points = parameter_points(cfg)?;
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|a| (0..ps.len()).map(move |b| (a, b))).collect();
    let reports: Vec<QfimReport> = jobs
        .par_iter()
        .map(|&(a, b)| {
            let mut rng = CounterRng::new(cfg.seed()).fork(b as u64);
            let c = noise.attach(base.clone(), ps[b], &mut rng)?;
            qfim_of_circuit(&c, &points[a].1, &rho, tol)
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new("eig_vs_p", columns(&["theta_label", "p", "index", "eigenvalue", "rank"]));
    let mut summary = Vec::new();
    for (&(a, b), r) in jobs.iter().zip(&reports) {
        for (k, l) in r.eigenvalues.iter().enumerate() {
            table.push(vec![points[a].0.clone(), fmt_f64(ps[b]), k.to_string(), fmt_f64(*l), r.rank.to_string()]);
        }
        if b == 0 || b + 1 == ps.len() {
            summary.push(format!("{} p={}: rank {}", points[a].0, ps[b], r.rank));
        }
    }
    Ok(RunOutcome::table(table, summary))
}

/// QFIM spectrum of the configured HVA at each `p`.
pub fn run_spectrum(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let spec = cfg.circuit.clone().expect("validated config has a circuit");
    let CircuitSpec::HvaTfim { n, layers } = spec else { unreachable!("validated as hva_tfim") };
    let noise = cfg.noise_or(NoiseModel::LocalDepol);
    let mut ps = cfg.p_grid();
    if ps.is_empty() {
        ps = DEFAULT_SPECTRUM_P.to_vec();
    }
    let tol = cfg.rank_tolerance();
    let eps = cfg.epsilons();
    let (base, rho) = spec.build()?;
    let m = base.num_params();
    let theta = ParameterVector::new(angles_for(cfg, m)?);

    let noiseless = qfim_of_circuit(&base, &theta, &rho, tol)?;
    let reports: Vec<QfimReport> = ps
        .par_iter()
        .enumerate()
        .map(|(b, &p)| {
            let mut rng = CounterRng::new(cfg.seed()).fork(b as u64);
            let c = noise.attach(base.clone(), p, &mut rng)?;
            qfim_of_circuit(&c, &theta, &rho, tol)
        })
        .collect::<Result<_>>()?;

    let mut names = vec!["n", "L", "M", "p", "seed", "index", "eigenvalue", "rank", "d1"].into_iter().map(String::from).collect::<Vec<_>>();
    names.extend(eps.iter().map(|e| format!("d1_eps_{e:e}")));
    let mut table = Table::new("spectrum", names);
    let mut summary = vec![format!("noiseless rank {} lambda_max {:.6e}", noiseless.rank, noiseless.lambda_max())];
    for (&p, r) in ps.iter().zip(&reports) {
        let counts: Vec<String> = eps.iter().map(|&e| r.eigenvalues.iter().filter(|&&l| l > e).count().to_string()).collect();
        for (k, l) in r.eigenvalues.iter().enumerate() {
            let mut row = vec![
                n.to_string(),
                layers.to_string(),
                m.to_string(),
                fmt_f64(p),
                cfg.seed().to_string(),
                k.to_string(),
                fmt_f64(*l),
                r.rank.to_string(),
                r.d1.to_string(),
            ];
            row.extend(counts.iter().cloned());
            table.push(row);
        }
        let gap = group_gap_ratio(&r.eigenvalues, noiseless.rank).map_or("n/a".to_string(), |g| format!("{g:.3e}"));
        summary.push(format!(
            "p={p}: rank {} lambda_max {:.6e} gap at noiseless rank {gap} lambda_max/noiseless {:.3e}",
            r.rank,
            r.lambda_max(),
            r.lambda_max() / noiseless.lambda_max()
        ));
    }
    Ok(RunOutcome::table(table, summary))
}

/// Aggregates of one QFIM for the scaling table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingPoint {
    pub mean_abs_entry: f64,
    pub std_abs_entry: f64,
    pub mean_eigenvalue: f64,
    pub std_eigenvalue: f64,
    pub rank: usize,
}

impl ScalingPoint {
    pub fn of(r: &QfimReport) -> Self {
        let entries: Vec<f64> = r.matrix.data().iter().map(|x| x.abs()).collect();
        let (mean_abs_entry, std_abs_entry) = mean_std(&entries);
        let (mean_eigenvalue, std_eigenvalue) = mean_std(&r.eigenvalues);
        Self { mean_abs_entry, std_abs_entry, mean_eigenvalue, std_eigenvalue, rank: r.rank }
    }
}

/// Mean and population standard deviation.
fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Depth grid: `sweep.layers`, or `1..=L` of the configured circuit.
fn layer_grid(cfg: &ExperimentConfig, spec: &CircuitSpec) -> Vec<usize> {
    if let Some(l) = cfg.sweep.as_ref().and_then(|s| s.layers.clone()) {
        return l;
    }
    match spec {
        CircuitSpec::HvaTfim { layers, .. } => (1..=*layers).collect(),
        CircuitSpec::Toy {} => vec![1],
    }
}

/// QFIM statistics over the grid `layers × p`. All depths share one seeded angle stream, the
/// circuit with `L` layers taking its first `2L` angles.
pub fn run_scaling(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let spec = cfg.circuit.clone().expect("validated config has a circuit");
    let CircuitSpec::HvaTfim { n, .. } = spec else { unreachable!("validated as hva_tfim") };
    let noise = cfg.noise_or(NoiseModel::GlobalDepol);
    let mut ps = cfg.p_grid();
    if ps.is_empty() {
        ps = vec![0.05];
    }
    let ls = layer_grid(cfg, &spec);
    let l_max = ls.iter().copied().max().unwrap_or(1);
    let all_angles = if cfg.theta.is_some() { angles_for(cfg, 2 * l_max)? } else { CounterRng::new(cfg.seed()).angles(2 * l_max) };
    let tol = cfg.rank_tolerance();

    // index 0 of the p axis is the noiseless reference
    let mut p_axis = vec![0.0];
    p_axis.extend(ps.iter().copied());
    let jobs: Vec<(usize, usize)> = (0..ls.len()).flat_map(|a| (0..p_axis.len()).map(move |b| (a, b))).collect();
    let points: Vec<ScalingPoint> = jobs
        .par_iter()
        .map(|&(a, b)| {
            let (base, rho) = spec.with_layers(ls[a])?.build()?;
            let theta = ParameterVector::new(all_angles[..2 * ls[a]].to_vec());
            let mut rng = CounterRng::new(cfg.seed()).fork((a * p_axis.len() + b) as u64);
            let c = noise.attach(base, p_axis[b], &mut rng)?;
            Ok(ScalingPoint::of(&qfim_of_circuit(&c, &theta, &rho, tol)?))
        })
        .collect::<Result<_>>()?;

    let names = [
        "n",
        "L",
        "M",
        "p",
        "seed",
        "mean_abs_entry",
        "std_abs_entry",
        "mean_eigenvalue",
        "std_eigenvalue",
        "rank",
        "noiseless_mean_eigenvalue",
    ];
    let mut table = Table::new("scaling", columns(&names));
    let stride = p_axis.len();
    for (&(a, b), pt) in jobs.iter().zip(&points) {
        if b == 0 {
            continue;
        }
        let reference = points[a * stride];
        table.push(vec![
            n.to_string(),
            ls[a].to_string(),
            (2 * ls[a]).to_string(),
            fmt_f64(p_axis[b]),
            cfg.seed().to_string(),
            fmt_f64(pt.mean_abs_entry),
            fmt_f64(pt.std_abs_entry),
            fmt_f64(pt.mean_eigenvalue),
            fmt_f64(pt.std_eigenvalue),
            pt.rank.to_string(),
            fmt_f64(reference.mean_eigenvalue),
        ]);
    }

    let mut summary = Vec::new();
    if ls.len() >= 2 {
        let ms: Vec<f64> = ls.iter().map(|&l| 2.0 * l as f64).collect();
        for (b, &p) in p_axis.iter().enumerate().skip(1) {
            let raw: Vec<f64> = (0..ls.len()).map(|a| points[a * stride + b].mean_eigenvalue.ln()).collect();
            let normalized: Vec<f64> =
                (0..ls.len()).map(|a| (points[a * stride + b].mean_eigenvalue / points[a * stride].mean_eigenvalue).ln()).collect();
            let expected = (1.0 - p).ln();
            let slope = fit_slope(&ms, &raw);
            let norm_slope = fit_slope(&ms, &normalized);
            summary.push(format!(
                "p={p}: slope of ln(mean eigenvalue) vs M {slope:.5e}, ln(1-p) {expected:.5e}, relative error {:.3}; noise-normalized slope {norm_slope:.5e}",
                ((slope - expected) / expected).abs()
            ));
        }
    }
    Ok(RunOutcome::table(table, summary))
}

/// Slope summary of a scaling table for one `p`: `(raw slope, noise-normalized slope)`.
pub fn scaling_slopes(table: &Table, p: f64) -> Result<(f64, f64)> {
    let ps = table.floats("p")?;
    let ms = table.floats("M")?;
    let mean = table.floats("mean_eigenvalue")?;
    let reference = table.floats("noiseless_mean_eigenvalue")?;
    let idx: Vec<usize> = (0..ps.len()).filter(|&k| ps[k] == p).collect();
    let x: Vec<f64> = idx.iter().map(|&k| ms[k]).collect();
    let raw: Vec<f64> = idx.iter().map(|&k| mean[k].ln()).collect();
    let norm: Vec<f64> = idx.iter().map(|&k| (mean[k] / reference[k]).ln()).collect();
    Ok((fit_slope(&x, &raw), fit_slope(&x, &norm)))
}

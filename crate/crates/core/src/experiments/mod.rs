//! JSON-configured experiment runs with deterministic CSV/JSON output.

pub mod algebra;
pub mod config;
pub mod output;
pub mod sweeps;
pub mod trajectory;
pub mod verify;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::rng::CounterRng;
use config::{ExperimentConfig, ExperimentKind, OutputFormat};
use output::{json_envelope, Table};

/// What a run produced.
#[derive(Clone, Debug)]
pub enum Artifact {
    Table(Table),
    /// Complete JSON document (already wrapped in the envelope).
    Json(Value),
    Text(String),
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub artifact: Artifact,
    /// False when a verification or closed-form comparison failed.
    pub passed: bool,
    /// Human-readable lines for stderr.
    pub summary: Vec<String>,
}

impl RunOutcome {
    fn table(table: Table, summary: Vec<String>) -> Self {
        Self { artifact: Artifact::Table(table), passed: true, summary }
    }

    /// Final bytes to write, honoring the configured output format for tables.
    pub fn render(&self, cfg: &ExperimentConfig) -> Result<String> {
        match &self.artifact {
            Artifact::Table(t) => match cfg.output_format(OutputFormat::Csv) {
                OutputFormat::Csv => t.to_csv(),
                OutputFormat::Json => pretty(&json_envelope(cfg, &t.to_json())?),
            },
            Artifact::Json(v) => pretty(v),
            Artifact::Text(s) => Ok(s.clone()),
        }
    }
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Default worker count: available cores, at most 8.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8)
}

/// Validates `cfg` and runs it on a bounded worker pool.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let workers = cfg.workers.unwrap_or_else(default_workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| match cfg.experiment {
        ExperimentKind::Trajectory => trajectory::run_trajectory(cfg),
        ExperimentKind::EigVsP => sweeps::run_eig_vs_p(cfg),
        ExperimentKind::Spectrum => sweeps::run_spectrum(cfg),
        ExperimentKind::Scaling => sweeps::run_scaling(cfg),
        ExperimentKind::Verify => verify_run(cfg),
        ExperimentKind::Dla => algebra::run_dla(cfg),
    })
}

fn verify_run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let ctx = verify::VerifyContext {
        seed: cfg.seed(),
        spec: cfg.verify.clone().unwrap_or_default(),
        tolerance: cfg.rank_tolerance(),
    };
    let results = verify::run_all(&ctx)?;
    let passed = results.iter().all(|r| r.passed);
    let summary = results.iter().map(|r| r.line()).collect();
    let doc = json_envelope(cfg, &serde_json::json!({ "passed": passed, "properties": results }))?;
    Ok(RunOutcome { artifact: Artifact::Json(doc), passed, summary })
}

/// Explicit `theta` (length-checked) or the first `m` angles of the seeded stream. Shorter
/// circuits therefore see a prefix of the angles of longer ones.
pub fn angles_for(cfg: &ExperimentConfig, m: usize) -> Result<Vec<f64>> {
    match &cfg.theta {
        Some(t) if t.len() != m => Err(Error::Config(format!("theta has {} entries, the circuit has {m} parameters", t.len()))),
        Some(t) => Ok(t.clone()),
        None => Ok(CounterRng::new(cfg.seed()).angles(m)),
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `λ_{r−1} / λ_r` for descending eigenvalues: the smallest of the top `r` over the largest of
/// the rest. `None` when either group is empty or the lower one is not positive.
pub fn group_gap_ratio(descending: &[f64], r: usize) -> Option<f64> {
    if r == 0 || r >= descending.len() || descending[r] <= 0.0 {
        return None;
    }
    Some(descending[r - 1] / descending[r])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        assert!((fit_slope(&x, &y) + 0.5).abs() < 1e-14);
    }

    #[test]
    fn gap_ratio_edges() {
        assert_eq!(group_gap_ratio(&[4.0, 2.0, 0.1], 2), Some(20.0));
        assert_eq!(group_gap_ratio(&[4.0, 2.0], 2), None);
        assert_eq!(group_gap_ratio(&[4.0, 0.0], 1), None);
    }

    #[test]
    fn explicit_theta_length_is_checked() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Trajectory);
        cfg.theta = Some(vec![0.1, 0.2]);
        assert!(angles_for(&cfg, 4).is_err());
        assert_eq!(angles_for(&cfg, 2).unwrap(), vec![0.1, 0.2]);
        cfg.theta = None;
        assert_eq!(angles_for(&cfg, 6).unwrap()[..3], angles_for(&cfg, 3).unwrap()[..]);
    }
}

//! JSON run configuration. Unknown keys are rejected everywhere.

use serde::{Deserialize, Serialize};

use crate::channels::{compose, Channel};
use crate::error::{Error, Result};
use crate::qfim::RankTolerance;
use crate::qnn::{hva_tfim, plus_product_state, toy_model, NoisyCircuit};
use crate::rng::CounterRng;
use crate::sampling::random_pauli_channel;
use crate::tensor::DensityMatrix;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Trajectory,
    EigVsP,
    Spectrum,
    Scaling,
    Verify,
    Dla,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Trajectory => "trajectory",
            ExperimentKind::EigVsP => "eig_vs_p",
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::Verify => "verify",
            ExperimentKind::Dla => "dla",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum CircuitSpec {
    Toy {},
    HvaTfim { n: usize, layers: usize },
}

impl CircuitSpec {
    pub fn n_qubits(&self) -> usize {
        match self {
            CircuitSpec::Toy {} => 1,
            CircuitSpec::HvaTfim { n, .. } => *n,
        }
    }

    /// Noiseless circuit and its default input state.
    pub fn build(&self) -> Result<(NoisyCircuit, DensityMatrix)> {
        match self {
            CircuitSpec::Toy {} => Ok(toy_model()),
            CircuitSpec::HvaTfim { n, layers } => Ok((hva_tfim(*n, *layers)?, plus_product_state(*n))),
        }
    }

    /// Same circuit family at a different depth.
    pub fn with_layers(&self, layers: usize) -> Result<CircuitSpec> {
        match self {
            CircuitSpec::Toy {} => Err(Error::Config("the toy circuit has a fixed depth".into())),
            CircuitSpec::HvaTfim { n, .. } => Ok(CircuitSpec::HvaTfim { n: *n, layers }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    None,
    BitFlip,
    GlobalDepol,
    LocalDepol,
    /// Local depolarization after a random unital Pauli channel.
    LocalDepolPauli,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub model: NoiseModel,
    #[serde(default)]
    pub p: Vec<f64>,
    /// Only `"interleaved"` (before and after every gate) is supported.
    #[serde(default)]
    pub placement: Option<String>,
    /// Number of Pauli strings in each random unital Pauli channel.
    #[serde(default)]
    pub pauli_terms: Option<usize>,
}

impl NoiseSpec {
    /// One noise slot of the model at probability `p`. `p = 0` or model `none` gives identity.
    /// `rng` supplies the random Pauli channel of [`NoiseModel::LocalDepolPauli`].
    pub fn channel(&self, n: usize, p: f64, rng: &mut CounterRng) -> Result<Channel> {
        if self.model == NoiseModel::None || p == 0.0 {
            return Ok(Channel::identity(n));
        }
        match self.model {
            NoiseModel::None => Ok(Channel::identity(n)),
            NoiseModel::BitFlip => Channel::bit_flip(n, p),
            NoiseModel::GlobalDepol => Channel::global_depol(n, p),
            NoiseModel::LocalDepol => Channel::local_depol_uniform(n, p),
            NoiseModel::LocalDepolPauli => {
                let pauli = Channel::Pauli(random_pauli_channel(n, self.pauli_terms.unwrap_or(4), rng));
                compose(&Channel::local_depol_uniform(n, p)?, &pauli)
            }
        }
    }

    /// Attaches fresh noise slots to `c`.
    pub fn attach(&self, c: NoisyCircuit, p: f64, rng: &mut CounterRng) -> Result<NoisyCircuit> {
        let n = c.n_qubits();
        if self.model == NoiseModel::LocalDepolPauli {
            let slots = (0..=c.num_params()).map(|_| self.channel(n, p, rng)).collect::<Result<Vec<_>>>()?;
            c.with_noise_slots(slots)
        } else {
            let ch = self.channel(n, p, rng)?;
            c.with_uniform_noise(ch)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub p: Option<Vec<f64>>,
    #[serde(default)]
    pub layers: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default)]
    pub rank_abs: Option<f64>,
    #[serde(default)]
    pub rank_rel: Option<f64>,
    /// Cutoffs for the `D₁^(ε)` columns.
    #[serde(default)]
    pub epsilons: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySpec {
    /// Points per gate in the gate-by-gate evolution.
    #[serde(default = "default_steps")]
    pub steps_per_gate: usize,
    /// Points on each side of the base point along an eigenvector path.
    #[serde(default = "default_steps")]
    pub path_steps: usize,
    /// Path parameter range `[−span, span]` (radians of arc length in θ space).
    #[serde(default = "default_span")]
    pub span: f64,
    /// RK4 substeps per emitted point.
    #[serde(default = "default_substeps")]
    pub substeps: usize,
}

fn default_steps() -> usize {
    100
}

fn default_span() -> f64 {
    0.5
}

fn default_substeps() -> usize {
    8
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        Self { steps_per_gate: default_steps(), path_steps: default_steps(), span: default_span(), substeps: default_substeps() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    /// Random circuit instances per property.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Random unit directions per instance for the quadratic-form bound.
    #[serde(default = "default_directions")]
    pub directions: usize,
    /// Random (state, channel) triples for the contraction check.
    #[serde(default = "default_contraction_trials")]
    pub contraction_trials: usize,
    /// Largest register used by the random instances.
    #[serde(default = "default_max_qubits")]
    pub max_qubits: usize,
}

fn default_trials() -> usize {
    50
}

fn default_directions() -> usize {
    100
}

fn default_contraction_trials() -> usize {
    100
}

fn default_max_qubits() -> usize {
    3
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            directions: default_directions(),
            contraction_trials: default_contraction_trials(),
            max_qubits: default_max_qubits(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub circuit: Option<CircuitSpec>,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    /// Explicit angles; when absent angles are drawn uniformly in `[0, 2π)` from `seed`.
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub tolerances: Option<ToleranceSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub trajectory: Option<TrajectorySpec>,
    #[serde(default)]
    pub verify: Option<VerifySpec>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Bare config for `kind` with every optional section at its default.
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            experiment: kind,
            circuit: None,
            noise: None,
            theta: None,
            seed: None,
            sweep: None,
            tolerances: None,
            output: None,
            workers: None,
            trajectory: None,
            verify: None,
        }
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        if let Some(noise) = &self.noise {
            if let Some(placement) = &noise.placement {
                if placement != "interleaved" {
                    return Err(Error::Config(format!("unsupported noise placement {placement:?}; only \"interleaved\" is available")));
                }
            }
            for &p in &noise.p {
                check_p(p)?;
            }
            if noise.pauli_terms == Some(0) {
                return Err(Error::Config("pauli_terms must be at least 1".into()));
            }
        }
        if let Some(sweep) = &self.sweep {
            for &p in sweep.p.iter().flatten() {
                check_p(p)?;
            }
            if sweep.layers.iter().flatten().any(|&l| l == 0) {
                return Err(Error::Config("layer counts must be at least 1".into()));
            }
        }
        if let Some(t) = &self.tolerances {
            for (name, v) in [("rank_abs", t.rank_abs), ("rank_rel", t.rank_rel)] {
                if let Some(v) = v {
                    if !(v >= 0.0 && v.is_finite()) {
                        return Err(Error::Config(format!("{name} must be a finite non-negative number")));
                    }
                }
            }
        }
        if let Some(CircuitSpec::HvaTfim { n, layers }) = &self.circuit {
            if *n < 2 || *n > 8 {
                return Err(Error::Config(format!("hva_tfim needs 2 ≤ n ≤ 8, got {n}")));
            }
            if *layers == 0 {
                return Err(Error::Config("hva_tfim needs at least one layer".into()));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if let Some(t) = &self.trajectory {
            if t.steps_per_gate == 0 || t.path_steps == 0 || t.substeps == 0 || !(t.span > 0.0) {
                return Err(Error::Config("trajectory step counts and span must be positive".into()));
            }
        }
        if matches!(self.experiment, ExperimentKind::Verify | ExperimentKind::Dla)
            && self.output.as_ref().and_then(|o| o.format) == Some(OutputFormat::Csv)
        {
            return Err(Error::Config(format!("experiment {} has no CSV output", self.experiment.name())));
        }
        let needs_circuit =matches!(self.experiment, ExperimentKind::Spectrum | ExperimentKind::Scaling | ExperimentKind::Dla);
        if needs_circuit && self.circuit.is_none() {
            return Err(Error::Config(format!("experiment {} needs a circuit", self.experiment.name())));
        }
        match (self.experiment, &self.circuit) {
            (ExperimentKind::Trajectory | ExperimentKind::EigVsP, Some(CircuitSpec::HvaTfim { .. })) => {
                Err(Error::Config(format!("experiment {} runs on the toy circuit only", self.experiment.name())))
            }
            (ExperimentKind::Spectrum | ExperimentKind::Scaling, Some(CircuitSpec::Toy {})) => {
                Err(Error::Config(format!("experiment {} needs an hva_tfim circuit", self.experiment.name())))
            }
            _ => Ok(()),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn rank_tolerance(&self) -> RankTolerance {
        let mut tol = RankTolerance::default();
        if let Some(t) = &self.tolerances {
            if let Some(a) = t.rank_abs {
                tol.abs = a;
            }
            if let Some(r) = t.rank_rel {
                tol.rel = r;
            }
        }
        tol
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.tolerances.as_ref().map(|t| t.epsilons.clone()).unwrap_or_default()
    }

    /// Probability grid: `sweep.p` if given, otherwise `noise.p`.
    pub fn p_grid(&self) -> Vec<f64> {
        if let Some(p) = self.sweep.as_ref().and_then(|s| s.p.clone()) {
            return p;
        }
        self.noise.as_ref().map(|n| n.p.clone()).unwrap_or_default()
    }

    pub fn noise_or(&self, model: NoiseModel) -> NoiseSpec {
        self.noise.clone().unwrap_or(NoiseSpec { model, p: Vec::new(), placement: None, pauli_terms: None })
    }

    pub fn output_format(&self, default: OutputFormat) -> OutputFormat {
        self.output.as_ref().and_then(|o| o.format).unwrap_or(default)
    }

    pub fn output_path(&self) -> Option<&str> {
        self.output.as_ref().and_then(|o| o.path.as_deref())
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("noise probability {p} is outside [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg = ExperimentConfig::from_json(r#"{"experiment": "dla", "circuit": {"name": "hva_tfim", "n": 4, "layers": 1}}"#).unwrap();
        assert_eq!(cfg.circuit, Some(CircuitSpec::HvaTfim { n: 4, layers: 1 }));
        assert_eq!(cfg.seed(), DEFAULT_SEED);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(ExperimentConfig::from_json(r#"{"experiment": "dla", "circuit": {"name": "toy"}, "colour": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "dla", "circuit": {"name": "toy", "n": 3}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "verify", "verify": {"trails": 3}}"#).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            r#"{"experiment": "spectrum", "circuit": {"name": "hva_tfim", "n": 4, "layers": 2}, "noise": {"model": "local_depol", "p": [1.5]}}"#,
            r#"{"experiment": "spectrum", "circuit": {"name": "hva_tfim", "n": 4, "layers": 2}, "noise": {"model": "local_depol", "placement": "end"}}"#,
            r#"{"experiment": "spectrum", "circuit": {"name": "toy"}}"#,
            r#"{"experiment": "scaling"}"#,
            r#"{"experiment": "trajectory", "circuit": {"name": "hva_tfim", "n": 2, "layers": 1}}"#,
            r#"{"experiment": "flow"}"#,
        ];
        for text in bad {
            assert!(matches!(ExperimentConfig::from_json(text), Err(Error::Config(_))), "{text}");
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use qfimlab::experiments::config::{ExperimentConfig, ExperimentKind};
use qfimlab::experiments::run;
use qfimlab::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Experiment {
    Trajectory,
    EigVsP,
    Spectrum,
    Scaling,
    Verify,
    Dla,
}

impl From<Experiment> for ExperimentKind {
    fn from(e: Experiment) -> Self {
        match e {
            Experiment::Trajectory => ExperimentKind::Trajectory,
            Experiment::EigVsP => ExperimentKind::EigVsP,
            Experiment::Spectrum => ExperimentKind::Spectrum,
            Experiment::Scaling => ExperimentKind::Scaling,
            Experiment::Verify => ExperimentKind::Verify,
            Experiment::Dla => ExperimentKind::Dla,
        }
    }
}

/// Noisy QNN simulator and QFIM spectral toolkit.
///
/// Exit status: 0 on success, 1 on a configuration error, 2 when a verification fails.
#[derive(Debug, Parser)]
#[command(name = "qfimlab", version)]
struct Cli {
    /// Experiment to run; must agree with the config's `experiment` field.
    experiment: Experiment,
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output file (default: the config's output path, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweep points.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e @ Error::Config(_)) => {
            eprintln!("qfimlab: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qfimlab: {e}");
            ExitCode::from(2)
        }
    }
}

/// Runs the experiment and writes its output; `Ok(false)` when a check failed.
fn execute(cli: &Cli) -> Result<bool, Error> {
    let mut cfg = ExperimentConfig::from_file(&cli.config)?;
    let kind = ExperimentKind::from(cli.experiment);
    if cfg.experiment != kind {
        return Err(Error::Config(format!(
            "command line asks for {} but the config describes {}",
            kind.name(),
            cfg.experiment.name()
        )));
    }
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    let outcome = run(&cfg)?;
    let body = outcome.render(&cfg)?;
    let path = cli.out.clone().or_else(|| cfg.output_path().map(PathBuf::from));
    match path {
        Some(p) => std::fs::write(&p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        None => print!("{body}"),
    }
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    Ok(outcome.passed)
}

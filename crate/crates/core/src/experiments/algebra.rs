//! Dynamical Lie algebra report for a configured circuit.

use serde::Serialize;

use super::config::{CircuitSpec, ExperimentConfig, OutputFormat};
use super::output::json_envelope;
use super::{Artifact, RunOutcome};
use crate::dla::{lie_closure, pauli_expansion, sector_lie_closure, x_parity_sector};
use crate::error::Result;

/// Largest register whose basis is expanded in Pauli strings.
const PAULI_LISTING_MAX_QUBITS: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct DlaReport {
    pub circuit: String,
    pub n_qubits: usize,
    /// Closure over the full Hilbert space.
    pub full_dim: usize,
    /// Closure on the `X^{⊗n} = +1` sector containing `|+⟩^{⊗n}` (HVA only).
    pub sector_dim: Option<usize>,
    /// Closed-form value when one is known: 3 for the toy model, `3n/2` for the HVA at even `n`.
    pub expected: Option<usize>,
    /// The dimension compared against `expected` (sector for the HVA, full space otherwise).
    pub compared: usize,
    pub matches: Option<bool>,
    /// Basis elements `iΣc_Pσ_P` as `(label, c_P)` lists, small registers only.
    pub basis: Option<Vec<Vec<(String, f64)>>>,
}

pub fn dla_report(spec: &CircuitSpec) -> Result<DlaReport> {
    let (circuit, _) = spec.build()?;
    let n = circuit.n_qubits();
    let full = lie_closure(circuit.generators(), None)?;
    let (name, sector_dim, expected) = match spec {
        CircuitSpec::Toy {} => ("toy".to_string(), None, Some(3)),
        CircuitSpec::HvaTfim { n, layers } => {
            let sector = sector_lie_closure(circuit.generators(), &x_parity_sector(*n, 1.0), None)?;
            let expected = if n % 2 == 0 { Some(3 * n / 2) } else { None };
            (format!("hva_tfim n={n} L={layers}"), Some(sector.dim()), expected)
        }
    };
    let compared = sector_dim.unwrap_or(full.dim());
    let basis = if n <= PAULI_LISTING_MAX_QUBITS {
        Some(full.elements().iter().map(|e| pauli_expansion(e, 1e-12)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    Ok(DlaReport {
        circuit: name,
        n_qubits: n,
        full_dim: full.dim(),
        sector_dim,
        expected,
        compared,
        matches: expected.map(|e| e == compared),
        basis,
    })
}

impl DlaReport {
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!("circuit {}", self.circuit), format!("dim g (full space) = {}", self.full_dim)];
        if let Some(s) = self.sector_dim {
            out.push(format!("dim g (X-parity +1 sector) = {s}"));
        }
        match (self.expected, self.matches) {
            (Some(e), Some(true)) => out.push(format!("closed form {e}: match")),
            (Some(e), _) => out.push(format!("closed form {e}: MISMATCH (got {})", self.compared)),
            _ => out.push("no closed form for this circuit".into()),
        }
        out
    }
}

pub fn run_dla(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let spec = cfg.circuit.as_ref().expect("validated config has a circuit");
    let report = dla_report(spec)?;
    let summary = report.lines();
    let passed = report.matches != Some(false);
    let json = cfg.output.as_ref().and_then(|o| o.format) == Some(OutputFormat::Json);
    let artifact = if json {
        Artifact::Json(json_envelope(cfg, &report)?)
    } else {
        let mut text = summary.join("\n");
        if let Some(basis) = &report.basis {
            for (k, terms) in basis.iter().enumerate() {
                let body: Vec<String> = terms.iter().map(|(p, c)| format!("{c:+.6} {p}")).collect();
                text.push_str(&format!("\nelement {k}: i({})", body.join(" ")));
            }
        }
        text.push('\n');
        Artifact::Text(text)
    };
    Ok(RunOutcome { artifact, passed, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_report() {
        let r = dla_report(&CircuitSpec::Toy {}).unwrap();
        assert_eq!((r.full_dim, r.compared, r.matches), (3, 3, Some(true)));
        assert_eq!(r.basis.unwrap().len(), 3);
    }

    #[test]
    fn odd_hva_has_no_closed_form() {
        let r = dla_report(&CircuitSpec::HvaTfim { n: 3, layers: 1 }).unwrap();
        assert_eq!(r.expected, None);
        assert_eq!(r.sector_dim, Some(4));
    }
}

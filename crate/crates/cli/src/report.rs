//! Machine-readable reports. Floats are written in their shortest form that
//! parses back to the identical `f64`; non-finite values become `null`.

use floquet_core::floquet::{MethodComparison, MultiplierReport};
use floquet_core::numlin::ComplexValue;
use floquet_core::ode::IntegratorConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::target::Target;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemInfo {
    pub name: String,
    pub source: String,
    pub hash: String,
    pub dimension: usize,
    pub parameters: Vec<Parameter>,
    /// `builtin`, `file`, `discovered` or `none`.
    pub cofactor_source: String,
}

impl SystemInfo {
    pub fn of(target: &Target) -> Self {
        use crate::target::ManifoldSource;
        Self {
            name: target.name.clone(),
            source: target.source.clone(),
            hash: target.hash(),
            dimension: target.system.variables().len(),
            parameters: target
                .parameters
                .iter()
                .map(|(name, value)| Parameter {
                    name: name.clone(),
                    value: value.clone(),
                })
                .collect(),
            cofactor_source: match &target.manifolds {
                Ok((_, ManifoldSource::Builtin)) => "builtin".into(),
                Ok((_, ManifoldSource::File)) => "file".into(),
                Ok((_, ManifoldSource::Discovered { .. })) => "discovered".into(),
                Err(_) => "none".into(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorInfo {
    pub rtol: f64,
    pub atol: f64,
}

impl From<&IntegratorConfig> for IntegratorInfo {
    fn from(cfg: &IntegratorConfig) -> Self {
        Self {
            rtol: cfg.rtol,
            atol: cfg.atol,
        }
    }
}

/// `[re, im]`.
pub type Complex = [f64; 2];

pub fn complex(z: ComplexValue) -> Complex {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsInfo {
    pub orbit_residual: f64,
    pub symbolic_invariance: Option<bool>,
    pub invariance_residual: Option<f64>,
    pub min_transversality: Option<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: String,
    pub multipliers: Vec<Complex>,
    pub moduli: Vec<f64>,
    pub verdict: String,
    pub note: String,
    pub diagnostics: DiagnosticsInfo,
    pub elapsed_seconds: f64,
}

impl MethodResult {
    pub fn of(report: &MultiplierReport, elapsed_seconds: f64) -> Self {
        let d = &report.diagnostics;
        Self {
            method: report.method.as_str().into(),
            multipliers: report.multipliers.iter().copied().map(complex).collect(),
            moduli: report.moduli(),
            verdict: report.verdict.as_str().into(),
            note: report.verdict.note().into(),
            diagnostics: DiagnosticsInfo {
                orbit_residual: d.orbit_residual,
                symbolic_invariance: d.symbolic_invariance,
                invariance_residual: d.invariance_residual,
                min_transversality: d.min_transversality,
                samples: d.samples,
            },
            elapsed_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonInfo {
    /// Variational eigenvalue attributed to the flow direction.
    pub trivial: Complex,
    /// `[cofactor, variational]` pairs.
    pub pairs: Vec<[Complex; 2]>,
    pub max_distance: f64,
    pub max_relative_distance: f64,
}

impl From<&MethodComparison> for ComparisonInfo {
    fn from(c: &MethodComparison) -> Self {
        Self {
            trivial: complex(c.trivial),
            pairs: c
                .pairs
                .iter()
                .map(|(a, b)| [complex(*a), complex(*b)])
                .collect(),
            max_distance: c.max_distance,
            max_relative_distance: c.max_relative_distance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub system: SystemInfo,
    pub integrator: IntegratorInfo,
    pub samples: usize,
    pub results: Vec<MethodResult>,
    pub comparison: Option<ComparisonInfo>,
    /// Closed-form multipliers, when known.
    pub reference: Option<Vec<f64>>,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub system: SystemInfo,
    pub samples: usize,
    pub threshold: f64,
    pub orbit_residual: f64,
    pub symbolic_invariance: Option<bool>,
    pub invariance_residual: f64,
    pub min_transversality: f64,
    /// Smallest and largest sampled transversality determinant.
    pub transversality_range: [f64; 2],
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationInfo {
    pub seed: u64,
    pub v0: Vec<f64>,
    pub v1_drift: f64,
    pub h1_drift: f64,
    pub h2_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteklovReport {
    pub parameters: Vec<Parameter>,
    pub integrator: IntegratorInfo,
    pub period: f64,
    pub modulus: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub b: f64,
    pub c: f64,
    pub structure_residual: f64,
    pub unit_eigenvalue_count: usize,
    pub eigenvalues: Vec<Complex>,
    pub nontrivial: [Complex; 2],
    pub verdict: String,
    pub conservation: ConservationInfo,
    pub total_seconds: f64,
}

pub fn write_json<T: Serialize>(path: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serializing report: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Config(format!("writing {path}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        let values = [
            0.1,
            1.0 / 3.0,
            std::f64::consts::PI.exp(),
            (-4.0 * std::f64::consts::PI).exp(),
            5e-324,
            f64::MAX,
        ];
        let text = serde_json::to_string(&values).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        for (a, b) in values.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn non_finite_values_become_null() {
        let d = DiagnosticsInfo {
            orbit_residual: f64::NAN,
            symbolic_invariance: None,
            invariance_residual: None,
            min_transversality: Some(2.0),
            samples: 64,
        };
        let v: serde_json::Value = serde_json::to_value(&d).unwrap();
        assert!(v["orbit_residual"].is_null());
        assert_eq!(v["min_transversality"], 2.0);
    }
}

//! Characteristic multipliers of a known periodic orbit.
//!
//! The cofactor route integrates `v' = k(gamma(t)) v`, `v(0) = Id`, where `k`
//! is the cofactor matrix of `n - 1` hypersurfaces `f = 0` whose transversal
//! intersection is the orbit (`Df X = k f`); the eigenvalues of `v(T)` are the
//! `n - 1` multipliers. The variational route integrates `u' = DX(gamma(t)) u`
//! and yields the same multipliers plus a trivial eigenvalue 1.
//!
//! The hypotheses of the cofactor route (orbit, invariance, transversality)
//! are checked at runtime before it runs.

mod checks;
mod discover;
mod model;
mod multipliers;
mod stability;

pub use checks::{
    transversality_profile, verify_invariance, verify_orbit, InvarianceCheck, TransversalityProfile,
};
pub use discover::discover_cofactor;
pub use model::{FourierOrbit, FourierSeries, InvariantManifoldSet, PolynomialSystem};
pub use multipliers::{
    cofactor_monodromy, cofactor_trace_integral, compare_methods, compare_methods_with,
    monodromy_variational, multipliers_cofactor, multipliers_cofactor_with,
    multipliers_variational, multipliers_variational_with, pair_spectra, planar_multiplier,
    planar_report, MethodComparison, PlanarMode,
};
pub use stability::{classify_stability, count_near_one, StabilityVerdict, DEFAULT_STABILITY_TOL};

use thiserror::Error;

use crate::expr::ExprError;
use crate::numlin::{ComplexValue, Matrix, NumlinError};
use crate::ode::OdeError;
use crate::quad::QuadError;

/// Tolerance at which the hypotheses of the cofactor route are enforced.
pub const HYPOTHESIS_TOL: f64 = 1e-8;

/// Orbit samples used by the hypothesis gates.
pub const DEFAULT_SAMPLES: usize = 64;

/// Smallest sample count accepted by the orbit checks.
pub const MIN_SAMPLES: usize = 16;

/// Autonomous vector field `x' = X(x)` on `R^n`.
pub trait DynamicalSystem: Sync {
    fn dimension(&self) -> usize;
    fn field(&self, x: &[f64], out: &mut [f64]);
    /// Writes `DX(x)` into an `n x n` matrix.
    fn jacobian(&self, x: &[f64], out: &mut Matrix);
    /// Exact polynomial form, when available.
    fn symbolic(&self) -> Option<&PolynomialSystem> {
        None
    }
}

/// Family of `m` hypersurfaces `f_i = 0` with cofactor matrix `k`
/// (`Df X = k f`).
pub trait InvariantManifolds: Sync {
    fn count(&self) -> usize;
    fn values(&self, x: &[f64], out: &mut [f64]);
    /// Writes the `m x n` matrix of gradients, one row per `f_i`.
    fn gradients(&self, x: &[f64], out: &mut Matrix);
    /// Writes the `m x m` cofactor matrix.
    fn cofactor(&self, x: &[f64], out: &mut Matrix);
    fn symbolic(&self) -> Option<&InvariantManifoldSet> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitRepresentation {
    Fourier,
    ClosedForm,
}

/// T-periodic parameterization `gamma(t)` with derivative.
pub trait PeriodicOrbit: Sync {
    fn dimension(&self) -> usize;
    fn period(&self) -> f64;
    fn state(&self, t: f64, out: &mut [f64]);
    fn velocity(&self, t: f64, out: &mut [f64]);
    fn representation(&self) -> OrbitRepresentation;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Orbit,
    SymbolicInvariance,
    NumericInvariance,
    Transversality,
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Orbit => "orbit residual",
            Self::SymbolicInvariance => "symbolic invariance",
            Self::NumericInvariance => "invariance residual",
            Self::Transversality => "transversality",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FloquetError {
    #[error("hypothesis violated: {check} (value {value:e}, threshold {threshold:e})")]
    HypothesisViolated {
        check: Hypothesis,
        value: f64,
        threshold: f64,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("gradient of the curve vanishes on the orbit (min norm {0:e})")]
    GradientVanishes(f64),
    #[error("no cofactor of degree <= {degree_bound} for row {row}: {hint}")]
    NoSolution {
        row: usize,
        degree_bound: u32,
        hint: String,
    },
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Numlin(#[from] NumlinError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Cofactor,
    Variational,
    PlanarDivergence,
    PlanarCofactor,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Cofactor => "cofactor",
            Self::Variational => "variational",
            Self::PlanarDivergence => "planar-divergence",
            Self::PlanarCofactor => "planar-cofactor",
        }
    }
}

/// Residual diagnostics gathered while computing multipliers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub orbit_residual: f64,
    pub symbolic_invariance: Option<bool>,
    pub invariance_residual: Option<f64>,
    pub min_transversality: Option<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierReport {
    pub method: Method,
    /// Sorted by real part then imaginary part, descending. The variational
    /// method reports all `n` eigenvalues including the trivial one.
    pub multipliers: Vec<ComplexValue>,
    /// `v(T)` or `u(T)`; absent for planar methods.
    pub monodromy: Option<Matrix>,
    pub diagnostics: Diagnostics,
    pub verdict: StabilityVerdict,
}

impl MultiplierReport {
    pub fn moduli(&self) -> Vec<f64> {
        self.multipliers.iter().map(|z| z.norm()).collect()
    }
}

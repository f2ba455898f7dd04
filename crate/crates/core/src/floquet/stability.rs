use std::fmt;

use crate::numlin::ComplexValue;

/// Default modulus tolerance of [`classify_stability`].
pub const DEFAULT_STABILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilityVerdict {
    /// Every multiplier has modulus below `1 - tol`.
    AsymptoticallyStable,
    /// Some multiplier has modulus above `1 + tol`.
    Unstable,
    /// No modulus exceeds `1 + tol` but some lie within `tol` of 1. Linear
    /// analysis alone does not decide stability here; Liapunov stability is
    /// sometimes claimed for this case but is not asserted.
    NonHyperbolic,
}

impl StabilityVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::AsymptoticallyStable => "asymptotically-stable",
            Self::Unstable => "unstable",
            Self::NonHyperbolic => "non-hyperbolic",
        }
    }

    /// Longer human-readable explanation of the verdict.
    pub fn note(self) -> &'static str {
        match self {
            Self::AsymptoticallyStable => "all multipliers lie strictly inside the unit circle",
            Self::Unstable => "a multiplier lies outside the unit circle",
            Self::NonHyperbolic => {
                "no multiplier lies outside the unit circle but some lie on it; \
                 Liapunov stability is not decided by the multipliers"
            }
        }
    }
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classification by multiplier moduli. Order-independent. An empty list is
/// vacuously asymptotically stable.
pub fn classify_stability(multipliers: &[ComplexValue], tol: f64) -> StabilityVerdict {
    if multipliers.iter().any(|z| z.norm() > 1.0 + tol) {
        StabilityVerdict::Unstable
    } else if multipliers.iter().all(|z| z.norm() < 1.0 - tol) {
        StabilityVerdict::AsymptoticallyStable
    } else {
        StabilityVerdict::NonHyperbolic
    }
}

/// Number of values within `tol` of 1 in the complex plane.
pub fn count_near_one(values: &[ComplexValue], tol: f64) -> usize {
    values.iter().filter(|z| (*z - 1.0).norm() <= tol).count()
}

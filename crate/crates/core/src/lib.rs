//! Characteristic multipliers of periodic orbits of autonomous ODE systems.
//!
//! Two independent routes are provided: the classical monodromy of the
//! first-order variational equations, and the cofactor route, which
//! integrates the cofactor matrix of a family of invariant hypersurfaces
//! along the orbit. The [`systems`] module ships the worked examples
//! (a planar circle oscillator, a 4-D polynomial system, a Mathieu-type
//! 3-D system and the Steklov rigid-body orbit).

pub mod expr;
pub mod floquet;
pub mod numlin;
pub mod ode;
pub mod quad;
pub mod specfun;
pub mod systems;

pub use expr::{parse_polynomial, Polynomial, Rational};
pub use floquet::{
    classify_stability, compare_methods, monodromy_variational, multipliers_cofactor,
    verify_invariance, verify_orbit, DynamicalSystem, InvariantManifolds, MultiplierReport,
    PeriodicOrbit, StabilityVerdict,
};
pub use numlin::{ComplexValue, Matrix};
pub use ode::IntegratorConfig;

//! Builtin systems with known periodic orbits and invariant hypersurfaces:
//! a planar circle oscillator, a 4-D polynomial system with two coupled
//! oscillators, a 3-D system whose cofactor system is Mathieu's equation,
//! and the Euler-Poisson rigid body with Steklov's elliptic orbit.

mod example1;
mod mathieu;
mod steklov;

pub use example1::{
    example1, example1_closed_form_v, example1_expected_multipliers, Example1Branch,
    Example1Params, ExpectedMultipliers,
};
pub use mathieu::{
    mathieu, mathieu_direct_monodromy, mathieu_stability_chart, ChartCell, ChartVerdict,
    MathieuChart, MathieuParams,
};
pub use steklov::{
    sample_steklov_params, steklov, steklov_conservation_suite, steklov_constant_solution,
    steklov_first_integrals, steklov_h1_h2, steklov_monodromy_analysis, steklov_orbit_state,
    ConservationDrifts, SteklovDerived, SteklovMonodromyAnalysis, SteklovOrbit, SteklovParams,
    SteklovVerdict,
};

use std::f64::consts::TAU;

use thiserror::Error;

use crate::expr::{parse_polynomial_with, rational_from_f64, ExprError, Polynomial, Rational};
use crate::floquet::{
    FloquetError, FourierOrbit, FourierSeries, InvariantManifoldSet, PeriodicOrbit,
    PolynomialSystem,
};
use crate::ode::OdeError;
use crate::specfun::SpecfunError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemsError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(
        "unknown builtin `{0}` (expected circle, example1, mathieu, example2, steklov or example3)"
    )]
    UnknownBuiltin(String),
    #[error("builtin `{builtin}` has no parameter `{name}`")]
    UnknownParameter { builtin: String, name: String },
    #[error("structure violation: {what} = {value:e}")]
    StructureViolation { what: &'static str, value: f64 },
    #[error(transparent)]
    Floquet(#[from] FloquetError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// A system together with one of its periodic orbits and a family of
/// hypersurfaces intersecting transversally along it.
pub struct Problem {
    pub name: String,
    pub system: PolynomialSystem,
    pub manifolds: InvariantManifoldSet,
    pub orbit: Box<dyn PeriodicOrbit>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("system", &self.system)
            .field("manifolds", &self.manifolds)
            .field("period", &self.orbit.period())
            .finish()
    }
}

/// Builtin names accepted by [`builtin`], with aliases.
pub const BUILTIN_NAMES: [&str; 6] = [
    "circle", "example1", "mathieu", "example2", "steklov", "example3",
];

/// Parameter names and default values of a builtin, in declaration order.
pub fn builtin_defaults(name: &str) -> Result<Vec<(&'static str, f64)>, SystemsError> {
    match name {
        "circle" => Ok(Vec::new()),
        "example1" => Ok(vec![("s", 1.0), ("k", 3.0)]),
        "mathieu" | "example2" => Ok(vec![("a", 1.0), ("q", 0.1)]),
        "steklov" | "example3" => {
            let d = SteklovParams::default();
            Ok(vec![
                ("a", d.a),
                ("b", d.b),
                ("c", d.c),
                ("W", d.w),
                ("l", d.l),
            ])
        }
        other => Err(SystemsError::UnknownBuiltin(other.to_string())),
    }
}

/// Defaults of `name` with `params` applied; unknown names are rejected.
pub fn builtin_parameters(
    name: &str,
    params: &[(String, f64)],
) -> Result<Vec<(&'static str, f64)>, SystemsError> {
    let mut values = builtin_defaults(name)?;
    for (key, value) in params {
        let slot = values.iter_mut().find(|(k, _)| k == key).ok_or_else(|| {
            SystemsError::UnknownParameter {
                builtin: name.to_string(),
                name: key.clone(),
            }
        })?;
        slot.1 = *value;
    }
    Ok(values)
}

/// Builds a builtin by name. Parameters not given take their defaults.
pub fn builtin(name: &str, params: &[(String, f64)]) -> Result<Problem, SystemsError> {
    let v: Vec<f64> = builtin_parameters(name, params)?
        .into_iter()
        .map(|(_, x)| x)
        .collect();
    match name {
        "circle" => circle(),
        "example1" => example1(Example1Params {
            s: v[0],
            k_param: v[1],
        }),
        "mathieu" | "example2" => mathieu(MathieuParams { a: v[0], q: v[1] }),
        _ => steklov(SteklovParams {
            a: v[0],
            b: v[1],
            c: v[2],
            w: v[3],
            l: v[4],
        }),
    }
}

/// Planar oscillator `x' = -y - x(x^2+y^2-1)`, `y' = x - y(x^2+y^2-1)` with
/// the unit circle as limit cycle, `f = x^2+y^2-1`, `k = -2(x^2+y^2)`.
pub fn circle() -> Result<Problem, SystemsError> {
    let vars = names(&["x", "y"]);
    let system = poly_system(&vars, &[], &["-y - x*(x^2+y^2-1)", "x - y*(x^2+y^2-1)"])?;
    let manifolds = manifold_set(&vars, &[], &["x^2+y^2-1"], &[&["-2*(x^2+y^2)"]])?;
    Ok(Problem {
        name: "circle".into(),
        system,
        manifolds,
        orbit: Box::new(unit_circle_orbit(&[Harmonic::Cos, Harmonic::Sin])?),
    })
}

pub(crate) fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub(crate) fn exact_params(
    values: &[(&str, f64)],
) -> Result<Vec<(String, Rational)>, SystemsError> {
    values
        .iter()
        .map(|(name, x)| {
            rational_from_f64(*x)
                .map(|r| (name.to_string(), r))
                .ok_or_else(|| {
                    SystemsError::InvalidParameters(format!("{name} = {x} is not finite"))
                })
        })
        .collect()
}

pub(crate) fn parse_all(
    vars: &[String],
    params: &[(String, Rational)],
    texts: &[&str],
) -> Result<Vec<Polynomial>, SystemsError> {
    texts
        .iter()
        .map(|t| parse_polynomial_with(t, vars, params).map_err(SystemsError::from))
        .collect()
}

pub(crate) fn poly_system(
    vars: &[String],
    params: &[(String, Rational)],
    field: &[&str],
) -> Result<PolynomialSystem, SystemsError> {
    Ok(PolynomialSystem::new(parse_all(vars, params, field)?)?)
}

pub(crate) fn manifold_set(
    vars: &[String],
    params: &[(String, Rational)],
    f: &[&str],
    k: &[&[&str]],
) -> Result<InvariantManifoldSet, SystemsError> {
    let f = parse_all(vars, params, f)?;
    let k = k
        .iter()
        .map(|row| parse_all(vars, params, row))
        .collect::<Result<_, _>>()?;
    Ok(InvariantManifoldSet::new(f, k)?)
}

/// Coordinate of a `2 pi`-periodic orbit on the unit circle.
#[derive(Clone, Copy)]
pub(crate) enum Harmonic {
    Cos,
    Sin,
    Zero,
}

pub(crate) fn unit_circle_orbit(coords: &[Harmonic]) -> Result<FourierOrbit, SystemsError> {
    let series = coords
        .iter()
        .map(|h| match h {
            Harmonic::Cos => FourierSeries {
                a0: 0.0,
                harmonics: vec![(1.0, 0.0)],
            },
            Harmonic::Sin => FourierSeries {
                a0: 0.0,
                harmonics: vec![(0.0, 1.0)],
            },
            Harmonic::Zero => FourierSeries::constant(0.0),
        })
        .collect();
    Ok(FourierOrbit::new(TAU, series)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{
        discover_cofactor, planar_multiplier, verify_invariance, verify_orbit, PlanarMode,
    };
    use std::f64::consts::PI;

    #[test]
    fn circle_is_consistent() {
        let p = circle().unwrap();
        assert!(verify_orbit(&p.system, p.orbit.as_ref(), 64).unwrap() <= 1e-12);
        let inv = verify_invariance(&p.system, &p.manifolds, p.orbit.as_ref(), 64).unwrap();
        assert_eq!(inv.symbolic, Some(true));
        assert!(inv.residual <= 1e-10);
    }

    #[test]
    fn circle_planar_modes() {
        let p = circle().unwrap();
        let want = (-4.0 * PI).exp();
        let div =
            planar_multiplier(&p.system, p.orbit.as_ref(), PlanarMode::Divergence, None).unwrap();
        let cof = planar_multiplier(
            &p.system,
            p.orbit.as_ref(),
            PlanarMode::Cofactor,
            Some(&p.manifolds),
        )
        .unwrap();
        assert!((div / want - 1.0).abs() < 1e-8);
        assert!((cof / want - 1.0).abs() < 1e-8);
        assert!((div / cof - 1.0).abs() < 1e-9);
    }

    #[test]
    fn circle_cofactor_discovery_is_unique() {
        let p = circle().unwrap();
        let k = discover_cofactor(&p.system, p.manifolds.functions(), 2).unwrap();
        assert_eq!(k[0][0], p.manifolds.cofactor_entries()[0][0]);
    }

    #[test]
    fn builtin_dispatch() {
        assert!(builtin("circle", &[]).is_ok());
        assert!(matches!(
            builtin("nope", &[]),
            Err(SystemsError::UnknownBuiltin(_))
        ));
        assert!(matches!(
            builtin("example1", &[("z".into(), 1.0)]),
            Err(SystemsError::UnknownParameter { .. })
        ));
        let p = builtin("example2", &[("q".into(), 0.5)]).unwrap();
        assert_eq!(p.name, "mathieu");
        assert!(matches!(
            builtin("steklov", &[("a".into(), 1.0)]),
            Err(SystemsError::InvalidParameters(_))
        ));
    }
}

use super::checks::{transversality_profile, verify_invariance, verify_orbit};
use super::stability::{classify_stability, DEFAULT_STABILITY_TOL};
use super::{
    Diagnostics, DynamicalSystem, FloquetError, Hypothesis, InvariantManifolds, Method,
    MultiplierReport, PeriodicOrbit, DEFAULT_SAMPLES, HYPOTHESIS_TOL, MIN_SAMPLES,
};
use crate::numlin::{eigenvalues, ComplexValue, Matrix};
use crate::ode::{integrate_matrix, IntegratorConfig};
use crate::quad;

/// Tolerance of the planar quadratures.
const PLANAR_QUAD_TOL: f64 = 1e-12;

fn gate(check: Hypothesis, ok: bool, value: f64) -> Result<(), FloquetError> {
    if ok {
        Ok(())
    } else {
        Err(FloquetError::HypothesisViolated {
            check,
            value,
            threshold: HYPOTHESIS_TOL,
        })
    }
}

fn gated_orbit_residual(
    sys: &dyn DynamicalSystem,
    orbit: &dyn PeriodicOrbit,
    samples: usize,
) -> Result<f64, FloquetError> {
    let residual = verify_orbit(sys, orbit, samples)?;
    gate(Hypothesis::Orbit, residual <= HYPOTHESIS_TOL, residual)?;
    Ok(residual)
}

/// `u(T)` for `u' = DX(gamma(t)) u`, `u(0) = Id`.
pub fn monodromy_variational(
    sys: &dyn DynamicalSystem,
    orbit: &dyn PeriodicOrbit,
    cfg: &IntegratorConfig,
) -> Result<Matrix, FloquetError> {
    gated_orbit_residual(sys, orbit, DEFAULT_SAMPLES)?;
    variational_unchecked(sys, orbit, cfg)
}

fn variational_unchecked(
    sys: &dyn DynamicalSystem,
    orbit: &dyn PeriodicOrbit,
    cfg: &IntegratorConfig,
) -> Result<Matrix, FloquetError> {
    let n = sys.dimension();
    let a = |t: f64, m: &mut Matrix| {
        let mut x = vec![0.0; n];
        orbit.state(t, &mut x);
        sys.jacobian(&x, m);
    };
    Ok(integrate_matrix(
        a,
        &Matrix::identity(n),
        0.0,
        orbit.period(),
        cfg,
    )?)
}

/// All `n` eigenvalues of the variational monodromy. The verdict ignores
/// the eigenvalue closest to 1, which belongs to the flow direction.
pub fn multipliers_variational(
    sys: &dyn DynamicalSystem,
    orbit: &dyn PeriodicOrbit,
    cfg: &IntegratorConfig,
) -> Result<MultiplierReport, FloquetError> {
    multipliers_variational_with(sys, orbit, cfg, DEFAULT_SAMPLES)
}

/// [`multipliers_variational`] with `samples` orbit points in the gate.
pub fn multipliers_variational_with(
    sys: &dyn DynamicalSystem,
    orbit: &dyn PeriodicOrbit,
    cfg: &IntegratorConfig,
    samples: usize,
) -> Result<MultiplierReport, FloquetError> {
    let orbit_residual = gated_orbit_residual(sys, orbit, samples)?;
    let u = variational_unchecked(sys, orbit, cfg)?;
    let multipliers = eigenvalues(&u)?;
    let (_, nontrivial) = split_trivial(&multipliers);
    Ok(MultiplierReport {
        method: Method::Variational,
        verdict: classify_stability(&nontrivial, DEFAULT_STABILITY_TOL),
        multipliers,
        monodromy: Some(u),
        diagnostics: Diagnostics {
            orbit_residual,
            samples: samples.max(MIN_SAMPLES),
            ..Diagnostics::default()
        },
    })
}

/// `v(T)` for `v' = k(gamma(t)) v`, `v(0) = Id`, without hypothesis checks.
pub fn cofactor_monodromy(
    man: &dyn InvariantManifolds,
    orbit: &dyn PeriodicOrbit,
    cfg: &IntegratorConfig,
) -> Result<Matrix, FloquetError> {
    let n = orbit.dimension();
    let m = man.count();
    let a = |t: f64, out: &mut Matrix| {
        let mut x = vec![0.0; n];
        orbit.state(t, &mut x);
        man.cofactor(&x, out);
    };
    Ok(integrate_matrix(
        a,
        &Matrix::identity(m),
        0.0,
        orbit.period(),
        cfg,
    )?)
}

/// Multipliers as eigenvalues of `v(T)` from the cofactor system.
///
/// Fails with `HypothesisViolated` unless the orbit residual and the
/// invariance residual are at most [`HYPOTHESIS_TOL`], the identity holds
/// exactly when both sides are polynomial, and the transversality
/// determinant stays at least [`HYPOTHESIS_TOL`] in modulus.
pub fn multipliers_cofactor(
    sys: &dyn DynamicalSystem,
    man: &dyn InvariantManifolds,
    orbit: &dyn PeriodicOrbit,
    cfg: &IntegratorConfig,
) -> Result<MultiplierReport, FloquetError> {
    multipliers_cofactor_with(sys, man, orbit, cfg, DEFAULT_SAMPLES)
}

/// [`multipliers_cofactor`] with `samples` orbit points in every gate.
pub fn multipliers_cofactor_with(
    sys: &dyn DynamicalSystem,
    man: &dyn InvariantManifolds,
    orbit: &dyn PeriodicOrbit,
    cfg: &IntegratorConfig,
    samples: usize,
) -> Result<MultiplierReport, FloquetError> {
    let orbit_residual = gated_orbit_residual(sys, orbit, samples)?;
    let inv = verify_invariance(sys, man, orbit, samples)?;
    gate(
        Hypothesis::SymbolicInvariance,
        inv.symbolic != Some(false),
        inv.residual,
    )?;
    gate(
        Hypothesis::NumericInvariance,
        inv.residual <= HYPOTHESIS_TOL,
        inv.residual,
    )?;
    let transversal = transversality_profile(sys, man, orbit, samples)?;
    gate(
        Hypothesis::Transversality,
        transversal.min_abs >= HYPOTHESIS_TOL,
        transversal.min_abs,
    )?;

    let v = cofactor_monodromy(man, orbit, cfg)?;
    let multipliers = eigenvalues(&v)?;
    Ok(MultiplierReport {
        method: Method::Cofactor,
        verdict: classify_stability(&multipliers, DEFAULT_STABILITY_TOL),
        multipliers,
        monodromy: Some(v),
        diagnostics: Diagnostics {
            orbit_residual,
            symbolic_invariance: inv.symbolic,
            invariance_residual: Some(inv.residual),
            min_transversality: Some(transversal.min_abs),
            samples: samples.max(MIN_SAMPLES),
        },
    })
}

/// `int_0^T trace k(gamma(t)) dt`; `det v(T)` is its exponential.
pub fn cofactor_trace_integral(
    man: &dyn InvariantManifolds,
    orbit: &dyn PeriodicOrbit,
) -> Result<f64, FloquetError> {
    let n = orbit.dimension();
    let m = man.count();
    let integrand = |t: f64| {
        let mut x = vec![0.0; n];
        let mut k = Matrix::zeros(m, m);
        orbit.state(t, &mut x);
        man.cofactor(&x, &mut k);
        k.trace()
    };
    Ok(quad::integrate(
        integrand,
        0.0,
        orbit.period(),
        PLANAR_QUAD_TOL,
        PLANAR_QUAD_TOL,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarMode {
    /// `exp int_0^T div X(gamma(t)) dt`.
    Divergence,
    /// `exp int_0^T k(gamma(t)) dt` for a curve `f = 0` with `Df X = k f`.
    Cofactor,
}

/// The single nontrivial multiplier of a planar periodic orbit.
pub fn planar_multiplier(
    sys: &dyn DynamicalSystem,
    orbit: &dyn PeriodicOrbit,
    mode: PlanarMode,
    man: Option<&dyn InvariantManifolds>,
) -> Result<f64, FloquetError> {
    if sys.dimension() != 2 || orbit.dimension() != 2 {
        return Err(FloquetError::DimensionMismatch(format!(
            "planar multiplier needs a 2-dimensional system, got {}",
            sys.dimension()
        )));
    }
    let exponent = match mode {
        PlanarMode::Divergence => {
            let integrand = |t: f64| {
                let mut x = [0.0; 2];
                let mut j = Matrix::zeros(2, 2);
                orbit.state(t, &mut x);
                sys.jacobian(&x, &mut j);
                j.trace()
            };
            quad::integrate(
                integrand,
                0.0,
                orbit.period(),
                PLANAR_QUAD_TOL,
                PLANAR_QUAD_TOL,
            )?
        }
        PlanarMode::Cofactor => {
            let man = man.ok_or_else(|| {
                FloquetError::DimensionMismatch("cofactor mode needs an invariant curve".into())
            })?;
            if man.count() != 1 {
                return Err(FloquetError::DimensionMismatch(format!(
                    "cofactor mode needs exactly one curve, got {}",
                    man.count()
                )));
            }
            let min_grad = min_gradient_norm(man, orbit);
            if min_grad < HYPOTHESIS_TOL {
                return Err(FloquetError::GradientVanishes(min_grad));
            }
            cofactor_trace_integral(man, orbit)?
        }
    };
    Ok(exponent.exp())
}

fn min_gradient_norm(man: &dyn InvariantManifolds, orbit: &dyn PeriodicOrbit) -> f64 {
    let mut x = [0.0; 2];
    let mut g = Matrix::zeros(1, 2);
    (0..DEFAULT_SAMPLES)
        .map(|i| {
            orbit.state(orbit.period() * i as f64 / DEFAULT_SAMPLES as f64, &mut x);
            man.gradients(&x, &mut g);
            g[(0, 0)].hypot(g[(0, 1)])
        })
        .fold(f64::INFINITY, f64::min)
}

/// [`planar_multiplier`] wrapped in a report.
pub fn planar_report(
    sys: &dyn DynamicalSystem,
    orbit: &dyn PeriodicOrbit,
    mode: PlanarMode,
    man: Option<&dyn InvariantManifolds>,
) -> Result<MultiplierReport, FloquetError> {
    let orbit_residual = gated_orbit_residual(sys, orbit, DEFAULT_SAMPLES)?;
    let value = planar_multiplier(sys, orbit, mode, man)?;
    let multipliers = vec![ComplexValue::new(value, 0.0)];
    Ok(MultiplierReport {
        method: match mode {
            PlanarMode::Divergence => Method::PlanarDivergence,
            PlanarMode::Cofactor => Method::PlanarCofactor,
        },
        verdict: classify_stability(&multipliers, DEFAULT_STABILITY_TOL),
        multipliers,
        monodromy: None,
        diagnostics: Diagnostics {
            orbit_residual,
            samples: DEFAULT_SAMPLES,
            ..Diagnostics::default()
        },
    })
}

/// Splits off the value closest to 1.
fn split_trivial(values: &[ComplexValue]) -> (Option<ComplexValue>, Vec<ComplexValue>) {
    let Some(idx) = (0..values.len()).min_by(|&i, &j| {
        (values[i] - 1.0)
            .norm()
            .total_cmp(&(values[j] - 1.0).norm())
    }) else {
        return (None, Vec::new());
    };
    let mut rest = values.to_vec();
    let trivial = rest.remove(idx);
    (Some(trivial), rest)
}

fn relative_distance(a: ComplexValue, b: ComplexValue) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodComparison {
    pub cofactor: MultiplierReport,
    pub variational: MultiplierReport,
    /// Variational eigenvalue closest to 1, excluded from matching.
    pub trivial: ComplexValue,
    /// `(cofactor, variational)` pairs in matching order.
    pub pairs: Vec<(ComplexValue, ComplexValue)>,
    pub max_distance: f64,
    /// Max of `|a - b| / max(|a|, |b|)` over the pairs.
    pub max_relative_distance: f64,
}

/// Runs both methods and pairs the nontrivial spectra greedily, smallest
/// relative distance first.
pub fn compare_methods(
    sys: &dyn DynamicalSystem,
    man: &dyn InvariantManifolds,
    orbit: &dyn PeriodicOrbit,
    cfg: &IntegratorConfig,
) -> Result<MethodComparison, FloquetError> {
    compare_methods_with(sys, man, orbit, cfg, DEFAULT_SAMPLES)
}

/// [`compare_methods`] with `samples` orbit points in every gate.
pub fn compare_methods_with(
    sys: &dyn DynamicalSystem,
    man: &dyn InvariantManifolds,
    orbit: &dyn PeriodicOrbit,
    cfg: &IntegratorConfig,
    samples: usize,
) -> Result<MethodComparison, FloquetError> {
    let cofactor = multipliers_cofactor_with(sys, man, orbit, cfg, samples)?;
    let variational = multipliers_variational_with(sys, orbit, cfg, samples)?;
    Ok(pair_spectra(cofactor, variational))
}

/// Pairs two finished reports the way [`compare_methods`] does.
pub fn pair_spectra(cofactor: MultiplierReport, variational: MultiplierReport) -> MethodComparison {
    let (trivial, mut rest) = split_trivial(&variational.multipliers);
    let mut left = cofactor.multipliers.clone();
    let mut pairs = Vec::with_capacity(left.len());
    while !left.is_empty() && !rest.is_empty() {
        let mut best = (0, 0, f64::INFINITY);
        for (i, a) in left.iter().enumerate() {
            for (j, b) in rest.iter().enumerate() {
                let d = relative_distance(*a, *b);
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        pairs.push((left.remove(best.0), rest.remove(best.1)));
    }
    let max_distance = pairs
        .iter()
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let max_relative_distance = pairs
        .iter()
        .map(|(a, b)| relative_distance(*a, *b))
        .fold(0.0, f64::max);
    MethodComparison {
        trivial: trivial.unwrap_or_default(),
        cofactor,
        variational,
        pairs,
        max_distance,
        max_relative_distance,
    }
}

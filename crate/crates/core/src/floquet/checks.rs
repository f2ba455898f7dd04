use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DynamicalSystem, FloquetError, InvariantManifolds, PeriodicOrbit, MIN_SAMPLES};
use crate::numlin::{determinant, Matrix};

/// Seed of the tube sampler; fixed so every run checks the same points.
const TUBE_SEED: u64 = 0x7ab1_e5ee_d000_0001;

/// Largest perturbation (max norm) of tube points around the orbit.
pub const TUBE_RADIUS: f64 = 0.1;

fn check_dimensions(
    sys: &dyn DynamicalSystem,
    orbit: &dyn PeriodicOrbit,
) -> Result<usize, FloquetError> {
    let n = sys.dimension();
    if orbit.dimension() != n {
        return Err(FloquetError::DimensionMismatch(format!(
            "orbit has dimension {}, system {n}",
            orbit.dimension()
        )));
    }
    Ok(n)
}

fn sample_times(period: f64, samples: usize) -> impl Iterator<Item = f64> {
    let samples = samples.max(MIN_SAMPLES);
    (0..samples).map(move |i| period * i as f64 / samples as f64)
}

/// Max over equispaced times of `|gamma'(t) - X(gamma(t))|_inf`. At least
/// [`MIN_SAMPLES`] samples are used.
pub fn verify_orbit(
    sys: &dyn DynamicalSystem,
    orbit: &dyn PeriodicOrbit,
    samples: usize,
) -> Result<f64, FloquetError> {
    let n = check_dimensions(sys, orbit)?;
    let mut x = vec![0.0; n];
    let mut dx = vec![0.0; n];
    let mut fx = vec![0.0; n];
    let mut worst = 0.0f64;
    for t in sample_times(orbit.period(), samples) {
        orbit.state(t, &mut x);
        orbit.velocity(t, &mut dx);
        sys.field(&x, &mut fx);
        for (a, b) in dx.iter().zip(&fx) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceCheck {
    /// Whether `Df X - k f` is the zero polynomial; `None` without exact forms.
    pub symbolic: Option<bool>,
    /// Max of `|Df X - k f|_inf` over the orbit samples and tube points.
    pub residual: f64,
    /// Number of points evaluated.
    pub points: usize,
}

/// Checks `Df X = k f` exactly when both sides are polynomial, and
/// numerically on the orbit and on seeded random points within
/// [`TUBE_RADIUS`] of it.
pub fn verify_invariance(
    sys: &dyn DynamicalSystem,
    man: &dyn InvariantManifolds,
    orbit: &dyn PeriodicOrbit,
    samples: usize,
) -> Result<InvarianceCheck, FloquetError> {
    let n = check_dimensions(sys, orbit)?;
    let m = man.count();
    let symbolic = match (sys.symbolic(), man.symbolic()) {
        (Some(s), Some(f)) => Some(f.identity_residual(s)?.iter().all(|p| p.is_zero())),
        _ => None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(TUBE_SEED);
    let mut gamma = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut fx = vec![0.0; n];
    let mut fv = vec![0.0; m];
    let mut grads = Matrix::zeros(m, n);
    let mut k = Matrix::zeros(m, m);
    let mut residual = 0.0f64;
    let mut points = 0;
    for t in sample_times(orbit.period(), samples) {
        orbit.state(t, &mut gamma);
        for perturb in [false, true] {
            for (xi, gi) in x.iter_mut().zip(&gamma) {
                *xi = if perturb {
                    gi + rng.gen_range(-TUBE_RADIUS..=TUBE_RADIUS)
                } else {
                    *gi
                };
            }
            sys.field(&x, &mut fx);
            man.values(&x, &mut fv);
            man.gradients(&x, &mut grads);
            man.cofactor(&x, &mut k);
            let lhs = grads.matvec(&fx);
            let rhs = k.matvec(&fv);
            for (a, b) in lhs.iter().zip(&rhs) {
                residual = residual.max((a - b).abs());
            }
            points += 1;
        }
    }
    Ok(InvarianceCheck {
        symbolic,
        residual,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransversalityProfile {
    pub min_abs: f64,
    /// `det(grad f_1, ..., grad f_{n-1}, X)` at each sample time.
    pub dets: Vec<f64>,
}

/// Determinant of the gradients of the `n - 1` hypersurfaces stacked over
/// the vector field, along the orbit.
pub fn transversality_profile(
    sys: &dyn DynamicalSystem,
    man: &dyn InvariantManifolds,
    orbit: &dyn PeriodicOrbit,
    samples: usize,
) -> Result<TransversalityProfile, FloquetError> {
    let n = check_dimensions(sys, orbit)?;
    if man.count() + 1 != n {
        return Err(FloquetError::DimensionMismatch(format!(
            "{} hypersurfaces in dimension {n}, expected {}",
            man.count(),
            n.saturating_sub(1)
        )));
    }
    let m = n - 1;
    let mut x = vec![0.0; n];
    let mut fx = vec![0.0; n];
    let mut grads = Matrix::zeros(m, n);
    let mut stacked = Matrix::zeros(n, n);
    let mut dets = Vec::new();
    for t in sample_times(orbit.period(), samples) {
        orbit.state(t, &mut x);
        sys.field(&x, &mut fx);
        man.gradients(&x, &mut grads);
        for i in 0..m {
            stacked.row_mut(i).copy_from_slice(grads.row(i));
        }
        stacked.row_mut(m).copy_from_slice(&fx);
        dets.push(determinant(&stacked)?);
    }
    let min_abs = dets.iter().fold(f64::INFINITY, |a, d| a.min(d.abs()));
    Ok(TransversalityProfile { min_abs, dets })
}

//! Adaptive Dormand-Prince 5(4) integration of vector and matrix
//! initial-value problems.

use thiserror::Error;

use crate::numlin::Matrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step limit of {steps} exceeded at t = {t}")]
    StepLimitExceeded { steps: usize, t: f64 },
    #[error("step size {h:e} underflowed at t = {t} (stiff or singular problem)")]
    StepUnderflow { t: f64, h: f64 },
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("invalid interval: t1 = {t1} precedes t0 = {t0}")]
    InvalidInterval { t0: f64, t1: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            initial_step: None,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        if !(self.rtol > 0.0 && self.rtol.is_finite()) {
            return Err(OdeError::InvalidConfig("rtol must be positive"));
        }
        if !(self.atol > 0.0 && self.atol.is_finite()) {
            return Err(OdeError::InvalidConfig("atol must be positive"));
        }
        if self.max_steps == 0 {
            return Err(OdeError::InvalidConfig("max_steps must be positive"));
        }
        if let Some(h) = self.initial_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(OdeError::InvalidConfig("initial_step must be positive"));
            }
        }
        Ok(())
    }
}

/// Right-hand side `dy/dt = f(t, y)`. Implementations must be reentrant.
pub trait FieldFunction: Sync {
    fn dimension(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

/// Adapts a closure `(t, y, dy)` into a [`FieldFunction`].
pub struct FnField<F> {
    dimension: usize,
    f: F,
}

impl<F: Fn(f64, &[f64], &mut [f64]) + Sync> FnField<F> {
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F: Fn(f64, &[f64], &mut [f64]) + Sync> FieldFunction for FnField<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.f)(t, y, dy)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order weights minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const UNDERFLOW_RATIO: f64 = 1e-14;

/// Infinite when the trial state or error is not finite.
fn error_norm(err: &[f64], y: &[f64], y_new: &[f64], cfg: &IntegratorConfig) -> f64 {
    if !y_new.iter().chain(err).all(|x| x.is_finite()) {
        return f64::INFINITY;
    }
    err.iter()
        .zip(y.iter().zip(y_new))
        .map(|(e, (a, b))| e.abs() / (cfg.atol + cfg.rtol * a.abs().max(b.abs())))
        .fold(0.0, f64::max)
}

fn initial_step(
    f: &dyn FieldFunction,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    span: f64,
    cfg: &IntegratorConfig,
) -> f64 {
    let scale = |y: f64| cfg.atol + cfg.rtol * y.abs();
    let rms = |v: &mut dyn Iterator<Item = f64>| {
        let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
        (s / n.max(1) as f64).sqrt()
    };
    let d0 = rms(&mut y0.iter().map(|y| y / scale(*y)));
    let d1 = rms(&mut f0.iter().zip(y0).map(|(d, y)| d / scale(*y)));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, d)| y + h0 * d).collect();
    let mut f1 = vec![0.0; y0.len()];
    f.eval(t0 + h0, &y1, &mut f1);
    let d2 = rms(&mut f1
        .iter()
        .zip(f0)
        .zip(y0)
        .map(|((a, b), y)| (a - b) / scale(*y)))
        / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dmax).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// State `y(t1)` of `y' = f(t, y)`, `y(t0) = y0`, integrated with
/// Dormand-Prince 5(4). The last step is shortened to land exactly on `t1`.
pub fn integrate(
    f: &dyn FieldFunction,
    y0: &[f64],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>, OdeError> {
    cfg.validate()?;
    let n = f.dimension();
    if y0.len() != n {
        return Err(OdeError::DimensionMismatch {
            expected: n,
            actual: y0.len(),
        });
    }
    if t1.partial_cmp(&t0).is_none_or(|o| o.is_lt()) {
        return Err(OdeError::InvalidInterval { t0, t1 });
    }
    let mut y = y0.to_vec();
    if t1 == t0 {
        return Ok(y);
    }
    let span = t1 - t0;
    let min_step = UNDERFLOW_RATIO * span;

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];

    let mut t = t0;
    f.eval(t, &y, &mut k1);
    let mut h = match cfg.initial_step {
        Some(h) => h.min(span),
        None => initial_step(f, t0, &y, &k1, span, cfg),
    };
    let mut steps = 0usize;
    loop {
        if steps >= cfg.max_steps {
            return Err(OdeError::StepLimitExceeded { steps, t });
        }
        steps += 1;
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }

        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        f.eval(t + C2 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f.eval(t + C3 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f.eval(t + C4 * h, &tmp, &mut k4);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f.eval(t + C5 * h, &tmp, &mut k5);
        for i in 0..n {
            tmp[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { t1 } else { t + h };
        f.eval(t_new, &tmp, &mut k6);
        for i in 0..n {
            y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        f.eval(t_new, &y_new, &mut k7);
        for i in 0..n {
            err[i] =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let norm = error_norm(&err, &y, &y_new, cfg);
        if !norm.is_finite() {
            // Treat as a failed step; a finite state may be reachable with a smaller h.
            h *= MIN_FACTOR;
            if h < min_step {
                return Err(OdeError::NonFinite(t));
            }
            continue;
        }
        if norm <= 1.0 {
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            if last {
                return Ok(y);
            }
            let factor = if norm == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h *= factor;
        } else {
            h *= (SAFETY * norm.powf(-0.2)).max(MIN_FACTOR);
            if h < min_step {
                return Err(OdeError::StepUnderflow { t, h });
            }
        }
    }
}

/// `V(t1)` solving `V' = a(t) V`, `V(t0) = v0`.
///
/// `a` fills an `n x n` matrix in place, `v0` is `n x m`. The matrix is
/// integrated as a column-major flattened vector.
pub fn integrate_matrix<A>(
    a: A,
    v0: &Matrix,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Matrix, OdeError>
where
    A: Fn(f64, &mut Matrix) + Sync,
{
    let n = v0.rows();
    let m = v0.cols();
    let field = FnField::new(n * m, |t, y: &[f64], dy: &mut [f64]| {
        let mut at = Matrix::zeros(n, n);
        a(t, &mut at);
        for col in 0..m {
            let v = &y[col * n..(col + 1) * n];
            let d = &mut dy[col * n..(col + 1) * n];
            for (i, di) in d.iter_mut().enumerate() {
                *di = at.row(i).iter().zip(v).map(|(p, q)| p * q).sum();
            }
        }
    });
    let y = integrate(&field, &v0.to_column_major(), t0, t1, cfg)?;
    Ok(Matrix::from_column_major(n, m, &y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::determinant;
    use crate::quad;
    use std::f64::consts::{E, PI};

    fn exp_field() -> impl FieldFunction {
        FnField::new(1, |_, y: &[f64], dy: &mut [f64]| dy[0] = y[0])
    }

    fn oscillator() -> impl FieldFunction {
        FnField::new(2, |_, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        })
    }

    /// Cofactor matrix of the 4-D example on its circular orbit.
    fn example1_k(s: f64, k: f64) -> impl Fn(f64, &mut Matrix) + Sync {
        move |t, m| {
            let (sn, cs) = t.sin_cos();
            *m = Matrix::from_rows(&[
                vec![-2.0, 0.0, 0.0],
                vec![
                    (s - 1.0) * cs,
                    s * (k - 2.0 * cs * cs),
                    -1.0 - 2.0 * s * cs * sn,
                ],
                vec![
                    (s - 1.0) * sn,
                    1.0 - 2.0 * s * cs * sn,
                    s * (k - 2.0 * sn * sn),
                ],
            ]);
        }
    }

    #[test]
    fn exponential_growth() {
        let y = integrate(&exp_field(), &[1.0], 0.0, 1.0, &IntegratorConfig::default()).unwrap();
        assert!((y[0] - E).abs() / E < 1e-9);
    }

    #[test]
    fn oscillator_returns_after_period() {
        let y0 = [0.3, -1.2];
        let y = integrate(
            &oscillator(),
            &y0,
            0.0,
            2.0 * PI,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!((y[0] - y0[0]).abs() < 1e-8 && (y[1] - y0[1]).abs() < 1e-8);
    }

    #[test]
    fn zero_field_is_exact() {
        let f = FnField::new(3, |_, _: &[f64], dy: &mut [f64]| dy.fill(0.0));
        let y0 = [1.0, -2.5, 1e-300];
        let y = integrate(&f, &y0, 0.0, 10.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(y, y0.to_vec());
        let v = integrate_matrix(
            |_, m: &mut Matrix| m.fill(0.0),
            &Matrix::identity(3),
            0.0,
            5.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert_eq!(v, Matrix::identity(3));
    }

    #[test]
    fn constant_diagonal_matrix() {
        let a = Matrix::from_diagonal(&[-2.0, 3.0]);
        let v = integrate_matrix(
            |_, m: &mut Matrix| *m = a.clone(),
            &Matrix::identity(2),
            0.0,
            1.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        let want = Matrix::from_diagonal(&[(-2.0f64).exp(), 3.0f64.exp()]);
        for i in 0..2 {
            assert!(((v[(i, i)] - want[(i, i)]) / want[(i, i)]).abs() < 1e-9);
        }
        assert_eq!(v[(0, 1)], 0.0);
    }

    fn example1_closed_form(s: f64, k: f64, t: f64) -> Matrix {
        let (sn, cs) = t.sin_cos();
        let lam = 2.0 - 2.0 * s + k * s;
        let g = (s - 1.0) * (-2.0 * t).exp() * ((lam * t).exp() - 1.0) / lam;
        Matrix::from_rows(&[
            vec![(-2.0 * t).exp(), 0.0, 0.0],
            vec![
                g * cs,
                ((k - 2.0) * s * t).exp() * cs,
                -(k * s * t).exp() * sn,
            ],
            vec![
                g * sn,
                ((k - 2.0) * s * t).exp() * sn,
                (k * s * t).exp() * cs,
            ],
        ])
    }

    #[test]
    fn example1_fundamental_matrix_closed_form() {
        let (s, k) = (1.0, 3.0);
        // The second column is subdominant by a factor e^(2 s t); its relative
        // accuracy is about rtol times that factor.
        let cfg = IntegratorConfig::with_tolerances(1e-13, 1e-15);
        let a = example1_k(s, k);

        // Generic time: every nonzero entry to relative 1e-7.
        let t = 5.0;
        let v = integrate_matrix(&a, &Matrix::identity(3), 0.0, t, &cfg).unwrap();
        let want = example1_closed_form(s, k, t);
        for i in 0..3 {
            for j in 0..3 {
                let w = want[(i, j)];
                let err = (v[(i, j)] - w).abs();
                assert!(
                    err <= 1e-7 * w.abs() || (w == 0.0 && err == 0.0),
                    "t={t} ({i},{j})"
                );
            }
        }

        // One period: entries carrying a sin(2 pi) factor vanish analytically and
        // are compared against the matrix scale, since the dominant mode amplifies
        // tolerance-level error there; all others to relative 1e-7.
        let t = 2.0 * PI;
        let v = integrate_matrix(&a, &Matrix::identity(3), 0.0, t, &cfg).unwrap();
        let want = example1_closed_form(s, k, t);
        let scale = want.max_abs();
        for i in 0..3 {
            for j in 0..3 {
                let w = want[(i, j)];
                let err = (v[(i, j)] - w).abs();
                let vanishing = w.abs() <= 1e-12 * scale;
                let ok = if vanishing {
                    err <= 1e-7 * scale
                } else {
                    err <= 1e-7 * w.abs()
                };
                assert!(ok, "({i},{j}): {} vs {w}", v[(i, j)]);
            }
        }
        assert!(((v[(0, 0)] - (-4.0 * PI).exp()) / (-4.0 * PI).exp()).abs() < 1e-7);
    }

    #[test]
    fn liouville_identity() {
        let (s, k) = (0.7, -1.3);
        let t1 = 5.0;
        let a = example1_k(s, k);
        let v = integrate_matrix(
            &a,
            &Matrix::identity(3),
            0.0,
            t1,
            &IntegratorConfig::default(),
        )
        .unwrap();
        let trace = quad::integrate(
            |t| {
                let mut m = Matrix::zeros(3, 3);
                a(t, &mut m);
                m.trace()
            },
            0.0,
            t1,
            1e-13,
            1e-13,
        )
        .unwrap();
        let det = determinant(&v).unwrap();
        assert!((det / trace.exp() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn flow_property() {
        let cfg = IntegratorConfig::default();
        let f = FnField::new(2, |t, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -(1.0 + 0.5 * t.cos()) * y[0] - 0.1 * y[1];
        });
        let y0 = [1.0, 0.5];
        let direct = integrate(&f, &y0, 0.0, 7.0, &cfg).unwrap();
        let mid = integrate(&f, &y0, 0.0, 3.3, &cfg).unwrap();
        let split = integrate(&f, &mid, 3.3, 7.0, &cfg).unwrap();
        for (a, b) in direct.iter().zip(&split) {
            assert!((a - b).abs() <= 10.0 * (cfg.atol + cfg.rtol * a.abs()) * 10.0);
        }
    }

    #[test]
    fn halving_tolerance_does_not_increase_error() {
        let mut prev = f64::INFINITY;
        for p in 0..6 {
            let scale = 0.5f64.powi(p);
            let cfg = IntegratorConfig::with_tolerances(1e-6 * scale, 1e-8 * scale);
            let y = integrate(&exp_field(), &[1.0], 0.0, 2.0, &cfg).unwrap();
            let e = (y[0] - 2.0f64.exp()).abs();
            assert!(e <= prev * 1.0001, "error grew: {e} > {prev}");
            prev = e;
        }
    }

    #[test]
    fn errors() {
        let cfg = IntegratorConfig::default();
        assert!(matches!(
            integrate(&exp_field(), &[1.0], 1.0, 0.0, &cfg),
            Err(OdeError::InvalidInterval { .. })
        ));
        assert!(matches!(
            integrate(&exp_field(), &[1.0, 2.0], 0.0, 1.0, &cfg),
            Err(OdeError::DimensionMismatch {
                expected: 1,
                actual: 2
            })
        ));
        let limited = IntegratorConfig {
            max_steps: 3,
            ..cfg
        };
        assert!(matches!(
            integrate(&oscillator(), &[1.0, 0.0], 0.0, 100.0, &limited),
            Err(OdeError::StepLimitExceeded { .. })
        ));
        // y' = y^2 blows up at t = 1.
        let blowup = FnField::new(1, |_, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0]);
        let r = integrate(&blowup, &[1.0], 0.0, 2.0, &cfg);
        assert!(r.is_err(), "{r:?}");
        let bad = IntegratorConfig { rtol: 0.0, ..cfg };
        assert!(matches!(bad.validate(), Err(OdeError::InvalidConfig(_))));
    }
}

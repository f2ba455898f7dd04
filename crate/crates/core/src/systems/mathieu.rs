use std::f64::consts::TAU;

use rayon::prelude::*;

use super::{
    exact_params, manifold_set, names, poly_system, unit_circle_orbit, Harmonic, Problem,
    SystemsError,
};
use crate::floquet::multipliers_cofactor;
use crate::numlin::Matrix;
use crate::ode::{integrate_matrix, IntegratorConfig};

/// Half-width of the band `|trace| = 2` labelled as boundary.
const BOUNDARY_TOL: f64 = 1e-9;

/// Every `CROSS_CHECK_STRIDE`-th cell in each direction is recomputed from
/// the Mathieu equation directly.
const CROSS_CHECK_STRIDE: usize = 4;

/// Parameters of `v'' + (a + 2 q cos 2t) v = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuParams {
    pub a: f64,
    pub q: f64,
}

impl Default for MathieuParams {
    fn default() -> Self {
        Self { a: 1.0, q: 0.1 }
    }
}

/// 3-D system with orbit `(cos t, sin t, 0)` and `f = (x^2+y^2-1, z)`, whose
/// cofactor system on the orbit is the first-order form of Mathieu's
/// equation.
pub fn mathieu(p: MathieuParams) -> Result<Problem, SystemsError> {
    let vars = names(&["x", "y", "z"]);
    let params = exact_params(&[("a", p.a), ("q", p.q)])?;
    let system = poly_system(
        &vars,
        &params,
        &[
            "-y + z*x/2",
            "x + z*y/2",
            "(-2*q*(x^2-y^2) - a)*(x^2+y^2-1) + z^2",
        ],
    )?;
    let manifolds = manifold_set(
        &vars,
        &params,
        &["x^2+y^2-1", "z"],
        &[&["0", "x^2+y^2"], &["-2*q*(x^2-y^2) - a", "z"]],
    )?;
    let orbit = unit_circle_orbit(&[Harmonic::Cos, Harmonic::Sin, Harmonic::Zero])?;
    Ok(Problem {
        name: "mathieu".into(),
        system,
        manifolds,
        orbit: Box::new(orbit),
    })
}

/// Monodromy over `[0, 2 pi]` of `v'' + (a + 2 q cos 2t) v = 0` written as
/// a first-order system, columns from the initial conditions `(1, 0)` and
/// `(0, 1)`.
pub fn mathieu_direct_monodromy(
    p: MathieuParams,
    cfg: &IntegratorConfig,
) -> Result<Matrix, SystemsError> {
    let a = |t: f64, m: &mut Matrix| {
        m[(0, 0)] = 0.0;
        m[(0, 1)] = 1.0;
        m[(1, 0)] = -(p.a + 2.0 * p.q * (2.0 * t).cos());
        m[(1, 1)] = 0.0;
    };
    Ok(integrate_matrix(a, &Matrix::identity(2), 0.0, TAU, cfg)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartVerdict {
    Stable,
    Unstable,
    Boundary,
}

impl ChartVerdict {
    pub fn from_trace(trace: f64) -> Self {
        let excess = trace.abs() - 2.0;
        if excess > BOUNDARY_TOL {
            Self::Unstable
        } else if excess >= -BOUNDARY_TOL {
            Self::Boundary
        } else {
            Self::Stable
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stable => "stable",
            Self::Unstable => "unstable",
            Self::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartCell {
    pub a: f64,
    pub q: f64,
    pub trace: f64,
    pub verdict: ChartVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MathieuChart {
    /// `a`-major: all `q` values for the first `a`, then the next `a`.
    pub cells: Vec<ChartCell>,
    pub grid_n: usize,
    /// Cells recomputed from the Mathieu equation directly.
    pub cross_checked: usize,
    /// Largest trace difference on the cross-checked cells.
    pub cross_check_max_diff: f64,
}

impl MathieuChart {
    /// The cell whose grid point is nearest to `(a, q)`.
    pub fn nearest(&self, a: f64, q: f64) -> Option<&ChartCell> {
        self.cells
            .iter()
            .min_by(|x, y| ((x.a - a).hypot(x.q - q)).total_cmp(&(y.a - a).hypot(y.q - q)))
    }
}

fn grid(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// Stability chart over an `grid_n x grid_n` grid of `(a, q)`. Each trace
/// comes from the cofactor monodromy of [`mathieu`]; a subsample is
/// recomputed with [`mathieu_direct_monodromy`].
pub fn mathieu_stability_chart(
    a_range: (f64, f64),
    q_range: (f64, f64),
    grid_n: usize,
    cfg: &IntegratorConfig,
) -> Result<MathieuChart, SystemsError> {
    if grid_n < 2 {
        return Err(SystemsError::InvalidParameters(format!(
            "grid size must be at least 2, got {grid_n}"
        )));
    }
    for (name, (lo, hi)) in [("a", a_range), ("q", q_range)] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(SystemsError::InvalidParameters(format!(
                "{name} range {lo}:{hi} is empty or not finite"
            )));
        }
    }
    let results: Vec<(ChartCell, Option<f64>)> = (0..grid_n * grid_n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / grid_n, idx % grid_n);
            let p = MathieuParams {
                a: grid(a_range.0, a_range.1, grid_n, i),
                q: grid(q_range.0, q_range.1, grid_n, j),
            };
            let prob = mathieu(p)?;
            let report =
                multipliers_cofactor(&prob.system, &prob.manifolds, prob.orbit.as_ref(), cfg)?;
            let trace = report.monodromy.as_ref().map_or(f64::NAN, Matrix::trace);
            let check = if i % CROSS_CHECK_STRIDE == 0 && j % CROSS_CHECK_STRIDE == 0 {
                Some((mathieu_direct_monodromy(p, cfg)?.trace() - trace).abs())
            } else {
                None
            };
            let cell = ChartCell {
                a: p.a,
                q: p.q,
                trace,
                verdict: ChartVerdict::from_trace(trace),
            };
            Ok((cell, check))
        })
        .collect::<Result<_, SystemsError>>()?;
    let cross: Vec<f64> = results.iter().filter_map(|(_, c)| *c).collect();
    Ok(MathieuChart {
        cells: results.into_iter().map(|(c, _)| c).collect(),
        grid_n,
        cross_checked: cross.len(),
        cross_check_max_diff: cross.into_iter().fold(0.0, f64::max),
    })
}

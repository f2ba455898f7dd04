use std::f64::consts::PI;

use super::{
    exact_params, manifold_set, names, poly_system, unit_circle_orbit, Harmonic, Problem,
    SystemsError,
};
use crate::numlin::Matrix;

/// Threshold on `|2 - 2s + s k|` separating the two closed-form branches.
const BRANCH_TOL: f64 = 1e-12;

/// Parameters of the 4-D system; all real values are admissible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Params {
    pub s: f64,
    pub k_param: f64,
}

impl Default for Example1Params {
    fn default() -> Self {
        Self {
            s: 1.0,
            k_param: 3.0,
        }
    }
}

impl Example1Params {
    /// `2 - 2s + s k`, the rate separating the branches.
    pub fn branch_rate(&self) -> f64 {
        2.0 - 2.0 * self.s + self.s * self.k_param
    }

    pub fn branch(&self) -> Example1Branch {
        if self.branch_rate().abs() >= BRANCH_TOL {
            Example1Branch::Generic
        } else {
            Example1Branch::Degenerate
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example1Branch {
    /// `2 - 2s + s k != 0`.
    Generic,
    /// `k = 2(s - 1)/s`.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedMultipliers {
    pub branch: Example1Branch,
    pub values: [f64; 3],
}

/// Two coupled planar oscillators in `(x, y, z, w)` with orbit
/// `(cos t, sin t, cos t, sin t)` and hypersurfaces
/// `f = (x^2+y^2-1, x-z, y-w)`.
pub fn example1(p: Example1Params) -> Result<Problem, SystemsError> {
    let vars = names(&["x", "y", "z", "w"]);
    let params = exact_params(&[("s", p.s), ("k", p.k_param)])?;
    let system = poly_system(
        &vars,
        &params,
        &[
            "-y - x*(x^2+y^2-1)",
            "x - y*(x^2+y^2-1)",
            "-w - s*z*(z^2+w^2-1) - s*k*(x-z)",
            "z - s*w*(z^2+w^2-1) - s*k*(y-w)",
        ],
    )?;
    let manifolds = manifold_set(
        &vars,
        &params,
        &["x^2+y^2-1", "x-z", "y-w"],
        &[
            &["-2*(x^2+y^2)", "0", "0"],
            &["s*z - x", "s*k - s*z*(x+z)", "-1 - s*z*(y+w)"],
            &["s*w - y", "1 - s*w*(x+z)", "s*k - s*w*(y+w)"],
        ],
    )?;
    let orbit = unit_circle_orbit(&[Harmonic::Cos, Harmonic::Sin, Harmonic::Cos, Harmonic::Sin])?;
    Ok(Problem {
        name: "example1".into(),
        system,
        manifolds,
        orbit: Box::new(orbit),
    })
}

/// Closed-form multipliers. Generic branch:
/// `e^(-4 pi), e^(2 s (k-2) pi), e^(2 k s pi)`; degenerate branch:
/// `e^(-4 pi), e^(-4 pi), e^(4 pi (s-1))`.
pub fn example1_expected_multipliers(p: Example1Params) -> ExpectedMultipliers {
    let Example1Params { s, k_param: k } = p;
    let branch = p.branch();
    let values = match branch {
        Example1Branch::Generic => [
            (-4.0 * PI).exp(),
            (2.0 * s * (k - 2.0) * PI).exp(),
            (2.0 * k * s * PI).exp(),
        ],
        Example1Branch::Degenerate => [
            (-4.0 * PI).exp(),
            (-4.0 * PI).exp(),
            (4.0 * PI * (s - 1.0)).exp(),
        ],
    };
    ExpectedMultipliers { branch, values }
}

/// Closed-form fundamental matrix `v(t)` of the cofactor system on the
/// orbit, with `v(0) = Id`.
pub fn example1_closed_form_v(t: f64, p: Example1Params) -> Matrix {
    let Example1Params { s, k_param: k } = p;
    let (sn, cs) = t.sin_cos();
    let decay = (-2.0 * t).exp();
    let (g, m22, m23) = match p.branch() {
        Example1Branch::Generic => {
            let lam = p.branch_rate();
            (
                (s - 1.0) * decay * (lam * t).exp_m1() / lam,
                ((k - 2.0) * s * t).exp(),
                (k * s * t).exp(),
            )
        }
        Example1Branch::Degenerate => ((s - 1.0) * decay * t, decay, (2.0 * (s - 1.0) * t).exp()),
    };
    Matrix::from_rows(&[
        vec![decay, 0.0, 0.0],
        vec![g * cs, m22 * cs, -m23 * sn],
        vec![g * sn, m22 * sn, m23 * cs],
    ])
}

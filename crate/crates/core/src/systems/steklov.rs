use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{exact_params, manifold_set, names, poly_system, Problem, SystemsError};
use crate::floquet::{cofactor_monodromy, InvariantManifolds, OrbitRepresentation, PeriodicOrbit};
use crate::numlin::{eigenvalues, ComplexValue, Matrix};
use crate::ode::{integrate, FnField, IntegratorConfig};
use crate::specfun::{elliptic_k, jacobi_derivatives, jacobi_sn_cn_dn};

/// Bound on `|C - 1|`; `det v(T) = 1` because `trace k` vanishes on the orbit.
const C_TOL: f64 = 1e-4;
/// Bound on the structure residual of `v(T)`.
const STRUCTURE_TOL: f64 = 1e-4;
/// Distance to 1 under which an eigenvalue of `v(T)` counts as unit.
const UNIT_EIGEN_TOL: f64 = 1e-3;
/// `B^2 > 4 + VERDICT_MARGIN` is reported as unstable.
const VERDICT_MARGIN: f64 = 1e-6;
/// Sample points of the conservation suite over one period.
const CONSERVATION_SAMPLES: usize = 64;
/// Relative slack required on every strict inequality by [`sample_steklov_params`].
const SAMPLE_MARGIN: f64 = 0.05;

/// Rigid body with principal moments `a, b, c`, weight `W` and distance `l`
/// from the fixed point to the center of mass on the first axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteklovParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub w: f64,
    pub l: f64,
}

impl Default for SteklovParams {
    fn default() -> Self {
        Self {
            a: 2.5,
            b: 3.0,
            c: 1.0,
            w: 1.0,
            l: 1.0,
        }
    }
}

impl SteklovParams {
    /// Checks the admissibility inequalities, naming the first that fails.
    pub fn validate(&self) -> Result<(), SystemsError> {
        let Self { a, b, c, w, l } = *self;
        if ![a, b, c, w, l].iter().all(|x| x.is_finite()) {
            return Err(SystemsError::InvalidParameters(
                "parameters must be finite".into(),
            ));
        }
        let checks = [
            (w > 0.0, "W > 0"),
            (l > 0.0, "l > 0"),
            (b > a, "b > a"),
            (a > 2.0 * c, "a > 2c"),
            (b > c, "b > c"),
            (a + b > c, "a + b > c"),
            (b + c > a, "b + c > a"),
            (c + a > b, "c + a > b"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, what)) => Err(SystemsError::InvalidParameters(format!(
                "requires {what} (a = {a}, b = {b}, c = {c}, W = {w}, l = {l})"
            ))),
            None => Ok(()),
        }
    }

    pub fn derived(&self) -> Result<SteklovDerived, SystemsError> {
        self.validate()?;
        let Self { a, b, c, w, l } = *self;
        let wl = w * l;
        let k = ((b - a) / (b - c)).sqrt();
        let period = 4.0 * k * elliptic_k(k)? * ((a - c) / wl).sqrt();
        Ok(SteklovDerived {
            mu: (wl / a).sqrt(),
            beta0: a * (a - 2.0 * c) / ((b - a) * (a - c)),
            beta1: a * (2.0 * b - a) / ((b - a) * (a - c)),
            k,
            period,
            rho1: 2.0 * (2.0 * b - a) * (b - c) * wl
                / (a.sqrt() * (b - a) * (a - 2.0 * c).powf(1.5)),
            rho2: 2.0 * a.sqrt() * c * (b - c) * wl
                / ((b - a) * (a - 2.0 * c).sqrt() * (a * a - 2.0 * a * b + 2.0 * b * c)),
        })
    }

    fn wl(&self) -> f64 {
        self.w * self.l
    }

    /// `a^2 - 2ab - 2ac + 2bc`.
    fn d(&self) -> f64 {
        let Self { a, b, c, .. } = *self;
        a * a - 2.0 * a * b - 2.0 * a * c + 2.0 * b * c
    }

    /// `(a - b)(a - c) / (W l)`.
    fn delta(&self) -> f64 {
        (self.a - self.b) * (self.a - self.c) / self.wl()
    }
}

/// Constants of the orbit. `0 < k < 1` and `period > 0` for admissible
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteklovDerived {
    pub mu: f64,
    pub beta0: f64,
    pub beta1: f64,
    /// Elliptic modulus, `k^2 = (b - a)/(b - c)`.
    pub k: f64,
    pub period: f64,
    pub rho1: f64,
    pub rho2: f64,
}

/// Elliptic-function periodic solution in `(p, q, r, g1, g2, g3)` with
/// phase fixed so that `q(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteklovOrbit {
    params: SteklovParams,
    derived: SteklovDerived,
    /// `z = rate * t` is the argument of sn, cn, dn.
    rate: f64,
    /// Amplitudes of p, q, r, g1, g2, g3.
    amp: [f64; 6],
}

impl SteklovOrbit {
    pub fn new(params: SteklovParams) -> Result<Self, SystemsError> {
        let d = params.derived()?;
        let SteklovParams { a, b, c, .. } = params;
        let amp = [
            -d.mu * (d.beta0 * (2.0 * b - a) / (a - c)).sqrt(),
            d.mu * (d.beta0 * a / (b - c)).sqrt(),
            d.mu * (d.beta1 * a / (a - c)).sqrt(),
            a / (a - c),
            d.k * d.beta1.sqrt(),
            -(d.beta0 * (b - a) / (a - c)).sqrt(),
        ];
        Ok(Self {
            params,
            derived: d,
            rate: (a / (a - c)).sqrt() * d.mu / d.k,
            amp,
        })
    }

    pub fn params(&self) -> SteklovParams {
        self.params
    }

    pub fn derived(&self) -> SteklovDerived {
        self.derived
    }
}

impl PeriodicOrbit for SteklovOrbit {
    fn dimension(&self) -> usize {
        6
    }

    fn period(&self) -> f64 {
        self.derived.period
    }

    fn state(&self, t: f64, out: &mut [f64]) {
        let Ok(j) = jacobi_sn_cn_dn(self.rate * t, self.derived.k) else {
            out.fill(f64::NAN);
            return;
        };
        let m = &self.amp;
        out[0] = m[0] * j.cn;
        out[1] = m[1] * j.sn;
        out[2] = m[2] * j.dn;
        out[3] = 1.0 - m[3] * j.cn * j.cn;
        out[4] = m[4] * j.sn * j.cn;
        out[5] = m[5] * j.cn * j.dn;
    }

    fn velocity(&self, t: f64, out: &mut [f64]) {
        let z = self.rate * t;
        let (Ok(j), Ok(dj)) = (
            jacobi_sn_cn_dn(z, self.derived.k),
            jacobi_derivatives(z, self.derived.k),
        ) else {
            out.fill(f64::NAN);
            return;
        };
        let m = &self.amp;
        let s = self.rate;
        out[0] = s * m[0] * dj.cn;
        out[1] = s * m[1] * dj.sn;
        out[2] = s * m[2] * dj.dn;
        out[3] = -s * m[3] * 2.0 * j.cn * dj.cn;
        out[4] = s * m[4] * (dj.sn * j.cn + j.sn * dj.cn);
        out[5] = s * m[5] * (dj.cn * j.dn + j.cn * dj.dn);
    }

    fn representation(&self) -> OrbitRepresentation {
        OrbitRepresentation::ClosedForm
    }
}

/// State `(p, q, r, g1, g2, g3)` of the orbit at time `t`.
pub fn steklov_orbit_state(t: f64, p: SteklovParams) -> Result<[f64; 6], SystemsError> {
    let orbit = SteklovOrbit::new(p)?;
    let mut x = [0.0; 6];
    orbit.state(t, &mut x);
    Ok(x)
}

/// Euler-Poisson equations with five hypersurfaces through the orbit and
/// their 5 x 5 cofactor matrix. Row 1 of the cofactor is zero because `f1`
/// is the energy integral; rows 4 and 5 have a single entry each.
pub fn steklov(p: SteklovParams) -> Result<Problem, SystemsError> {
    let orbit = SteklovOrbit::new(p)?;
    let vars = names(&["p", "q", "r", "g1", "g2", "g3"]);
    let params = exact_params(&[("a", p.a), ("b", p.b), ("c", p.c), ("W", p.w), ("l", p.l)])?;
    let system = poly_system(
        &vars,
        &params,
        &[
            "(b-c)/a*q*r",
            "(c-a)/b*p*r + W*l/b*g3",
            "(a-b)/c*p*q - W*l/c*g2",
            "r*g2 - q*g3",
            "p*g3 - r*g1",
            "q*g1 - p*g2",
        ],
    )?;
    let f = [
        "1/2*(a*p^2+b*q^2+c*r^2) + W*l*g1 + (a^2-2*a*b-2*a*c+2*b*c)*W*l/(2*(b-a)*(a-c))",
        "g2 - (a-b)*(a-c)/(W*l*(a-2*c))*p*q",
        "g3 - (a-b)*(a-c)/(W*l*(a-2*b))*p*r",
        "(a-b)/(a-2*c)*p^2 + (b-c)/a*r^2 - W*l*(a-2*b)/((a-b)*(a-c))",
        "-(a-c)/(a-2*b)*p^2 + (b-c)/a*q^2 + W*l*(a-2*c)/((a-b)*(a-c))",
    ];
    let k21 = "-r/(W*l)";
    let k23 = "-(a^2-2*a*b-a*c+3*b*c)*p/(b*(a-2*c))";
    let k24 = "a*c*r/(2*(b-c)*W*l)";
    let k25 = "-(a^2*b-2*a*b^2-2*a^2*c+2*a*b*c+2*b^2*c+2*a*c^2-2*b*c^2)*r/(2*(a-2*c)*(b-c)*W*l)";
    let k31 = "q/(W*l)";
    let k32 = "(a^2-a*b-2*a*c+3*b*c)*p/((a-2*b)*c)";
    let k34 = "-(2*a^2*b-2*a*b^2-a^2*c-2*a*b*c+2*b^2*c+2*a*c^2-2*b*c^2)*q/(2*(a-2*b)*(b-c)*W*l)";
    let k35 = "-a*b*q/(2*(b-c)*W*l)";
    let k42 = "-2*(b-c)*W*l*r/(a*c)";
    let k53 = "2*(b-c)*W*l*q/(a*b)";
    let manifolds = manifold_set(
        &vars,
        &params,
        &f,
        &[
            &["0", "0", "0", "0", "0"],
            &[k21, "0", k23, k24, k25],
            &[k31, k32, "0", k34, k35],
            &["0", k42, "0", "0", "0"],
            &["0", "0", k53, "0", "0"],
        ],
    )?;
    Ok(Problem {
        name: "steklov".into(),
        system,
        manifolds,
        orbit: Box::new(orbit),
    })
}

/// `(H1, H2, H3)`: vertical angular momentum, `|g|^2 - 1`, and the energy
/// shifted so that it vanishes on the orbit.
pub fn steklov_first_integrals(x: &[f64; 6], p: SteklovParams) -> [f64; 3] {
    let SteklovParams { a, b, c, .. } = p;
    let wl = p.wl();
    let [pp, q, r, g1, g2, g3] = *x;
    [
        a * pp * g1 + b * q * g2 + c * r * g3,
        g1 * g1 + g2 * g2 + g3 * g3 - 1.0,
        0.5 * (a * pp * pp + b * q * q + c * r * r)
            + wl * g1
            + p.d() * wl / (2.0 * (b - a) * (a - c)),
    ]
}

/// `(h1, h2)` of a solution `v` of the cofactor system, evaluated with the
/// orbit state `x` at the same time. Both are constant along solutions.
pub fn steklov_h1_h2(x: &[f64; 6], v: &[f64], p: SteklovParams) -> (f64, f64) {
    let SteklovParams { a, b, c, .. } = p;
    let wl = p.wl();
    let delta = p.delta();
    let [pp, q, r, g1, ..] = *x;
    let h1 = a * pp / wl * v[0]
        + b * q * v[1]
        + c * r * v[2]
        + a * c * (a * (a - 2.0 * c) + 2.0 * b * c) * pp / (2.0 * (a - 2.0 * b) * (b - c) * wl)
            * v[3]
        + a * b * (a * (a - 2.0 * b) + 2.0 * b * c) * pp / (2.0 * (a - 2.0 * c) * (b - c) * wl)
            * v[4];
    let p2 = pp * pp;
    let c4 = -a * c / ((b - c) * wl)
        + a * delta
            * (a.powi(3) - a * a * b - 2.0 * a * a * c + a * b * c + 2.0 * a * c * c
                - 2.0 * b * c * c)
            * p2
            / ((a - 2.0 * b).powi(2) * (a - 2.0 * c) * (b - c) * wl);
    let c5 = -a * b / ((b - c) * wl)
        + a * delta
            * (a.powi(3) - 2.0 * a * a * b + 2.0 * a * b * b - a * a * c + a * b * c
                - 2.0 * b * b * c)
            * p2
            / ((a - 2.0 * b) * (a - 2.0 * c).powi(2) * (b - c) * wl);
    let h2 = 2.0 * g1 / wl * v[0]
        + 2.0 * delta * pp * q / (a - 2.0 * c) * v[1]
        + 2.0 * delta * pp * r / (a - 2.0 * b) * v[2]
        + c4 * v[3]
        + c5 * v[4];
    (h1, h2)
}

/// Constant solution `(1, 0, 0, 2(a-2b)/D, -2(a-2c)/D)` of the cofactor
/// system, `D = a^2 - 2ab - 2ac + 2bc`.
pub fn steklov_constant_solution(p: SteklovParams) -> [f64; 5] {
    let d = p.d();
    [
        1.0,
        0.0,
        0.0,
        2.0 * (p.a - 2.0 * p.b) / d,
        -2.0 * (p.a - 2.0 * p.c) / d,
    ]
}

/// Largest deviation from the initial value over one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationDrifts {
    pub v1: f64,
    pub h1: f64,
    pub h2: f64,
}

impl ConservationDrifts {
    pub fn max(&self) -> f64 {
        self.v1.max(self.h1).max(self.h2)
    }
}

/// Integrates `v' = k(gamma(t)) v` from `v0` across one period in
/// [`CONSERVATION_SAMPLES`] pieces and records the drift of `v1`, `h1`, `h2`
/// at the piece ends.
pub fn steklov_conservation_suite(
    p: SteklovParams,
    v0: &[f64; 5],
    cfg: &IntegratorConfig,
) -> Result<ConservationDrifts, SystemsError> {
    let prob = steklov(p)?;
    let orbit = prob.orbit.as_ref();
    let man = &prob.manifolds;
    let field = FnField::new(5, |t: f64, v: &[f64], dv: &mut [f64]| {
        let mut x = [0.0; 6];
        let mut k = Matrix::zeros(5, 5);
        orbit.state(t, &mut x);
        man.cofactor(&x, &mut k);
        dv.copy_from_slice(&k.matvec(v));
    });
    let at = |t: f64, v: &[f64]| {
        let mut x = [0.0; 6];
        orbit.state(t, &mut x);
        steklov_h1_h2(&x, v, p)
    };
    let period = orbit.period();
    let (h10, h20) = at(0.0, v0);
    let mut drifts = ConservationDrifts {
        v1: 0.0,
        h1: 0.0,
        h2: 0.0,
    };
    let mut v = v0.to_vec();
    let mut t = 0.0;
    for i in 1..=CONSERVATION_SAMPLES {
        let t1 = period * i as f64 / CONSERVATION_SAMPLES as f64;
        v = integrate(&field, &v, t, t1, cfg)?;
        t = t1;
        let (h1, h2) = at(t, &v);
        drifts.v1 = drifts.v1.max((v[0] - v0[0]).abs());
        drifts.h1 = drifts.h1.max((h1 - h10).abs());
        drifts.h2 = drifts.h2.max((h2 - h20).abs());
    }
    Ok(drifts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteklovVerdict {
    /// `B^2 > 4`: one multiplier lies outside the unit circle.
    Unstable,
    /// `B^2 <= 4`: both multipliers lie on the unit circle and do not decide
    /// stability.
    Inconclusive,
}

impl SteklovVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Unstable => "unstable",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteklovMonodromyAnalysis {
    pub derived: SteklovDerived,
    pub v_t: Matrix,
    pub eigenvalues: Vec<ComplexValue>,
    /// The characteristic polynomial of `v(T)` is
    /// `-(x - 1)^3 (x^2 + B x + C)`.
    pub b: f64,
    pub c: f64,
    /// Largest violation of the linear relations between entries of `v(T)`,
    /// each relative to `max(1, |lhs|, |rhs|)`.
    pub structure_residual: f64,
    pub unit_eigenvalue_count: usize,
    /// Roots of `x^2 + B x + C`.
    pub nontrivial: [ComplexValue; 2],
    pub verdict: SteklovVerdict,
}

fn structure_residual(v: &Matrix, rho1: f64, rho2: f64) -> f64 {
    // 1-based entry access.
    let e = |i: usize, j: usize| v[(i - 1, j - 1)];
    let mut pairs = vec![(e(1, 1), 1.0)];
    pairs.extend((2..=5).map(|j| (e(1, j), 0.0)));
    pairs.extend([
        (e(4, 1), rho1 * e(3, 1)),
        (e(5, 1), rho2 * e(3, 1)),
        (e(4, 2), rho1 * e(3, 2)),
        (e(5, 2), rho2 * e(3, 2)),
        (e(4, 3), rho1 * (e(3, 3) - 1.0)),
        (e(5, 3), rho2 * (e(3, 3) - 1.0)),
        (e(3, 4), (e(4, 4) - 1.0) / rho1),
        (e(3, 5), (e(5, 5) - 1.0) / rho2),
        (e(4, 5), rho1 * (e(5, 5) - 1.0) / rho2),
        (e(5, 4), rho2 * (e(4, 4) - 1.0) / rho1),
    ]);
    pairs
        .into_iter()
        .map(|(l, r)| (l - r).abs() / 1f64.max(l.abs()).max(r.abs()))
        .fold(0.0, f64::max)
}

/// Integrates the cofactor system from the identity over one period and
/// reads off `B`, `C` and the structure of `v(T)`.
///
/// Fails with `StructureViolation` when `|C - 1|` or the structure residual
/// exceeds `1e-4`.
pub fn steklov_monodromy_analysis(
    p: SteklovParams,
    cfg: &IntegratorConfig,
) -> Result<SteklovMonodromyAnalysis, SystemsError> {
    let prob = steklov(p)?;
    let derived = p.derived()?;
    let v = cofactor_monodromy(&prob.manifolds, prob.orbit.as_ref(), cfg)?;
    let e = |i: usize, j: usize| v[(i - 1, j - 1)];
    let (rho1, rho2) = (derived.rho1, derived.rho2);
    let b = 2.0 - e(2, 2) - e(3, 3) - e(4, 4) - e(5, 5);
    let c = e(2, 2) * (e(3, 3) + e(4, 4) + e(5, 5) - 2.0)
        - e(3, 2) * (e(2, 3) + rho1 * e(2, 4) + rho2 * e(2, 5));
    let residual = structure_residual(&v, rho1, rho2);
    if (c - 1.0).abs() > C_TOL {
        return Err(SystemsError::StructureViolation {
            what: "|C - 1|",
            value: (c - 1.0).abs(),
        });
    }
    if residual > STRUCTURE_TOL {
        return Err(SystemsError::StructureViolation {
            what: "structure residual",
            value: residual,
        });
    }
    let eig = eigenvalues(&v).map_err(crate::floquet::FloquetError::from)?;
    let unit = eig
        .iter()
        .filter(|z| (*z - 1.0).norm() <= UNIT_EIGEN_TOL)
        .count();
    let disc = ComplexValue::new(b * b - 4.0 * c, 0.0).sqrt();
    let nontrivial = [(-b + disc) / 2.0, (-b - disc) / 2.0];
    let verdict = if b * b > 4.0 + VERDICT_MARGIN {
        SteklovVerdict::Unstable
    } else {
        SteklovVerdict::Inconclusive
    };
    Ok(SteklovMonodromyAnalysis {
        derived,
        v_t: v,
        eigenvalues: eig,
        b,
        c,
        structure_residual: residual,
        unit_eigenvalue_count: unit,
        nontrivial,
        verdict,
    })
}

/// `count` admissible parameter sets drawn from a box by rejection, each
/// strict inequality holding with relative slack [`SAMPLE_MARGIN`].
pub fn sample_steklov_params(count: usize, seed: u64) -> Vec<SteklovParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = rng.gen_range(0.5..2.0);
        let a = rng.gen_range(2.0 * c..5.0 * c);
        let b = rng.gen_range(a..a + c);
        let p = SteklovParams {
            a,
            b,
            c,
            w: rng.gen_range(0.5..2.0),
            l: rng.gen_range(0.5..2.0),
        };
        let slack = SAMPLE_MARGIN * b;
        if a - 2.0 * c > slack && b - a > slack && a + c - b > slack && p.validate().is_ok() {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{transversality_profile, verify_invariance, verify_orbit};
    use crate::quad;

    fn fixture() -> SteklovParams {
        SteklovParams::default()
    }

    #[test]
    fn validation_names_the_failed_inequality() {
        let err = SteklovParams {
            a: 1.0,
            b: 3.0,
            c: 1.0,
            w: 1.0,
            l: 1.0,
        }
        .validate()
        .unwrap_err();
        assert!(err.to_string().contains("requires a > 2c"), "{err}");
        let err = SteklovParams {
            a: 2.5,
            b: 4.0,
            c: 1.0,
            w: 1.0,
            l: 1.0,
        }
        .validate()
        .unwrap_err();
        assert!(err.to_string().contains("requires c + a > b"), "{err}");
        let err = SteklovParams {
            w: -1.0,
            ..fixture()
        }
        .validate()
        .unwrap_err();
        assert!(err.to_string().contains("W > 0"));
        assert!(SteklovParams {
            a: f64::NAN,
            ..fixture()
        }
        .validate()
        .is_err());
        assert!(fixture().validate().is_ok());
    }

    #[test]
    fn fixture_constants() {
        let d = fixture().derived().unwrap();
        assert!((d.k - 0.5).abs() < 1e-15);
        assert!((d.period - 4.129228203006557).abs() < 1e-12);
        assert!((d.rho1 - 50.0879).abs() < 1e-3);
        assert!((d.rho2 + 6.5049).abs() < 1e-3);
    }

    #[test]
    fn orbit_lies_on_hypersurfaces_and_is_periodic() {
        let p = fixture();
        let prob = steklov(p).unwrap();
        let period = prob.orbit.period();
        let mut vals = [0.0; 5];
        for i in 0..50 {
            let t = 0.173 * i as f64;
            let x = steklov_orbit_state(t, p).unwrap();
            prob.manifolds.values(&x, &mut vals);
            assert!(vals.iter().all(|v| v.abs() <= 1e-10), "{vals:?}");
            let y = steklov_orbit_state(t + period, p).unwrap();
            assert!(x.iter().zip(&y).all(|(u, w)| (u - w).abs() <= 1e-9));
            assert!(steklov_first_integrals(&x, p)[2].abs() <= 1e-10);
            assert!(steklov_first_integrals(&x, p)[0].abs() <= 1e-10);
            assert!(steklov_first_integrals(&x, p)[1].abs() <= 1e-10);
        }
    }

    #[test]
    fn orbit_solves_the_equations() {
        for p in std::iter::once(fixture()).chain(sample_steklov_params(3, 11)) {
            let prob = steklov(p).unwrap();
            assert!(verify_orbit(&prob.system, prob.orbit.as_ref(), 64).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn invariance_and_transversality() {
        let prob = steklov(fixture()).unwrap();
        let inv =
            verify_invariance(&prob.system, &prob.manifolds, prob.orbit.as_ref(), 64).unwrap();
        assert_eq!(inv.symbolic, Some(true));
        assert!(inv.residual <= 1e-10);
        let prof =
            transversality_profile(&prob.system, &prob.manifolds, prob.orbit.as_ref(), 64).unwrap();
        assert!(prof.dets.iter().all(|d| *d > 0.0));
    }

    #[test]
    fn first_integrals_along_a_trajectory() {
        let p = fixture();
        let prob = steklov(p).unwrap();
        let sys = &prob.system;
        let field = FnField::new(6, |_t: f64, x: &[f64], dx: &mut [f64]| {
            crate::floquet::DynamicalSystem::field(sys, x, dx)
        });
        let x0 = [0.3, -0.2, 0.5, 0.6, 0.0, 0.8];
        let x1 = integrate(
            &field,
            &x0,
            0.0,
            prob.orbit.period(),
            &IntegratorConfig::default(),
        )
        .unwrap();
        let h0 = steklov_first_integrals(&x0, p);
        let h1 = steklov_first_integrals(&x1.try_into().unwrap(), p);
        for i in 0..3 {
            assert!((h0[i] - h1[i]).abs() <= 1e-8);
        }
        assert_eq!(
            steklov_first_integrals(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.0], p)[1],
            0.0
        );
    }

    #[test]
    fn constant_solution_is_a_kernel_vector() {
        let p = fixture();
        let prob = steklov(p).unwrap();
        let v = steklov_constant_solution(p);
        let mut k = Matrix::zeros(5, 5);
        for i in 0..64 {
            let t = prob.orbit.period() * i as f64 / 64.0;
            let x = steklov_orbit_state(t, p).unwrap();
            prob.manifolds.cofactor(&x, &mut k);
            assert!(k.matvec(&v).iter().all(|y| y.abs() <= 1e-10));
            let (h1, h2) = steklov_h1_h2(&x, &v, p);
            assert!(h1.abs() <= 1e-10);
            assert!((h2 - 4.0 * p.delta() / p.d()).abs() <= 1e-10);
        }
    }

    #[test]
    fn conservation_on_random_start() {
        let drifts = steklov_conservation_suite(
            fixture(),
            &[0.3, -0.7, 0.2, 0.5, -0.1],
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!(drifts.max() <= 1e-7, "{drifts:?}");
    }

    #[test]
    fn cofactor_trace_vanishes_on_orbit() {
        let p = fixture();
        let prob = steklov(p).unwrap();
        let integral = quad::integrate(
            |t| {
                let x = steklov_orbit_state(t, p).unwrap();
                let mut k = Matrix::zeros(5, 5);
                prob.manifolds.cofactor(&x, &mut k);
                k.trace()
            },
            0.0,
            prob.orbit.period(),
            1e-14,
            1e-12,
        )
        .unwrap();
        assert!(integral.abs() < 1e-12);
    }

    #[test]
    fn fixture_monodromy_structure() {
        let an = steklov_monodromy_analysis(fixture(), &IntegratorConfig::default()).unwrap();
        assert!((an.c - 1.0).abs() <= 1e-4);
        assert!(an.structure_residual <= 1e-4);
        assert_eq!(an.unit_eigenvalue_count, 3);
        assert!((an.b + 5.3215).abs() < 1e-3);
        assert_eq!(an.verdict, SteklovVerdict::Unstable);
        let prod = an.nontrivial[0] * an.nontrivial[1];
        assert!((prod - 1.0).norm() <= 1e-4);
    }

    #[test]
    fn rho_constants_match_monodromy_ratios_off_unit_c() {
        let p = SteklovParams {
            a: 5.0,
            b: 6.0,
            c: 2.0,
            w: 1.0,
            l: 1.0,
        };
        let prob = steklov(p).unwrap();
        let v = cofactor_monodromy(
            &prob.manifolds,
            prob.orbit.as_ref(),
            &IntegratorConfig::default(),
        )
        .unwrap();
        let d = p.derived().unwrap();
        assert!((v[(3, 0)] / v[(2, 0)] / d.rho1 - 1.0).abs() < 1e-8);
        assert!((v[(4, 0)] / v[(2, 0)] / d.rho2 - 1.0).abs() < 1e-8);
        assert!((d.rho2 + 3.2524625127).abs() < 1e-8);
    }

    #[test]
    fn sampled_parameters_are_admissible_and_reproducible() {
        let a = sample_steklov_params(10, 7);
        assert_eq!(a, sample_steklov_params(10, 7));
        assert!(a.iter().all(|p| p.validate().is_ok()));
    }
}

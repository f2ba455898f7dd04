use std::f64::consts::TAU;

use super::{
    DynamicalSystem, FloquetError, InvariantManifolds, OrbitRepresentation, PeriodicOrbit,
};
use crate::expr::{NumericPolynomial, Polynomial};
use crate::numlin::Matrix;

fn same_variables(polys: &[&Polynomial], what: &str) -> Result<(), FloquetError> {
    if let Some(first) = polys.first() {
        if let Some(bad) = polys.iter().find(|p| p.variables() != first.variables()) {
            return Err(FloquetError::DimensionMismatch(format!(
                "{what}: variables {:?} differ from {:?}",
                bad.variables(),
                first.variables()
            )));
        }
    }
    Ok(())
}

/// Polynomial vector field with exact rational coefficients and a compiled
/// numeric form of the field and its Jacobian.
#[derive(Debug, Clone)]
pub struct PolynomialSystem {
    field: Vec<Polynomial>,
    compiled: Vec<NumericPolynomial>,
    jacobian: Vec<Vec<NumericPolynomial>>,
}

impl PolynomialSystem {
    /// One component per variable, all over the same variable list.
    pub fn new(field: Vec<Polynomial>) -> Result<Self, FloquetError> {
        same_variables(&field.iter().collect::<Vec<_>>(), "field")?;
        let n = field.len();
        if n == 0 || field[0].nvars() != n {
            return Err(FloquetError::DimensionMismatch(format!(
                "field has {n} components over {} variables",
                field.first().map_or(0, Polynomial::nvars)
            )));
        }
        let compiled = field.iter().map(Polynomial::compile).collect();
        let jacobian = field
            .iter()
            .map(|p| p.gradient().iter().map(Polynomial::compile).collect())
            .collect();
        Ok(Self {
            field,
            compiled,
            jacobian,
        })
    }

    pub fn variables(&self) -> &[String] {
        self.field[0].variables()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.field
    }
}

impl DynamicalSystem for PolynomialSystem {
    fn dimension(&self) -> usize {
        self.field.len()
    }

    fn field(&self, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.compiled) {
            *o = p.eval_unchecked(x);
        }
    }

    fn jacobian(&self, x: &[f64], out: &mut Matrix) {
        for (i, row) in self.jacobian.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                out[(i, j)] = p.eval_unchecked(x);
            }
        }
    }

    fn symbolic(&self) -> Option<&PolynomialSystem> {
        Some(self)
    }
}

/// Polynomial hypersurfaces `f` with a polynomial cofactor matrix `k`.
#[derive(Debug, Clone)]
pub struct InvariantManifoldSet {
    f: Vec<Polynomial>,
    k: Vec<Vec<Polynomial>>,
    f_compiled: Vec<NumericPolynomial>,
    gradients: Vec<Vec<NumericPolynomial>>,
    k_compiled: Vec<Vec<NumericPolynomial>>,
}

impl InvariantManifoldSet {
    /// `k` must be square with one row per element of `f`.
    pub fn new(f: Vec<Polynomial>, k: Vec<Vec<Polynomial>>) -> Result<Self, FloquetError> {
        let m = f.len();
        if m == 0 {
            return Err(FloquetError::DimensionMismatch("no hypersurfaces".into()));
        }
        if k.len() != m || k.iter().any(|row| row.len() != m) {
            return Err(FloquetError::DimensionMismatch(format!(
                "cofactor matrix must be {m}x{m}"
            )));
        }
        let all: Vec<&Polynomial> = f.iter().chain(k.iter().flatten()).collect();
        same_variables(&all, "manifolds")?;
        let f_compiled = f.iter().map(Polynomial::compile).collect();
        let gradients = f
            .iter()
            .map(|p| p.gradient().iter().map(Polynomial::compile).collect())
            .collect();
        let k_compiled = k
            .iter()
            .map(|row| row.iter().map(Polynomial::compile).collect())
            .collect();
        Ok(Self {
            f,
            k,
            f_compiled,
            gradients,
            k_compiled,
        })
    }

    pub fn variables(&self) -> &[String] {
        self.f[0].variables()
    }

    pub fn functions(&self) -> &[Polynomial] {
        &self.f
    }

    pub fn cofactor_entries(&self) -> &[Vec<Polynomial>] {
        &self.k
    }

    /// The exact polynomials `Df X - k f`, one per hypersurface.
    pub fn identity_residual(
        &self,
        sys: &PolynomialSystem,
    ) -> Result<Vec<Polynomial>, FloquetError> {
        if self.variables() != sys.variables() {
            return Err(FloquetError::DimensionMismatch(format!(
                "manifold variables {:?} differ from system variables {:?}",
                self.variables(),
                sys.variables()
            )));
        }
        let mut out = Vec::with_capacity(self.f.len());
        for (fi, ki) in self.f.iter().zip(&self.k) {
            let mut acc = Polynomial::zero(sys.variables());
            for (g, x) in fi.gradient().iter().zip(sys.components()) {
                acc = acc.add(&g.mul(x)?)?;
            }
            for (kij, fj) in ki.iter().zip(&self.f) {
                acc = acc.sub(&kij.mul(fj)?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }
}

impl InvariantManifolds for InvariantManifoldSet {
    fn count(&self) -> usize {
        self.f.len()
    }

    fn values(&self, x: &[f64], out: &mut [f64]) {
        for (o, p) in out.iter_mut().zip(&self.f_compiled) {
            *o = p.eval_unchecked(x);
        }
    }

    fn gradients(&self, x: &[f64], out: &mut Matrix) {
        for (i, row) in self.gradients.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                out[(i, j)] = p.eval_unchecked(x);
            }
        }
    }

    fn cofactor(&self, x: &[f64], out: &mut Matrix) {
        for (i, row) in self.k_compiled.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                out[(i, j)] = p.eval_unchecked(x);
            }
        }
    }

    fn symbolic(&self) -> Option<&InvariantManifoldSet> {
        Some(self)
    }
}

/// `a0 + sum_j a_j cos(j w t) + b_j sin(j w t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    pub a0: f64,
    /// `(a_j, b_j)` for `j = 1, 2, ...`.
    pub harmonics: Vec<(f64, f64)>,
}

impl FourierSeries {
    pub fn constant(a0: f64) -> Self {
        Self {
            a0,
            harmonics: Vec::new(),
        }
    }

    pub fn value(&self, omega: f64, t: f64) -> f64 {
        self.harmonics
            .iter()
            .enumerate()
            .fold(self.a0, |acc, (j, (a, b))| {
                let (s, c) = ((j + 1) as f64 * omega * t).sin_cos();
                acc + a * c + b * s
            })
    }

    pub fn derivative(&self, omega: f64, t: f64) -> f64 {
        self.harmonics
            .iter()
            .enumerate()
            .fold(0.0, |acc, (j, (a, b))| {
                let w = (j + 1) as f64 * omega;
                let (s, c) = (w * t).sin_cos();
                acc + w * (b * c - a * s)
            })
    }
}

/// Orbit given by one truncated Fourier series per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierOrbit {
    period: f64,
    components: Vec<FourierSeries>,
}

impl FourierOrbit {
    pub fn new(period: f64, components: Vec<FourierSeries>) -> Result<Self, FloquetError> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(FloquetError::DimensionMismatch(format!(
                "period must be positive and finite, got {period}"
            )));
        }
        if components.is_empty() {
            return Err(FloquetError::DimensionMismatch(
                "orbit has no components".into(),
            ));
        }
        Ok(Self { period, components })
    }

    pub fn components(&self) -> &[FourierSeries] {
        &self.components
    }

    fn omega(&self) -> f64 {
        TAU / self.period
    }
}

impl PeriodicOrbit for FourierOrbit {
    fn dimension(&self) -> usize {
        self.components.len()
    }

    fn period(&self) -> f64 {
        self.period
    }

    fn state(&self, t: f64, out: &mut [f64]) {
        let w = self.omega();
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.value(w, t);
        }
    }

    fn velocity(&self, t: f64, out: &mut [f64]) {
        let w = self.omega();
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.derivative(w, t);
        }
    }

    fn representation(&self) -> OrbitRepresentation {
        OrbitRepresentation::Fourier
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_polynomial;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let v = vars(&["x", "y", "z"]);
        let field = [
            "-y + z*x/2",
            "x + z*y/2",
            "(-2*(x^2-y^2) - 1)*(x^2+y^2-1) + z^2",
        ]
        .iter()
        .map(|s| parse_polynomial(s, &v).unwrap())
        .collect();
        let sys = PolynomialSystem::new(field).unwrap();
        let x = [0.3, -0.7, 0.2];
        let mut jac = Matrix::zeros(3, 3);
        sys.jacobian(&x, &mut jac);
        let h = 1e-6;
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let mut fp = [0.0; 3];
            let mut fm = [0.0; 3];
            sys.field(&xp, &mut fp);
            sys.field(&xm, &mut fm);
            for i in 0..3 {
                assert!(((fp[i] - fm[i]) / (2.0 * h) - jac[(i, j)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_wrong_component_count() {
        let v = vars(&["x", "y"]);
        let p = parse_polynomial("x", &v).unwrap();
        assert!(PolynomialSystem::new(vec![p]).is_err());
    }

    #[test]
    fn fourier_orbit_is_periodic_and_differentiable() {
        let orbit = FourierOrbit::new(
            3.0,
            vec![
                FourierSeries {
                    a0: 0.5,
                    harmonics: vec![(1.0, 0.2), (0.0, -0.3)],
                },
                FourierSeries::constant(2.0),
            ],
        )
        .unwrap();
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        orbit.state(0.7, &mut a);
        orbit.state(0.7 + 3.0, &mut b);
        assert!((a[0] - b[0]).abs() < 1e-12 && a[1] == 2.0);
        let h = 1e-6;
        let mut p = [0.0; 2];
        let mut m = [0.0; 2];
        orbit.state(0.7 + h, &mut p);
        orbit.state(0.7 - h, &mut m);
        let mut d = [0.0; 2];
        orbit.velocity(0.7, &mut d);
        assert!(((p[0] - m[0]) / (2.0 * h) - d[0]).abs() < 1e-6);
        assert_eq!(d[1], 0.0);
    }
}

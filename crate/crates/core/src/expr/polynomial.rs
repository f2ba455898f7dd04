use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{rational_to_f64, ExprError, Rational};

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

/// Multivariate polynomial over an ordered list of variables.
///
/// Terms with a zero coefficient are never stored, so two polynomials over
/// the same variables are equal exactly when their term maps are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: Arc<[String]>,
    terms: BTreeMap<Exponents, Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Sub,
    Mul,
}

/// `a (op) b` for two polynomials over the same variable list.
pub fn combine(a: &Polynomial, b: &Polynomial, op: CombineOp) -> Result<Polynomial, ExprError> {
    match op {
        CombineOp::Add => a.add(b),
        CombineOp::Sub => a.sub(b),
        CombineOp::Mul => a.mul(b),
    }
}

impl Polynomial {
    pub fn zero(vars: &[String]) -> Self {
        Self {
            vars: vars.into(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[String], value: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !value.is_zero() {
            p.terms.insert(vec![0; vars.len()], value);
        }
        p
    }

    pub fn variable(vars: &[String], name: &str) -> Result<Self, ExprError> {
        let idx = index_of(vars, name)?;
        let mut exps = vec![0; vars.len()];
        exps[idx] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(exps, Rational::one());
        Ok(p)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// duplicates and dropping zeros.
    pub fn from_terms<I>(vars: &[String], terms: I) -> Result<Self, ExprError>
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (exps, c) in terms {
            if exps.len() != vars.len() {
                return Err(ExprError::DimensionMismatch {
                    expected: vars.len(),
                    actual: exps.len(),
                });
            }
            p.accumulate(exps, c);
        }
        Ok(p)
    }

    fn accumulate(&mut self, exps: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn check_same_vars(&self, other: &Self) -> Result<(), ExprError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(ExprError::VariableMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExprError> {
        self.check_same_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExprError> {
        self.check_same_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ExprError> {
        self.check_same_vars(other)?;
        let mut out = Self::zero(&self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.accumulate(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(&self.vars);
        }
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * factor))
                .collect(),
        }
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut result = Self::constant(&self.vars, Rational::one());
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same variables");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same variables");
            }
        }
        result
    }

    /// Returns the constant value if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next()?;
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Exact partial derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> Result<Self, ExprError> {
        let idx = index_of(&self.vars, var)?;
        Ok(self.differentiate_index(idx))
    }

    pub(crate) fn differentiate_index(&self, idx: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut de = e.clone();
            de[idx] -= 1;
            out.accumulate(de, c * Rational::from_integer(e[idx].into()));
        }
        out
    }

    /// Gradient as one polynomial per variable.
    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars())
            .map(|i| self.differentiate_index(i))
            .collect()
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64, ExprError> {
        self.compile().evaluate(point)
    }

    /// Compiles the polynomial into a nested Horner scheme over `f64`.
    pub fn compile(&self) -> NumericPolynomial {
        let terms: Vec<(&[u32], f64)> = self
            .terms
            .iter()
            .map(|(e, c)| (e.as_slice(), rational_to_f64(c)))
            .collect();
        NumericPolynomial {
            nvars: self.nvars(),
            root: HornerNode::build(&terms, 0, self.nvars()),
        }
    }

    /// Terms in graded lexicographic order (higher total degree first).
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| graded_lex_desc(a, b));
        v
    }
}

fn graded_lex_desc(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

fn index_of(vars: &[String], name: &str) -> Result<usize, ExprError> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| ExprError::UnknownVariable(name.to_string()))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (exps, coeff)) in self.sorted_terms().into_iter().enumerate() {
            let negative = coeff.is_negative();
            let magnitude = coeff.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors: Vec<String> = exps
                .iter()
                .zip(self.vars.iter())
                .filter(|(&e, _)| e > 0)
                .map(|(&e, v)| {
                    if e == 1 {
                        v.clone()
                    } else {
                        format!("{v}^{e}")
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{magnitude}")?;
            } else {
                if !magnitude.is_one() {
                    write!(f, "{magnitude}*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.vars.join(","), self)
    }
}

#[derive(Debug, Clone)]
enum HornerNode {
    Const(f64),
    /// Coefficients (indexed by power of `var`) that are themselves
    /// polynomials in the remaining variables.
    Node {
        var: usize,
        coeffs: Vec<HornerNode>,
    },
}

impl HornerNode {
    fn build(terms: &[(&[u32], f64)], var: usize, nvars: usize) -> Self {
        if var == nvars {
            return Self::Const(terms.iter().map(|(_, c)| c).sum());
        }
        let max_pow = terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0);
        if max_pow == 0 {
            return Self::build(terms, var + 1, nvars);
        }
        let coeffs = (0..=max_pow)
            .map(|p| {
                let sub: Vec<(&[u32], f64)> =
                    terms.iter().filter(|(e, _)| e[var] == p).copied().collect();
                Self::build(&sub, var + 1, nvars)
            })
            .collect();
        Self::Node { var, coeffs }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Const(c) => *c,
            Self::Node { var, coeffs } => {
                let xv = x[*var];
                coeffs.iter().rev().fold(0.0, |acc, c| acc * xv + c.eval(x))
            }
        }
    }
}

/// Floating-point image of a [`Polynomial`], evaluated by nested Horner
/// schemes (one level per variable).
#[derive(Debug, Clone)]
pub struct NumericPolynomial {
    nvars: usize,
    root: HornerNode,
}

impl NumericPolynomial {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64, ExprError> {
        if point.len() != self.nvars {
            return Err(ExprError::DimensionMismatch {
                expected: self.nvars,
                actual: point.len(),
            });
        }
        Ok(self.root.eval(point))
    }

    /// Evaluation without the length check; `point` must have `nvars`
    /// entries.
    #[inline]
    pub fn eval_unchecked(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.nvars);
        self.root.eval(point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_polynomial;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn difference_of_squares() {
        let v = vars(&["x", "y"]);
        let a = parse_polynomial("x + y", &v).unwrap();
        let b = parse_polynomial("x - y", &v).unwrap();
        let prod = combine(&a, &b, CombineOp::Mul).unwrap();
        assert_eq!(prod, parse_polynomial("x^2 - y^2", &v).unwrap());
    }

    #[test]
    fn self_difference_is_zero() {
        let v = vars(&["x", "y"]);
        let p = parse_polynomial("3*x^2*y - 1/7*y + 2", &v).unwrap();
        assert!(combine(&p, &p, CombineOp::Sub).unwrap().is_zero());
    }

    #[test]
    fn circle_row_product_matches_termwise_expansion() {
        // (x^2 + y^2 - 1)(-2x^2 - 2y^2), expanded by hand:
        // -2x^4 - 4x^2y^2 - 2y^4 + 2x^2 + 2y^2
        let v = vars(&["x", "y"]);
        let f = parse_polynomial("x^2 + y^2 - 1", &v).unwrap();
        let k = parse_polynomial("-2*x^2 - 2*y^2", &v).unwrap();
        let prod = f.mul(&k).unwrap();
        let expected = Polynomial::from_terms(
            &v,
            vec![
                (vec![4, 0], r(-2, 1)),
                (vec![2, 2], r(-4, 1)),
                (vec![0, 4], r(-2, 1)),
                (vec![2, 0], r(2, 1)),
                (vec![0, 2], r(2, 1)),
            ],
        )
        .unwrap();
        assert_eq!(prod, expected);
        assert_eq!(prod.total_degree(), 4);
    }

    #[test]
    fn mismatched_variables_rejected() {
        let a = parse_polynomial("x", &vars(&["x", "y"])).unwrap();
        let b = parse_polynomial("x", &vars(&["x", "z"])).unwrap();
        assert!(matches!(
            combine(&a, &b, CombineOp::Add),
            Err(ExprError::VariableMismatch { .. })
        ));
    }

    #[test]
    fn derivatives() {
        let v = vars(&["x", "y"]);
        let f = parse_polynomial("x^2 + y^2 - 1", &v).unwrap();
        assert_eq!(
            f.differentiate("x").unwrap(),
            parse_polynomial("2*x", &v).unwrap()
        );
        let c = parse_polynomial("5/3", &v).unwrap();
        assert!(c.differentiate("x").unwrap().is_zero());
        assert_eq!(
            f.differentiate("w"),
            Err(ExprError::UnknownVariable("w".into()))
        );

        let v3 = vars(&["x", "y", "z"]);
        let f2 = parse_polynomial("z", &v3).unwrap();
        assert_eq!(
            f2.differentiate("z").unwrap().as_constant(),
            Some(Rational::one())
        );
    }

    #[test]
    fn evaluation() {
        let v = vars(&["x", "y"]);
        let f = parse_polynomial("x^2 + y^2 - 1", &v).unwrap();
        for i in 0..32 {
            let t = i as f64 * 0.37;
            assert!(f.evaluate(&[t.cos(), t.sin()]).unwrap().abs() < 1e-15);
        }
        let g = parse_polynomial("2*x", &v).unwrap();
        assert_eq!(g.evaluate(&[3.0, -8.0]).unwrap(), 6.0);
        assert_eq!(
            g.evaluate(&[1.0]),
            Err(ExprError::DimensionMismatch {
                expected: 2,
                actual: 1
            })
        );
        let v4 = vars(&["x", "y", "z", "w"]);
        let h = parse_polynomial("x - z", &v4).unwrap();
        assert_eq!(h.evaluate(&[1.0, 0.0, 1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn render_is_graded_lex() {
        let v = vars(&["x", "y"]);
        let p = parse_polynomial("1 - y + x*y + 3/2*y^3 - x^2", &v).unwrap();
        assert_eq!(p.to_string(), "3/2*y^3 - x^2 + x*y - y + 1");
        assert_eq!(Polynomial::zero(&v).to_string(), "0");
        let n = parse_polynomial("-x", &v).unwrap();
        assert_eq!(n.to_string(), "-x");
    }

    #[test]
    fn pow_matches_repeated_product() {
        let v = vars(&["x", "y"]);
        let p = parse_polynomial("x - 2*y + 1/3", &v).unwrap();
        let cube = p.mul(&p).unwrap().mul(&p).unwrap();
        assert_eq!(p.pow(3), cube);
        assert_eq!(p.pow(0).as_constant(), Some(Rational::one()));
    }
}

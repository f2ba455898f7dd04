use std::collections::BTreeMap;

use num_traits::Zero;

use super::{FloquetError, PolynomialSystem};
use crate::expr::{Polynomial, Rational};
use crate::numlin::{solve_exact, NumlinError, RationalMatrix};

/// Exponent vectors in `nvars` variables of total degree at most `degree`,
/// by increasing degree.
fn monomials(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            rec(prefix, left - 1, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(nvars), nvars, degree, &mut out);
    out.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
    out
}

/// Finds a cofactor matrix `k` with `Df X = k f` exactly, each entry of
/// total degree at most `degree_bound`.
///
/// Each row is an exact linear system in the unknown coefficients, solved
/// with [`solve_exact`]; coefficients left free are set to zero. Rows of `k`
/// are independent, so a row without solution fails the whole call.
pub fn discover_cofactor(
    sys: &PolynomialSystem,
    f: &[Polynomial],
    degree_bound: u32,
) -> Result<Vec<Vec<Polynomial>>, FloquetError> {
    let vars = sys.variables();
    if f.is_empty() {
        return Err(FloquetError::DimensionMismatch("no hypersurfaces".into()));
    }
    if let Some(bad) = f.iter().find(|p| p.variables() != vars) {
        return Err(FloquetError::DimensionMismatch(format!(
            "hypersurface variables {:?} differ from system variables {vars:?}",
            bad.variables()
        )));
    }
    let basis = monomials(vars.len(), degree_bound);
    let max_f_degree = f.iter().map(Polynomial::total_degree).max().unwrap_or(0);

    // Column (j, a) holds the coefficients of x^basis[a] * f_j.
    let mut columns: Vec<BTreeMap<Vec<u32>, Rational>> = Vec::with_capacity(f.len() * basis.len());
    for fj in f {
        for alpha in &basis {
            let shifted = fj
                .terms()
                .map(|(e, c)| (e.iter().zip(alpha).map(|(p, q)| p + q).collect(), c.clone()))
                .collect();
            columns.push(shifted);
        }
    }

    let mut k = Vec::with_capacity(f.len());
    for (row, fi) in f.iter().enumerate() {
        let mut target = Polynomial::zero(vars);
        for (g, x) in fi.gradient().iter().zip(sys.components()) {
            target = target.add(&g.mul(x)?)?;
        }

        let mut index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for e in target
            .terms()
            .map(|(e, _)| e)
            .chain(columns.iter().flat_map(|c| c.keys()))
        {
            let next = index.len();
            index.entry(e.clone()).or_insert(next);
        }
        let mut a = RationalMatrix::zeros(index.len(), columns.len());
        for (col, entries) in columns.iter().enumerate() {
            for (e, c) in entries {
                a.set(index[e], col, c.clone());
            }
        }
        let mut rhs = vec![Rational::zero(); index.len()];
        for (e, c) in target.terms() {
            rhs[index[e]] = c.clone();
        }

        let solution = solve_exact(&a, &rhs).map_err(|err| match err {
            NumlinError::NoSolution => {
                let needed = target.total_degree().saturating_sub(max_f_degree);
                let hint = if !target.is_zero() && needed > degree_bound {
                    format!(
                        "degree bound too small; retry with a degree bound of at least {needed}"
                    )
                } else {
                    "the hypersurfaces are not invariant, or a larger degree bound is needed".into()
                };
                FloquetError::NoSolution {
                    row,
                    degree_bound,
                    hint,
                }
            }
            other => other.into(),
        })?;

        let mut k_row = Vec::with_capacity(f.len());
        for (j, chunk) in solution.chunks(basis.len()).enumerate() {
            debug_assert!(j < f.len());
            let terms = basis
                .iter()
                .zip(chunk)
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e.clone(), c.clone()));
            k_row.push(Polynomial::from_terms(vars, terms)?);
        }
        k.push(k_row);
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_basis_size() {
        // C(n + d, d)
        assert_eq!(monomials(3, 2).len(), 10);
        assert_eq!(monomials(2, 0), vec![vec![0, 0]]);
        assert_eq!(monomials(6, 1).len(), 7);
        assert_eq!(monomials(2, 1)[0], vec![0, 0]);
    }
}

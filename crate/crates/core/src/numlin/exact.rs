use num_traits::Zero;

use super::NumlinError;
use crate::expr::Rational;

/// Dense matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| !self.get(i, j).is_zero() && !x[j].is_zero())
                    .map(|j| self.get(i, j) * &x[j])
                    .sum()
            })
            .collect()
    }
}

/// Exact solution of `a x = b` by Gauss-Jordan elimination.
///
/// Columns are eliminated left to right, taking the first row with a nonzero
/// entry as pivot. Free variables are set to zero. Works for rectangular
/// and rank-deficient systems; fails with `NoSolution` if inconsistent.
pub fn solve_exact(a: &RationalMatrix, b: &[Rational]) -> Result<Vec<Rational>, NumlinError> {
    if b.len() != a.rows {
        return Err(NumlinError::DimensionMismatch {
            expected: a.rows,
            actual: b.len(),
        });
    }
    let (rows, cols) = (a.rows, a.cols);
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut r: Vec<Rational> = a.data[i * cols..(i + 1) * cols].to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].recip();
        for x in m[rank][col..].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    if m[rank..].iter().any(|row| !row[cols].is_zero()) {
        return Err(NumlinError::NoSolution);
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    Ok(x)
}

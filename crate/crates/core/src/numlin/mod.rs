//! Small dense linear algebra: determinants, linear solves, eigenvalues of
//! real matrices up to 8x8, and an exact rational solver.

mod eigen;
mod exact;
mod lu;
mod matrix;

pub use eigen::eigenvalues;
pub use exact::{solve_exact, RationalMatrix};
pub use lu::{determinant, solve_linear};
pub use matrix::Matrix;

use thiserror::Error;

/// Complex eigenvalue or multiplier.
pub type ComplexValue = num_complex::Complex64;

/// Largest matrix accepted by [`eigenvalues`].
pub const MAX_EIGEN_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumlinError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix is singular to working precision (pivot {pivot:e})")]
    SingularMatrix { pivot: f64 },
    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },
    #[error("matrix of size {0} exceeds the supported maximum of {MAX_EIGEN_DIM}")]
    TooLarge(usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("linear system is inconsistent")]
    NoSolution,
}

/// Partition of the indices of a square matrix into the strongly connected
/// components of its sparsity graph (edge `i -> j` iff `m[i][j] != 0`).
///
/// A symmetric permutation brings `m` into block-triangular form whose
/// diagonal blocks are exactly these components, so the spectrum and the
/// determinant of `m` factor over them.
pub(crate) fn irreducible_blocks(m: &Matrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    // Tarjan's algorithm.
    struct State {
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(v: usize, m: &Matrix, s: &mut State) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for w in 0..m.rows() {
            if w == v || m[(v, w)] == 0.0 {
                continue;
            }
            match s.index[w] {
                None => {
                    visit(w, m, s);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            while let Some(w) = s.stack.pop() {
                s.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            s.out.push(comp);
        }
    }
    let mut s = State {
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(v, m, &mut s);
        }
    }
    s.out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_of_lower_triangular_pattern() {
        let m = Matrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![2.0, 3.0, 4.0],
            vec![5.0, 6.0, 7.0],
        ]);
        let mut blocks = irreducible_blocks(&m);
        blocks.sort();
        assert_eq!(blocks, vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn full_matrix_is_one_block() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(irreducible_blocks(&m), vec![vec![0, 1]]);
    }
}

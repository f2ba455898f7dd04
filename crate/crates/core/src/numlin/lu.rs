use super::{irreducible_blocks, Matrix, NumlinError};

/// LU factorization with partial pivoting, in place. Returns the pivot
/// sign, or the failing pivot if one falls below `threshold`.
fn lu_in_place(a: &mut Matrix, perm: &mut [usize], threshold: f64) -> Result<f64, f64> {
    let n = a.rows();
    let mut sign = 1.0;
    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, a[(i, k)].abs()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if pivot <= threshold {
            return Err(pivot);
        }
        if p != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = tmp;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let d = a[(k, k)];
        for i in k + 1..n {
            let factor = a[(i, k)] / d;
            if factor == 0.0 {
                continue;
            }
            a[(i, k)] = factor;
            for j in k + 1..n {
                a[(i, j)] -= factor * a[(k, j)];
            }
        }
    }
    Ok(sign)
}

fn require_square(m: &Matrix) -> Result<usize, NumlinError> {
    if m.is_square() {
        Ok(m.rows())
    } else {
        Err(NumlinError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        })
    }
}

/// Determinant by LU with partial pivoting, applied separately to each
/// irreducible diagonal block of `m`.
pub fn determinant(m: &Matrix) -> Result<f64, NumlinError> {
    let n = require_square(m)?;
    if n == 0 {
        return Ok(1.0);
    }
    let mut det = 1.0;
    for block in irreducible_blocks(m) {
        let mut a = m.submatrix(&block);
        let mut perm: Vec<usize> = (0..block.len()).collect();
        match lu_in_place(&mut a, &mut perm, 0.0) {
            Ok(sign) => {
                det *= sign * (0..block.len()).map(|i| a[(i, i)]).product::<f64>();
            }
            Err(_) => return Ok(0.0),
        }
    }
    Ok(det)
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>, NumlinError> {
    let n = require_square(a)?;
    if b.len() != n {
        return Err(NumlinError::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let threshold = 1e-14 * a.norm_inf();
    lu_in_place(&mut lu, &mut perm, threshold)
        .map_err(|pivot| NumlinError::SingularMatrix { pivot })?;

    let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        let s: f64 = (0..i).map(|j| lu[(i, j)] * x[j]).sum();
        x[i] -= s;
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| lu[(i, j)] * x[j]).sum();
        x[i] = (x[i] - s) / lu[(i, i)];
    }
    Ok(x)
}

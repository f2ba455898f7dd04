use super::{irreducible_blocks, ComplexValue, Matrix, NumlinError, MAX_EIGEN_DIM};

const MAX_ITER_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of a real square matrix of size at most
/// [`MAX_EIGEN_DIM`], sorted by real part then imaginary part, descending.
///
/// The matrix is first split into its irreducible diagonal blocks, so
/// reducible spectra spanning many orders of magnitude keep full relative
/// accuracy on the small eigenvalues. Each block is balanced, reduced to
/// Hessenberg form and iterated with the Francis double-shift QR method.
/// Complex eigenvalues come in exact conjugate pairs.
pub fn eigenvalues(m: &Matrix) -> Result<Vec<ComplexValue>, NumlinError> {
    if !m.is_square() {
        return Err(NumlinError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n > MAX_EIGEN_DIM {
        return Err(NumlinError::TooLarge(n));
    }
    if !m.is_finite() {
        return Err(NumlinError::NonFinite);
    }
    let mut out = Vec::with_capacity(n);
    for block in irreducible_blocks(m) {
        let a = m.submatrix(&block);
        match block.len() {
            1 => out.push(ComplexValue::new(a[(0, 0)], 0.0)),
            2 => out.extend(eig2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)])),
            _ => {
                let mut a = a;
                balance(&mut a);
                hessenberg(&mut a);
                out.extend(hqr(&mut a)?);
            }
        }
    }
    out.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    Ok(out)
}

/// Eigenvalues of `[[a, b], [c, d]]` without cancellation in the small root.
fn eig2(a: f64, b: f64, c: f64, d: f64) -> [ComplexValue; 2] {
    let p = 0.5 * (a - d);
    let bc = b * c;
    let disc = p * p + bc;
    let mid = 0.5 * (a + d);
    if disc >= 0.0 {
        let s = disc.sqrt();
        let big = mid + s.copysign(mid);
        // Product of roots is the determinant.
        let det = a * d - bc;
        let small = if big != 0.0 {
            det / big
        } else {
            mid - s.copysign(mid)
        };
        [ComplexValue::new(big, 0.0), ComplexValue::new(small, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [ComplexValue::new(mid, s), ComplexValue::new(mid, -s)]
    }
}

/// Parlett-Reinsch balancing by powers of two.
fn balance(a: &mut Matrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let sqrdx = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg(a: &mut Matrix) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let alpha: f64 = (k + 1..n)
            .map(|i| a[(i, k)] * a[(i, k)])
            .sum::<f64>()
            .sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let sigma = -alpha.copysign(x0);
        let mut v: Vec<f64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= sigma;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // A <- (I - beta v v^T) A
        for j in 0..n {
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr * a[(k + 1 + r, j)])
                .sum();
            let s = beta * s;
            for (r, vr) in v.iter().enumerate() {
                a[(k + 1 + r, j)] -= s * vr;
            }
        }
        // A <- A (I - beta v v^T)
        for i in 0..n {
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr * a[(i, k + 1 + r)])
                .sum();
            let s = beta * s;
            for (r, vr) in v.iter().enumerate() {
                a[(i, k + 1 + r)] -= s * vr;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix. Destroys `a`.
fn hqr(a: &mut Matrix) -> Result<Vec<ComplexValue>, NumlinError> {
    let n = a.rows();
    let mut out = Vec::with_capacity(n);
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    if anorm == 0.0 {
        return Ok(vec![ComplexValue::new(0.0, 0.0); n]);
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let mut total_iters = 0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // Look for a single small subdiagonal element.
            let mut l = nu;
            while l >= 1 {
                let s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                let s = if s == 0.0 { anorm } else { s };
                if a[(l, l - 1)].abs() <= f64::EPSILON * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = a[(nu, nu)];
            if l == nu {
                out.push(ComplexValue::new(x + t, 0.0));
                nn -= 1;
                break;
            }
            let y = a[(nu - 1, nu - 1)];
            let w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l + 1 == nu {
                let [e1, e2] = eig2(
                    a[(nu - 1, nu - 1)] + t,
                    a[(nu - 1, nu)],
                    a[(nu, nu - 1)],
                    a[(nu, nu)] + t,
                );
                out.push(e1);
                out.push(e2);
                nn -= 2;
                break;
            }
            if its == MAX_ITER_PER_EIGENVALUE {
                return Err(NumlinError::ConvergenceFailure {
                    iterations: total_iters,
                });
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 {
                // Exceptional shift.
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_iters += 1;
            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }
            // Double QR step on rows l..=nu, columns m..=nu.
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k + 1 != nu { a[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != nu {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * z;
                        }
                        a[(k + 1, j)] -= pp * y;
                        a[(k, j)] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k + 1 != nu {
                            pp += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(out)
}

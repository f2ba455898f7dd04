//! Elliptic integrals of the first kind and the Jacobi elliptic functions.
//!
//! All functions take the modulus `k` (not the parameter `m = k^2`).

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("elliptic modulus {0} outside the admissible range")]
    Domain(f64),
}

/// Elliptic modulus `k` with `0 <= k <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self, SpecfunError> {
        if (0.0..=1.0).contains(&k) {
            Ok(Self(k))
        } else {
            Err(SpecfunError::Domain(k))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Complementary modulus `sqrt(1 - k^2)`, computed without cancellation.
    pub fn complement(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

fn check_below_one(k: f64) -> Result<EllipticModulus, SpecfunError> {
    if (0.0..1.0).contains(&k) {
        Ok(EllipticModulus(k))
    } else {
        Err(SpecfunError::Domain(k))
    }
}

/// Complete elliptic integral of the first kind, `K(k) = F(pi/2; k)`, via the
/// arithmetic-geometric mean `K = pi / (2 AGM(1, k'))`.
pub fn elliptic_k(k: f64) -> Result<f64, SpecfunError> {
    let m = check_below_one(k)?;
    let mut a = 1.0;
    let mut b = m.complement();
    for _ in 0..64 {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Ok(PI / (a + b))
}

/// Carlson's symmetric integral `R_F(x, y, z)` by the duplication theorem.
fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    const TOL: f64 = 1e-4; // truncation error ~ TOL^6 / 4 below f64 epsilon
    for _ in 0..100 {
        let mean = (x + y + z) / 3.0;
        let dx = (mean - x) / mean;
        let dy = (mean - y) / mean;
        let dz = (mean - z) / mean;
        if dx.abs().max(dy.abs()).max(dz.abs()) < TOL {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / mean.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
    let mean = (x + y + z) / 3.0;
    1.0 / mean.sqrt()
}

/// Incomplete elliptic integral of the first kind
/// `F(w; k) = int_0^w dtheta / sqrt(1 - k^2 sin^2 theta)`, for any real `w`.
pub fn elliptic_f(w: f64, k: f64) -> Result<f64, SpecfunError> {
    let m = check_below_one(k)?;
    if k == 0.0 {
        return Ok(w);
    }
    // F(w + n pi) = F(w) + 2 n K
    let n = (w / PI).round();
    let reduced = w - n * PI;
    let (s, c) = reduced.sin_cos();
    let kk = m.value() * m.value();
    let partial = s * carlson_rf(c * c, (1.0 - kk * s * s).max(0.0), 1.0);
    if n == 0.0 {
        Ok(partial)
    } else {
        Ok(partial + 2.0 * n * elliptic_k(k)?)
    }
}

/// Jacobi `(sn, cn, dn)` of `z` with modulus `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Jacobi amplitude by the descending Landen (AGM) scheme, after reducing
/// `z` modulo the real period `4K`.
fn amplitude(z: f64, m: EllipticModulus) -> Result<f64, SpecfunError> {
    let k = m.value();
    if k == 1.0 {
        return Ok(z.sinh().atan());
    }
    if k == 0.0 {
        return Ok(z);
    }
    let period = 4.0 * elliptic_k(k)?;
    let turns = (z / period).round();
    let zr = z - turns * period;

    let mut a = [0.0f64; 32];
    let mut c = [0.0f64; 32];
    a[0] = 1.0;
    let mut b = m.complement();
    c[0] = k;
    let mut n = 0;
    while c[n].abs() > f64::EPSILON * a[n] && n + 1 < a.len() {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * zr;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    Ok(phi + turns * 2.0 * PI)
}

/// Jacobi amplitude `am(z; k)`, the inverse of `w -> F(w; k)`.
pub fn jacobi_am(z: f64, k: f64) -> Result<f64, SpecfunError> {
    amplitude(z, EllipticModulus::new(k)?)
}

/// Jacobi elliptic functions `sn = sin(am)`, `cn = cos(am)`,
/// `dn = sqrt(1 - k^2 sn^2)` for `0 <= k <= 1`.
pub fn jacobi_sn_cn_dn(z: f64, k: f64) -> Result<JacobiTriple, SpecfunError> {
    let m = EllipticModulus::new(k)?;
    if k == 1.0 {
        let sech = 1.0 / z.cosh();
        return Ok(JacobiTriple {
            sn: z.tanh(),
            cn: sech,
            dn: sech,
        });
    }
    let (sn, cn) = amplitude(z, m)?.sin_cos();
    // dn >= k' > 0 for k < 1
    let dn = ((1.0 - k * sn) * (1.0 + k * sn)).sqrt();
    Ok(JacobiTriple { sn, cn, dn })
}

/// `(d sn/dz, d cn/dz, d dn/dz) = (cn dn, -sn dn, -k^2 sn cn)`.
pub fn jacobi_derivatives(z: f64, k: f64) -> Result<JacobiTriple, SpecfunError> {
    let JacobiTriple { sn, cn, dn } = jacobi_sn_cn_dn(z, k)?;
    Ok(JacobiTriple {
        sn: cn * dn,
        cn: -sn * dn,
        dn: -k * k * sn * cn,
    })
}

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Carlson's symmetric integral `R_F(x, y, z)` for complex arguments in the
/// cut plane, at most one of them zero.
pub fn carlson_rf_complex(x: Complex64, y: Complex64, z: Complex64) -> Complex64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let mut a = (x + y + z) / 3.0;
    let q = (3.0 * f64::EPSILON).powf(-1.0 / 6.0)
        * [(a - x).norm(), (a - y).norm(), (a - z).norm()]
            .into_iter()
            .fold(0.0, f64::max);
    let mut scale = 1.0;
    for _ in 0..200 {
        if scale * q < a.norm() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sy * sz + sz * sx;
        x = (x + lam) * 0.25;
        y = (y + lam) * 0.25;
        z = (z + lam) * 0.25;
        a = (a + lam) * 0.25;
        scale *= 0.25;
    }
    let dx = (a - x) / a;
    let dy = (a - y) / a;
    let dz = -(dx + dy);
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - e2 * e3 * (3.0 / 44.0)) / a.sqrt()
}

/// Real `R_F(x, y, z)` for nonnegative arguments, at most one of them zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    carlson_rf_complex(Complex64::new(x, 0.0), Complex64::new(y, 0.0), Complex64::new(z, 0.0)).re
}

/// Complete elliptic integral of the first kind `K(m)`, parameter convention
/// `K(m) = ∫ dθ / sqrt(1 - m sin²θ)` over `[0, π/2]`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::ParameterDomain(m));
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(FRAC_PI_2 / (0.5 * (a + b)))
}

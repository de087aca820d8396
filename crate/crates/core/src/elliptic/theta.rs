//! Weierstrass functions on an arbitrary lattice through the Jacobi theta
//! function `θ₁`.
//!
//! The period basis is first Gauss-reduced so that the nome satisfies
//! `|q| <= exp(-π√3/2)`, then arguments are translated into the central
//! period parallelogram, where a handful of series terms suffice.

use std::f64::consts::PI;

use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone)]
pub(crate) struct ThetaLattice {
    /// Reduced half-period basis; `b / a` lies in the standard fundamental domain.
    a: Complex64,
    b: Complex64,
    tau: Complex64,
    scale: Complex64,
    /// Series coefficients `(-1)^n q^{(n+1/2)^2}` paired with `2n + 1`.
    coef: Vec<(Complex64, f64)>,
    dtheta0: Complex64,
    eta_a: Complex64,
    eta_b: Complex64,
}

/// Log-derivatives of `θ₁` at one point.
struct ThetaEval {
    value: Complex64,
    l1: Complex64,
    l2: Complex64,
    l3: Complex64,
}

impl ThetaLattice {
    /// Lattice generated by the full periods `p1`, `p2` (not collinear).
    pub(crate) fn new(p1: Complex64, p2: Complex64) -> Self {
        let (mut p1, mut p2) = if (p2 / p1).im > 0.0 { (p1, p2) } else { (p1, -p2) };
        for _ in 0..100 {
            let t = p2 / p1;
            let n = t.re.round();
            if n != 0.0 {
                p2 -= p1 * n;
                continue;
            }
            if t.norm_sqr() < 1.0 - 1e-15 {
                let old = p1;
                p1 = p2;
                p2 = -old;
                continue;
            }
            break;
        }
        let a = p1 * 0.5;
        let b = p2 * 0.5;
        let tau = b / a;
        let scale = PI / (2.0 * a);

        let mut coef = Vec::new();
        for n in 0..16 {
            let nh = n as f64 + 0.5;
            // Drop terms below 1e-40 of the leading one.
            if n > 0 && -PI * tau.im * (nh * nh - 0.25) < -92.0 {
                break;
            }
            let c = (I * PI * tau * nh * nh).exp();
            let c = if n % 2 == 0 { c } else { -c };
            coef.push((c, 2.0 * n as f64 + 1.0));
        }

        let d1: Complex64 = coef.iter().map(|&(c, k)| c * k).sum();
        let d3: Complex64 = coef.iter().map(|&(c, k)| -c * k * k * k).sum();
        let eta_a = -PI * PI * d3 / (12.0 * a * d1);
        let eta_b = (eta_a * b - I * (PI / 2.0)) / a;

        ThetaLattice {
            a,
            b,
            tau,
            scale,
            coef,
            dtheta0: d1,
            eta_a,
            eta_b,
        }
    }

    /// Splits `z = z0 + 2m a + 2n b` with `z0` in the central parallelogram.
    fn reduce(&self, z: Complex64) -> (Complex64, f64, f64) {
        let u = z / (2.0 * self.a);
        let y = u.im / self.tau.im;
        let x = u.re - y * self.tau.re;
        let (m, n) = (x.round(), y.round());
        (z - 2.0 * m * self.a - 2.0 * n * self.b, m, n)
    }

    fn theta(&self, xi: Complex64) -> ThetaEval {
        let mut t0 = Complex64::new(0.0, 0.0);
        let mut t1 = t0;
        let mut t2 = t0;
        let mut t3 = t0;
        for &(c, k) in &self.coef {
            let arg = xi * k;
            let (s, co) = (arg.sin(), arg.cos());
            t0 += c * s;
            t1 += c * k * co;
            t2 -= c * k * k * s;
            t3 -= c * k * k * k * co;
        }
        ThetaEval {
            value: t0,
            l1: t1 / t0,
            l2: t2 / t0,
            l3: t3 / t0,
        }
    }

    /// Distance from `z` to the nearest lattice point.
    pub(crate) fn lattice_distance(&self, z: Complex64) -> f64 {
        self.reduce(z).0.norm()
    }

    pub(crate) fn wp(&self, z: Complex64) -> Complex64 {
        let (z0, _, _) = self.reduce(z);
        let t = self.theta(self.scale * z0);
        -self.eta_a / self.a - self.scale * self.scale * (t.l2 - t.l1 * t.l1)
    }

    pub(crate) fn wp_prime(&self, z: Complex64) -> Complex64 {
        let (z0, _, _) = self.reduce(z);
        let t = self.theta(self.scale * z0);
        let s3 = self.scale * self.scale * self.scale;
        -s3 * (t.l3 - 3.0 * t.l1 * t.l2 + 2.0 * t.l1 * t.l1 * t.l1)
    }

    pub(crate) fn zeta(&self, z: Complex64) -> Complex64 {
        let (z0, m, n) = self.reduce(z);
        let t = self.theta(self.scale * z0);
        self.eta_a * z0 / self.a + self.scale * t.l1 + 2.0 * m * self.eta_a + 2.0 * n * self.eta_b
    }

    pub(crate) fn sigma(&self, z: Complex64) -> Complex64 {
        let (z0, m, n) = self.reduce(z);
        let t = self.theta(self.scale * z0);
        let base = (self.eta_a * z0 * z0 / (2.0 * self.a)).exp() * t.value / (self.dtheta0 * self.scale);
        if m == 0.0 && n == 0.0 {
            return base;
        }
        let mi = m as i64;
        let ni = n as i64;
        let sign = if (mi + ni + mi * ni).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let eta_p = 2.0 * m * self.eta_a + 2.0 * n * self.eta_b;
        let half = m * self.a + n * self.b;
        sign * (eta_p * (z0 + half)).exp() * base
    }

    /// `ln σ(z)` without overflow, on some branch of the logarithm.
    pub(crate) fn ln_sigma(&self, z: Complex64) -> Complex64 {
        let (z0, m, n) = self.reduce(z);
        let t = self.theta(self.scale * z0);
        let mut out = self.eta_a * z0 * z0 / (2.0 * self.a) + (t.value / (self.dtheta0 * self.scale)).ln();
        if m != 0.0 || n != 0.0 {
            let mi = m as i64;
            let ni = n as i64;
            if (mi + ni + mi * ni).rem_euclid(2) != 0 {
                out += I * PI;
            }
            let eta_p = 2.0 * m * self.eta_a + 2.0 * n * self.eta_b;
            out += eta_p * (z0 + m * self.a + n * self.b);
        }
        out
    }
}

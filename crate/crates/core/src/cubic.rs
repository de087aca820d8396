//! Real-coefficient cubic solver.
//!
//! Roots come from the trigonometric form (three real roots) or Cardano's
//! formula (one real root), followed by a Newton polish. A close pair of
//! roots is recomputed around the nearby stationary point of the cubic,
//! where the pair separation is obtained from `P(x_d)` and `P''(x_d)`
//! rather than from differences of nearly equal numbers.
//!
//! Ordering follows the usual convention for elliptic-function roots:
//! with three real roots `e1 >= e2 >= e3`; otherwise `e1 = a + ib` (b > 0),
//! `e2` real and `e3 = a - ib`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots of `a x^3 + b x^2 + c x + d` in conventional order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub roots: [Complex64; 3],
    /// Discriminant of the cubic, recomputed from the roots so its sign
    /// always agrees with their reality (positive: three distinct real roots).
    pub discriminant: f64,
    /// A root of multiplicity two (or three) was detected; the equal roots are
    /// reported with identical values.
    pub double_root: bool,
}

impl CubicRoots {
    pub fn all_real(&self) -> bool {
        self.roots.iter().all(|r| r.im == 0.0)
    }

    /// Real roots in descending order.
    pub fn real_roots(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.roots.iter().filter(|r| r.im == 0.0).map(|r| r.re).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

/// Monic cubic `x^3 + b x^2 + c x + d`.
#[derive(Clone, Copy)]
struct Monic {
    b: f64,
    c: f64,
    d: f64,
}

impl Monic {
    fn eval(&self, x: Complex64) -> Complex64 {
        ((x + self.b) * x + self.c) * x + self.d
    }

    fn deriv(&self, x: Complex64) -> Complex64 {
        (x * 3.0 + 2.0 * self.b) * x + self.c
    }

    /// Sum of term magnitudes at `x`, the scale of rounding in `eval`.
    fn magnitude(&self, x: f64) -> f64 {
        let x = x.abs();
        x * x * x + self.b.abs() * x * x + self.c.abs() * x + self.d.abs()
    }

    fn polish(&self, mut x: Complex64) -> Complex64 {
        let mut best = self.eval(x).norm();
        for _ in 0..4 {
            let dp = self.deriv(x);
            if dp.norm() == 0.0 {
                break;
            }
            let cand = x - self.eval(x) / dp;
            let res = self.eval(cand).norm();
            if res < best {
                best = res;
                x = cand;
            } else {
                break;
            }
        }
        x
    }
}

/// Solves `a x^3 + b x^2 + c x + d = 0` for real coefficients with `a != 0`.
pub fn solve_cubic(a: f64, b: f64, c: f64, d: f64) -> Result<CubicRoots> {
    if a == 0.0 || ![a, b, c, d].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "cubic coefficients must be finite with a nonzero leading term (got {a}, {b}, {c}, {d})"
        )));
    }
    let p = Monic {
        b: b / a,
        c: c / a,
        d: d / a,
    };

    let mut roots = initial_roots(&p);
    for r in roots.iter_mut() {
        *r = p.polish(*r);
    }
    let scale = roots.iter().map(|r| r.norm()).fold(1e-300, f64::max);

    // Closest pair.
    let pairs = [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)];
    let (i, j, k) = pairs
        .iter()
        .copied()
        .min_by(|x, y| {
            let dx = (roots[x.0] - roots[x.1]).norm();
            let dy = (roots[y.0] - roots[y.1]).norm();
            dx.total_cmp(&dy)
        })
        .unwrap();

    let mut double_root = false;
    if (roots[i] - roots[j]).norm() <= 1e-3 * scale {
        let centre = 0.5 * (roots[i].re + roots[j].re);
        let (pair, exact) = close_pair(&p, centre);
        roots[i] = pair[0];
        roots[j] = pair[1];
        double_root = exact;
        if exact {
            roots[k] = Complex64::new(-p.b - 2.0 * pair[0].re, 0.0);
        } else {
            roots[k] = p.polish(roots[k]);
        }
    }

    // Snap numerically real roots onto the real axis; a real cubic has at
    // most one conjugate pair.
    let n_complex = roots.iter().filter(|r| r.im.abs() > 1e-14 * scale).count();
    if n_complex < 2 {
        for r in roots.iter_mut() {
            r.im = 0.0;
        }
    }

    let roots = order_roots(roots);
    let discriminant = if double_root {
        0.0
    } else {
        let [e1, e2, e3] = roots;
        let prod = (e1 - e2) * (e1 - e3) * (e2 - e3);
        a.powi(4) * (prod * prod).re
    };
    Ok(CubicRoots {
        roots,
        discriminant,
        double_root,
    })
}

fn initial_roots(p: &Monic) -> [Complex64; 3] {
    let shift = p.b / 3.0;
    let pp = p.c - p.b * p.b / 3.0;
    let qq = 2.0 * p.b.powi(3) / 27.0 - p.b * p.c / 3.0 + p.d;
    let disc = -(4.0 * pp.powi(3) + 27.0 * qq * qq);

    if disc > 0.0 && pp < 0.0 {
        let rt = 2.0 * (-pp / 3.0).sqrt();
        let arg = (3.0 * qq / (2.0 * pp) * (-3.0 / pp).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos();
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (n, r) in out.iter_mut().enumerate() {
            let t = rt * (phi / 3.0 - 2.0 * PI * n as f64 / 3.0).cos();
            *r = Complex64::new(t - shift, 0.0);
        }
        return out;
    }

    // One real root via Cardano, choosing the sign that avoids cancellation.
    let s = (qq * qq / 4.0 + pp.powi(3) / 27.0).max(0.0).sqrt();
    let u3 = -qq / 2.0 - qq.signum() * s;
    let u = u3.cbrt();
    let t = if u == 0.0 { 0.0 } else { u - pp / (3.0 * u) };
    let x0 = t - shift;

    // Deflate to the quadratic x^2 + beta x + gamma.
    let beta = p.b + x0;
    let gamma = p.c + x0 * beta;
    let dq = beta * beta / 4.0 - gamma;
    if dq >= 0.0 {
        let s = dq.sqrt();
        let r1 = -beta / 2.0 - beta.signum() * s;
        let r2 = if r1 != 0.0 { gamma / r1 } else { -beta / 2.0 + s };
        [
            Complex64::new(x0, 0.0),
            Complex64::new(r1, 0.0),
            Complex64::new(r2, 0.0),
        ]
    } else {
        let im = (-dq).sqrt();
        [
            Complex64::new(x0, 0.0),
            Complex64::new(-beta / 2.0, im),
            Complex64::new(-beta / 2.0, -im),
        ]
    }
}

/// Recomputes a close pair of roots around the stationary point near `centre`.
/// Returns the pair and whether it is an exact double root to working precision.
fn close_pair(p: &Monic, centre: f64) -> ([Complex64; 2], bool) {
    // Stationary points: 3x^2 + 2bx + c = 0.
    let qa = 3.0;
    let qb = 2.0 * p.b;
    let qc = p.c;
    let dq = (qb * qb - 4.0 * qa * qc).max(0.0);
    let s = dq.sqrt();
    let x1 = (-qb - qb.signum() * s) / (2.0 * qa);
    let x2 = if x1 != 0.0 { qc / (qa * x1) } else { -qb / (2.0 * qa) };
    let mut xd = if (x1 - centre).abs() < (x2 - centre).abs() {
        x1
    } else {
        x2
    };
    // One Newton step on P' keeps the stationary point accurate.
    let d2 = 6.0 * xd + 2.0 * p.b;
    if d2 != 0.0 {
        xd -= ((3.0 * xd + 2.0 * p.b) * xd + p.c) / d2;
    }

    let p0 = p.eval(Complex64::new(xd, 0.0)).re;
    let p2 = 6.0 * xd + 2.0 * p.b;
    let noise = 8.0 * f64::EPSILON * p.magnitude(xd);
    if p2 == 0.0 || p0.abs() <= noise {
        let r = Complex64::new(xd, 0.0);
        return ([r, r], true);
    }
    let delta2 = -2.0 * p0 / p2;
    if delta2 > 0.0 {
        let dl = delta2.sqrt();
        let a = p.polish(Complex64::new(xd + dl, 0.0));
        let b = p.polish(Complex64::new(xd - dl, 0.0));
        ([Complex64::new(a.re, 0.0), Complex64::new(b.re, 0.0)], false)
    } else {
        let dl = (-delta2).sqrt();
        let a = p.polish(Complex64::new(xd, dl));
        ([a, a.conj()], false)
    }
}

fn order_roots(mut r: [Complex64; 3]) -> [Complex64; 3] {
    if r.iter().all(|z| z.im == 0.0) {
        r.sort_by(|a, b| b.re.total_cmp(&a.re));
        return r;
    }
    let real = *r.iter().min_by(|a, b| a.im.abs().total_cmp(&b.im.abs())).unwrap();
    let upper = *r.iter().max_by(|a, b| a.im.total_cmp(&b.im)).unwrap();
    let upper = Complex64::new(upper.re, upper.im.abs());
    [upper, Complex64::new(real.re, 0.0), upper.conj()]
}

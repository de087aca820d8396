//! Adaptive Gauss-Kronrod (7, 15) quadrature of the time and angle integrals
//! `∫ u du / √f(u)` and `h ∫ du / (u √f(u))`.

use crate::{OracleError, OracleState, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];
const MAX_INTERVALS: usize = 4000;

fn gk15(g: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = g(c);
    let mut k = WGK[7] * fc;
    let mut gs = WG[3] * fc;
    for i in 0..7 {
        let s = g(c - hw * XGK[i]) + g(c + hw * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            gs += WG[i / 2] * s;
        }
    }
    (k * hw, ((k - gs) * hw).abs())
}

/// Globally adaptive Gauss-Kronrod integration of `g` over `[a, b]`, bisecting
/// until the summed error estimate is below `tol` relative to the result.
pub fn gauss_kronrod(g: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = gk15(&g, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= tol * total.abs() || err < 1e-300 {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(OracleError::QuadratureLimit { estimate: err });
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(OracleError::QuadratureLimit { estimate: err });
        }
        let (v1, e1) = gk15(&g, lo, mid);
        let (v2, e2) = gk15(&g, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// `f(u)` and its derivatives, expanded about an endpoint.
struct Expansion {
    d: [f64; 4],
}

impl Expansion {
    fn at(state: &OracleState, u: f64) -> Self {
        let a3 = 2.0 * state.alpha;
        let a2 = 2.0 * state.energy();
        Expansion {
            d: [
                state.f(u),
                (3.0 * a3 * u + 2.0 * a2) * u + 2.0,
                (6.0 * a3 * u + 2.0 * a2) / 2.0,
                a3,
            ],
        }
    }

    /// `f(u + x) / x` with the constant term dropped.
    fn reduced(&self, x: f64) -> f64 {
        self.d[1] + x * (self.d[2] + x * self.d[3])
    }
}

/// Integrates `weight(u) / √f(u)` over `[r_a, r_b]` (signed), removing the
/// square-root singularity at turning points with `u = endpoint ± s²`.
fn integrate(state: &OracleState, r_a: f64, r_b: f64, tol: f64, weight: impl Fn(f64) -> f64) -> Result<f64> {
    if !(r_a.is_finite() && r_b.is_finite() && r_a > 0.0 && r_b > 0.0) {
        return Err(OracleError::InvalidInput(format!("radii {r_a}, {r_b}")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(OracleError::InvalidTolerance(tol));
    }
    if r_a == r_b {
        return Ok(0.0);
    }
    let (a, b) = (r_a.min(r_b), r_a.max(r_b));
    let h2 = state.momentum().powi(2);
    let scale = 2.0 * (state.alpha.abs() * b.powi(3) + state.energy().abs() * b * b + b) + h2;
    let slack = 1e-12 * scale;
    for i in 0..=64 {
        let u = a + (b - a) * i as f64 / 64.0;
        if state.f(u) < -slack {
            return Err(OracleError::ForbiddenInterval { r: u });
        }
    }
    let mid = 0.5 * (a + b);
    let span = (mid - a).sqrt();

    let lower = Expansion::at(state, a);
    let upper = Expansion::at(state, b);
    let lower_root = lower.d[0].abs() <= slack;
    let upper_root = upper.d[0].abs() <= slack;
    let plain = |u: f64| state.f(u).max(0.0).sqrt();

    let left = gauss_kronrod(
        |s| {
            let x = s * s;
            let u = a + x;
            if lower_root {
                2.0 * weight(u) / lower.reduced(x).sqrt()
            } else {
                2.0 * s * weight(u) / plain(u)
            }
        },
        0.0,
        span,
        tol,
    )?;
    let right = gauss_kronrod(
        |s| {
            let x = s * s;
            let u = b - x;
            if upper_root {
                2.0 * weight(u) / (-upper.reduced(-x)).sqrt()
            } else {
                2.0 * s * weight(u) / plain(u)
            }
        },
        0.0,
        span,
        tol,
    )?;
    let total = left + right;
    if !total.is_finite() {
        return Err(OracleError::QuadratureLimit { estimate: total });
    }
    Ok(if r_b >= r_a { total } else { -total })
}

/// Time of flight along a monotone arc from `r_a` to `r_b`.
pub fn quadrature_tof(state: &OracleState, r_a: f64, r_b: f64, tol: f64) -> Result<f64> {
    integrate(state, r_a, r_b, tol, |u| u).map(f64::abs)
}

/// Polar angle swept along a monotone arc from `r_a` to `r_b`.
pub fn quadrature_theta(state: &OracleState, r_a: f64, r_b: f64, tol: f64) -> Result<f64> {
    let h = state.momentum();
    integrate(state, r_a, r_b, tol, |u| 1.0 / u).map(|v| h * v.abs())
}

//! Radial periods, the boundedness test, escape thresholds and the search
//! for closed orbits.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cubic::solve_cubic;
use crate::dynamics::{build_f, pericenter, InitialState};
use crate::elliptic::elliptic_k;
use crate::error::{Error, Result};
use crate::propagation::SolutionContext;

/// Relative root separation below which an instance sits on the homoclinic boundary.
pub const MARGINAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodInfo {
    pub t_tau: f64,
    pub t_t: f64,
}

/// Pseudo-period `2K(m)/sqrt(ẽ1 - ẽ3)`.
pub fn pseudo_period(ctx: &SolutionContext) -> Result<f64> {
    if !ctx.is_bounded() {
        return Err(Error::Unbounded);
    }
    let e = ctx.g_roots().e_tilde;
    let span = e[0].re - e[2].re;
    let m = (e[1].re - e[2].re) / span;
    Ok(2.0 * elliptic_k(m)? / span.sqrt())
}

/// Physical radial period from the pseudo-period and `ζ(T/2)`.
pub fn true_period(ctx: &SolutionContext) -> Result<f64> {
    let t = pseudo_period(ctx)?;
    let zeta_half = ctx.kernel().zeta(Complex64::new(0.5 * t, 0.0))?.re;
    let bracket = 2.0 * ctx.e_k * t + 4.0 * zeta_half;
    Ok(ctx.r_m * t - ctx.kepler_coefficient() * bracket)
}

/// Physical radial period as twice the pericenter-to-apocenter time of the
/// implicit solution.
pub fn true_period_implicit(ctx: &SolutionContext) -> Result<f64> {
    if !ctx.is_bounded() {
        return Err(Error::Unbounded);
    }
    Ok(2.0 * ctx.time_of_flight_implicit(ctx.r_m, ctx.class.hi, true)?)
}

pub fn period_info(ctx: &SolutionContext) -> Result<PeriodInfo> {
    Ok(PeriodInfo {
        t_tau: pseudo_period(ctx)?,
        t_t: true_period(ctx)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Bounded,
    Unbounded,
    /// Two roots of the `g` cubic coincide: an asymptotic (homoclinic) orbit
    /// or a circular equilibrium.
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundednessReport {
    pub verdict: Verdict,
    pub bounded: bool,
    /// Largest real root of `4s³ - g2 s - g3`, the minimum of `wp` on the real axis.
    pub e_tilde_max: f64,
    /// `f''(r_m)/24`
    pub threshold: f64,
    pub margin: f64,
}

/// Boundedness of the orbit through `state`: bounded exactly when the minimum
/// of `wp` on the real axis lies above `f''(r_m)/24`.
pub fn bounded_condition(state: &InitialState) -> Result<BoundednessReport> {
    let f = build_f(state)?;
    let (r_m, _) = pericenter(&f, state.r0)?;
    let c = state.conserved();
    let (alpha, energy, h) = (state.alpha, c.energy, c.momentum);
    let g2 = energy * energy / 3.0 - alpha;
    let g3 = alpha * alpha * h * h / 4.0 + alpha * energy / 6.0 - energy.powi(3) / 27.0;
    let roots = solve_cubic(4.0, 0.0, -g2, -g3)?;
    let threshold = f.d2(r_m) / 24.0;
    let e_max = roots
        .roots
        .iter()
        .filter(|z| z.im == 0.0)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = e_max - threshold;
    let scale = roots.roots.iter().map(|z| z.norm()).fold(threshold.abs(), f64::max);

    let r = roots.roots;
    let close = roots.double_root || (0..3).any(|i| ((i + 1)..3).any(|j| (r[i] - r[j]).norm() <= MARGINAL_TOL * scale));
    let verdict = if close {
        Verdict::Marginal
    } else if margin > MARGINAL_TOL * scale {
        Verdict::Bounded
    } else {
        Verdict::Unbounded
    };
    Ok(BoundednessReport {
        verdict,
        bounded: verdict == Verdict::Bounded,
        e_tilde_max: e_max,
        threshold,
        margin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartRegime {
    /// `r0 v0² < 2/3`
    Slow,
    /// `2/3 <= r0 v0² <= 2`
    Moderate,
    /// `r0 v0² > 2`
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartThreshold {
    pub regime: StartRegime,
    /// The motion from an apsis at `(r0, v0)` is bounded exactly for `α` below this value.
    pub alpha_max: f64,
}

/// Closed-form escape threshold for a start at an apsis with speed `v0`.
pub fn pericenter_start_threshold(r0: f64, v0: f64) -> Result<StartThreshold> {
    if !(r0.is_finite() && r0 > 0.0 && v0.is_finite() && v0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "apsis radius and speed must be positive (r0 = {r0}, v0 = {v0})"
        )));
    }
    let x = r0 * v0 * v0;
    let quadratic = (2.0 - x).powi(2) / (8.0 * r0.powi(3) * v0 * v0);
    Ok(if x < 2.0 / 3.0 {
        StartThreshold {
            regime: StartRegime::Slow,
            alpha_max: ((1.0 - x) / (r0 * r0)).min(quadratic),
        }
    } else if x <= 2.0 {
        StartThreshold {
            regime: StartRegime::Moderate,
            alpha_max: quadratic,
        }
    } else {
        StartThreshold {
            regime: StartRegime::Fast,
            alpha_max: 0.0,
        }
    })
}

/// Family of states with fixed position and velocity and varying acceleration.
pub fn fixed_state_family(r0: f64, v0: f64, gamma0: f64) -> impl Fn(f64) -> Result<InitialState> {
    move |alpha| InitialState::new(r0, v0, gamma0, alpha)
}

/// Bisection for the acceleration at which `family(alpha)` stops being bounded.
/// Marginal instances count as not bounded.
pub fn escape_alpha<F>(family: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<InitialState>,
{
    let bounded = |alpha: f64| -> Result<bool> { Ok(bounded_condition(&family(alpha)?)?.verdict == Verdict::Bounded) };
    if !(lo.is_finite() && hi.is_finite() && tol > 0.0) || lo == 0.0 || hi == 0.0 {
        return Err(Error::InvalidBracket { lo, hi });
    }
    if !bounded(lo)? || bounded(hi)? {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            return Ok(0.5 * (a + b));
        }
        let mut mid = 0.5 * (a + b);
        if mid == 0.0 {
            mid = 0.25 * a + 0.75 * b;
        }
        if bounded(mid)? {
            a = mid;
        } else {
            b = mid;
        }
    }
    Err(Error::NoConvergence {
        what: "escape threshold bisection",
        iterations: 200,
    })
}

/// Angle swept during `n` radial periods, from the quasi-periodicity of `σ`.
///
/// The exponent identity fixes the advance only modulo `2π`; the continuous
/// branch differs from the principal one by one turn, whose sign follows the
/// half-plane containing `v`.
pub fn winding_increment(ctx: &SolutionContext, n: i64) -> Result<f64> {
    let t = ctx.pseudo_period().ok_or(Error::Unbounded)?;
    if n == 0 {
        return Ok(0.0);
    }
    let v = ctx.theta_aux.v;
    let zeta_half = ctx.kernel().zeta(Complex64::new(0.5 * t, 0.0))?;
    let principal = ctx.v_m * t - 4.0 * (0.5 * t * ctx.zeta_v() - v * zeta_half).im;
    let turn = if v.im < 0.0 { 2.0 * PI } else { -2.0 * PI };
    Ok(n as f64 * (principal + turn))
}

/// Apsis speed at `r_m` for which the angle advance per radial period is
/// `±M/N` turns modulo whole turns, searched inside `bracket`.
pub fn find_periodic_v(r_m: f64, alpha: f64, ratio: (u32, u32), bracket: (f64, f64)) -> Result<f64> {
    let (m, n) = ratio;
    let (lo, hi) = bracket;
    if n == 0 {
        return Err(Error::InvalidInput("winding denominator must be positive".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let q = m as f64 / n as f64;
    let turns = |v: f64| -> Result<f64> {
        let ctx = SolutionContext::new(&InitialState::at_apsis(r_m, v, alpha)?)?;
        Ok(winding_increment(&ctx, 1)? / (2.0 * PI))
    };
    let (w_lo, w_hi) = (turns(lo)?, turns(hi)?);
    let (a, b) = (w_lo.min(w_hi), w_lo.max(w_hi));
    let target = ((a - q).floor() as i64..=(b + q).ceil() as i64)
        .flat_map(|j| [j as f64 - q, j as f64 + q])
        .filter(|c| *c >= a && *c <= b)
        .min_by(|x, y| (x - w_lo).abs().total_cmp(&(y - w_lo).abs()))
        .ok_or(Error::InvalidBracket { lo, hi })?;

    // Illinois false position on turns(v) - target.
    let (mut xa, mut xb) = (lo, hi);
    let (mut fa, mut fb) = (w_lo - target, w_hi - target);
    if fa == 0.0 {
        return Ok(xa);
    }
    if fb == 0.0 {
        return Ok(xb);
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let x = (xa * fb - xb * fa) / (fb - fa);
        let fx = turns(x)? - target;
        if fx.abs() <= 1e-12 || (xb - xa).abs() <= 4.0 * f64::EPSILON * x.abs() {
            return Ok(x);
        }
        if (fx > 0.0) == (fb > 0.0) {
            xb = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            xa = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
    }
    Err(Error::NoConvergence {
        what: "periodic orbit search",
        iterations: 200,
    })
}

//! Closed-form evaluation of `r(τ)`, `θ(τ)` and `t(τ)` referenced to the
//! pericenter passage, the inversion of the radial Kepler equation, and
//! propagation in physical time.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{build_f, classify_region, ConservedQuantities, CubicF, InitialState, MotionClass};
use crate::elliptic::{Branch, GRoots, HalfPeriods, Invariants, Weierstrass};
use crate::error::{Error, Result};

/// Below this `|τ|` the pericenter expansions replace the pole-dominated formulas.
const SERIES_RADIUS: f64 = 1e-6;
const MAX_ITERATIONS: usize = 200;

/// Constants of the angular solution: `1/r = (wp + beta) / (gamma wp + delta)`
/// and `wp(v) = -delta / gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaAux {
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub v: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Domain {
    /// Bounded motion: pseudo-period, time period and angle advance per period.
    Periodic {
        period: f64,
        time_period: f64,
        advance: f64,
    },
    /// Unbounded motion: `|τ| < limit`, with `r → ∞` at the ends.
    Escape { limit: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub tau: f64,
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub r_prime: f64,
}

/// Full state after a propagation, measured from the initial epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatedState {
    /// Elapsed physical time.
    pub t: f64,
    /// Elapsed pseudo-time.
    pub tau: f64,
    pub r: f64,
    /// Angle swept since the initial position, unwrapped.
    pub theta: f64,
    pub v: f64,
    /// Flight-path angle, radians.
    pub gamma: f64,
}

/// Everything needed to evaluate the closed-form solution of one instance.
#[derive(Debug, Clone)]
pub struct SolutionContext {
    pub state: InitialState,
    pub conserved: ConservedQuantities,
    pub f: CubicF,
    pub class: MotionClass,
    pub r_m: f64,
    pub v_m: f64,
    /// One-based index of the `g` root equal to `f''(r_m)/24`.
    pub k: usize,
    pub e_k: f64,
    pub theta_aux: ThetaAux,
    /// Pseudo-time of the initial state, counted from pericenter.
    pub tau0: f64,
    kernel: Weierstrass,
    f1_m: f64,
    kepler_coeff: f64,
    omega_k: Complex64,
    zeta_v: Complex64,
    domain: Domain,
}

pub fn build_context(state: &InitialState) -> Result<SolutionContext> {
    SolutionContext::new(state)
}

impl SolutionContext {
    pub fn new(state: &InitialState) -> Result<Self> {
        let f = build_f(state)?;
        let conserved = state.conserved();
        if conserved.momentum <= 0.0 {
            return Err(Error::InvalidInput(
                "zero angular momentum: purely radial motion is not covered".into(),
            ));
        }
        let class = classify_region(&f, state.r0)?;
        if class.lo <= 0.0 {
            return Err(Error::NoPericenter);
        }
        let r_m = class.lo;
        let v_m = conserved.momentum / r_m;
        let (alpha, energy, h) = (state.alpha, conserved.energy, conserved.momentum);

        let inv = Invariants::new(
            energy * energy / 3.0 - alpha,
            alpha * alpha * h * h / 4.0 + alpha * energy / 6.0 - energy.powi(3) / 27.0,
        )?;
        let kernel = Weierstrass::new(inv)?;
        let e_k = f.d2(r_m) / 24.0;
        let roots = kernel.roots().e_tilde;
        let k = (0..3)
            .filter(|&i| roots[i].im == 0.0)
            .min_by(|&a, &b| (roots[a].re - e_k).abs().total_cmp(&(roots[b].re - e_k).abs()))
            .ok_or(Error::NoConvergence {
                what: "root selection",
                iterations: 0,
            })?;
        let periods = *kernel.periods();
        let omega_k = [periods.omega1, periods.omega2, periods.omega3][k];

        let f1_m = f.d1(r_m);
        let kepler_coeff = f1_m / (2.0 * (12.0 * e_k * e_k - inv.g2));

        let beta = -e_k;
        let gamma = r_m;
        let delta = f1_m / 4.0 + beta * r_m;
        let v = kernel.wp_inverse(Complex64::new(-delta / gamma, 0.0), Branch::Positive)?;
        let want = Complex64::new(0.0, h * f1_m / (4.0 * r_m * r_m));
        let got = kernel.wp_prime(v)?;
        if (got - want).norm() > 1e-6 * want.norm().max(1e-300) {
            return Err(Error::NoConvergence {
                what: "phase constant",
                iterations: 0,
            });
        }
        let zeta_v = kernel.zeta(v)?;

        let domain = if class.is_bounded() {
            Domain::Periodic {
                period: 2.0 * periods.real_half_period,
                time_period: f64::NAN,
                advance: f64::NAN,
            }
        } else {
            Domain::Escape {
                limit: periods.real_half_period,
            }
        };

        let mut ctx = SolutionContext {
            state: *state,
            conserved,
            f,
            class,
            r_m,
            v_m,
            k: k + 1,
            e_k,
            theta_aux: ThetaAux { beta, gamma, delta, v },
            tau0: 0.0,
            kernel,
            f1_m,
            kepler_coeff,
            omega_k,
            zeta_v,
            domain,
        };
        if let Domain::Periodic { period, .. } = ctx.domain {
            let half = 0.5 * period;
            ctx.domain = Domain::Periodic {
                period,
                time_period: 2.0 * ctx.kepler_local(half)?,
                advance: 2.0 * ctx.theta_local(half)?,
            };
        }
        ctx.tau0 = ctx.initial_tau()?;
        Ok(ctx)
    }

    pub fn kernel(&self) -> &Weierstrass {
        &self.kernel
    }

    pub fn invariants(&self) -> Invariants {
        self.kernel.invariants()
    }

    pub fn g_roots(&self) -> &GRoots {
        self.kernel.roots()
    }

    pub fn periods(&self) -> &HalfPeriods {
        self.kernel.periods()
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.domain, Domain::Periodic { .. })
    }

    /// `f'(r_m)`
    pub fn slope_at_pericenter(&self) -> f64 {
        self.f1_m
    }

    /// Coefficient `f'(r_m) / (2 (12 ẽ_k² - g2))` of the radial Kepler equation.
    pub fn kepler_coefficient(&self) -> f64 {
        self.kepler_coeff
    }

    pub fn omega_k(&self) -> Complex64 {
        self.omega_k
    }

    pub fn zeta_v(&self) -> Complex64 {
        self.zeta_v
    }

    /// Real pseudo-period of bounded motion.
    pub fn pseudo_period(&self) -> Option<f64> {
        match self.domain {
            Domain::Periodic { period, .. } => Some(period),
            Domain::Escape { .. } => None,
        }
    }

    /// Physical radial period of bounded motion.
    pub fn time_period(&self) -> Option<f64> {
        match self.domain {
            Domain::Periodic { time_period, .. } => Some(time_period),
            Domain::Escape { .. } => None,
        }
    }

    /// Angle swept during one radial period.
    pub fn angle_per_period(&self) -> Option<f64> {
        match self.domain {
            Domain::Periodic { advance, .. } => Some(advance),
            Domain::Escape { .. } => None,
        }
    }

    /// Half-width of the pseudo-time interval of unbounded motion.
    pub fn escape_limit(&self) -> Option<f64> {
        match self.domain {
            Domain::Periodic { .. } => None,
            Domain::Escape { limit } => Some(limit),
        }
    }

    /// Splits `tau = n T + rest` with `|rest| <= T/2`, or checks the escape interval.
    fn reduce(&self, tau: f64) -> Result<(f64, f64)> {
        if !tau.is_finite() {
            return Err(Error::InvalidInput(format!("pseudo-time must be finite, got {tau}")));
        }
        match self.domain {
            Domain::Periodic { period, .. } => {
                let n = (tau / period).round();
                Ok((n, tau - n * period))
            }
            Domain::Escape { limit } => {
                if tau.abs() >= limit {
                    Err(Error::PseudoTimeDomain { tau, limit })
                } else {
                    Ok((0.0, tau))
                }
            }
        }
    }

    fn wp_minus_ek(&self, tau: f64) -> Result<f64> {
        Ok(self.kernel.wp_real(tau)? - self.e_k)
    }

    pub fn r_of_tau(&self, tau: f64) -> Result<f64> {
        let (_, t) = self.reduce(tau)?;
        if t.abs() < SERIES_RADIUS {
            let t2 = t * t;
            return Ok(self.r_m + 0.25 * self.f1_m * t2 * (1.0 + self.e_k * t2));
        }
        Ok(self.r_m + 0.25 * self.f1_m / self.wp_minus_ek(t)?)
    }

    /// `dr/dτ`
    pub fn r_prime(&self, tau: f64) -> Result<f64> {
        let (_, t) = self.reduce(tau)?;
        if t.abs() < SERIES_RADIUS {
            return Ok(0.5 * self.f1_m * t * (1.0 + 2.0 * self.e_k * t * t));
        }
        let d = self.wp_minus_ek(t)?;
        let dp = self.kernel.wp_prime(Complex64::new(t, 0.0))?.re;
        Ok(-0.25 * self.f1_m * dp / (d * d))
    }

    fn ln_phase(&self, tau: f64) -> Complex64 {
        let v = self.theta_aux.v;
        let t = Complex64::new(tau, 0.0);
        self.kernel.ln_sigma(v - t) - self.kernel.ln_sigma(v + t) + 2.0 * t * self.zeta_v
    }

    /// `σ(v - τ) / σ(v + τ) · exp(2τ ζ(v))`, of unit modulus for real `τ`.
    pub fn phase_factor(&self, tau: f64) -> Complex64 {
        self.ln_phase(tau).exp()
    }

    /// `θ` on `[0, T/2]` (bounded) or inside the escape interval, for `tau >= 0`.
    ///
    /// The phase `v_m τ - θ` grows at a rate in `[0, v_m)`, so sampling it
    /// every `π / (2 v_m)` fixes each increment's branch unambiguously.
    fn theta_local(&self, tau: f64) -> Result<f64> {
        if tau == 0.0 {
            return Ok(0.0);
        }
        let steps = ((tau * self.v_m) / (0.5 * PI)).ceil().max(1.0) as usize;
        let mut phase = 0.0;
        let mut prev = self.ln_phase(0.0).im;
        for j in 1..=steps {
            let tj = tau * j as f64 / steps as f64;
            let cur = self.ln_phase(tj).im;
            let mut d = cur - prev;
            d -= 2.0 * PI * (d / (2.0 * PI)).round();
            phase += d;
            prev = cur;
        }
        if !phase.is_finite() {
            return Err(Error::NoConvergence {
                what: "angle phase",
                iterations: steps,
            });
        }
        Ok(self.v_m * tau - phase)
    }

    /// Unwrapped angle from pericenter, odd in `τ`.
    pub fn theta_of_tau(&self, tau: f64) -> Result<f64> {
        let (n, t) = self.reduce(tau)?;
        let local = self.theta_local(t.abs())?.copysign(t);
        Ok(match self.domain {
            Domain::Periodic { advance, .. } => n * advance + local,
            Domain::Escape { .. } => local,
        })
    }

    fn kepler_local(&self, tau: f64) -> Result<f64> {
        if tau == 0.0 {
            return Ok(0.0);
        }
        let a = tau.abs();
        let z = Complex64::new(a, 0.0);
        let bracket =
            2.0 * self.e_k * a + (self.kernel.zeta(z - self.omega_k)? + self.kernel.zeta(z + self.omega_k)?).re;
        Ok((self.r_m * a - self.kepler_coeff * bracket).copysign(tau))
    }

    /// Physical time since pericenter.
    pub fn radial_kepler(&self, tau: f64) -> Result<f64> {
        let (n, t) = self.reduce(tau)?;
        let local = self.kepler_local(t)?;
        Ok(match self.domain {
            Domain::Periodic { time_period, .. } => n * time_period + local,
            Domain::Escape { .. } => local,
        })
    }

    /// Pseudo-time since pericenter at which the physical time equals `t`.
    pub fn invert_kepler(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::InvalidInput(format!("time must be finite, got {t}")));
        }
        match self.domain {
            Domain::Periodic {
                period, time_period, ..
            } => {
                let n = (t / time_period).round();
                let rest = t - n * time_period;
                let half = 0.5 * period;
                let guess = rest * period / time_period;
                let tau = self.solve_local(rest, -half, half, guess)?;
                Ok(n * period + tau)
            }
            Domain::Escape { limit } => {
                let guess = t / self.r_m;
                self.solve_local(t, -limit, limit, guess)
            }
        }
    }

    /// Newton iteration on the monotone `t(τ)`, kept inside a shrinking bracket.
    fn solve_local(&self, target: f64, lo: f64, hi: f64, guess: f64) -> Result<f64> {
        let (mut lo, mut hi) = (lo, hi);
        let mut tau = if guess > lo && guess < hi {
            guess
        } else {
            0.5 * (lo + hi)
        };
        let tol = 1e-14 * target.abs().max(1.0);
        for _ in 0..MAX_ITERATIONS {
            let g = self.kepler_local(tau)? - target;
            if g.abs() <= tol {
                return Ok(tau);
            }
            if g < 0.0 {
                lo = tau;
            } else {
                hi = tau;
            }
            let slope = self.r_of_tau(tau)?;
            let mut next = tau - g / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - tau).abs() <= 2.0 * f64::EPSILON * tau.abs().max(f64::MIN_POSITIVE) {
                return Ok(next);
            }
            tau = next;
        }
        Err(Error::NoConvergence {
            what: "radial Kepler inversion",
            iterations: MAX_ITERATIONS,
        })
    }

    /// Pseudo-time at which the orbit passes `r0` moving in direction `sign_rdot`.
    ///
    /// Bounded motion returns a value in `[0, T)`; unbounded motion a value of
    /// the same sign as `sign_rdot`.
    pub fn tau0_from_r0(&self, r0: f64, sign_rdot: f64) -> Result<f64> {
        let hi = self.class.hi;
        let slack = 1e-12 * r0.abs().max(1.0);
        if !(r0 >= self.r_m - slack && r0 <= hi + slack) {
            return Err(Error::OutOfInterval {
                r: r0,
                lo: self.r_m,
                hi,
            });
        }
        if r0 <= self.r_m {
            return Ok(0.0);
        }
        if let Domain::Periodic { period, .. } = self.domain {
            if r0 >= hi {
                return Ok(0.5 * period);
            }
        }
        let w = self.e_k + 0.25 * self.f1_m / (r0 - self.r_m);
        let tau = self.kernel.wp_inverse(Complex64::new(w, 0.0), Branch::Negative)?.re;
        if sign_rdot >= 0.0 {
            return Ok(tau);
        }
        Ok(match self.domain {
            Domain::Periodic { period, .. } => period - tau,
            Domain::Escape { .. } => -tau,
        })
    }

    fn initial_tau(&self) -> Result<f64> {
        let r0 = self.state.r0;
        if r0 == self.r_m {
            return Ok(0.0);
        }
        if r0 == self.class.hi {
            if let Domain::Periodic { period, .. } = self.domain {
                return Ok(0.5 * period);
            }
        }
        self.tau0_from_r0(r0, self.state.radial_sign())
    }

    pub fn sample(&self, tau: f64) -> Result<TrajectorySample> {
        Ok(TrajectorySample {
            tau,
            t: self.radial_kepler(tau)?,
            r: self.r_of_tau(tau)?,
            theta: self.theta_of_tau(tau)?,
            r_prime: self.r_prime(tau)?,
        })
    }

    /// Time of flight along a monotone arc from `r_start` to `r_end`, from the
    /// implicit solution in the variable `w = (r + E/(3α)) / ∛(2/α)`.
    pub fn time_of_flight_implicit(&self, r_start: f64, r_end: f64, ascending: bool) -> Result<f64> {
        let (lo, hi) = (self.class.lo, self.class.hi);
        for r in [r_start, r_end] {
            let slack = 1e-12 * r.abs().max(1.0);
            if !(r.is_finite() && r >= lo - slack && r <= hi + slack) {
                return Err(Error::OutOfInterval { r, lo, hi });
            }
        }
        if (ascending && r_end < r_start) || (!ascending && r_end > r_start) {
            return Err(Error::NonMonotoneArc {
                start: r_start,
                end: r_end,
            });
        }
        if r_start == r_end {
            return Ok(0.0);
        }
        let alpha = self.state.alpha;
        let energy = self.conserved.energy;
        let scale = (2.0 / alpha).cbrt();
        let shift = -energy / (3.0 * alpha);
        let inv = self.invariants();
        let g2 = scale.powi(4) * inv.g2;
        let g3 = scale.powi(6) * inv.g3;
        let kernel = Weierstrass::new(Invariants::new(g2, g3)?)?;
        let raw = |r: f64| -> Result<Complex64> {
            let r = r.clamp(lo, hi);
            kernel.wp_inverse(Complex64::new((r - shift) / scale, 0.0), Branch::Negative)
        };
        // At a turning point wp' vanishes and the branch is ambiguous; take the
        // copy of the half-period that continues the interior arc.
        let node = |r: f64| -> Result<Complex64> {
            let width = if hi.is_finite() { hi - lo } else { lo.max(1.0) };
            let near_lo = (r - lo).abs() <= 1e-12 * lo.abs().max(1.0);
            let near_hi = hi.is_finite() && (r - hi).abs() <= 1e-12 * hi.abs().max(1.0);
            if !(near_lo || near_hi) {
                return raw(r);
            }
            let probe = if near_lo { lo + 1e-6 * width } else { hi - 1e-6 * width };
            let z = raw(probe)?;
            let w = (r - shift) / scale;
            let p = kernel.periods();
            let roots = kernel.roots().e_tilde;
            let half = [p.omega1, p.omega2, p.omega3]
                .into_iter()
                .zip(roots)
                .filter(|(_, e)| e.im == 0.0)
                .min_by(|a, b| (a.1.re - w).abs().total_cmp(&(b.1.re - w).abs()))
                .map(|(om, _)| om)
                .ok_or(Error::NoSolution {
                    w: Complex64::new(w, 0.0),
                })?;
            Ok(half + nearest_lattice_vector(z - half, 2.0 * p.omega, 2.0 * p.omega_prime))
        };
        let (a, b) = (node(r_start)?, node(r_end)?);
        let signed = scale * scale * (kernel.zeta(b)? - kernel.zeta(a)?) - scale * shift * (b - a);
        Ok((r_end - r_start).signum() * signed.re)
    }

    /// State reached `dt` after the initial epoch.
    pub fn state_at_time(&self, dt: f64) -> Result<PropagatedState> {
        let t0 = self.radial_kepler(self.tau0)?;
        let tau = if dt == 0.0 {
            self.tau0
        } else {
            self.invert_kepler(t0 + dt)?
        };
        self.assemble(tau, dt)
    }

    /// State reached `dtau` of pseudo-time after the initial epoch.
    pub fn state_at_pseudo_time(&self, dtau: f64) -> Result<PropagatedState> {
        let tau = self.tau0 + dtau;
        let dt = self.radial_kepler(tau)? - self.radial_kepler(self.tau0)?;
        self.assemble(tau, dt)
    }

    fn assemble(&self, tau: f64, dt: f64) -> Result<PropagatedState> {
        if tau == self.tau0 {
            let s = self.state;
            return Ok(PropagatedState {
                t: 0.0,
                tau: 0.0,
                r: s.r0,
                theta: 0.0,
                v: s.v0,
                gamma: s.gamma0,
            });
        }
        let r = self.r_of_tau(tau)?;
        let rp = self.r_prime(tau)?;
        let theta = self.theta_of_tau(tau)? - self.theta_of_tau(self.tau0)?;
        let (alpha, energy, h) = (self.state.alpha, self.conserved.energy, self.conserved.momentum);
        let v = (2.0 * energy + 2.0 / r + 2.0 * alpha * r).max(0.0).sqrt();
        let radial = self.f.eval(r).max(0.0).sqrt().copysign(rp);
        Ok(PropagatedState {
            t: dt,
            tau: tau - self.tau0,
            r,
            theta,
            v,
            gamma: radial.atan2(h),
        })
    }
}

/// Radius after `dtau` of pseudo-time from an arbitrary (not necessarily
/// apsidal) initial state, without locating the pericenter.
pub fn r_of_tau_general(state: &InitialState, dtau: f64) -> Result<f64> {
    let f = build_f(state)?;
    let c = state.conserved();
    let (alpha, energy, h) = (state.alpha, c.energy, c.momentum);
    let r0 = state.r0;
    let root_f = f.eval(r0).max(0.0).sqrt();
    // r ≈ r0 - root·Δτ for small Δτ, so the root carries minus the radial sign.
    let root = -state.radial_sign() * root_f;
    if dtau.abs() < SERIES_RADIUS {
        return Ok(r0 - root * dtau + 0.25 * f.d1(r0) * dtau * dtau);
    }
    let inv = Invariants::new(
        energy * energy / 3.0 - alpha,
        alpha * alpha * h * h / 4.0 + alpha * energy / 6.0 - energy.powi(3) / 27.0,
    )?;
    let kernel = Weierstrass::new(inv)?;
    let z = Complex64::new(dtau, 0.0);
    let d = kernel.wp(z)?.re - f.d2(r0) / 24.0;
    let dp = kernel.wp_prime(z)?.re;
    let num = root * dp + f.eval(r0) * f.d3() / 24.0 + 0.5 * f.d1(r0) * d;
    Ok(r0 + 0.5 * num / (d * d))
}

/// Full state `dt` after `state`.
pub fn propagate(state: &InitialState, dt: f64) -> Result<PropagatedState> {
    SolutionContext::new(state)?.state_at_time(dt)
}

/// Lattice vector `m a + n b` (integer `m`, `n`) closest to `z`.
fn nearest_lattice_vector(z: Complex64, a: Complex64, b: Complex64) -> Complex64 {
    let det = a.re * b.im - a.im * b.re;
    let m = ((z.re * b.im - z.im * b.re) / det).round();
    let n = ((a.re * z.im - a.im * z.re) / det).round();
    a * m + b * n
}

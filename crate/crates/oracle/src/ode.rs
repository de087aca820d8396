//! Dormand-Prince 5(4) integration in Cartesian coordinates, in physical time
//! or in the Sundmann pseudo-time `dτ = dt / r`.

use crate::{OracleError, OracleState, Result, Tolerance};

const MAX_STEPS: usize = 5_000_000;
const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const PI_ALPHA: f64 = 0.2 - 0.75 * PI_BETA;

/// Stage coefficients; the last row holds the fifth-order weights.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Dopri<const N: usize, F> {
    rhs: F,
    tol: Tolerance,
    s: f64,
    y: [f64; N],
    k1: [f64; N],
    prev_s: f64,
    prev_y: [f64; N],
    prev_k1: [f64; N],
    h: f64,
    err_prev: f64,
    steps: usize,
}

impl<const N: usize, F: Fn(&[f64; N]) -> [f64; N]> Dopri<N, F> {
    fn new(rhs: F, y0: [f64; N], h0: f64, tol: Tolerance) -> Self {
        let k1 = rhs(&y0);
        Dopri {
            rhs,
            tol,
            s: 0.0,
            y: y0,
            k1,
            prev_s: 0.0,
            prev_y: y0,
            prev_k1: k1,
            h: h0,
            err_prev: 1e-4,
            steps: 0,
        }
    }

    /// Step of length `h` from `(y, k1)`; returns the new state, its
    /// derivative and the embedded error estimate.
    fn trial(&self, y: &[f64; N], k1: &[f64; N], h: f64) -> ([f64; N], [f64; N], [f64; N]) {
        let mut k = [[0.0; N]; 7];
        k[0] = *k1;
        for stage in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[stage] = (self.rhs)(&ys);
        }
        let mut y_new = *y;
        let mut err = [0.0; N];
        for i in 0..N {
            for j in 0..6 {
                y_new[i] += h * A[6][j] * k[j][i];
            }
            for (j, kj) in k.iter().enumerate() {
                err[i] += h * E[j] * kj[i];
            }
        }
        (y_new, k[6], err)
    }

    fn error_norm(&self, y_new: &[f64; N], err: &[f64; N]) -> f64 {
        let sum: f64 = (0..N)
            .map(|i| {
                let sc = self.tol.atol + self.tol.rtol * self.y[i].abs().max(y_new[i].abs());
                (err[i] / sc).powi(2)
            })
            .sum();
        (sum / N as f64).sqrt()
    }

    /// One accepted step of length at most `limit`.
    fn advance(&mut self, limit: f64, r: impl Fn(&[f64]) -> f64) -> Result<f64> {
        loop {
            self.steps += 1;
            if self.steps > MAX_STEPS {
                return Err(OracleError::StepBudget(MAX_STEPS));
            }
            let limited = self.h >= limit;
            let h = if limited { limit } else { self.h };
            if h <= 1e-14 * self.s.abs().max(1.0) && !limited {
                return Err(OracleError::StepUnderflow {
                    t: self.s,
                    r: r(&self.y[..]),
                });
            }
            let (y_new, k7, err) = self.trial(&self.y, &self.k1, h);
            let e = self.error_norm(&y_new, &err);
            if !e.is_finite() {
                self.h = 0.2 * h;
                continue;
            }
            if e <= 1.0 {
                let factor = if e == 0.0 {
                    10.0
                } else {
                    (SAFETY * e.powf(-PI_ALPHA) * self.err_prev.powf(PI_BETA)).clamp(0.2, 10.0)
                };
                self.err_prev = e.max(1e-4);
                self.prev_s = self.s;
                self.prev_y = self.y;
                self.prev_k1 = self.k1;
                self.s += h;
                self.y = y_new;
                self.k1 = k7;
                if !limited {
                    self.h = h * factor;
                }
                return Ok(h);
            }
            let factor = (SAFETY * e.powf(-PI_ALPHA)).clamp(0.2, 1.0);
            self.h = h * factor;
        }
    }

    /// State reached `h` after the start of the last accepted step.
    fn restep(&self, h: f64) -> [f64; N] {
        self.trial(&self.prev_y, &self.prev_k1, h).0
    }
}

fn accel(p: &[f64], alpha: f64) -> (f64, f64, f64) {
    let r = p[0].hypot(p[1]);
    let g = (alpha - 1.0 / (r * r)) / r;
    (r, g * p[0], g * p[1])
}

fn rhs_time(alpha: f64) -> impl Fn(&[f64; 4]) -> [f64; 4] {
    move |y| {
        let (_, ax, ay) = accel(y, alpha);
        [y[2], y[3], ax, ay]
    }
}

fn rhs_pseudo(alpha: f64) -> impl Fn(&[f64; 5]) -> [f64; 5] {
    move |y| {
        let (r, ax, ay) = accel(y, alpha);
        [r * y[2], r * y[3], r * ax, r * ay, r]
    }
}

fn cartesian(state: &OracleState) -> [f64; 4] {
    let (s, c) = state.gamma0.sin_cos();
    [state.r0, 0.0, state.v0 * s, state.v0 * c]
}

/// Angle from `a` to `b` about the origin, in `(-π, π]`.
fn turn(a: &[f64], b: &[f64]) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1])
}

fn radius(y: &[f64]) -> f64 {
    y[0].hypot(y[1])
}

fn radial_rate(y: &[f64]) -> f64 {
    (y[0] * y[2] + y[1] * y[3]) / radius(y)
}

fn initial_step(state: &OracleState) -> f64 {
    1e-3 * state.r0.powf(1.5).min(state.r0 / state.v0.max(1e-3))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSample {
    pub t: f64,
    /// Pseudo-time, when integrated in `τ`.
    pub tau: Option<f64>,
    pub r: f64,
    /// Unwrapped polar angle measured from the initial position.
    pub theta: f64,
    pub r_dot: f64,
    pub theta_dot: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleTrajectory {
    pub samples: Vec<OracleSample>,
    pub tolerance: Tolerance,
    /// Largest `|E - E0|` relative to `|E0| + 1/r0`.
    pub energy_drift: f64,
    /// Largest `|h - h0|` relative to `r0 v0`.
    pub momentum_drift: f64,
}

struct Monitor {
    alpha: f64,
    e0: f64,
    h0: f64,
    e_scale: f64,
    h_scale: f64,
    energy_drift: f64,
    momentum_drift: f64,
}

impl Monitor {
    fn new(state: &OracleState) -> Self {
        Monitor {
            alpha: state.alpha,
            e0: state.energy(),
            h0: state.momentum(),
            e_scale: state.energy().abs() + 1.0 / state.r0,
            h_scale: (state.r0 * state.v0).max(f64::MIN_POSITIVE),
            energy_drift: 0.0,
            momentum_drift: 0.0,
        }
    }

    fn observe(&mut self, y: &[f64]) {
        let r = radius(y);
        let e = 0.5 * (y[2] * y[2] + y[3] * y[3]) - 1.0 / r - self.alpha * r;
        let h = y[0] * y[3] - y[1] * y[2];
        self.energy_drift = self.energy_drift.max((e - self.e0).abs() / self.e_scale);
        self.momentum_drift = self.momentum_drift.max((h - self.h0).abs() / self.h_scale);
    }
}

fn sample(y: &[f64], t: f64, tau: Option<f64>, theta: f64) -> OracleSample {
    let r = radius(y);
    OracleSample {
        t,
        tau,
        r,
        theta,
        r_dot: radial_rate(y),
        theta_dot: (y[0] * y[3] - y[1] * y[2]) / (r * r),
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(OracleError::InvalidInput(
            "output times must be finite, non-negative and ascending".into(),
        ));
    }
    Ok(())
}

/// Integrates to `t_end`, recording every accepted step.
pub fn integrate_ode(state: &OracleState, t_end: f64, tol: Tolerance) -> Result<OracleTrajectory> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(OracleError::InvalidInput(format!("t_end = {t_end}")));
    }
    let mut dp = Dopri::new(rhs_time(state.alpha), cartesian(state), initial_step(state), tol);
    let mut monitor = Monitor::new(state);
    let mut theta = 0.0;
    let mut samples = vec![sample(&dp.y, 0.0, None, 0.0)];
    while dp.s < t_end {
        dp.advance(t_end - dp.s, radius)?;
        theta += turn(&dp.prev_y, &dp.y);
        monitor.observe(&dp.y);
        samples.push(sample(&dp.y, dp.s, None, theta));
    }
    Ok(OracleTrajectory {
        samples,
        tolerance: tol,
        energy_drift: monitor.energy_drift,
        momentum_drift: monitor.momentum_drift,
    })
}

/// Integrates in physical time and reports the state at each of `times`.
pub fn sample_times(state: &OracleState, times: &[f64], tol: Tolerance) -> Result<OracleTrajectory> {
    check_times(times)?;
    let mut dp = Dopri::new(rhs_time(state.alpha), cartesian(state), initial_step(state), tol);
    let mut monitor = Monitor::new(state);
    let mut theta = 0.0;
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        while dp.s < t {
            dp.advance(t - dp.s, radius)?;
            theta += turn(&dp.prev_y, &dp.y);
            monitor.observe(&dp.y);
        }
        samples.push(sample(&dp.y, dp.s, None, theta));
    }
    Ok(OracleTrajectory {
        samples,
        tolerance: tol,
        energy_drift: monitor.energy_drift,
        momentum_drift: monitor.momentum_drift,
    })
}

/// Integrates in pseudo-time `τ` (with `dt/dτ = r`) and reports the state at
/// each of `taus`.
pub fn sample_pseudo_times(state: &OracleState, taus: &[f64], tol: Tolerance) -> Result<OracleTrajectory> {
    check_times(taus)?;
    let [x, y, vx, vy] = cartesian(state);
    let mut dp = Dopri::new(
        rhs_pseudo(state.alpha),
        [x, y, vx, vy, 0.0],
        initial_step(state) / state.r0,
        tol,
    );
    let mut monitor = Monitor::new(state);
    let mut theta = 0.0;
    let mut samples = Vec::with_capacity(taus.len());
    for &tau in taus {
        while dp.s < tau {
            dp.advance(tau - dp.s, radius)?;
            theta += turn(&dp.prev_y, &dp.y);
            monitor.observe(&dp.y);
        }
        samples.push(sample(&dp.y, dp.y[4], Some(dp.s), theta));
    }
    Ok(OracleTrajectory {
        samples,
        tolerance: tol,
        energy_drift: monitor.energy_drift,
        momentum_drift: monitor.momentum_drift,
    })
}

/// Radial period measured between two successive pericenter passages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPeriod {
    pub period: f64,
    /// Polar angle swept between the two passages.
    pub angle: f64,
    /// Time of the first passage.
    pub first_pericenter: f64,
}

/// Locates pericenter passages (`ṙ` crossing zero upward) and returns the
/// spacing of the first two found before `t_max`.
pub fn measure_radial_period(state: &OracleState, t_max: f64, tol: Tolerance) -> Result<RadialPeriod> {
    let mut dp = Dopri::new(rhs_time(state.alpha), cartesian(state), initial_step(state), tol);
    let mut theta = 0.0;
    let mut events: Vec<(f64, f64)> = Vec::with_capacity(2);
    while dp.s < t_max {
        dp.advance(t_max - dp.s, radius)?;
        let (g0, g1) = (radial_rate(&dp.prev_y), radial_rate(&dp.y));
        if g0 < 0.0 && g1 >= 0.0 {
            let h = locate(|h| radial_rate(&dp.restep(h)), dp.s - dp.prev_s, g0, g1);
            let y = dp.restep(h);
            events.push((dp.prev_s + h, theta + turn(&dp.prev_y, &y)));
            if events.len() == 2 {
                return Ok(RadialPeriod {
                    period: events[1].0 - events[0].0,
                    angle: events[1].1 - events[0].1,
                    first_pericenter: events[0].0,
                });
            }
        }
        theta += turn(&dp.prev_y, &dp.y);
    }
    Err(OracleError::NoEvent {
        what: "pericenter",
        t_max,
    })
}

/// Time at which `r` first reaches `r_limit`, or `None` if it does not before `t_max`.
pub fn escape_time(state: &OracleState, r_limit: f64, t_max: f64, tol: Tolerance) -> Result<Option<f64>> {
    let mut dp = Dopri::new(rhs_time(state.alpha), cartesian(state), initial_step(state), tol);
    if state.r0 >= r_limit {
        return Ok(Some(0.0));
    }
    while dp.s < t_max {
        dp.advance(t_max - dp.s, radius)?;
        let (r0, r1) = (radius(&dp.prev_y), radius(&dp.y));
        if r1 >= r_limit {
            let h = locate(
                |h| radius(&dp.restep(h)) - r_limit,
                dp.s - dp.prev_s,
                r0 - r_limit,
                r1 - r_limit,
            );
            return Ok(Some(dp.prev_s + h));
        }
    }
    Ok(None)
}

/// Illinois iteration for the root of `g` on `(0, h]` given `g(0) < 0 <= g(h)`.
fn locate(g: impl Fn(f64) -> f64, h: f64, g0: f64, g1: f64) -> f64 {
    let (mut a, mut b, mut fa, mut fb) = (0.0, h, g0, g1);
    let mut side = 0i8;
    for _ in 0..100 {
        let x = (a * fb - b * fa) / (fb - fa);
        let fx = g(x);
        if fx == 0.0 || (b - a).abs() <= 1e-15 * h {
            return x;
        }
        if fx < 0.0 {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 1e-15 * h {
            break;
        }
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}

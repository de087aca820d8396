//! Command bodies. Inputs arrive in user units and are made canonical here;
//! everything printed is converted back, except the Weierstrass roots and
//! invariants, which are always canonical.

use std::f64::consts::PI;

use num_complex::Complex64;
use radthrust::analysis::{
    bounded_condition, escape_alpha as bisect_escape, find_periodic_v, fixed_state_family, period_info,
    true_period_implicit, winding_increment, Verdict,
};
use radthrust::dynamics::{build_f, classify_region, InitialState, MotionClass, MotionTag};
use radthrust::propagation::{PropagatedState, SolutionContext};
use serde_json::{json, Value};

use crate::output::{number, Table};
use crate::units::Units;
use crate::{CliError, Scenario};

const SAMPLE_COLUMNS: &[&str] = &["t", "tau", "r", "theta", "v", "gamma"];
/// Relative disagreement between the two true-period expressions treated as a defect.
const PERIOD_CHECK_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
pub enum Span {
    Time(f64),
    PseudoTime(f64),
    Periods(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct SweepGrid {
    /// `(lo, hi, points)`
    pub alpha: (f64, f64, usize),
    pub speed: (f64, f64, usize),
}

impl Scenario {
    fn require(value: Option<f64>, flag: &str) -> Result<f64, CliError> {
        value.ok_or_else(|| CliError::Input(format!("--{flag} is required")))
    }

    fn canonical(&self, units: &Units) -> Result<InitialState, CliError> {
        let r0 = Self::require(self.r0, "r0")?;
        let v0 = Self::require(self.v0, "v0")?;
        let alpha = Self::require(self.alpha, "alpha")?;
        finite(&[("gamma0-deg", self.gamma0_deg)])?;
        Ok(InitialState::new(
            r0 / units.length,
            v0 / units.speed(),
            self.gamma0_deg.to_radians(),
            alpha / units.acceleration(),
        )?)
    }
}

fn finite(values: &[(&str, f64)]) -> Result<(), CliError> {
    match values.iter().find(|(_, x)| !x.is_finite()) {
        Some((name, x)) => Err(CliError::Input(format!("--{name} must be finite, got {x}"))),
        None => Ok(()),
    }
}

fn complex(z: Complex64, scale: f64) -> Value {
    json!([number(z.re * scale), number(z.im * scale)])
}

fn motion_name(tag: MotionTag) -> &'static str {
    match tag {
        MotionTag::BoundedAnnulus => "bounded_annulus",
        MotionTag::UnboundedAbove => "unbounded_above",
        MotionTag::BoundedBelowGap => "bounded_below_gap",
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Bounded => "bounded",
        Verdict::Unbounded => "unbounded",
        Verdict::Marginal => "marginal",
    }
}

fn motion_json(class: &MotionClass, units: &Units) -> Value {
    json!({
        "class": motion_name(class.tag),
        "r_lo": number(class.lo * units.length),
        "r_hi": number(class.hi * units.length),
        "asymptotic": class.asymptotic,
    })
}

fn units_json(units: &Units) -> Value {
    json!({ "mu": units.mu, "length": units.length, "time": number(units.time()) })
}

fn state_json(s: &InitialState, units: &Units) -> Value {
    json!({
        "r0": number(s.r0 * units.length),
        "v0": number(s.v0 * units.speed()),
        "gamma0_deg": number(s.gamma0.to_degrees()),
        "alpha": number(s.alpha * units.acceleration()),
    })
}

/// Conserved quantities, roots, pericenter and periods of one instance.
fn meta(ctx: &SolutionContext, units: &Units) -> Value {
    let inv = ctx.invariants();
    json!({
        "units": units_json(units),
        "state": state_json(&ctx.state, units),
        "conserved": {
            "energy": number(ctx.conserved.energy * units.energy()),
            "momentum": number(ctx.conserved.momentum * units.momentum()),
        },
        "f_roots": ctx.f.roots.iter().map(|z| complex(*z, units.length)).collect::<Vec<_>>(),
        "g_invariants": { "g2": number(inv.g2), "g3": number(inv.g3) },
        "g_roots": ctx.g_roots().e_tilde.iter().map(|z| complex(*z, 1.0)).collect::<Vec<_>>(),
        "motion": motion_json(&ctx.class, units),
        "pericenter": {
            "r_m": number(ctx.r_m * units.length),
            "v_m": number(ctx.v_m * units.speed()),
        },
        "periods": {
            "t_tau": ctx.pseudo_period().map(|p| number(p * units.pseudo_time())),
            "t_t": ctx.time_period().map(|p| number(p * units.time())),
            "angle": ctx.angle_per_period().map(number),
        },
        "tau_limit": ctx.escape_limit().map(|l| number(l * units.pseudo_time())),
    })
}

fn sample_row(s: &PropagatedState, units: &Units, t0: f64) -> Vec<f64> {
    vec![
        t0 + s.t * units.time(),
        s.tau * units.pseudo_time(),
        s.r * units.length,
        s.theta,
        s.v * units.speed(),
        s.gamma,
    ]
}

fn uniform(span: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if n == 1 { span } else { span * i as f64 / (n - 1) as f64 })
}

pub fn propagate(scenario: &Scenario, units: &Units, span: Span, samples: usize, t0: f64) -> Result<Table, CliError> {
    if samples == 0 {
        return Err(CliError::Input("--samples must be at least 1".into()));
    }
    finite(&[("t0", t0)])?;
    let state = scenario.canonical(units)?;
    let ctx = SolutionContext::new(&state)?;
    let rows = match span {
        Span::Time(t) | Span::Periods(t) => {
            finite(&[("t-span/--periods", t)])?;
            let dt = match span {
                Span::Periods(k) => k * ctx.time_period().ok_or(radthrust::Error::Unbounded)?,
                _ => t / units.time(),
            };
            uniform(dt, samples)
                .map(|x| Ok(sample_row(&ctx.state_at_time(x)?, units, t0)))
                .collect::<Result<Vec<_>, CliError>>()?
        }
        Span::PseudoTime(tau) => {
            finite(&[("tau-span", tau)])?;
            uniform(tau / units.pseudo_time(), samples)
                .map(|x| Ok(sample_row(&ctx.state_at_pseudo_time(x)?, units, t0)))
                .collect::<Result<Vec<_>, CliError>>()?
        }
    };
    Ok(Table {
        columns: SAMPLE_COLUMNS,
        rows,
        meta: meta(&ctx, units),
    })
}

pub fn classify(scenario: &Scenario, units: &Units) -> Result<Value, CliError> {
    let state = scenario.canonical(units)?;
    let report = bounded_condition(&state)?;
    let f = build_f(&state)?;
    let class = classify_region(&f, state.r0)?;
    let c = state.conserved();
    Ok(json!({
        "verdict": verdict_name(report.verdict),
        "bounded": report.bounded,
        "margin": number(report.margin),
        "threshold": number(report.threshold),
        "e_tilde_max": number(report.e_tilde_max),
        "f_roots": f.roots.iter().map(|z| complex(*z, units.length)).collect::<Vec<_>>(),
        "f_double_root": f.double_root,
        "g_roots": g_roots_of(&state),
        "motion": motion_json(&class, units),
        "conserved": {
            "energy": number(c.energy * units.energy()),
            "momentum": number(c.momentum * units.momentum()),
        },
        "state": state_json(&state, units),
        "units": units_json(units),
    }))
}

/// Roots of the Weierstrass cubic, also for instances whose lattice is degenerate.
fn g_roots_of(state: &InitialState) -> Value {
    let c = state.conserved();
    let (alpha, e, h) = (state.alpha, c.energy, c.momentum);
    let g2 = e * e / 3.0 - alpha;
    let g3 = alpha * alpha * h * h / 4.0 + alpha * e / 6.0 - e.powi(3) / 27.0;
    match radthrust::cubic::solve_cubic(4.0, 0.0, -g2, -g3) {
        Ok(r) => Value::Array(r.roots.iter().map(|z| complex(*z, 1.0)).collect()),
        Err(_) => Value::Null,
    }
}

pub fn period(scenario: &Scenario, units: &Units) -> Result<Value, CliError> {
    let state = scenario.canonical(units)?;
    let ctx = SolutionContext::new(&state)?;
    let info = period_info(&ctx)?;
    let implicit = true_period_implicit(&ctx)?;
    let disagreement = (info.t_t - implicit).abs() / info.t_t.abs();
    if disagreement.is_nan() || disagreement > PERIOD_CHECK_TOL {
        return Err(CliError::CrossCheck {
            what: "true-period expressions",
            a: info.t_t,
            b: implicit,
        });
    }
    let advance = winding_increment(&ctx, 1)?;
    Ok(json!({
        "t_tau": number(info.t_tau * units.pseudo_time()),
        "t_t": number(info.t_t * units.time()),
        "t_t_implicit": number(implicit * units.time()),
        "relative_disagreement": number(disagreement),
        "angle_per_period": number(advance),
        "turns_per_period": number(advance / (2.0 * PI)),
        "meta": meta(&ctx, units),
    }))
}

pub fn kepler_curve(scenario: &Scenario, units: &Units, n: usize) -> Result<Table, CliError> {
    if n < 2 {
        return Err(CliError::Input("--kepler-curve needs at least 2 samples".into()));
    }
    let state = scenario.canonical(units)?;
    let ctx = SolutionContext::new(&state)?;
    let period = ctx.pseudo_period().ok_or(radthrust::Error::Unbounded)?;
    let rows = uniform(period, n)
        .map(|tau| {
            Ok(vec![
                tau * units.pseudo_time(),
                ctx.radial_kepler(tau)? * units.time(),
                ctx.r_of_tau(tau)? * units.length,
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Table {
        columns: &["tau", "t", "r"],
        rows,
        meta: meta(&ctx, units),
    })
}

/// Pseudo-period over an `(alpha, v_p)` grid at fixed apsis radius; instances
/// without a period are left out.
pub fn period_sweep(scenario: &Scenario, units: &Units, grid: SweepGrid) -> Result<Table, CliError> {
    let r_p = Scenario::require(scenario.r0, "r0")?;
    let (a_lo, a_hi, a_n) = grid.alpha;
    let (v_lo, v_hi, v_n) = grid.speed;
    finite(&[
        ("sweep-alpha-lo", a_lo),
        ("sweep-alpha-hi", a_hi),
        ("sweep-v-lo", v_lo),
        ("sweep-v-hi", v_hi),
    ])?;
    if a_n < 2 || v_n < 2 || !(a_hi > a_lo && v_hi > v_lo) {
        return Err(CliError::Input(
            "sweep ranges need lo < hi and at least 2 points".into(),
        ));
    }
    let mut rows = Vec::new();
    for v in uniform(v_hi - v_lo, v_n).map(|x| v_lo + x) {
        for alpha in uniform(a_hi - a_lo, a_n).map(|x| a_lo + x) {
            let state = InitialState::at_apsis(r_p / units.length, v / units.speed(), alpha / units.acceleration())?;
            let ctx = match SolutionContext::new(&state) {
                Ok(ctx) => ctx,
                Err(e) if e.is_internal() => return Err(e.into()),
                Err(_) => continue,
            };
            if let (Some(tp), Some(tt)) = (ctx.pseudo_period(), ctx.time_period()) {
                rows.push(vec![v, alpha, tp * units.pseudo_time(), tt * units.time()]);
            }
        }
    }
    Ok(Table {
        columns: &["v_p", "alpha", "t_tau", "t_t"],
        rows,
        meta: json!({ "units": units_json(units), "r_p": r_p }),
    })
}

pub fn find_periodic(
    units: &Units,
    r_m: f64,
    alpha: f64,
    ratio: (u32, u32),
    bracket: (f64, f64),
) -> Result<Value, CliError> {
    finite(&[("rm", r_m), ("alpha", alpha), ("v-lo", bracket.0), ("v-hi", bracket.1)])?;
    let (r, a) = (r_m / units.length, alpha / units.acceleration());
    let v = find_periodic_v(r, a, ratio, (bracket.0 / units.speed(), bracket.1 / units.speed()))?;
    let ctx = SolutionContext::new(&InitialState::at_apsis(r, v, a)?)?;
    let info = period_info(&ctx)?;
    let advance = winding_increment(&ctx, 1)?;
    let n = ratio.1.max(1);
    let end = ctx.state_at_time(n as f64 * info.t_t)?;
    let closure = cartesian_gap(&ctx.state, &end);
    Ok(json!({
        "v_m": number(v * units.speed()),
        "ratio": [ratio.0, ratio.1],
        "turns_per_period": number(advance / (2.0 * PI)),
        "t_tau": number(info.t_tau * units.pseudo_time()),
        "t_t": number(info.t_t * units.time()),
        "closure": {
            "periods": n,
            "position": number(closure.0),
            "velocity": number(closure.1),
        },
        "meta": meta(&ctx, units),
    }))
}

/// Canonical position and velocity distances between the start and `end`,
/// relative to the initial radius and speed.
fn cartesian_gap(start: &InitialState, end: &PropagatedState) -> (f64, f64) {
    let pos = |r: f64, th: f64| Complex64::from_polar(r, th);
    let vel = |v: f64, th: f64, g: f64| Complex64::from_polar(v, th + 0.5 * PI - g);
    let dp = (pos(end.r, end.theta) - pos(start.r0, 0.0)).norm() / start.r0;
    let dv =
        (vel(end.v, end.theta, end.gamma) - vel(start.v0, 0.0, start.gamma0)).norm() / start.v0.max(f64::MIN_POSITIVE);
    (dp, dv)
}

pub fn escape_alpha(units: &Units, start: (f64, f64, f64), bracket: (f64, f64), tol: f64) -> Result<Value, CliError> {
    let (r0, v0, gamma_deg) = start;
    finite(&[("r0", r0), ("v0", v0), ("gamma0-deg", gamma_deg), ("tol", tol)])?;
    let acc = units.acceleration();
    let family = fixed_state_family(r0 / units.length, v0 / units.speed(), gamma_deg.to_radians());
    let alpha = bisect_escape(&family, bracket.0 / acc, bracket.1 / acc, tol / acc)?;
    let r = r0 / units.length;
    Ok(json!({
        "alpha_star": number(alpha * acc),
        "alpha_star_r0_squared": number(alpha * r * r),
        "tol": tol,
        "bracket": [bracket.0, bracket.1],
        "units": units_json(units),
    }))
}

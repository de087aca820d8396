#![allow(dead_code)]

use num_complex::Complex64;
use radthrust::analysis::{bounded_condition, Verdict};
use radthrust::dynamics::InitialState;
use radthrust::elliptic::{Invariants, Weierstrass};
use radthrust::propagation::SolutionContext;
use radthrust_oracle::{sample_pseudo_times, sample_times, OracleState, Tolerance};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn oracle_state(s: &InitialState) -> OracleState {
    OracleState::new(s.r0, s.v0, s.gamma0, s.alpha).unwrap()
}

/// Random state with `α ∈ [-0.2, 0.2]`, kept away from the homoclinic
/// boundary and from very eccentric or slow orbits.
pub fn random_instance(rng: &mut ChaCha8Rng, bounded: bool) -> (InitialState, SolutionContext) {
    random_instance_in(rng, bounded, (0.7, 1.5), (0.75, 1.35))
}

/// Escaping state whose `g` cubic has three real roots: a slow start above
/// the largest of three positive turning radii.
pub fn random_escape_three_roots(rng: &mut ChaCha8Rng) -> (InitialState, SolutionContext) {
    loop {
        let (state, ctx) = random_instance_in(rng, false, (2.0, 4.0), (0.3, 0.8));
        if ctx.invariants().discriminant() > 0.0 {
            return (state, ctx);
        }
    }
}

pub fn random_instance_in(
    rng: &mut ChaCha8Rng,
    bounded: bool,
    radius: (f64, f64),
    speed: (f64, f64),
) -> (InitialState, SolutionContext) {
    loop {
        let r0 = rng.gen_range(radius.0..radius.1);
        let v0 = rng.gen_range(speed.0..speed.1) / f64::sqrt(r0);
        let gamma0 = rng.gen_range(-0.5..0.5);
        let mut alpha: f64 = rng.gen_range(-0.2..0.2);
        if alpha.abs() < 1e-3 {
            alpha = 1e-3f64.copysign(alpha);
        }
        let Ok(state) = InitialState::new(r0, v0, gamma0, alpha) else {
            continue;
        };
        let Ok(report) = bounded_condition(&state) else {
            continue;
        };
        if report.verdict == Verdict::Marginal || (report.verdict == Verdict::Bounded) != bounded {
            continue;
        }
        let Ok(ctx) = SolutionContext::new(&state) else {
            continue;
        };
        if ctx.r_m < 0.3 {
            continue;
        }
        if bounded {
            let disc = ctx.g_roots().e_tilde;
            let gap = (disc[0].re - disc[1].re).min(disc[1].re - disc[2].re) / (disc[0].re - disc[2].re);
            if gap < 1e-3 || ctx.class.hi > 20.0 {
                continue;
            }
        }
        return (state, ctx);
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// State at radius `r` on the orbit with apsis `(r_p, v_p)`, moving outward
/// when `sign > 0`.
pub fn on_orbit(r_p: f64, v_p: f64, alpha: f64, r: f64, sign: f64) -> InitialState {
    let energy = 0.5 * v_p * v_p - 1.0 / r_p - alpha * r_p;
    let h = r_p * v_p;
    let v = (2.0 * (energy + 1.0 / r + alpha * r)).sqrt();
    let gamma = (h / (r * v)).clamp(-1.0, 1.0).acos();
    InitialState::new(r, v, gamma.copysign(sign), alpha).unwrap()
}

/// Invariant pairs built from chosen roots: six each for three real roots and
/// for a complex pair, with both signs of `g3`.
pub fn lattices() -> Vec<Invariants> {
    let mut g = rng(3);
    let mut out = Vec::new();
    for i in 0..24 {
        let (g2, g3) = if i < 12 {
            let e3: f64 = -g.gen_range(0.05..1.5);
            let e2 = g.gen_range(e3 * 0.9..-0.5 * e3 * 0.95);
            let e1 = -e2 - e3;
            (-4.0 * (e1 * e2 + e1 * e3 + e2 * e3), 4.0 * e1 * e2 * e3)
        } else {
            let e2: f64 = g.gen_range(-1.0..1.0);
            let (a, b) = (-0.5 * e2, g.gen_range(0.05..1.5));
            // ẽ1 ẽ3 = a² + b², sum of pairwise products = 2 a e2 + a² + b²
            (-4.0 * (2.0 * a * e2 + a * a + b * b), 4.0 * e2 * (a * a + b * b))
        };
        let g3 = if i % 2 == 0 { g3.abs() } else { -g3.abs() };
        out.push(Invariants::new(g2, g3).unwrap());
    }
    out
}

pub fn fundamental_points(w: &Weierstrass, n: usize) -> Vec<Complex64> {
    let p = w.periods();
    let mut g = rng(4);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let (s, t): (f64, f64) = (g.gen(), g.gen());
        let z = 2.0 * p.omega * s + 2.0 * p.omega_prime * t;
        let corners = [
            Complex64::new(0.0, 0.0),
            2.0 * p.omega,
            2.0 * p.omega_prime,
            2.0 * (p.omega + p.omega_prime),
        ];
        if corners.iter().all(|q| (z - q).norm() > 1e-6) {
            pts.push(z);
        }
    }
    pts
}

/// Pseudo-time span covered by a comparison: three radial periods, or until
/// `r = 10 r0` on an escape.
pub fn span(ctx: &SolutionContext) -> f64 {
    if let Some(period) = ctx.pseudo_period() {
        return 3.0 * period;
    }
    let target = 10.0 * ctx.state.r0;
    let (mut lo, mut hi) = (ctx.tau0.max(0.0), ctx.escape_limit().unwrap());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match ctx.r_of_tau(mid) {
            Ok(r) if r < target => lo = mid,
            _ => hi = mid,
        }
    }
    lo - ctx.tau0
}

/// Largest relative deviation from the integrator, sampled in pseudo-time
/// and in physical time.
pub fn worst_error(ctx: &SolutionContext, samples: usize) -> (f64, f64) {
    let end = span(ctx);
    let taus: Vec<f64> = (0..=samples).map(|i| end * i as f64 / samples as f64).collect();
    let o = sample_pseudo_times(&oracle_state(&ctx.state), &taus, Tolerance::default()).unwrap();
    let mut worst_tau: f64 = 0.0;
    for (tau, smp) in taus.iter().zip(&o.samples) {
        let c = ctx.state_at_pseudo_time(*tau).unwrap();
        worst_tau = worst_tau
            .max(rel(c.r, smp.r))
            .max(rel(c.theta, smp.theta))
            .max(rel(c.t, smp.t));
    }
    let t_end = o.samples.last().unwrap().t;
    let times: Vec<f64> = (0..=samples).map(|i| t_end * i as f64 / samples as f64).collect();
    let o = sample_times(&oracle_state(&ctx.state), &times, Tolerance::default()).unwrap();
    let mut worst_t: f64 = 0.0;
    for (t, smp) in times.iter().zip(&o.samples) {
        let c = ctx.state_at_time(*t).unwrap();
        worst_t = worst_t.max(rel(c.r, smp.r)).max(rel(c.theta, smp.theta));
    }
    (worst_tau, worst_t)
}

/// Bounded instances with at least six of each sign of `g3`.
pub fn bounded_mix(seed: u64, n: usize) -> Vec<SolutionContext> {
    let mut g = rng(seed);
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    while pos.len() + neg.len() < n {
        let (_, ctx) = if neg.len() < 6 {
            random_instance_in(&mut g, true, (0.7, 1.5), (0.9, 1.35))
        } else {
            random_instance(&mut g, true)
        };
        if ctx.invariants().g3 < 0.0 {
            neg.push(ctx);
        } else if pos.len() < n - 6 {
            pos.push(ctx);
        }
    }
    pos.into_iter().chain(neg).collect()
}

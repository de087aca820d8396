mod common;

use std::f64::consts::PI;

use common::{bounded_mix, oracle_state, random_instance, rng};
use radthrust::analysis::{
    bounded_condition, escape_alpha, find_periodic_v, fixed_state_family, pericenter_start_threshold, pseudo_period,
    true_period, true_period_implicit, winding_increment, StartRegime, Verdict,
};
use radthrust::dynamics::{build_f, classify_region, InitialState};
use radthrust::propagation::SolutionContext;
use radthrust::Error;
use radthrust_oracle::{escape_time, measure_radial_period, quadrature_theta, sample_times, Tolerance};
use rand::Rng;

#[test]
fn pseudo_period_is_the_radial_period() {
    for ctx in bounded_mix(41, 10) {
        let t = pseudo_period(&ctx).unwrap();
        assert!((t - 2.0 * ctx.periods().real_half_period).abs() < 1e-12 * t);
        for tau in [0.1, 0.7, 1.9, 4.2] {
            let a = ctx.r_of_tau(tau).unwrap();
            assert!((ctx.r_of_tau(tau + t).unwrap() - a).abs() <= 1e-10 * a);
        }
    }
    let slow_inward = SolutionContext::new(&InitialState::at_apsis(1.0, 1.56, -0.01).unwrap()).unwrap();
    assert!(pseudo_period(&slow_inward).unwrap().is_finite());
}

#[test]
fn period_grows_without_bound_near_the_homoclinic_orbit() {
    let periods: Vec<f64> = [0.12, 0.124, 0.1249, 0.12499]
        .iter()
        .map(|a| pseudo_period(&SolutionContext::new(&InitialState::at_apsis(1.0, 1.0, *a).unwrap()).unwrap()).unwrap())
        .collect();
    assert!(periods.windows(2).all(|w| w[1] > w[0] + 0.5), "{periods:?}");
}

#[test]
fn true_period_three_ways() {
    for ctx in bounded_mix(42, 20) {
        let closed = true_period(&ctx).unwrap();
        let implicit = true_period_implicit(&ctx).unwrap();
        let kepler = ctx.radial_kepler(ctx.pseudo_period().unwrap()).unwrap();
        let measured = measure_radial_period(&oracle_state(&ctx.state), 10.0 * closed, Tolerance::default())
            .unwrap()
            .period;
        assert!((closed - implicit).abs() <= 1e-9 * closed, "{closed} {implicit}");
        assert!((closed - kepler).abs() <= 1e-10 * closed);
        assert!((closed - measured).abs() <= 1e-7 * closed, "{closed} {measured}");
    }
}

#[test]
fn periods_reject_escaping_motion() {
    let ctx = SolutionContext::new(&InitialState::at_apsis(1.0, 1.2, 0.1).unwrap()).unwrap();
    assert_eq!(pseudo_period(&ctx), Err(Error::Unbounded));
    assert_eq!(true_period(&ctx), Err(Error::Unbounded));
    assert_eq!(winding_increment(&ctx, 1), Err(Error::Unbounded));
}

#[test]
fn winding_three_ways_for_both_signs_of_g3() {
    let mut g = rng(43);
    let ctxs = bounded_mix(43, 20);
    assert!(ctxs.iter().filter(|c| c.invariants().g3 < 0.0).count() >= 6);
    for ctx in ctxs {
        let w = winding_increment(&ctx, 1).unwrap();
        let period = ctx.pseudo_period().unwrap();
        for _ in 0..5 {
            let tau = g.gen_range(-2.0 * period..2.0 * period);
            let d = ctx.theta_of_tau(tau + period).unwrap() - ctx.theta_of_tau(tau).unwrap();
            assert!((d - w).abs() <= 1e-8 * w.abs().max(1.0), "{d} vs {w}");
        }
        let s = oracle_state(&ctx.state);
        let quad = 2.0 * quadrature_theta(&s, ctx.r_m, ctx.class.hi, 1e-13).unwrap();
        let measured = measure_radial_period(&s, 10.0 * ctx.time_period().unwrap(), Tolerance::default())
            .unwrap()
            .angle;
        assert!((w - quad).abs() <= 1e-7 * w.abs(), "{:?}: {w} vs {quad}", ctx.state);
        assert!((w - measured).abs() <= 1e-7 * w.abs(), "{w} vs {measured}");
        for n in 0..6 {
            assert!((winding_increment(&ctx, n).unwrap() - n as f64 * w).abs() <= 1e-10 * w.abs().max(1.0) * n as f64);
        }
    }
}

#[test]
fn tenth_turn_winding() {
    let ctx = SolutionContext::new(&InitialState::at_apsis(1.0, 1.26014, -0.05).unwrap()).unwrap();
    let turns = winding_increment(&ctx, 1).unwrap() / (2.0 * PI);
    assert!((turns - 0.9).abs() < 1e-5, "{turns}");
}

#[test]
fn boundedness_trichotomy() {
    let mut g = rng(44);
    let mut count = [0usize; 2];
    while count[0] + count[1] < 200 {
        let bounded = (count[0] + count[1]) % 2 == 0;
        let (s, ctx) = random_instance(&mut g, bounded);
        let report = bounded_condition(&s).unwrap();
        if bounded && report.margin <= 1e-6 {
            continue;
        }
        let class = classify_region(&build_f(&s).unwrap(), s.r0).unwrap();
        assert_eq!(report.bounded, class.is_bounded(), "{s:?}");
        let horizon = match ctx.time_period() {
            Some(tt) => 3.0 * tt,
            None => 1e5,
        };
        let escape = escape_time(&oracle_state(&s), 1e3 * s.r0, horizon, Tolerance::new(1e-10).unwrap()).unwrap();
        assert_eq!(escape.is_none(), report.bounded, "{s:?}");
        count[bounded as usize] += 1;
    }
}

#[test]
fn verdicts_on_the_named_cases() {
    let worked = bounded_condition(&InitialState::at_apsis(1.0, 1.2, 0.02).unwrap()).unwrap();
    assert_eq!(worked.verdict, Verdict::Bounded);
    assert!((worked.e_tilde_max - 0.056_055_512_754_639_89).abs() < 1e-15);
    assert!((worked.threshold + 0.04).abs() < 1e-15);
    let edge = bounded_condition(&InitialState::at_apsis(1.0, 1.0, 0.125).unwrap()).unwrap();
    assert_eq!(edge.verdict, Verdict::Marginal);
    let mut g = rng(45);
    for _ in 0..100 {
        let s = InitialState::new(
            g.gen_range(0.3..3.0),
            g.gen_range(0.1..1.5),
            g.gen_range(-1.2..1.2),
            -g.gen_range(1e-3..0.2),
        )
        .unwrap();
        if build_f(&s).is_err() {
            continue;
        }
        assert_eq!(bounded_condition(&s).unwrap().verdict, Verdict::Bounded, "{s:?}");
    }
}

#[test]
fn start_threshold_agrees_with_the_boundedness_test() {
    let mut g = rng(46);
    for _ in 0..300 {
        let r0 = g.gen_range(0.5..2.0);
        let v0 = g.gen_range(0.2..1.8) / f64::sqrt(r0);
        let th = pericenter_start_threshold(r0, v0).unwrap();
        let alpha = g.gen_range(-0.3..0.3);
        if (alpha - th.alpha_max).abs() < 1e-6 || alpha == 0.0 {
            continue;
        }
        let s = InitialState::at_apsis(r0, v0, alpha).unwrap();
        let report = bounded_condition(&s).unwrap();
        assert_eq!(report.bounded, alpha < th.alpha_max, "{s:?} threshold {th:?}");
    }
}

#[test]
fn start_threshold_examples() {
    let x = pericenter_start_threshold(1.0, 1.0).unwrap();
    assert_eq!((x.regime, x.alpha_max), (StartRegime::Moderate, 0.125));
    let fast = pericenter_start_threshold(1.0, 2.5f64.sqrt()).unwrap();
    assert_eq!((fast.regime, fast.alpha_max), (StartRegime::Fast, 0.0));
    let slow = pericenter_start_threshold(1.0, 0.5f64.sqrt()).unwrap();
    assert_eq!(slow.regime, StartRegime::Slow);
    assert!((slow.alpha_max - 0.5).abs() < 1e-15);
}

#[test]
fn bisection_matches_the_start_table() {
    for v0 in [0.85, 0.9, 1.0, 1.2, 1.35] {
        let th = pericenter_start_threshold(1.0, v0).unwrap().alpha_max;
        let found = escape_alpha(fixed_state_family(1.0, v0, 0.0), th - 0.05, th + 0.05, 1e-12).unwrap();
        assert!((found - th).abs() <= 1e-10, "v0 = {v0}: {found} vs {th}");
    }
    // Slow starts escape where the start itself becomes a circular equilibrium;
    // the double root there blurs the verdict over a band of order √ε.
    for v0 in [0.5, 0.7] {
        let th = pericenter_start_threshold(1.0, v0).unwrap().alpha_max;
        let found = escape_alpha(fixed_state_family(1.0, v0, 0.0), th - 0.05, th + 0.05, 1e-12).unwrap();
        assert!((found - th).abs() <= 1e-7, "v0 = {v0}: {found} vs {th}");
    }
    let classic = escape_alpha(fixed_state_family(1.0, 1.0, 0.0), 0.01, 0.3, 1e-12).unwrap();
    assert!((classic - 0.125).abs() <= 1e-10);
    assert!(matches!(
        escape_alpha(fixed_state_family(1.0, 1.0, 0.0), -0.2, -0.01, 1e-12),
        Err(Error::InvalidBracket { .. })
    ));
}

#[test]
fn threshold_is_continuous_across_regimes() {
    for x in [2.0 / 3.0, 2.0] {
        let below = pericenter_start_threshold(1.0, (x - 1e-9f64).sqrt()).unwrap();
        let above = pericenter_start_threshold(1.0, (x + 1e-9f64).sqrt()).unwrap();
        assert_ne!(below.regime, above.regime);
        assert!((below.alpha_max - above.alpha_max).abs() < 1e-8);
        let lo = escape_alpha(fixed_state_family(1.0, (x - 1e-6f64).sqrt(), 0.0), -0.05, 0.5, 1e-12).unwrap();
        let hi = escape_alpha(fixed_state_family(1.0, (x + 1e-6f64).sqrt(), 0.0), -0.05, 0.5, 1e-12).unwrap();
        assert!((lo - hi).abs() < 1e-5, "{x}: {lo} {hi}");
    }
}

#[test]
fn closed_orbit_with_eight_periods() {
    let v = find_periodic_v(1.0, -0.05, (1, 8), (1.3, 1.34)).unwrap();
    let ctx = SolutionContext::new(&InitialState::at_apsis(1.0, v, -0.05).unwrap()).unwrap();
    let turns = winding_increment(&ctx, 1).unwrap() / (2.0 * PI);
    assert!((turns - 0.875).abs() <= 1e-10);
    let tt = ctx.time_period().unwrap();
    let o = sample_times(&oracle_state(&ctx.state), &[8.0 * tt], Tolerance::default()).unwrap();
    let end = o.samples[0];
    assert!((end.r - 1.0).abs() < 1e-6 && end.r_dot.abs() < 1e-6);
    assert!((end.theta - 7.0 * 2.0 * PI).abs() < 1e-6, "{}", end.theta);
}

#[test]
fn search_errors() {
    assert!(matches!(
        find_periodic_v(1.0, -0.05, (1, 10), (1.0, 1.1)),
        Err(Error::InvalidBracket { .. })
    ));
    assert!(matches!(
        find_periodic_v(1.0, -0.05, (1, 10), (1.3, 1.2)),
        Err(Error::InvalidBracket { .. })
    ));
    assert!(find_periodic_v(1.0, -0.05, (1, 0), (1.2, 1.3)).is_err());
}

mod common;

use radthrust::dynamics::{build_f, classify_region, pericenter, InitialState};
use radthrust_oracle::{escape_time, Tolerance};
use rand::Rng;

/// Allowed interval around `r0` found by scanning the sign of `f` on a
/// geometric grid over `[1e-3, 1e3]`; `None` as the upper end means the scan
/// ran off the grid.
fn sign_scan(f: impl Fn(f64) -> f64, r0: f64) -> (f64, Option<f64>) {
    let n = 4000;
    let grid = |i: i32| 1e-3 * 1e6f64.powf(i as f64 / n as f64);
    let start = ((r0 / 1e-3).ln() / 1e6f64.ln() * n as f64).floor() as i32;
    let mut lo = start;
    while lo > 0 && f(grid(lo)) >= 0.0 {
        lo -= 1;
    }
    let mut hi = start + 1;
    while hi <= n && f(grid(hi)) >= 0.0 {
        hi += 1;
    }
    (grid(lo), (hi <= n).then(|| grid(hi)))
}

#[test]
fn classifier_matches_sign_scan_on_many_instances() {
    let mut g = common::rng(21);
    let mut checked = 0;
    while checked < 10_000 {
        let r0 = g.gen_range(0.2..5.0);
        let v0 = g.gen_range(0.05..2.0) / f64::sqrt(r0);
        let gamma0 = g.gen_range(-1.5..1.5);
        let alpha = g.gen_range(-0.3..0.3);
        let Ok(state) = InitialState::new(r0, v0, gamma0, alpha) else {
            continue;
        };
        let Ok(f) = build_f(&state) else { continue };
        let roots = f.real_roots();
        // skip instances the grid cannot resolve
        let cell = 1e6f64.powf(1.0 / 4000.0);
        if roots.iter().any(|&r| r > 0.0 && !(2e-3..5e2).contains(&r)) {
            continue;
        }
        if roots.windows(2).any(|w| w[0] > 0.0 && w[1] / w[0] < cell * cell) {
            continue;
        }
        let class = classify_region(&f, r0).unwrap();
        let (lo, hi) = sign_scan(|r| f.eval(r), r0);
        assert!(class.lo >= lo && class.lo <= lo * cell, "{state:?}: {class:?} vs {lo}");
        match hi {
            Some(hi) => assert!(class.hi <= hi && class.hi >= hi / cell, "{state:?}: {class:?} vs {hi}"),
            None => assert!(class.hi.is_infinite(), "{state:?}: {class:?}"),
        }
        checked += 1;
    }
}

#[test]
fn inward_acceleration_with_three_real_roots_has_two_positive() {
    let mut g = common::rng(22);
    let mut seen = 0;
    while seen < 200 {
        let r0 = g.gen_range(0.5..2.0);
        let state = InitialState::new(
            r0,
            g.gen_range(0.3..1.6),
            g.gen_range(-1.0..1.0),
            -g.gen_range(0.001..0.3),
        )
        .unwrap();
        let f = build_f(&state).unwrap();
        if f.discriminant <= 0.0 {
            continue;
        }
        assert_eq!(f.real_roots().iter().filter(|r| **r > 0.0).count(), 2);
        assert!(classify_region(&f, r0).unwrap().is_bounded());
        seen += 1;
    }
}

#[test]
fn tenth_turn_orbit_pericenter() {
    let s = InitialState::at_apsis(1.0, 1.26014, -0.05).unwrap();
    let c = s.conserved();
    assert!((c.energy - (0.5 * 1.26014f64.powi(2) - 1.0 + 0.05)).abs() < 1e-15);
    assert_eq!(c.momentum, 1.26014);
    let f = build_f(&s).unwrap();
    let (r_m, v_m) = pericenter(&f, 1.0).unwrap();
    assert!((r_m - 1.0).abs() < 1e-14 && (v_m - 1.26014).abs() < 1e-14);
}

#[test]
fn worked_instance_from_off_apsis_start() {
    let s = common::on_orbit(1.0, 1.2, 0.02, 1.1, 1.0);
    let f = build_f(&s).unwrap();
    let roots = f.real_roots();
    let below = roots
        .iter()
        .copied()
        .filter(|r| *r <= 1.1)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((below - 1.0).abs() < 1e-12);
    let (r_m, v_m) = pericenter(&f, 1.1).unwrap();
    assert!((r_m - 1.0).abs() < 1e-12 && (v_m - 1.2).abs() < 1e-12);
    for r in roots {
        assert!(f.eval(r).abs() <= 1e-12 * f.magnitude(r));
    }
}

#[test]
fn circular_start_beyond_the_classical_bound_escapes() {
    let s = InitialState::at_apsis(1.0, 1.0, 0.2).unwrap();
    let class = classify_region(&build_f(&s).unwrap(), 1.0).unwrap();
    assert!(!class.is_bounded());
    let t = escape_time(&common::oracle_state(&s), 1e3, 1e4, Tolerance::default()).unwrap();
    assert!(t.is_some());
    let s = InitialState::at_apsis(1.0, 1.0, 0.1).unwrap();
    assert!(classify_region(&build_f(&s).unwrap(), 1.0).unwrap().is_bounded());
}

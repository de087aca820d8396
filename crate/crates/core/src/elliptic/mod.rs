//! Weierstrass elliptic functions with real invariants.
//!
//! All functions refer to the cubic `4s³ - g2 s - g3`. The half-period labels
//! follow the usual convention: `wp(ω₁) = ẽ₁`, `wp(ω₂) = ẽ₂`, `wp(ω₃) = ẽ₃`
//! with `ω₁ = ω`, `ω₂ = ω + ω′`, `ω₃ = ω′`.

mod carlson;
mod inverse;
mod theta;

use num_complex::Complex64;

use crate::cubic::solve_cubic;
use crate::error::{Error, Result};
use theta::ThetaLattice;

pub use carlson::{carlson_rf, carlson_rf_complex, elliptic_k};
pub use inverse::Branch;

/// Default exclusion radius around lattice points for `wp`, `wp_prime`, `zeta`.
pub const DEFAULT_POLE_GUARD: f64 = 1e-12;

/// Relative size of `g2³ - 27 g3²` below which the lattice is treated as degenerate.
const DEGENERACY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub g2: f64,
    pub g3: f64,
}

impl Invariants {
    pub fn new(g2: f64, g3: f64) -> Result<Self> {
        if !g2.is_finite() || !g3.is_finite() {
            return Err(Error::InvalidInput(format!(
                "invariants must be finite (g2 = {g2}, g3 = {g3})"
            )));
        }
        Ok(Invariants { g2, g3 })
    }

    /// Modular discriminant `g2³ - 27 g3²`.
    pub fn discriminant(&self) -> f64 {
        self.g2.powi(3) - 27.0 * self.g3 * self.g3
    }

    fn is_degenerate(&self) -> bool {
        let scale = self.g2.abs().powi(3).max(27.0 * self.g3 * self.g3);
        scale == 0.0 || self.discriminant().abs() <= DEGENERACY_TOL * scale
    }
}

/// Roots of `4s³ - g2 s - g3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GRoots {
    pub e_tilde: [Complex64; 3],
    /// `g2³ - 27 g3²`; positive when all three roots are real.
    pub discriminant: f64,
}

impl GRoots {
    pub fn all_real(&self) -> bool {
        self.discriminant > 0.0
    }

    /// Largest real root.
    pub fn max_real(&self) -> f64 {
        if self.all_real() {
            self.e_tilde[0].re
        } else {
            self.e_tilde[1].re
        }
    }
}

pub fn g_roots(inv: Invariants) -> Result<GRoots> {
    let degenerate = || Error::DegenerateLattice {
        discriminant: inv.discriminant(),
    };
    if inv.is_degenerate() {
        return Err(degenerate());
    }
    let sol = solve_cubic(4.0, 0.0, -inv.g2, -inv.g3)?;
    if sol.double_root {
        return Err(degenerate());
    }
    let mut e = sol.roots;
    // Enforce the zero sum exactly on the middle root.
    if sol.all_real() {
        e[1] = Complex64::new(-(e[0].re + e[2].re), 0.0);
    } else {
        e[1] = Complex64::new(-2.0 * e[0].re, 0.0);
    }
    let discriminant = inv.discriminant();
    if (discriminant > 0.0) != sol.all_real() {
        return Err(degenerate());
    }
    Ok(GRoots {
        e_tilde: e,
        discriminant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPeriods {
    pub omega: Complex64,
    pub omega_prime: Complex64,
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub omega3: Complex64,
    /// `ζ(ω)`
    pub eta: Complex64,
    /// `ζ(ω′)`
    pub eta_prime: Complex64,
    /// Parameter of the complete integral behind the real half-period.
    pub m: f64,
    /// Smallest positive real half-period: `ω` when the roots are real,
    /// `ω - ω′` or `ω + ω′` otherwise.
    pub real_half_period: f64,
}

pub fn half_periods(inv: Invariants, roots: GRoots) -> Result<HalfPeriods> {
    Ok(build(inv, roots)?.1)
}

fn build(inv: Invariants, roots: GRoots) -> Result<(ThetaLattice, HalfPeriods)> {
    if inv.is_degenerate() {
        return Err(Error::DegenerateLattice {
            discriminant: inv.discriminant(),
        });
    }
    let [e1, e2, e3] = roots.e_tilde;
    let i = Complex64::i();
    let (lattice, omega, omega_prime, m, real_half) = if roots.all_real() {
        let span = e1.re - e3.re;
        let m = (e2.re - e3.re) / span;
        let k = elliptic_k(m)?;
        let kp = elliptic_k(1.0 - m)?;
        let w = k / span.sqrt();
        let wp = i * (kp / span.sqrt());
        let lattice = ThetaLattice::new(Complex64::new(2.0 * w, 0.0), 2.0 * wp);
        (lattice, Complex64::new(w, 0.0), wp, m, w)
    } else {
        let h2 = (e2 - e1).norm();
        let m = 0.5 - 0.75 * e2.re / h2;
        let re = elliptic_k(m)? / h2.sqrt();
        let im = elliptic_k(1.0 - m)? / h2.sqrt();
        let up = Complex64::new(re, im) * 0.5;
        let lattice = ThetaLattice::new(2.0 * up, -2.0 * up.conj());
        // Label so that wp(ω) is the root with positive imaginary part.
        let (omega, omega_prime) = if lattice.wp(up).im > 0.0 {
            (up, -up.conj())
        } else {
            (up.conj(), up)
        };
        (lattice, omega, omega_prime, m, re)
    };
    let eta = lattice.zeta(omega);
    let eta_prime = lattice.zeta(omega_prime);
    let periods = HalfPeriods {
        omega,
        omega_prime,
        omega1: omega,
        omega2: omega + omega_prime,
        omega3: omega_prime,
        eta,
        eta_prime,
        m,
        real_half_period: real_half,
    };
    Ok((lattice, periods))
}

/// Evaluator for `wp`, `wp'`, `ζ`, `σ` and the inverse of `wp` on one lattice.
#[derive(Debug, Clone)]
pub struct Weierstrass {
    inv: Invariants,
    roots: GRoots,
    periods: HalfPeriods,
    lattice: ThetaLattice,
    pole_guard: f64,
}

impl Weierstrass {
    pub fn new(inv: Invariants) -> Result<Self> {
        let roots = g_roots(inv)?;
        let (lattice, periods) = build(inv, roots)?;
        Ok(Weierstrass {
            inv,
            roots,
            periods,
            lattice,
            pole_guard: DEFAULT_POLE_GUARD,
        })
    }

    pub fn with_pole_guard(mut self, guard: f64) -> Self {
        self.pole_guard = guard;
        self
    }

    pub fn invariants(&self) -> Invariants {
        self.inv
    }

    pub fn roots(&self) -> &GRoots {
        &self.roots
    }

    pub fn periods(&self) -> &HalfPeriods {
        &self.periods
    }

    fn guard(&self, z: Complex64) -> Result<()> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite argument {z}")));
        }
        if self.lattice.lattice_distance(z) < self.pole_guard {
            return Err(Error::PoleProximity {
                z,
                guard: self.pole_guard,
            });
        }
        Ok(())
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        self.guard(z)?;
        Ok(self.lattice.wp(z))
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        self.guard(z)?;
        Ok(self.lattice.wp_prime(z))
    }

    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        self.guard(z)?;
        Ok(self.lattice.zeta(z))
    }

    /// `σ` is entire; no pole guard applies.
    pub fn sigma(&self, z: Complex64) -> Complex64 {
        self.lattice.sigma(z)
    }

    /// `ln σ(z)` on an unspecified branch, finite wherever `σ(z) != 0`.
    pub fn ln_sigma(&self, z: Complex64) -> Complex64 {
        self.lattice.ln_sigma(z)
    }

    /// Real-argument shorthand for `wp`.
    pub fn wp_real(&self, x: f64) -> Result<f64> {
        Ok(self.wp(Complex64::new(x, 0.0))?.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn samples() -> Vec<(f64, f64)> {
        vec![
            (4.0, 0.0),
            (0.01, 0.000144),
            (0.12, -0.016),
            (1.0, 0.3),
            (-2.0, 1.0),
            (3.0, -1.5),
            (0.058114, 0.0024333),
        ]
    }

    #[test]
    fn symmetric_roots() {
        let r = g_roots(Invariants::new(4.0, 0.0).unwrap()).unwrap();
        assert!((r.e_tilde[0].re - 1.0).abs() < 1e-15);
        assert!(r.e_tilde[1].re.abs() < 1e-15);
        assert!((r.e_tilde[2].re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn roots_sum_to_zero_and_solve_cubic() {
        for (g2, g3) in samples() {
            let inv = Invariants::new(g2, g3).unwrap();
            let r = g_roots(inv).unwrap();
            let s: Complex64 = r.e_tilde.iter().sum();
            assert!(s.norm() < 1e-12);
            let scale = 1f64.max(g2.abs()).max(g3.abs());
            for e in r.e_tilde {
                let res = 4.0 * e * e * e - g2 * e - g3;
                assert!(res.norm() <= 1e-12 * scale, "{g2} {g3}: {res}");
            }
        }
    }

    #[test]
    fn degenerate_lattice_is_reported() {
        // g2 = 3, g3 = 1: 27 - 27 = 0.
        let err = g_roots(Invariants::new(3.0, 1.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DegenerateLattice { .. }));
        assert!(Weierstrass::new(Invariants::new(0.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn lemniscatic_half_period() {
        let w = Weierstrass::new(Invariants::new(4.0, 0.0).unwrap()).unwrap();
        let p = w.periods();
        assert!((p.m - 0.5).abs() < 1e-15);
        let want = elliptic_k(0.5).unwrap() / 2f64.sqrt();
        assert!((p.omega.re - want).abs() < 1e-14);
        assert_eq!(p.omega.im, 0.0);
        assert_eq!(p.omega_prime.re, 0.0);
    }

    #[test]
    fn half_periods_hit_roots() {
        for (g2, g3) in samples() {
            let w = Weierstrass::new(Invariants::new(g2, g3).unwrap()).unwrap();
            let p = w.periods();
            let e = w.roots().e_tilde;
            for (om, ek) in [(p.omega1, e[0]), (p.omega2, e[1]), (p.omega3, e[2])] {
                let v = w.wp(om).unwrap();
                let scale = 1f64.max(ek.norm());
                assert!((v - ek).norm() < 1e-10 * scale, "{g2} {g3}: {v} vs {ek}");
                assert!(w.wp_prime(om).unwrap().norm() < 1e-8 * scale);
            }
            assert!((p.omega_prime / p.omega).im > 0.0);
        }
    }

    #[test]
    fn legendre_relation() {
        for (g2, g3) in samples() {
            let w = Weierstrass::new(Invariants::new(g2, g3).unwrap()).unwrap();
            let p = w.periods();
            let lhs = p.eta * p.omega_prime - p.eta_prime * p.omega;
            assert!((lhs - c(0.0, PI / 2.0)).norm() < 1e-12, "{g2} {g3}: {lhs}");
        }
    }

    #[test]
    fn differential_equation_and_parity() {
        for (g2, g3) in samples() {
            let w = Weierstrass::new(Invariants::new(g2, g3).unwrap()).unwrap();
            for z in [c(0.37, 0.0), c(0.2, 0.9), c(-1.3, 0.4), c(2.5, -3.1)] {
                let p = w.wp(z).unwrap();
                let dp = w.wp_prime(z).unwrap();
                let res = dp * dp - (4.0 * p * p * p - g2 * p - g3);
                assert!(res.norm() <= 1e-10 * (1.0 + p.norm().powi(3)));
                assert!((w.zeta(-z).unwrap() + w.zeta(z).unwrap()).norm() < 1e-12 * (1.0 + w.zeta(z).unwrap().norm()));
                assert!((w.sigma(-z) + w.sigma(z)).norm() < 1e-12 * (1.0 + w.sigma(z).norm()));
            }
        }
    }

    #[test]
    fn real_axis_values_are_real() {
        let w = Weierstrass::new(Invariants::new(0.01, 0.000144).unwrap()).unwrap();
        let v = w.wp(c(0.37, 0.0)).unwrap();
        assert!(v.im.abs() < 1e-12 * v.re.abs());
    }

    #[test]
    fn pole_guard() {
        let w = Weierstrass::new(Invariants::new(1.0, 0.3).unwrap()).unwrap();
        let om = w.periods().omega;
        assert!(matches!(w.wp(2.0 * om), Err(Error::PoleProximity { .. })));
        assert!(matches!(w.zeta(c(0.0, 0.0)), Err(Error::PoleProximity { .. })));
        assert_eq!(w.sigma(c(0.0, 0.0)), c(0.0, 0.0));
        let loose = w.clone().with_pole_guard(1e-3);
        assert!(loose.wp(c(1e-4, 0.0)).is_err());
    }
}

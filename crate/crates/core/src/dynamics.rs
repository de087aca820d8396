//! Problem instance, conserved quantities and the radial polynomial
//! `f(r) = 2αr³ + 2Er² + 2r - h²`, whose positive part is `(r dr/dt)²`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::cubic::solve_cubic;
use crate::error::{Error, Result};

/// Relative size of a negative `f(r0)` still attributed to rounding.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Planar state with gravitational parameter one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub r0: f64,
    pub v0: f64,
    /// Flight-path angle measured from the local horizontal, radians.
    pub gamma0: f64,
    /// Constant radial acceleration, positive outward.
    pub alpha: f64,
}

impl InitialState {
    pub fn new(r0: f64, v0: f64, gamma0: f64, alpha: f64) -> Result<Self> {
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(Error::InvalidInput(format!("r0 must be positive, got {r0}")));
        }
        if !(v0.is_finite() && v0 >= 0.0) {
            return Err(Error::InvalidInput(format!("v0 must be nonnegative, got {v0}")));
        }
        if !(gamma0.is_finite() && gamma0.abs() <= FRAC_PI_2) {
            return Err(Error::InvalidInput(format!(
                "flight-path angle must lie in [-pi/2, pi/2], got {gamma0}"
            )));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidInput(format!("alpha must be finite, got {alpha}")));
        }
        Ok(InitialState { r0, v0, gamma0, alpha })
    }

    /// State at a pericenter (or apocenter) passage: zero flight-path angle.
    pub fn at_apsis(r: f64, v: f64, alpha: f64) -> Result<Self> {
        Self::new(r, v, 0.0, alpha)
    }

    pub fn conserved(&self) -> ConservedQuantities {
        conserved(self)
    }

    /// Sign of the initial radial velocity (`0` on an apsis).
    pub fn radial_sign(&self) -> f64 {
        if self.gamma0 > 0.0 {
            1.0
        } else if self.gamma0 < 0.0 {
            -1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedQuantities {
    pub energy: f64,
    pub momentum: f64,
}

pub fn conserved(state: &InitialState) -> ConservedQuantities {
    let InitialState { r0, v0, gamma0, alpha } = *state;
    ConservedQuantities {
        energy: 0.5 * v0 * v0 - 1.0 / r0 - alpha * r0,
        momentum: r0 * v0 * gamma0.cos(),
    }
}

/// The radial polynomial and its roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicF {
    pub alpha: f64,
    pub energy: f64,
    pub momentum: f64,
    /// Coefficients from the cubic term down: `[2α, 2E, 2, -h²]`.
    pub coeffs: [f64; 4],
    pub roots: [Complex64; 3],
    pub discriminant: f64,
    pub double_root: bool,
}

impl CubicF {
    pub fn new(alpha: f64, energy: f64, momentum: f64) -> Result<Self> {
        if alpha == 0.0 {
            return Err(Error::ZeroAcceleration);
        }
        let coeffs = [2.0 * alpha, 2.0 * energy, 2.0, -momentum * momentum];
        let sol = solve_cubic(coeffs[0], coeffs[1], coeffs[2], coeffs[3])?;
        Ok(CubicF {
            alpha,
            energy,
            momentum,
            coeffs,
            roots: sol.roots,
            discriminant: sol.discriminant,
            double_root: sol.double_root,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let [a, b, c, d] = self.coeffs;
        ((a * r + b) * r + c) * r + d
    }

    pub fn d1(&self, r: f64) -> f64 {
        let [a, b, c, _] = self.coeffs;
        (3.0 * a * r + 2.0 * b) * r + c
    }

    pub fn d2(&self, r: f64) -> f64 {
        6.0 * self.coeffs[0] * r + 2.0 * self.coeffs[1]
    }

    pub fn d3(&self) -> f64 {
        6.0 * self.coeffs[0]
    }

    /// Rounding scale of `eval(r)`.
    pub fn magnitude(&self, r: f64) -> f64 {
        let [a, b, c, d] = self.coeffs;
        let r = r.abs();
        a.abs() * r * r * r + b.abs() * r * r + c.abs() * r + d.abs()
    }

    /// Real roots in ascending order.
    pub fn real_roots(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.roots.iter().filter(|z| z.im == 0.0).map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

pub fn build_f(state: &InitialState) -> Result<CubicF> {
    let c = state.conserved();
    let f = CubicF::new(state.alpha, c.energy, c.momentum)?;
    let value = f.eval(state.r0);
    if value < -FEASIBILITY_TOL * f.magnitude(state.r0) {
        return Err(Error::Infeasible { value });
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionTag {
    /// Oscillation between two turning points with no allowed region above.
    BoundedAnnulus,
    /// A single lower turning point; the radius grows without bound.
    UnboundedAbove,
    /// Oscillation between two turning points with a forbidden gap above,
    /// beyond which an unbounded region exists.
    BoundedBelowGap,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionClass {
    pub tag: MotionTag,
    pub lo: f64,
    /// `f64::INFINITY` when unbounded.
    pub hi: f64,
    /// The upper endpoint is a double root of `f`: the orbit creeps toward it
    /// without reaching it (homoclinic boundary).
    pub asymptotic: bool,
}

impl MotionClass {
    pub fn is_bounded(&self) -> bool {
        self.tag != MotionTag::UnboundedAbove
    }
}

/// Connected component of `{r > 0 : f(r) >= 0}` containing `r0`.
pub fn classify_region(f: &CubicF, r0: f64) -> Result<MotionClass> {
    let value = f.eval(r0);
    let tol = FEASIBILITY_TOL * f.magnitude(r0);
    if value < -tol {
        return Err(Error::Infeasible { value });
    }
    let roots = f.real_roots();
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;

    if value <= tol && !roots.is_empty() {
        // Starting on a turning point: the side with f > 0 decides.
        let near = *roots
            .iter()
            .min_by(|a, b| (*a - r0).abs().total_cmp(&(*b - r0).abs()))
            .unwrap();
        if f.d1(r0) >= 0.0 {
            lo = r0;
            hi = roots
                .iter()
                .copied()
                .filter(|&e| e > near)
                .fold(f64::INFINITY, f64::min);
            if f.double_root {
                hi = roots
                    .iter()
                    .copied()
                    .filter(|&e| e > r0 * (1.0 + 1e-9))
                    .fold(f64::INFINITY, f64::min);
            }
        } else {
            hi = r0;
            lo = roots.iter().copied().filter(|&e| e < near).fold(0.0, f64::max);
        }
    } else {
        for &e in &roots {
            if e <= r0 {
                lo = lo.max(e);
            } else {
                hi = hi.min(e);
            }
        }
    }

    let tag = if hi.is_infinite() {
        MotionTag::UnboundedAbove
    } else if roots.iter().any(|&e| e > hi * (1.0 + 1e-12)) {
        MotionTag::BoundedBelowGap
    } else {
        MotionTag::BoundedAnnulus
    };
    let asymptotic = f.double_root && hi.is_finite() && f.d1(hi).abs() <= 1e-8 * f.magnitude(hi).max(1.0);
    Ok(MotionClass {
        tag,
        lo: lo.max(0.0),
        hi,
        asymptotic,
    })
}

/// Lower turning point of the component containing `r0` and the speed there.
pub fn pericenter(f: &CubicF, r0: f64) -> Result<(f64, f64)> {
    let class = classify_region(f, r0)?;
    if class.lo <= 0.0 || f.momentum == 0.0 {
        return Err(Error::NoPericenter);
    }
    Ok((class.lo, f.momentum / class.lo))
}

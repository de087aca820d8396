//! Numerical reference for the constant radial acceleration problem:
//! adaptive Dormand-Prince integration of the equations of motion and
//! adaptive Gauss-Kronrod quadrature of the time and angle integrals.
//!
//! Units are canonical (`μ = 1`). The acceleration `alpha` acts along the
//! radius vector, positive outward.

mod ode;
mod quad;

pub use ode::{
    escape_time, integrate_ode, measure_radial_period, sample_pseudo_times, sample_times, OracleSample,
    OracleTrajectory, RadialPeriod,
};
pub use quad::{gauss_kronrod, quadrature_theta, quadrature_tof};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("tolerance {0} outside [1e-13, 1e-6]")]
    InvalidTolerance(f64),
    #[error("step size underflow at t = {t}, r = {r}")]
    StepUnderflow { t: f64, r: f64 },
    #[error("step budget of {0} exhausted")]
    StepBudget(usize),
    #[error("f(r) < 0 at r = {r}: interval not within an allowed arc")]
    ForbiddenInterval { r: f64 },
    #[error("no {what} event before t = {t_max}")]
    NoEvent { what: &'static str, t_max: f64 },
    #[error("quadrature did not reach tolerance (estimate {estimate})")]
    QuadratureLimit { estimate: f64 },
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Initial polar state: radius, speed, flight-path angle (radians) and acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleState {
    pub r0: f64,
    pub v0: f64,
    pub gamma0: f64,
    pub alpha: f64,
}

impl OracleState {
    pub fn new(r0: f64, v0: f64, gamma0: f64, alpha: f64) -> Result<Self> {
        if !(r0.is_finite() && r0 > 0.0) || !(v0.is_finite() && v0 >= 0.0) {
            return Err(OracleError::InvalidInput(format!("r0 = {r0}, v0 = {v0}")));
        }
        if !gamma0.is_finite() || !alpha.is_finite() {
            return Err(OracleError::InvalidInput("non-finite angle or acceleration".into()));
        }
        Ok(OracleState { r0, v0, gamma0, alpha })
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.v0 * self.v0 - 1.0 / self.r0 - self.alpha * self.r0
    }

    pub fn momentum(&self) -> f64 {
        self.r0 * self.v0 * self.gamma0.cos()
    }

    /// `r² ṙ²` as a function of `r`.
    pub fn f(&self, r: f64) -> f64 {
        let h = self.momentum();
        ((2.0 * self.alpha * r + 2.0 * self.energy()) * r + 2.0) * r - h * h
    }
}

/// Relative and absolute error targets of the integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rtol: 1e-11,
            atol: 1e-13,
        }
    }
}

impl Tolerance {
    pub fn new(rtol: f64) -> Result<Self> {
        if !(1e-13..=1e-6).contains(&rtol) {
            return Err(OracleError::InvalidTolerance(rtol));
        }
        Ok(Tolerance {
            rtol,
            atol: 1e-2 * rtol,
        })
    }
}

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the kernel, the dynamics model and the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate lattice: g2^3 - 27 g3^2 = {discriminant:e} (double root of the Weierstrass cubic)")]
    DegenerateLattice { discriminant: f64 },

    #[error("radial acceleration is zero, the dynamics polynomial degenerates to a quadratic")]
    ZeroAcceleration,

    #[error("inconsistent state: f(r0) = {value:e} is negative")]
    Infeasible { value: f64 },

    #[error("argument {z} lies within {guard:e} of a lattice point")]
    PoleProximity { z: Complex64, guard: f64 },

    #[error("elliptic parameter m = {0} outside [0, 1)")]
    ParameterDomain(f64),

    #[error("wp(z) = {w} has no solution on the requested branch")]
    NoSolution { w: Complex64 },

    #[error("the allowed region containing r0 has no lower turning point")]
    NoPericenter,

    #[error("radius {r} outside the allowed interval [{lo}, {hi}]")]
    OutOfInterval { r: f64, lo: f64, hi: f64 },

    #[error("pseudo-time {tau} outside the escape interval (-{limit}, {limit})")]
    PseudoTimeDomain { tau: f64, limit: f64 },

    #[error("motion is unbounded, no radial period exists")]
    Unbounded,

    #[error("arc from {start} to {end} is not monotone in the requested direction")]
    NonMonotoneArc { start: f64, end: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("bracket [{lo}, {hi}] does not straddle the target")]
    InvalidBracket { lo: f64, hi: f64 },
}

impl Error {
    /// True for failures that indicate a numerical defect rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

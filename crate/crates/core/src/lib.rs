//! Closed-form solution of the planar two-body problem with a constant
//! radial acceleration, written in terms of Weierstrass elliptic functions.
//!
//! Units are canonical with the gravitational parameter set to one. The
//! pericenter passage is the epoch of every closed-form expression; the
//! pseudo-time `tau` is the Sundmann variable with `dt = r dtau`.

pub mod analysis;
pub mod cubic;
pub mod dynamics;
pub mod elliptic;
mod error;
pub mod propagation;

pub use error::{Error, Result};

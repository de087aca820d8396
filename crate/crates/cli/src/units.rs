//! Conversion between user units and the canonical `μ = 1` system.

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub mu: f64,
    pub length: f64,
}

impl Units {
    pub fn new(mu: f64, length: f64) -> Result<Self, CliError> {
        if !(mu.is_finite() && mu > 0.0 && length.is_finite() && length > 0.0) {
            return Err(CliError::Input(format!(
                "unit scales must be positive and finite (mu = {mu}, length = {length})"
            )));
        }
        Ok(Units { mu, length })
    }

    pub fn time(&self) -> f64 {
        (self.length.powi(3) / self.mu).sqrt()
    }

    pub fn speed(&self) -> f64 {
        self.length / self.time()
    }

    pub fn acceleration(&self) -> f64 {
        self.mu / (self.length * self.length)
    }

    /// Pseudo-time carries time per length.
    pub fn pseudo_time(&self) -> f64 {
        self.time() / self.length
    }

    pub fn energy(&self) -> f64 {
        self.speed() * self.speed()
    }

    pub fn momentum(&self) -> f64 {
        self.length * self.speed()
    }
}

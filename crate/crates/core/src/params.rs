use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Dimension, exponent and Robin coefficient shared by every formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    n: u32,
    p: f64,
    beta: f64,
}

impl ProblemParams {
    pub fn new(n: u32, p: f64, beta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("dimension n={n} must be >= 2")));
        }
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InvalidParams(format!("exponent p={p} must be finite and > 1")));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidParams(format!("beta={beta} must be finite and > 0")));
        }
        Ok(Self { n, p, beta })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    /// `beta^(1/(p-1))`, the scale against which all thresholds are compared.
    pub fn beta_root(&self) -> f64 {
        self.beta.powf(1.0 / (self.p - 1.0))
    }

    /// True when p equals n, selecting the logarithmic kernel.
    pub fn is_conformal(&self) -> bool {
        self.p == self.dim()
    }

    /// Volume of the unit ball in this dimension.
    pub fn omega(&self) -> f64 {
        unit_ball_volume(self.n)
    }

    /// Surface measure of the unit sphere, `n * omega_n`.
    pub fn sphere_area(&self) -> f64 {
        self.dim() * self.omega()
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.n, self.p, beta)
    }
}

/// Lebesgue measure of the unit ball in R^n, `pi^(n/2) / Gamma(n/2 + 1)`.
///
/// Uses the two-step recurrence `V_n = 2 pi / n * V_{n-2}` so that no gamma
/// function is needed.
pub fn unit_ball_volume(n: u32) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert_eq!(unit_ball_volume(1), 2.0);
        // pi^2/2 for n = 4
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ProblemParams::new(1, 2.0, 1.0).is_err());
        assert!(ProblemParams::new(2, 1.0, 1.0).is_err());
        assert!(ProblemParams::new(2, 2.0, 0.0).is_err());
        assert!(ProblemParams::new(2, f64::NAN, 1.0).is_err());
        assert!(ProblemParams::new(2, 2.0, f64::INFINITY).is_err());
        assert!(ProblemParams::new(3, 2.5, 1.0).is_ok());
    }
}

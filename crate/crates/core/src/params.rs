//! Model constants.
//!
//! Everything downstream is a function of the single real coupling `γ`:
//!
//! * `Λ = √(1+2γ²)`: the level spacing of the one-particle spectrum,
//! * `α = arctan(√2 γ)/√2`: the rotation parameter of the metric,
//!   so that `cos(√2 α) = 1/Λ`,
//! * `η = (Λ−1)/(√2 γ)`: the geometric ratio of the ground-state vectors.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub gamma: f64,
    pub lambda_scale: f64,
    pub alpha: f64,
    pub eta: f64,
}

impl ModelParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(domain(format!("coupling must be finite, got {gamma}")));
        }
        let lambda_scale = (1.0 + 2.0 * gamma * gamma).sqrt();
        // (Λ−1)/(√2γ) rewritten as √2γ/(Λ+1): no cancellation, and exactly 0 at γ = 0.
        let eta = SQRT_2 * gamma / (lambda_scale + 1.0);
        let alpha = (SQRT_2 * gamma).atan() / SQRT_2;
        Ok(Self {
            gamma,
            lambda_scale,
            alpha,
            eta,
        })
    }

    /// `λ_k = Λ(4k−3)/4`, the k-th one-particle level (k ≥ 1).
    pub fn mode_energy(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(domain("mode index starts at 1"));
        }
        Ok(self.lambda_scale * (4 * k - 3) as f64 / 4.0)
    }

    /// Lowest energy reachable with `n` particles: the `n` lowest modes filled.
    pub fn filled_energy(&self, n: usize) -> f64 {
        let n = n as f64;
        self.lambda_scale * n * (2.0 * n - 1.0) / 4.0
    }

    pub fn is_hermitian(&self) -> bool {
        self.gamma == 0.0
    }
}

/// Shorthand for [`ModelParams::new`].
pub fn make_params(gamma: f64) -> Result<ModelParams> {
    ModelParams::new(gamma)
}

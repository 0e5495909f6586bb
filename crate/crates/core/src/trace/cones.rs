//! Smooth partition of the quadrant into the cones
//! `Γ1 = {ξ < κ1 η}`, `Γ2 = {κ1η/2 < ξ < 2κ2η}`, `Γ3 = {ξ > κ2 η}`
//! and the radial cutoff `ψ`.
//!
//! The cutoffs depend on `ρ = ξ/η` only, so they are homogeneous of degree 0.
//! In `log ρ` each transition is a `C^∞` step `e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)})`.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("cone parameters need 0 < κ1 < κ2, got κ1 = {0}, κ2 = {1}")]
    Kappa(f64, f64),
    #[error("transition width must lie in (0, 1], got {0}")]
    Width(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConePartition {
    pub kappa1: f64,
    pub kappa2: f64,
    /// Fraction of the octave `(κ1/2, κ1)` (and `(κ2, 2κ2)`) used by each
    /// transition.
    pub transition_width: f64,
}

impl Default for ConePartition {
    fn default() -> Self {
        Self {
            kappa1: 0.25,
            kappa2: 4.0,
            transition_width: 0.9,
        }
    }
}

/// `C^∞` step from 0 (x ≤ 0) to 1 (x ≥ 1).
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// `ψ(ξ)`: 0 for `ξ ≤ 1/2`, 1 for `ξ ≥ 1`.
pub fn radial_cutoff(xi: f64) -> f64 {
    smooth_step(2.0 * xi - 1.0)
}

impl ConePartition {
    pub fn new(kappa1: f64, kappa2: f64, transition_width: f64) -> Result<Self, ConeError> {
        let p = Self {
            kappa1,
            kappa2,
            transition_width,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ConeError> {
        if !(self.kappa1 > 0.0 && self.kappa2 > self.kappa1 && self.kappa2.is_finite()) {
            return Err(ConeError::Kappa(self.kappa1, self.kappa2));
        }
        if !(self.transition_width > 0.0 && self.transition_width <= 1.0) {
            return Err(ConeError::Width(self.transition_width));
        }
        Ok(())
    }

    /// Steps `(s_a, s_b)` at ratio `ρ = ξ/η`; `s_a` rises inside
    /// `(κ1/2, κ1)`, `s_b` inside `(κ2, 2κ2)`.
    fn steps(&self, rho: f64) -> (f64, f64) {
        if rho <= 0.0 {
            return (0.0, 0.0);
        }
        let l = rho.log2();
        let w = self.transition_width;
        let a = smooth_step((l - self.kappa1.log2() + w) / w);
        let b = smooth_step((l - self.kappa2.log2()) / w);
        (a, b)
    }

    /// `(χ1, χ2, χ3)` at `(ξ, η)` in the open quadrant.
    pub fn weights(&self, xi: f64, eta: f64) -> [f64; 3] {
        let (a, b) = self.steps(xi / eta);
        [1.0 - a, a - b, b]
    }

    /// `χ_j`, `j ∈ {1, 2, 3}`.
    pub fn chi(&self, j: usize, xi: f64, eta: f64) -> f64 {
        self.weights(xi, eta)[j - 1]
    }

    /// Whether `(ξ, η)` lies in the open cone `Γ_j`.
    pub fn in_cone(&self, j: usize, xi: f64, eta: f64) -> bool {
        match j {
            1 => xi.abs() < self.kappa1 * eta,
            2 => 0.5 * self.kappa1 * eta < xi && xi < 2.0 * self.kappa2 * eta,
            3 => self.kappa2 * eta.abs() < xi,
            _ => false,
        }
    }
}

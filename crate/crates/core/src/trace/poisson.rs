//! Direct check of `Σ_{Z²} g(m,n) = Σ_{Z²} ĝ(p,q)` with
//! `ĝ(p,q) = ∫ g(x,y) e^{-2πi(xp + yq)} dx dy`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::summation::{ComplexNeumaierSum, NeumaierSum};

/// Terms below this are dropped from both sides.
pub const TAIL_TOL: f64 = 1e-16;
/// Largest lattice box either side may require.
pub const MAX_TERMS: usize = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoissonError {
    #[error("test function does not decay fast enough for direct summation: {0}")]
    SlowDecay(String),
    #[error("invalid test function parameter: {0}")]
    Parameter(String),
}

/// A function on `R²` whose values and transform are both summable over `Z²`.
pub trait PoissonTestFunction {
    fn value(&self, x: f64, y: f64) -> f64;
    fn transform(&self, p: f64, q: f64) -> Complex64;
    /// Boxes `(center, radius)` per axis outside which `|g|` (first pair) and
    /// `|ĝ|` (second pair) fall below `tol`.
    fn truncation(&self, tol: f64) -> Result<TruncationBoxes, PoissonError>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationBoxes {
    pub value_center: (f64, f64),
    pub value_radius: (f64, f64),
    pub transform_radius: (f64, f64),
}

/// `g(x,y) = exp(-π(α(x-a)² + β(y-b)²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gaussian {
    pub alpha: f64,
    pub beta: f64,
    pub shift_x: f64,
    pub shift_y: f64,
}

impl Gaussian {
    pub fn isotropic() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            shift_x: 0.0,
            shift_y: 0.0,
        }
    }
}

impl PoissonTestFunction for Gaussian {
    fn value(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.shift_x;
        let dy = y - self.shift_y;
        (-PI * (self.alpha * dx * dx + self.beta * dy * dy)).exp()
    }

    fn transform(&self, p: f64, q: f64) -> Complex64 {
        let modulus = (-PI * (p * p / self.alpha + q * q / self.beta)).exp() / (self.alpha * self.beta).sqrt();
        Complex64::from_polar(modulus, -2.0 * PI * (p * self.shift_x + q * self.shift_y))
    }

    fn truncation(&self, tol: f64) -> Result<TruncationBoxes, PoissonError> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PoissonError::Parameter(format!("{name} = {v}")));
            }
        }
        if !(self.shift_x.is_finite() && self.shift_y.is_finite()) {
            return Err(PoissonError::Parameter("non-finite shift".into()));
        }
        let budget = -tol.ln() / PI;
        let norm = (self.alpha * self.beta).sqrt().recip().max(1.0);
        let dual_budget = (-tol.ln() + norm.ln()) / PI;
        Ok(TruncationBoxes {
            value_center: (self.shift_x, self.shift_y),
            value_radius: ((budget / self.alpha).sqrt(), (budget / self.beta).sqrt()),
            transform_radius: ((dual_budget * self.alpha).sqrt(), (dual_budget * self.beta).sqrt()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonOutcome {
    pub lhs: f64,
    pub rhs: f64,
    /// Imaginary part of the transform side, zero up to rounding for real `g`.
    pub rhs_imag: f64,
    pub gap: f64,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
}

fn index_range(center: f64, radius: f64) -> (i64, i64) {
    ((center - radius).floor() as i64, (center + radius).ceil() as i64)
}

fn box_size(a: (i64, i64), b: (i64, i64)) -> usize {
    ((a.1 - a.0 + 1) as usize).saturating_mul((b.1 - b.0 + 1) as usize)
}

/// Sums both sides of the Poisson formula directly over truncated boxes.
pub fn poisson_check(g: &dyn PoissonTestFunction) -> Result<PoissonOutcome, PoissonError> {
    let boxes = g.truncation(TAIL_TOL)?;
    let mx = index_range(boxes.value_center.0, boxes.value_radius.0);
    let my = index_range(boxes.value_center.1, boxes.value_radius.1);
    let px = index_range(0.0, boxes.transform_radius.0);
    let py = index_range(0.0, boxes.transform_radius.1);
    let (lhs_terms, rhs_terms) = (box_size(mx, my), box_size(px, py));
    if lhs_terms > MAX_TERMS || rhs_terms > MAX_TERMS {
        return Err(PoissonError::SlowDecay(format!(
            "needs {lhs_terms} + {rhs_terms} terms (limit {MAX_TERMS})"
        )));
    }

    let mut lhs = NeumaierSum::new();
    for m in mx.0..=mx.1 {
        for n in my.0..=my.1 {
            lhs.add(g.value(m as f64, n as f64));
        }
    }
    let mut rhs = ComplexNeumaierSum::new();
    for p in px.0..=px.1 {
        for q in py.0..=py.1 {
            rhs.add(g.transform(p as f64, q as f64));
        }
    }
    let (lhs, rhs) = (lhs.total(), rhs.total());
    Ok(PoissonOutcome {
        lhs,
        rhs: rhs.re,
        rhs_imag: rhs.im,
        gap: (lhs - rhs).norm(),
        lhs_terms,
        rhs_terms,
    })
}

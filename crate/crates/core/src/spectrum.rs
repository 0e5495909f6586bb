//! Eigenvalues `λ(m,n) = n² + |n|^{4/3} t_m`, eigenfunctions
//! `Ai(|n|^{2/3} x - t_m) e^{iny}`, Bohr–Sommerfeld values and action
//! variables.
//!
//! Negative `n` is handled through `|n|`; every quantity here is even in `n`.

use std::borrow::Cow;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::airy::{self, AiryError, AiryZeroTable};

/// `(3π/2)^{2/3}`, the coefficient of the principal symbol of `τ`.
pub fn bohr_sommerfeld_constant() -> f64 {
    (1.5 * PI).powf(2.0 / 3.0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("m must be at least 1")]
    ZeroM,
    #[error("n must be nonzero")]
    ZeroN,
    #[error("m = {m} exceeds the zero table (length {len})")]
    OutOfTable { m: usize, len: usize },
    #[error("actions need 0 < |J| < H, got H = {h}, J = {j}")]
    ActionDomain { h: f64, j: f64 },
    #[error("actions need I1 > 0 and I2 != 0, got I1 = {i1}, I2 = {i2}")]
    InverseActionDomain { i1: f64, i2: f64 },
    #[error("grid point x = {x} is within {margin} of the caustic at x = {caustic}")]
    CausticGrid { x: f64, caustic: f64, margin: f64 },
    #[error("grid point x = {0} lies outside the half plane x >= 0")]
    NegativeX(f64),
    #[error("grid is empty")]
    EmptyGrid,
    #[error("sector bounds need 0 < c1 <= c2, got ({0}, {1})")]
    Sector(f64, f64),
    #[error(transparent)]
    Airy(#[from] AiryError),
}

/// `|n|^{2/3}`.
#[inline]
pub fn abs_pow_two_thirds(n: f64) -> f64 {
    let c = n.abs().cbrt();
    c * c
}

/// `|n|^{4/3}`.
#[inline]
pub fn abs_pow_four_thirds(n: f64) -> f64 {
    let c = n.abs().cbrt();
    let c2 = c * c;
    c2 * c2
}

/// The phase `F = (η² + η^{4/3} t)^{1/2}` given `t = τ(ξ)`.
///
/// Both the eigenvalue lattice (with `t = t_m`) and the continuous symbol
/// (with `t = τ(ξ)`) go through this function.
#[inline]
pub fn phase_from_zero(t: f64, eta: f64) -> f64 {
    (eta * eta + abs_pow_four_thirds(eta) * t).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub m: usize,
    pub n: i64,
    pub lambda: f64,
    pub sqrt_lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BohrSommerfeldPoint {
    pub m: usize,
    pub n: i64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionPoint {
    pub h: f64,
    pub j: f64,
    pub i1: f64,
    pub i2: f64,
}

fn check_indices(m: usize, n: i64) -> Result<(), SpectrumError> {
    if m == 0 {
        return Err(SpectrumError::ZeroM);
    }
    if n == 0 {
        return Err(SpectrumError::ZeroN);
    }
    Ok(())
}

fn table_zero(zeros: &AiryZeroTable, m: usize) -> Result<f64, SpectrumError> {
    zeros.get(m).ok_or(SpectrumError::OutOfTable {
        m,
        len: zeros.len(),
    })
}

/// Builds the lattice point from an already known `t_m`.
pub fn spectral_point(m: usize, n: i64, t_m: f64) -> SpectralPoint {
    let eta = n.unsigned_abs() as f64;
    let sqrt_lambda = phase_from_zero(t_m, eta);
    SpectralPoint {
        m,
        n,
        lambda: eta * eta + abs_pow_four_thirds(eta) * t_m,
        sqrt_lambda,
    }
}

/// `λ(m,n) = n² + |n|^{4/3} t_m`.
pub fn eigenvalue(m: usize, n: i64, zeros: &AiryZeroTable) -> Result<SpectralPoint, SpectrumError> {
    check_indices(m, n)?;
    Ok(spectral_point(m, n, table_zero(zeros, m)?))
}

/// `Λ(m,n) = n² + (3π/2)^{2/3} m^{2/3} |n|^{4/3}`.
pub fn bohr_sommerfeld(m: usize, n: i64) -> Result<BohrSommerfeldPoint, SpectrumError> {
    check_indices(m, n)?;
    let eta = n.unsigned_abs() as f64;
    Ok(BohrSommerfeldPoint {
        m,
        n,
        big_lambda: eta * eta + airy::principal_seed(m) * abs_pow_four_thirds(eta),
    })
}

/// Action variables of the invariant torus with energy `H` and momentum `J`.
pub fn actions_from_energy(h: f64, j: f64) -> Result<ActionPoint, SpectrumError> {
    if !(h.is_finite() && j.is_finite()) || j == 0.0 || j.abs() >= h {
        return Err(SpectrumError::ActionDomain { h, j });
    }
    let gap = h * h - j * j;
    Ok(ActionPoint {
        h,
        j,
        i1: 4.0 / 3.0 * gap * gap.sqrt() / (j * j),
        i2: 2.0 * PI * j,
    })
}

/// `H² = I2²/4π² + (3 I1 I2² / 16π²)^{2/3}`.
pub fn energy_squared_from_actions(i1: f64, i2: f64) -> Result<f64, SpectrumError> {
    if !(i1.is_finite() && i2.is_finite()) || i1 <= 0.0 || i2 == 0.0 {
        return Err(SpectrumError::InverseActionDomain { i1, i2 });
    }
    let pi2 = PI * PI;
    Ok(i2 * i2 / (4.0 * pi2) + (3.0 * i1 * i2 * i2 / (16.0 * pi2)).powf(2.0 / 3.0))
}

/// Inverse of [`actions_from_energy`].
pub fn energy_from_actions(i1: f64, i2: f64) -> Result<ActionPoint, SpectrumError> {
    let h = energy_squared_from_actions(i1, i2)?.sqrt();
    Ok(ActionPoint {
        h,
        j: i2 / (2.0 * PI),
        i1,
        i2,
    })
}

/// `φ_{m,n}(x,y) = Ai(|n|^{2/3} x - t_m) e^{iny}`.
pub fn eigenfunction_eval(
    m: usize,
    n: i64,
    x: f64,
    y: f64,
    zeros: &AiryZeroTable,
) -> Result<Complex64, SpectrumError> {
    check_indices(m, n)?;
    if x < 0.0 {
        return Err(SpectrumError::NegativeX(x));
    }
    let t = table_zero(zeros, m)?;
    let eta = n.unsigned_abs() as f64;
    let amplitude = airy::airy_ai(abs_pow_two_thirds(eta) * x - t)?.ai;
    Ok(Complex64::from_polar(1.0, n as f64 * y) * amplitude)
}

/// Result of comparing the exact eigenfunction phase with the WKB phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WkbResidual {
    pub m: usize,
    pub n: i64,
    /// `sup |r(x) - shift|` over the grid.
    pub residual: f64,
    /// Constant shift minimizing the sup norm.
    pub shift: f64,
    /// Raw differences `r(x)` before the shift.
    pub raw: Vec<f64>,
}

/// Default distance, in units of `|n|^{2/3} x`, kept from the turning point.
pub const DEFAULT_CAUSTIC_MARGIN: f64 = 1.0;

/// Compares the Airy phase `θ((t_m - ν x)^{3/2})` of `φ_{m,n}` with the WKB
/// phase `(2/3)((3πm/2)^{2/3} - ν x)^{3/2}`, `ν = |n|^{2/3}`, on the
/// classically allowed side of the caustic.
pub fn wkb_phase_residual(
    m: usize,
    n: i64,
    x_grid: &[f64],
    zeros: &AiryZeroTable,
    caustic_margin: f64,
) -> Result<WkbResidual, SpectrumError> {
    check_indices(m, n)?;
    if x_grid.is_empty() {
        return Err(SpectrumError::EmptyGrid);
    }
    let t = table_zero(zeros, m)?;
    let seed = airy::principal_seed(m);
    let nu = abs_pow_two_thirds(n.unsigned_abs() as f64);
    let caustic = t / nu;
    let mut raw = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        if x < 0.0 {
            return Err(SpectrumError::NegativeX(x));
        }
        let z = t - nu * x;
        let z_wkb = seed - nu * x;
        if z < caustic_margin || z_wkb < caustic_margin {
            return Err(SpectrumError::CausticGrid {
                x,
                caustic,
                margin: caustic_margin / nu,
            });
        }
        let exact = airy::theta(z * z.sqrt())?;
        let wkb = 2.0 / 3.0 * z_wkb * z_wkb.sqrt();
        raw.push(exact - wkb);
    }
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(WkbResidual {
        m,
        n,
        residual: 0.5 * (hi - lo),
        shift: 0.5 * (hi + lo),
        raw,
    })
}

/// Number of zeros requested at a time when the table must grow.
const EXTENSION_CHUNK: usize = 256;

/// All `(m, n)` with `λ(m,n) ≤ E`, both signs of `n`, sorted by `λ`, then
/// `m`, then `n`. The zero table is extended on a private copy when needed.
pub fn enumerate_below(e: f64, zeros: &AiryZeroTable) -> Result<Vec<SpectralPoint>, SpectrumError> {
    let mut table: Cow<'_, AiryZeroTable> = Cow::Borrowed(zeros);
    let mut points = Vec::new();
    let mut m = 1;
    loop {
        if m > table.len() {
            let grown = table.extended(table.len() + EXTENSION_CHUNK)?;
            table = Cow::Owned(grown);
        }
        let t = table.get(m).expect("extended");
        // λ(m,1) = 1 + t_m is the smallest eigenvalue with this m.
        if 1.0 + t > e {
            break;
        }
        let mut n: i64 = 1;
        loop {
            let p = spectral_point(m, n, t);
            if p.lambda > e {
                break;
            }
            points.push(SpectralPoint { n: -n, ..p });
            points.push(p);
            n += 1;
        }
        m += 1;
    }
    points.sort_by(|a, b| {
        a.lambda
            .total_cmp(&b.lambda)
            .then(a.m.cmp(&b.m))
            .then(a.n.cmp(&b.n))
    });
    Ok(points)
}

/// Summary of `|√λ - √Λ|` over a sector `c1 ≤ n/m ≤ c2`, `m_min ≤ m ≤ m_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationStats {
    pub c1: f64,
    pub c2: f64,
    pub m_min: usize,
    pub m_max: usize,
    pub count: usize,
    pub max_deviation: f64,
    pub argmax_m: usize,
    pub argmax_n: i64,
    pub mean_deviation: f64,
}

pub fn sector_deviation(
    c1: f64,
    c2: f64,
    m_min: usize,
    m_max: usize,
    zeros: &AiryZeroTable,
) -> Result<DeviationStats, SpectrumError> {
    if !(c1 > 0.0 && c2 >= c1 && c2.is_finite()) {
        return Err(SpectrumError::Sector(c1, c2));
    }
    let m_min = m_min.max(1);
    let mut stats = DeviationStats {
        c1,
        c2,
        m_min,
        m_max,
        count: 0,
        max_deviation: 0.0,
        argmax_m: 0,
        argmax_n: 0,
        mean_deviation: 0.0,
    };
    let mut total = crate::summation::NeumaierSum::new();
    for m in m_min..=m_max {
        let t = table_zero(zeros, m)?;
        let n_lo = (c1 * m as f64).ceil().max(1.0) as i64;
        let n_hi = (c2 * m as f64).floor() as i64;
        for n in n_lo..=n_hi {
            let exact = spectral_point(m, n, t).sqrt_lambda;
            let bs = bohr_sommerfeld(m, n)?.big_lambda.sqrt();
            let dev = (exact - bs).abs();
            total.add(dev);
            stats.count += 1;
            if dev > stats.max_deviation {
                stats.max_deviation = dev;
                stats.argmax_m = m;
                stats.argmax_n = n;
            }
        }
    }
    if stats.count > 0 {
        stats.mean_deviation = total.total() / stats.count as f64;
    }
    Ok(stats)
}

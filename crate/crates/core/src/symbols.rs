//! Empirical symbol estimates for the Friedlander phase
//! `F(ξ,η) = (η² + η^{4/3} τ(ξ))^{1/2}` on the cones `Γ1, Γ2, Γ3`.
//!
//! Derivatives are central differences with steps `h = (1 + coordinate)·1e-3`,
//! Richardson-extrapolated from steps `2h` and `h`. Constants are fitted as the
//! largest normalized derivative over dyadic shells `2^s ≤ |ω| < 2^{s+1}` and
//! then validated on larger, held-out shells.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::airy::{tau, AiryError};
use crate::trace::cones::ConePartition;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("derivative order j + k = {0} exceeds 4")]
    Order(usize),
    #[error("stencil at ({xi}, {eta}) leaves the cone {cone}")]
    ConeBoundary { xi: f64, eta: f64, cone: SymbolCone },
    #[error("function vanishes identically on the fitting shells")]
    Degenerate,
    #[error("grid needs at least one fitting and one held-out shell inside 2^4..2^12")]
    Grid,
    #[error("cannot parse claim {0:?}; expected NAME:CONE:ALPHA,BETA")]
    Claim(String),
    #[error(transparent)]
    Airy(#[from] AiryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolCone {
    Gamma1,
    Gamma2,
    Gamma3,
}

impl fmt::Display for SymbolCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolCone::Gamma1 => "gamma1",
            SymbolCone::Gamma2 => "gamma2",
            SymbolCone::Gamma3 => "gamma3",
        })
    }
}

impl FromStr for SymbolCone {
    type Err = SymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gamma1" | "1" => Ok(SymbolCone::Gamma1),
            "gamma2" | "2" => Ok(SymbolCone::Gamma2),
            "gamma3" | "3" => Ok(SymbolCone::Gamma3),
            _ => Err(SymbolError::Claim(s.to_string())),
        }
    }
}

/// A cone shrunk by a relative margin so finite-difference stencils stay inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeRegion {
    pub cone: SymbolCone,
    pub partition: ConePartition,
    /// Ratio bounds on `ξ/η` are pulled inward by this factor.
    pub shrink: f64,
}

impl ConeRegion {
    pub fn new(cone: SymbolCone) -> Self {
        Self {
            cone,
            partition: ConePartition::default(),
            shrink: 1.02,
        }
    }

    /// Open interval of `ξ/η` covered, after shrinking.
    pub fn ratio_bounds(&self) -> (f64, f64) {
        let p = &self.partition;
        let (lo, hi) = match self.cone {
            SymbolCone::Gamma1 => (0.0, p.kappa1),
            SymbolCone::Gamma2 => (0.5 * p.kappa1, 2.0 * p.kappa2),
            SymbolCone::Gamma3 => (p.kappa2, f64::INFINITY),
        };
        (lo * self.shrink, hi / self.shrink)
    }

    /// Whether `(ξ, η)` lies in the unshrunk open cone with `ξ, η > 0`.
    pub fn contains(&self, xi: f64, eta: f64) -> bool {
        let j = match self.cone {
            SymbolCone::Gamma1 => 1,
            SymbolCone::Gamma2 => 2,
            SymbolCone::Gamma3 => 3,
        };
        xi > 0.0 && eta > 0.0 && self.partition.in_cone(j, xi, eta)
    }
}

/// Relative step factor.
pub const STEP_FACTOR: f64 = 1e-3;
/// Largest supported `j + k`.
pub const MAX_ORDER: usize = 4;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn central_difference(f: &dyn Fn(f64, f64) -> f64, j: usize, k: usize, xi: f64, eta: f64, hx: f64, hy: f64) -> f64 {
    let mut acc = 0.0;
    for a in 0..=j {
        let x = xi + (a as f64 - 0.5 * j as f64) * hx;
        let wa = binomial(j, a) * if (j - a) % 2 == 0 { 1.0 } else { -1.0 };
        for b in 0..=k {
            let y = eta + (b as f64 - 0.5 * k as f64) * hy;
            let wb = binomial(k, b) * if (k - b) % 2 == 0 { 1.0 } else { -1.0 };
            acc += wa * wb * f(x, y);
        }
    }
    acc / (hx.powi(j as i32) * hy.powi(k as i32))
}

/// `∂_ξ^j ∂_η^k f` at `(ξ, η)`. With a region, every stencil point (at the
/// coarse step, two steps beyond the stencil) must lie inside it.
pub fn finite_diff_derivative(
    f: &dyn Fn(f64, f64) -> f64,
    j: usize,
    k: usize,
    xi: f64,
    eta: f64,
    region: Option<&ConeRegion>,
) -> Result<f64, SymbolError> {
    if j + k > MAX_ORDER {
        return Err(SymbolError::Order(j + k));
    }
    let hx = (1.0 + xi.abs()) * STEP_FACTOR;
    let hy = (1.0 + eta.abs()) * STEP_FACTOR;
    if let Some(r) = region {
        let reach_x = (j as f64 + 2.0) * 2.0 * hx;
        let reach_y = (k as f64 + 2.0) * 2.0 * hy;
        for (dx, dy) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
            if !r.contains(xi + dx * reach_x, eta + dy * reach_y) {
                return Err(SymbolError::ConeBoundary { xi, eta, cone: r.cone });
            }
        }
    }
    if j + k == 0 {
        return Ok(f(xi, eta));
    }
    let coarse = central_difference(f, j, k, xi, eta, 2.0 * hx, 2.0 * hy);
    let fine = central_difference(f, j, k, xi, eta, hx, hy);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Principal symbol `F0 = (η² + (3πξ/2)^{2/3} η^{4/3})^{1/2}`.
pub fn principal_symbol(xi: f64, eta: f64) -> f64 {
    (eta * eta + (1.5 * PI * xi).cbrt().powi(2) * eta.cbrt().powi(4)).sqrt()
}

/// `F(ξ, η)` with `τ` from the phase-function inversion.
pub fn friedlander_symbol(xi: f64, eta: f64) -> f64 {
    let t = tau(xi).unwrap_or(f64::NAN);
    (eta * eta + eta.cbrt().powi(4) * t).sqrt()
}

/// `G = F - η`, evaluated as `η^{4/3} τ / (F + η)` to avoid cancellation.
pub fn g_symbol(xi: f64, eta: f64) -> f64 {
    let t = tau(xi).unwrap_or(f64::NAN);
    let e43 = eta.cbrt().powi(4);
    let f = (eta * eta + e43 * t).sqrt();
    e43 * t / (f + eta)
}

/// `∂_η G = ((2/3) η^{1/3} τ - G) / F`.
pub fn d_eta_g_symbol(xi: f64, eta: f64) -> f64 {
    let t = tau(xi).unwrap_or(f64::NAN);
    let e13 = eta.cbrt();
    let e43 = e13.powi(4);
    let f = (eta * eta + e43 * t).sqrt();
    let g = e43 * t / (f + eta);
    (2.0 / 3.0 * e13 * t - g) / f
}

/// `F - F0 = η^{4/3} (τ - τ0) / (F + F0)` with `τ0 = (3πξ/2)^{2/3}`.
pub fn remainder_symbol(xi: f64, eta: f64) -> f64 {
    let t = tau(xi).unwrap_or(f64::NAN);
    let t0 = (1.5 * PI * xi).cbrt().powi(2);
    let e43 = eta.cbrt().powi(4);
    let f = (eta * eta + e43 * t).sqrt();
    let f0 = (eta * eta + e43 * t0).sqrt();
    e43 * (t - t0) / (f + f0)
}

/// Dyadic sampling of a cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    /// Shell exponents `s` used to fit constants.
    pub fit_shells: Vec<u32>,
    /// Disjoint, larger shells used for validation.
    pub holdout_shells: Vec<u32>,
    pub radii_per_shell: usize,
    pub angles_per_shell: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            fit_shells: (4..=8).collect(),
            holdout_shells: (9..=12).collect(),
            radii_per_shell: 4,
            angles_per_shell: 12,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<(), SymbolError> {
        let ok = |s: &u32| (4..=12).contains(s);
        if self.fit_shells.is_empty()
            || self.holdout_shells.is_empty()
            || !self.fit_shells.iter().all(ok)
            || !self.holdout_shells.iter().all(ok)
            || self.fit_shells.iter().any(|s| self.holdout_shells.contains(s))
            || self.radii_per_shell == 0
            || self.angles_per_shell < 2
        {
            return Err(SymbolError::Grid);
        }
        Ok(())
    }

    /// Points `(ξ, η)` with `2^s ≤ |ω| < 2^{s+1}`, `ξ, η ≥ 1`, and `ξ/η`
    /// log-spaced over the shrunk cone.
    pub fn shell_points(&self, s: u32, region: &ConeRegion) -> Vec<(f64, f64)> {
        let base = 2f64.powi(s as i32);
        let (lo, hi) = region.ratio_bounds();
        let mut out = Vec::new();
        for r in 0..self.radii_per_shell {
            let radius = base * (1.0 + r as f64 / self.radii_per_shell as f64);
            // ξ ≥ 1 and η ≥ 1 bound the ratio on this circle.
            let floor = 1.0 / radius;
            let (rl, rh) = (lo.max(2.0 * floor), hi.min(radius / 2.0));
            if rl >= rh {
                continue;
            }
            for a in 0..self.angles_per_shell {
                let u = a as f64 / (self.angles_per_shell - 1) as f64;
                let rho = (rl.ln() + u * (rh.ln() - rl.ln())).exp();
                let eta = radius / (1.0 + rho * rho).sqrt();
                out.push((rho * eta, eta));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `|∂^j_ξ ∂^k_η a| ≤ C (1+ξ)^{α-j} (1+η)^{β-k}`.
    Product,
    /// `|∂^j_ξ ∂^k_η a| ≤ C (1+|ω|)^{α-j-k}`; `beta` is unused.
    Classical,
    /// `a ≥ c (1+ξ)^α (1+η)^β` with `c > 0`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolEstimate {
    pub kind: BoundKind,
    pub alpha: f64,
    pub beta: f64,
    pub order_j: usize,
    pub order_k: usize,
    pub cone: SymbolCone,
    /// Fitted over the fitting shells (max for upper bounds, min for lower).
    pub fitted_constant: f64,
    /// Worst held-out shell constant relative to the fit (inverted for lower
    /// bounds), so values above 1 are violations.
    pub max_violation_ratio: f64,
    /// Per-shell constants, fitting shells then held-out shells.
    pub shells: Vec<u32>,
    pub shell_constants: Vec<f64>,
    /// Held-out ratios in shell order.
    pub holdout_ratios: Vec<f64>,
    /// Largest over smallest shell constant stays below [`STABILITY_SPREAD`].
    pub stable: bool,
    pub passed: bool,
}

/// Passing threshold on held-out violation ratios.
pub const VIOLATION_TOLERANCE: f64 = 1.1;
/// Allowed spread of per-shell constants for a claim that passes.
pub const STABILITY_SPREAD: f64 = 1.2;
/// Derivative data below this fraction of the function's own scale is noise.
const DEGENERACY_FLOOR: f64 = 1e-8;
/// Difference quotients within this many rounding units of zero count as zero.
const ROUNDING_FACTOR: f64 = 1e3;

/// Rounding error of the Richardson difference quotient for a function value
/// of size `|f|` at `(ξ, η)`.
fn rounding_level(value: f64, j: usize, k: usize, xi: f64, eta: f64) -> f64 {
    let hx = (1.0 + xi.abs()) * STEP_FACTOR;
    let hy = (1.0 + eta.abs()) * STEP_FACTOR;
    1.5 * 2f64.powi((j + k) as i32) * f64::EPSILON * value.abs() / (hx.powi(j as i32) * hy.powi(k as i32))
}

fn weight(kind: BoundKind, alpha: f64, beta: f64, j: usize, k: usize, xi: f64, eta: f64) -> f64 {
    match kind {
        BoundKind::Product | BoundKind::Lower => {
            (1.0 + xi).powf(alpha - j as f64) * (1.0 + eta).powf(beta - k as f64)
        }
        BoundKind::Classical => (1.0 + xi.hypot(eta)).powf(alpha - (j + k) as f64),
    }
}

#[allow(clippy::too_many_arguments)]
fn estimate(
    f: &dyn Fn(f64, f64) -> f64,
    kind: BoundKind,
    alpha: f64,
    beta: f64,
    j: usize,
    k: usize,
    region: &ConeRegion,
    grid: &GridSpec,
    floor: f64,
) -> Result<SymbolEstimate, SymbolError> {
    let shell_constant = |s: u32| -> Result<f64, SymbolError> {
        let mut best = if kind == BoundKind::Lower { f64::INFINITY } else { 0.0 };
        for (xi, eta) in grid.shell_points(s, region) {
            let mut d = finite_diff_derivative(f, j, k, xi, eta, Some(region))?;
            if j + k > 0 && d.abs() <= ROUNDING_FACTOR * rounding_level(f(xi, eta), j, k, xi, eta) {
                d = 0.0;
            }
            let v = d / weight(kind, alpha, beta, j, k, xi, eta);
            best = if kind == BoundKind::Lower { best.min(v) } else { best.max(v.abs()) };
        }
        Ok(best)
    };
    let fit: Vec<f64> = grid.fit_shells.iter().map(|&s| shell_constant(s)).collect::<Result<_, _>>()?;
    let held: Vec<f64> = grid.holdout_shells.iter().map(|&s| shell_constant(s)).collect::<Result<_, _>>()?;

    let (fitted, ratios, stable) = if kind == BoundKind::Lower {
        let c = fit.iter().copied().fold(f64::INFINITY, f64::min);
        let ratios: Vec<f64> = held.iter().map(|&h| if h > 0.0 { c / h } else { f64::INFINITY }).collect();
        let all: Vec<f64> = fit.iter().chain(&held).copied().collect();
        let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = all.iter().copied().fold(0.0, f64::max);
        (c, ratios, lo > 0.0 && hi / lo <= STABILITY_SPREAD)
    } else {
        let c = fit.iter().copied().fold(0.0, f64::max);
        let denom = c.max(floor);
        let ratios: Vec<f64> = held.iter().map(|&h| h / denom).collect();
        let all: Vec<f64> = fit.iter().chain(&held).copied().collect();
        let hi = all.iter().copied().fold(0.0, f64::max);
        let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
        // Pure rounding noise carries no constant to be stable about.
        let stable = hi <= floor || hi / lo <= STABILITY_SPREAD;
        (c, ratios, stable)
    };
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let positive = kind != BoundKind::Lower || fitted > 0.0;
    Ok(SymbolEstimate {
        kind,
        alpha,
        beta,
        order_j: j,
        order_k: k,
        cone: region.cone,
        fitted_constant: fitted,
        max_violation_ratio: worst,
        shells: grid.fit_shells.iter().chain(&grid.holdout_shells).copied().collect(),
        shell_constants: fit.into_iter().chain(held).collect(),
        holdout_ratios: ratios,
        stable,
        passed: positive && worst <= VIOLATION_TOLERANCE,
    })
}

/// Scale of `f` itself on the fitting shells, in the `(0,0)` normalization.
fn noise_floor(
    f: &dyn Fn(f64, f64) -> f64,
    kind: BoundKind,
    alpha: f64,
    beta: f64,
    region: &ConeRegion,
    grid: &GridSpec,
) -> Result<f64, SymbolError> {
    let mut scale: f64 = 0.0;
    for &s in &grid.fit_shells {
        for (xi, eta) in grid.shell_points(s, region) {
            scale = scale.max((f(xi, eta) / weight(kind, alpha, beta, 0, 0, xi, eta)).abs());
        }
    }
    if scale == 0.0 {
        return Err(SymbolError::Degenerate);
    }
    Ok(DEGENERACY_FLOOR * scale)
}

/// Tests `f ∈ Σ^{α,β}` on the cone for all `j ≤ j_max`, `k ≤ k_max`.
pub fn check_sigma_bound(
    f: &dyn Fn(f64, f64) -> f64,
    alpha: f64,
    beta: f64,
    j_max: usize,
    k_max: usize,
    cone: SymbolCone,
    grid: &GridSpec,
) -> Result<Vec<SymbolEstimate>, SymbolError> {
    grid.validate()?;
    if j_max + k_max > MAX_ORDER {
        return Err(SymbolError::Order(j_max + k_max));
    }
    let region = ConeRegion::new(cone);
    let floor = noise_floor(f, BoundKind::Product, alpha, beta, &region, grid)?;
    let mut out = Vec::new();
    for j in 0..=j_max {
        for k in 0..=k_max {
            out.push(estimate(f, BoundKind::Product, alpha, beta, j, k, &region, grid, floor)?);
        }
    }
    Ok(out)
}

/// Tests `|∂^α f| ≤ C (1+|ω|)^{m-|α|}` for `|α| ≤ max_order`; one estimate
/// per multi-index.
pub fn check_classical_symbol(
    f: &dyn Fn(f64, f64) -> f64,
    m: f64,
    max_order: usize,
    cone: SymbolCone,
    grid: &GridSpec,
) -> Result<Vec<SymbolEstimate>, SymbolError> {
    grid.validate()?;
    if max_order > MAX_ORDER {
        return Err(SymbolError::Order(max_order));
    }
    let region = ConeRegion::new(cone);
    let floor = noise_floor(f, BoundKind::Classical, m, 0.0, &region, grid)?;
    let mut out = Vec::new();
    for order in 0..=max_order {
        for j in (0..=order).rev() {
            out.push(estimate(f, BoundKind::Classical, m, 0.0, j, order - j, &region, grid, floor)?);
        }
    }
    Ok(out)
}

/// Tests the ellipticity bound `f ≥ c (1+ξ)^α (1+η)^β`, `c > 0`.
pub fn check_lower_bound(
    f: &dyn Fn(f64, f64) -> f64,
    alpha: f64,
    beta: f64,
    cone: SymbolCone,
    grid: &GridSpec,
) -> Result<SymbolEstimate, SymbolError> {
    grid.validate()?;
    let region = ConeRegion::new(cone);
    estimate(f, BoundKind::Lower, alpha, beta, 0, 0, &region, grid, 0.0)
}

/// Functions a claim can name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymbolFunction {
    /// `F`
    F,
    /// `F0`
    F0,
    /// `G = F - η`
    G,
    /// `∂_η G`
    DEtaG,
    /// `F - F0`
    Remainder,
    /// `ξ`
    Xi,
}

impl SymbolFunction {
    pub fn eval(self, xi: f64, eta: f64) -> f64 {
        match self {
            SymbolFunction::F => friedlander_symbol(xi, eta),
            SymbolFunction::F0 => principal_symbol(xi, eta),
            SymbolFunction::G => g_symbol(xi, eta),
            SymbolFunction::DEtaG => d_eta_g_symbol(xi, eta),
            SymbolFunction::Remainder => remainder_symbol(xi, eta),
            SymbolFunction::Xi => xi,
        }
    }
}

impl FromStr for SymbolFunction {
    type Err = SymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "F" => Ok(SymbolFunction::F),
            "F0" => Ok(SymbolFunction::F0),
            "G" => Ok(SymbolFunction::G),
            "dG" | "DG" | "dEtaG" => Ok(SymbolFunction::DEtaG),
            "F-F0" | "R" => Ok(SymbolFunction::Remainder),
            "xi" => Ok(SymbolFunction::Xi),
            _ => Err(SymbolError::Claim(s.to_string())),
        }
    }
}

/// `NAME:CONE:ALPHA,BETA` (product bound), `NAME:CONE:cl:M` (classical),
/// or `NAME:CONE:lower:ALPHA,BETA`. Exponents accept fractions like `2/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Claim {
    pub function: SymbolFunction,
    pub cone: SymbolCone,
    pub kind: BoundKind,
    pub alpha: f64,
    pub beta: f64,
}

fn parse_exponent(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => s.parse().ok(),
    }
}

impl FromStr for Claim {
    type Err = SymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SymbolError::Claim(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        let (function, cone) = match parts.as_slice() {
            [f, c, ..] => (f.parse().map_err(|_| bad())?, c.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        let pair = |p: &str| -> Result<(f64, f64), SymbolError> {
            let (a, b) = p.split_once(',').ok_or_else(bad)?;
            Ok((parse_exponent(a).ok_or_else(bad)?, parse_exponent(b).ok_or_else(bad)?))
        };
        let (kind, alpha, beta) = match parts.as_slice() {
            [_, _, "cl", m] => (BoundKind::Classical, parse_exponent(m).ok_or_else(bad)?, 0.0),
            [_, _, "lower", p] => {
                let (a, b) = pair(p)?;
                (BoundKind::Lower, a, b)
            }
            [_, _, p] => {
                let (a, b) = pair(p)?;
                (BoundKind::Product, a, b)
            }
            _ => return Err(bad()),
        };
        Ok(Claim {
            function,
            cone,
            kind,
            alpha,
            beta,
        })
    }
}

impl Claim {
    /// Runs the claim; `j_max`, `k_max` bound the product orders and
    /// `j_max + k_max` the classical order.
    pub fn check(&self, j_max: usize, k_max: usize, grid: &GridSpec) -> Result<Vec<SymbolEstimate>, SymbolError> {
        let f = |xi: f64, eta: f64| self.function.eval(xi, eta);
        match self.kind {
            BoundKind::Product => check_sigma_bound(&f, self.alpha, self.beta, j_max, k_max, self.cone, grid),
            BoundKind::Classical => check_classical_symbol(&f, self.alpha, (j_max + k_max).min(2), self.cone, grid),
            BoundKind::Lower => check_lower_bound(&f, self.alpha, self.beta, self.cone, grid).map(|e| vec![e]),
        }
    }
}

/// A claim together with whether it is expected to hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteEntry {
    pub label: &'static str,
    pub claim: Claim,
    pub j_max: usize,
    pub k_max: usize,
    pub expect_pass: bool,
}

/// The symbol claims for `F` with one wrong-exponent control per cone.
pub fn standard_suite() -> Vec<SuiteEntry> {
    let claim = |s: &str| s.parse::<Claim>().expect("suite claims parse");
    vec![
        SuiteEntry { label: "G in Σ^{2/3,1/3}(Γ1)", claim: claim("G:gamma1:2/3,1/3"), j_max: 2, k_max: 2, expect_pass: true },
        SuiteEntry { label: "∂ηG elliptic in Σ^{2/3,-2/3}(Γ1)", claim: claim("dG:gamma1:lower:2/3,-2/3"), j_max: 0, k_max: 0, expect_pass: true },
        SuiteEntry { label: "∂ηG in Σ^{2/3,-2/3}(Γ1)", claim: claim("dG:gamma1:2/3,-2/3"), j_max: 1, k_max: 1, expect_pass: true },
        SuiteEntry { label: "F in S^1_cl(Γ2)", claim: claim("F:gamma2:cl:1"), j_max: 1, k_max: 1, expect_pass: true },
        SuiteEntry { label: "F - F0 in S^0(Γ2)", claim: claim("F-F0:gamma2:cl:0"), j_max: 1, k_max: 1, expect_pass: true },
        SuiteEntry { label: "F in Σ^{1/3,2/3}(Γ3)", claim: claim("F:gamma3:1/3,2/3"), j_max: 2, k_max: 2, expect_pass: true },
        SuiteEntry { label: "control: G in Σ^{0,0}(Γ1)", claim: claim("G:gamma1:0,0"), j_max: 2, k_max: 2, expect_pass: false },
        SuiteEntry { label: "control: F in S^0_cl(Γ2)", claim: claim("F:gamma2:cl:0"), j_max: 1, k_max: 1, expect_pass: false },
        SuiteEntry { label: "control: F in Σ^{1/3,1/3}(Γ3)", claim: claim("F:gamma3:1/3,1/3"), j_max: 2, k_max: 2, expect_pass: false },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_limit() {
        assert_eq!(
            finite_diff_derivative(&|x, y| x * y, 3, 2, 5.0, 5.0, None),
            Err(SymbolError::Order(5))
        );
    }

    #[test]
    fn claims_parse() {
        let c: Claim = "G:gamma1:2/3,1/3".parse().unwrap();
        assert_eq!(c.function, SymbolFunction::G);
        assert_eq!(c.kind, BoundKind::Product);
        assert!((c.alpha - 2.0 / 3.0).abs() < 1e-15);
        let c: Claim = "F:gamma2:cl:1".parse().unwrap();
        assert_eq!((c.kind, c.alpha), (BoundKind::Classical, 1.0));
        assert!("F:gamma4:1,1".parse::<Claim>().is_err());
        assert!("F:gamma1".parse::<Claim>().is_err());
        assert!("H:gamma1:1,1".parse::<Claim>().is_err());
    }

    #[test]
    fn shell_points_inside_cone() {
        let grid = GridSpec::default();
        for cone in [SymbolCone::Gamma1, SymbolCone::Gamma2, SymbolCone::Gamma3] {
            let region = ConeRegion::new(cone);
            for s in 4..=12 {
                let pts = grid.shell_points(s, &region);
                assert!(!pts.is_empty());
                for (xi, eta) in pts {
                    let r = xi.hypot(eta);
                    assert!(r >= 2f64.powi(s as i32) * (1.0 - 1e-12) && r < 2f64.powi(s as i32 + 1));
                    assert!(region.contains(xi, eta) && xi >= 1.0 && eta >= 1.0);
                }
            }
        }
    }
}

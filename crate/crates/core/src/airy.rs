//! The Airy function `Ai` on the real line, its phase function `θ`, the symbol
//! `τ` that interpolates the negative zeros, and refined zero tables.
//!
//! `Ai` is evaluated by exact Taylor propagation of the Airy ODE `y'' = x y`
//! from a table of nodes on `[-10, 9]`, and by the classical asymptotic
//! expansions outside that interval:
//!
//! ```text
//! Ai(z)  ~ e^{-ζ} / (2√π z^{1/4}) Σ (-1)^k u_k ζ^{-k},                 z > 9
//! Ai(-z) ~ (cos(ζ-π/4) P(ζ) + sin(ζ-π/4) Q(ζ)) / (√π z^{1/4}),          z > 10
//! ```
//!
//! with `ζ = (2/3) z^{3/2}`. Nodes with `x < 0` are produced by stepping away
//! from the origin (the oscillatory direction is stable), nodes with `x > 2.5`
//! by stepping down from the asymptotic value at `x = 9` (the decaying
//! solution is stable in that direction).

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

/// `Ai(0) = 3^{-2/3} / Γ(2/3)`.
pub const AI_AT_ZERO: f64 = 0.355_028_053_887_817_24;
/// `Ai'(0) = -3^{-1/3} / Γ(1/3)`.
pub const AI_PRIME_AT_ZERO: f64 = -0.258_819_403_792_806_8;

/// Default tolerance on `|Ai(-t_m)|` for refined zeros.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

const SQRT_PI: f64 = 1.772_453_850_905_516;
const NODE_LO: f64 = -10.0;
const NODE_HI: f64 = 9.0;
const NODE_STEP: f64 = 0.25;
const MACLAURIN_RADIUS: f64 = 2.5;
const MAX_NEWTON_ITERS: usize = 80;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AiryError {
    #[error("argument must be finite, got {0}")]
    NonFinite(f64),
    #[error("θ(s) is defined for s > 1/4, got s = {0}")]
    ThetaDomain(f64),
    #[error("τ(ξ) is defined for ξ > {min}, got ξ = {xi}")]
    TauDomain { xi: f64, min: f64 },
    #[error("zero index must be at least 1")]
    ZeroIndex,
    #[error("zero table must hold at least one entry")]
    EmptyTable,
    #[error(
        "refinement of t_{m} did not converge after {iterations} iterations \
         (|Ai(-t)| = {residual:e}, bracket [{lo}, {hi}])"
    )]
    NoConvergence {
        m: usize,
        iterations: usize,
        residual: f64,
        lo: f64,
        hi: f64,
    },
    #[error("inversion of θ did not converge for target {0}")]
    InversionFailed(f64),
    #[error("zero table entry m = {m} fails verification: {reason}")]
    CorruptEntry { m: usize, reason: String },
}

/// `Ai(x)` and `Ai'(x)` with an estimate of the absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AiryValue {
    pub argument: f64,
    pub ai: f64,
    pub ai_prime: f64,
    pub est_abs_error: f64,
    /// Set when `Ai(x)` is below the smallest normal binary64 number; `ai`
    /// and `ai_prime` are then returned as zero.
    pub underflow: bool,
}

/// Evaluates `Ai(x)` and `Ai'(x)`.
pub fn airy_ai(x: f64) -> Result<AiryValue, AiryError> {
    if !x.is_finite() {
        return Err(AiryError::NonFinite(x));
    }
    let value = if x > NODE_HI {
        asymptotic_positive(x)
    } else if x < NODE_LO {
        asymptotic_negative(-x)
    } else {
        from_nodes(x)
    };
    Ok(value)
}

/// Shorthand for callers that only need the values and already know `x` is
/// finite.
pub(crate) fn ai_pair(x: f64) -> (f64, f64) {
    match airy_ai(x) {
        Ok(v) => (v.ai, v.ai_prime),
        Err(_) => (f64::NAN, f64::NAN),
    }
}

struct Propagated {
    y: f64,
    dy: f64,
    err_y: f64,
    err_dy: f64,
}

/// Sums the Taylor series of the Airy ODE solution through `(x0, y0, dy0)` at
/// `x0 + h`. With `b_k = a_k h^k` the ODE gives
/// `b_{k+2} = (x0 h² b_k + h³ b_{k-1}) / ((k+1)(k+2))`.
fn taylor_step(x0: f64, y0: f64, dy0: f64, h: f64) -> Propagated {
    if h == 0.0 {
        return Propagated {
            y: y0,
            dy: dy0,
            err_y: 0.0,
            err_dy: 0.0,
        };
    }
    let h2 = h * h;
    let h3 = h2 * h;
    let mut prev = 0.0; // b_{k-1}
    let mut cur = y0; // b_k
    let mut next = dy0 * h; // b_{k+1}
    let mut y = cur + next;
    let mut dy_scaled = next; // Σ k b_k
    let mut abs_y = cur.abs() + next.abs();
    let mut abs_dy = next.abs();
    let mut small_run = 0;
    for k in 0..600usize {
        let kf = k as f64;
        let b = (x0 * h2 * cur + h3 * prev) / ((kf + 1.0) * (kf + 2.0));
        prev = cur;
        cur = next;
        next = b;
        y += b;
        dy_scaled += (kf + 2.0) * b;
        abs_y += b.abs();
        abs_dy += (kf + 2.0) * b.abs();
        if (kf + 2.0) * b.abs() <= 1e-18 * abs_dy.max(abs_y) {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    Propagated {
        y,
        dy: dy_scaled / h,
        err_y: 4.0 * f64::EPSILON * abs_y,
        err_dy: 4.0 * f64::EPSILON * abs_dy / h.abs(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    x: f64,
    ai: f64,
    ai_prime: f64,
    err: f64,
}

fn nodes() -> &'static [Node] {
    static NODES: OnceLock<Vec<Node>> = OnceLock::new();
    NODES.get_or_init(build_nodes)
}

fn node_x(i: usize) -> f64 {
    NODE_LO + i as f64 * NODE_STEP
}

fn build_nodes() -> Vec<Node> {
    let count = ((NODE_HI - NODE_LO) / NODE_STEP).round() as usize + 1;
    let mut out: Vec<Option<Node>> = vec![None; count];

    // Directly from the Maclaurin series near the origin.
    for (i, slot) in out.iter_mut().enumerate() {
        let x = node_x(i);
        if x.abs() <= MACLAURIN_RADIUS {
            let p = taylor_step(0.0, AI_AT_ZERO, AI_PRIME_AT_ZERO, x);
            *slot = Some(Node {
                x,
                ai: p.y,
                ai_prime: p.dy,
                err: p.err_y.max(p.err_dy) + 2.0 * f64::EPSILON,
            });
        }
    }
    // Oscillatory side: step away from the origin.
    let first_inner = out.iter().position(|n| n.is_some()).expect("inner nodes");
    for i in (0..first_inner).rev() {
        let from = out[i + 1].expect("filled");
        let x = node_x(i);
        let p = taylor_step(from.x, from.ai, from.ai_prime, x - from.x);
        out[i] = Some(Node {
            x,
            ai: p.y,
            ai_prime: p.dy,
            err: from.err + p.err_y.max(p.err_dy),
        });
    }
    // Decaying side: step down from the asymptotic value at the top node.
    let last_inner = out.iter().rposition(|n| n.is_some()).expect("inner nodes");
    let top = count - 1;
    let start = asymptotic_positive(node_x(top));
    out[top] = Some(Node {
        x: node_x(top),
        ai: start.ai,
        ai_prime: start.ai_prime,
        err: start.est_abs_error,
    });
    for i in (last_inner + 1..top).rev() {
        let from = out[i + 1].expect("filled");
        let x = node_x(i);
        let p = taylor_step(from.x, from.ai, from.ai_prime, x - from.x);
        let growth = (NODE_STEP * x.max(0.0).sqrt()).exp();
        out[i] = Some(Node {
            x,
            ai: p.y,
            ai_prime: p.dy,
            err: from.err * growth + p.err_y.max(p.err_dy),
        });
    }
    out.into_iter().map(|n| n.expect("all nodes filled")).collect()
}

fn from_nodes(x: f64) -> AiryValue {
    let table = nodes();
    let i = (((x - NODE_LO) / NODE_STEP).round() as usize).min(table.len() - 1);
    let node = table[i];
    let p = taylor_step(node.x, node.ai, node.ai_prime, x - node.x);
    let growth = if x > 0.0 {
        ((x - node.x).abs() * x.sqrt()).exp()
    } else {
        1.0
    };
    AiryValue {
        argument: x,
        ai: p.y,
        ai_prime: p.dy,
        est_abs_error: node.err * growth + p.err_y.max(p.err_dy),
        underflow: false,
    }
}

/// Ratio `u_k / u_{k-1}` of the coefficients of the Airy asymptotic series.
#[inline]
fn u_ratio(k: usize) -> f64 {
    let k = k as f64;
    (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k)
}

/// `v_k = -(6k+1)/(6k-1) u_k`.
#[inline]
fn v_factor(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        let k = k as f64;
        -(6.0 * k + 1.0) / (6.0 * k - 1.0)
    }
}

/// Terms `u_k ζ^{-k}` until they drop below double precision or start to
/// grow. Returns the sums `Σ s_k u_k ζ^{-k}` and `Σ s_k v_k ζ^{-k}` for the
/// caller-provided sign pattern, together with the last included term.
fn asymptotic_terms(zeta: f64, mut visit: impl FnMut(usize, f64, f64)) -> f64 {
    let mut term = 1.0;
    visit(0, 1.0, 1.0);
    let mut last = 1.0_f64;
    for k in 1..200 {
        let next = term * u_ratio(k) / zeta;
        if next.abs() > last.abs() || next.abs() < 1e-18 {
            return next.abs();
        }
        term = next;
        last = next;
        visit(k, term, term * v_factor(k));
    }
    last.abs()
}

fn asymptotic_positive(x: f64) -> AiryValue {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let mut su = 0.0;
    let mut sv = 0.0;
    let tail = asymptotic_terms(zeta, |k, u, v| {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        su += sign * u;
        sv += sign * v;
    });
    let quarter = x.powf(0.25);
    let log_ai = -zeta - (2.0 * SQRT_PI).ln() - quarter.ln() + su.ln();
    if log_ai < f64::MIN_POSITIVE.ln() {
        return AiryValue {
            argument: x,
            ai: 0.0,
            ai_prime: 0.0,
            est_abs_error: f64::MIN_POSITIVE,
            underflow: true,
        };
    }
    let pref = (-zeta).exp() / (2.0 * SQRT_PI);
    let ai = pref / quarter * su;
    let ai_prime = -pref * quarter * sv;
    AiryValue {
        argument: x,
        ai,
        ai_prime,
        est_abs_error: (tail + 4.0 * f64::EPSILON * (1.0 + zeta)) * ai.abs().max(ai_prime.abs()),
        underflow: false,
    }
}

/// Modulus/phase series for the oscillatory region, `ζ = (2/3) z^{3/2}`.
#[derive(Debug, Clone, Copy)]
struct OscillatorySeries {
    p: f64,
    q: f64,
    r: f64,
    s: f64,
    tail: f64,
}

fn oscillatory_series(zeta: f64) -> OscillatorySeries {
    let (mut p, mut q, mut r, mut s) = (0.0, 0.0, 0.0, 0.0);
    let tail = asymptotic_terms(zeta, |k, u, v| {
        // Even k feed P, R with sign (-1)^{k/2}; odd k feed Q, S with
        // sign (-1)^{(k-1)/2}.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * u;
            r += sign * v;
        } else {
            q += sign * u;
            s += sign * v;
        }
    });
    OscillatorySeries { p, q, r, s, tail }
}

fn asymptotic_negative(z: f64) -> AiryValue {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let series = oscillatory_series(zeta);
    let (sin_phi, cos_phi) = (zeta - FRAC_PI_4).sin_cos();
    let quarter = z.powf(0.25);
    let ai = (cos_phi * series.p + sin_phi * series.q) / (SQRT_PI * quarter);
    let ai_prime = quarter / SQRT_PI * (sin_phi * series.r - cos_phi * series.s);
    // Rounding of the large phase dominates once ζ is big.
    let phase_err = 2.0 * f64::EPSILON * zeta;
    AiryValue {
        argument: -z,
        ai,
        ai_prime,
        est_abs_error: (series.tail + phase_err + 4.0 * f64::EPSILON) * quarter / SQRT_PI,
        underflow: false,
    }
}

// ---------------------------------------------------------------------------
// Phase function θ and the zero symbol τ.

/// The argument `θ(s)` of `f(s) = i s^{1/3} Ai(-s^{2/3}) - Ai'(-s^{2/3})`,
/// continued as the increasing branch with `0 < θ < π` before the first zero,
/// so that `θ(t_m^{3/2}) = mπ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseFunction {
    /// `θ(1/4)`.
    pub branch_base: f64,
}

impl Default for PhaseFunction {
    fn default() -> Self {
        Self::new()
    }
}

impl PhaseFunction {
    pub fn new() -> Self {
        Self {
            branch_base: theta_unchecked(0.25),
        }
    }

    pub fn theta(&self, s: f64) -> Result<f64, AiryError> {
        theta(s)
    }

    pub fn theta_prime(&self, s: f64) -> Result<f64, AiryError> {
        theta_prime(s)
    }

    pub fn inverse(&self, target: f64) -> Result<f64, AiryError> {
        theta_inverse(target)
    }

    pub fn tau(&self, xi: f64) -> Result<f64, AiryError> {
        tau(xi)
    }
}

fn two_thirds_power(s: f64) -> f64 {
    let c = s.cbrt();
    c * c
}

/// `z^{2/3}` above which θ is taken from the asymptotic modulus/phase series.
const THETA_ASYMPTOTIC_Z: f64 = 10.0;

fn theta_unchecked(s: f64) -> f64 {
    let z = two_thirds_power(s);
    let reference = 2.0 * s / 3.0 + FRAC_PI_4;
    if z > THETA_ASYMPTOTIC_Z {
        // f ∝ (cos χ R + sin χ S) + i (sin χ P - cos χ Q),  χ = 2s/3 + π/4.
        let series = oscillatory_series(2.0 * s / 3.0);
        let (sin_chi, cos_chi) = reference.sin_cos();
        let re = cos_chi * series.r + sin_chi * series.s;
        let im = sin_chi * series.p - cos_chi * series.q;
        let delta = (cos_chi * im - sin_chi * re).atan2(cos_chi * re + sin_chi * im);
        return reference + delta;
    }
    let (a, b) = ai_pair(-z);
    let principal = (s.cbrt() * a).atan2(-b);
    // The remainder θ - (2s/3 + π/4) stays well inside (-π/2, π/2) for
    // s ≥ 1/4, which fixes the winding number.
    let turns = ((reference - principal) / (2.0 * PI)).round();
    principal + 2.0 * PI * turns
}

/// `θ(s)` for `s > 1/4`.
pub fn theta(s: f64) -> Result<f64, AiryError> {
    if !s.is_finite() {
        return Err(AiryError::NonFinite(s));
    }
    if s <= 0.25 {
        return Err(AiryError::ThetaDomain(s));
    }
    Ok(theta_unchecked(s))
}

/// `θ'(s) = (2 s^{2/3} a² + 2 b² - s^{-2/3} a b) / (3 |f|²)` with
/// `a = Ai(-s^{2/3})`, `b = Ai'(-s^{2/3})`, `|f|² = s^{2/3} a² + b²`.
pub fn theta_prime(s: f64) -> Result<f64, AiryError> {
    if !s.is_finite() {
        return Err(AiryError::NonFinite(s));
    }
    if s <= 0.25 {
        return Err(AiryError::ThetaDomain(s));
    }
    Ok(theta_prime_unchecked(s))
}

fn theta_prime_unchecked(s: f64) -> f64 {
    let z = two_thirds_power(s);
    let (a, b) = ai_pair(-z);
    let modulus_sq = z * a * a + b * b;
    (2.0 * z * a * a + 2.0 * b * b - a * b / z) / (3.0 * modulus_sq)
}

/// Solves `θ(s) = target` for `s > 1/4`.
pub fn theta_inverse(target: f64) -> Result<f64, AiryError> {
    if !target.is_finite() {
        return Err(AiryError::NonFinite(target));
    }
    let base = theta_unchecked(0.25);
    if target <= base {
        return Err(AiryError::TauDomain {
            xi: target / PI,
            min: base / PI,
        });
    }
    let residual = |s: f64| theta_unchecked(s) - target;

    let seed = (1.5 * (target - FRAC_PI_4)).max(0.25 + 1e-9);
    let mut lo = (seed - 2.0).max(0.25);
    let mut hi = seed + 2.0;
    while lo > 0.25 && residual(lo) > 0.0 {
        lo = (lo - 4.0).max(0.25);
    }
    while residual(hi) < 0.0 {
        hi += 4.0;
    }
    let mut s = seed.clamp(lo, hi);
    for _ in 0..200 {
        let r = residual(s);
        if r == 0.0 {
            return Ok(s);
        }
        if r < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let slope = theta_prime_unchecked(s.max(0.25 + 1e-12));
        let mut next = s - r / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= 2.0 * f64::EPSILON * s || hi - lo <= 2.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        s = next;
    }
    Err(AiryError::InversionFailed(target))
}

/// `τ(ξ) = [θ^{-1}(πξ)]^{2/3}`, the symbol with `τ(m) = t_m`.
pub fn tau(xi: f64) -> Result<f64, AiryError> {
    let s = theta_inverse(PI * xi).map_err(|e| match e {
        AiryError::TauDomain { min, .. } => AiryError::TauDomain { xi, min },
        other => other,
    })?;
    Ok(two_thirds_power(s))
}

/// Smallest `ξ` for which `τ(ξ)` is defined.
pub fn tau_domain_start() -> f64 {
    theta_unchecked(0.25) / PI
}

// ---------------------------------------------------------------------------
// Zeros.

/// Principal-symbol seed `(3πm/2)^{2/3}` for `t_m`.
pub fn principal_seed(m: usize) -> f64 {
    two_thirds_power(1.5 * PI * m as f64)
}

/// Large-`m` expansion `t_m = T(3π(4m-1)/8)`,
/// `T(t) = t^{2/3} (1 + 5/48 t^{-2} - 5/36 t^{-4} + ...)`.
pub fn asymptotic_zero(m: usize) -> f64 {
    const COEFFS: [f64; 6] = [
        1.0,
        5.0 / 48.0,
        -5.0 / 36.0,
        77125.0 / 82944.0,
        -108056875.0 / 6967296.0,
        162375596875.0 / 334430208.0,
    ];
    let t = 3.0 * PI * (4.0 * m as f64 - 1.0) / 8.0;
    let w = 1.0 / (t * t);
    let mut series = 0.0;
    for c in COEFFS.iter().rev() {
        series = series * w + c;
    }
    two_thirds_power(t) * series
}

/// A refined zero together with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinedZero {
    pub m: usize,
    pub t: f64,
    pub seed: f64,
    pub residual: f64,
    pub iterations: usize,
}

fn ulp(x: f64) -> f64 {
    let next = f64::from_bits(x.to_bits() + 1);
    next - x
}

/// Refines `t_m` by safeguarded Newton on `Ai(-t)`, starting from the
/// principal seed inside a sign-change bracket.
pub fn refine_zero(m: usize, tol: f64) -> Result<RefinedZero, AiryError> {
    if m == 0 {
        return Err(AiryError::ZeroIndex);
    }
    let seed = principal_seed(m);
    let width = (m as f64).cbrt().recip();
    // Sign of Ai(-t) just below t_m is (-1)^{m-1}.
    let below = if m % 2 == 1 { 1.0 } else { -1.0 };
    let g = |t: f64| ai_pair(-t);

    let mut lo = seed - 0.6 * width;
    let mut hi = seed + 0.05 * width;
    let mut guard = 0;
    while g(lo).0 * below <= 0.0 && guard < 50 {
        lo -= 0.1 * width;
        guard += 1;
    }
    while g(hi).0 * below >= 0.0 && guard < 100 {
        hi += 0.1 * width;
        guard += 1;
    }

    let mut t = seed.clamp(lo, hi);
    let mut iterations = 0;
    loop {
        iterations += 1;
        let (a, b) = g(t);
        if a == 0.0 {
            break;
        }
        if a * below > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        // d/dt Ai(-t) = -Ai'(-t)
        let mut next = t + a / b;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - t).abs();
        t = next;
        if step <= 2.0 * ulp(t) || hi - lo <= 2.0 * ulp(hi) {
            break;
        }
        if iterations >= MAX_NEWTON_ITERS {
            let (a, _) = g(t);
            return Err(AiryError::NoConvergence {
                m,
                iterations,
                residual: a.abs(),
                lo,
                hi,
            });
        }
    }
    let value = ai_at_negative(t);
    let residual = value.ai.abs();
    if !(residual <= zero_tolerance(t, &value, tol)) {
        return Err(AiryError::NoConvergence {
            m,
            iterations,
            residual,
            lo,
            hi,
        });
    }
    Ok(RefinedZero {
        m,
        t,
        seed,
        residual,
        iterations,
    })
}

/// Tolerance actually attainable for `|Ai(-t)|` in binary64: the requested
/// tolerance, or four ulps of `t` times the slope plus twice the evaluation
/// error, whichever is larger.
fn zero_tolerance(t: f64, value: &AiryValue, tol: f64) -> f64 {
    tol.max(4.0 * value.ai_prime.abs() * ulp(t) + 2.0 * value.est_abs_error)
}

fn ai_at_negative(t: f64) -> AiryValue {
    airy_ai(-t).unwrap_or(AiryValue {
        argument: -t,
        ai: f64::NAN,
        ai_prime: f64::NAN,
        est_abs_error: f64::INFINITY,
        underflow: false,
    })
}

/// `t_m` refined to the default tolerance.
pub fn airy_zero(m: usize) -> Result<f64, AiryError> {
    refine_zero(m, DEFAULT_ZERO_TOL).map(|z| z.t)
}

/// Refined zeros `t_1 < t_2 < ... < t_M`, immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AiryZeroTable {
    zeros: Vec<f64>,
    residuals: Vec<f64>,
    refinement_tol: f64,
}

/// Builds a table of the first `max_m` zeros.
pub fn zero_table(max_m: usize) -> Result<AiryZeroTable, AiryError> {
    AiryZeroTable::new(max_m)
}

impl AiryZeroTable {
    pub fn new(max_m: usize) -> Result<Self, AiryError> {
        Self::with_tolerance(max_m, DEFAULT_ZERO_TOL)
    }

    pub fn with_tolerance(max_m: usize, refinement_tol: f64) -> Result<Self, AiryError> {
        if max_m == 0 {
            return Err(AiryError::EmptyTable);
        }
        let mut table = Self {
            zeros: Vec::with_capacity(max_m),
            residuals: Vec::with_capacity(max_m),
            refinement_tol,
        };
        table.push_through(max_m)?;
        Ok(table)
    }

    fn push_through(&mut self, max_m: usize) -> Result<(), AiryError> {
        for m in self.zeros.len() + 1..=max_m {
            let z = refine_zero(m, self.refinement_tol)?;
            self.zeros.push(z.t);
            self.residuals.push(z.residual);
        }
        Ok(())
    }

    /// Rebuilds a table from stored zeros, re-verifying every entry.
    pub fn from_zeros(zeros: Vec<f64>, refinement_tol: f64) -> Result<Self, AiryError> {
        if zeros.is_empty() {
            return Err(AiryError::EmptyTable);
        }
        let mut residuals = Vec::with_capacity(zeros.len());
        let mut previous = 0.0;
        for (i, &t) in zeros.iter().enumerate() {
            let m = i + 1;
            if !(t > previous) {
                return Err(AiryError::CorruptEntry {
                    m,
                    reason: format!("not increasing ({t} after {previous})"),
                });
            }
            let value = ai_at_negative(t);
            let a = value.ai;
            if !(a.abs() <= zero_tolerance(t, &value, refinement_tol)) {
                return Err(AiryError::CorruptEntry {
                    m,
                    reason: format!("|Ai(-t)| = {:e}", a.abs()),
                });
            }
            if (t - principal_seed(m)).abs() > 0.5 * (m as f64).cbrt().recip() {
                return Err(AiryError::CorruptEntry {
                    m,
                    reason: "outside the principal-symbol band".into(),
                });
            }
            residuals.push(a.abs());
            previous = t;
        }
        Ok(Self {
            zeros,
            residuals,
            refinement_tol,
        })
    }

    /// A copy of this table holding at least `max_m` zeros.
    pub fn extended(&self, max_m: usize) -> Result<Self, AiryError> {
        let mut out = self.clone();
        out.push_through(max_m)?;
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn refinement_tol(&self) -> f64 {
        self.refinement_tol
    }

    /// `t_m`, 1-based.
    pub fn get(&self, m: usize) -> Option<f64> {
        m.checked_sub(1).and_then(|i| self.zeros.get(i).copied())
    }

    pub fn residual(&self, m: usize) -> Option<f64> {
        m.checked_sub(1).and_then(|i| self.residuals.get(i).copied())
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    /// `t_m` from the table, or from [`asymptotic_zero`] past its end.
    pub fn zero_or_asymptotic(&self, m: usize) -> f64 {
        self.get(m).unwrap_or_else(|| asymptotic_zero(m))
    }
}

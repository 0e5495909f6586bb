//! Billiard flow of `dx² + (1+x)^{-1} dy²` on `x ≥ 0`, closed geodesics and the
//! length spectrum.
//!
//! On the unit level `ξ² + (1+x)η² = 1` the flow is
//! `ẋ = ξ, ẏ = (1+x)η, ξ̇ = -η²/2, η̇ = 0`, with specular reflection
//! `ξ → -ξ` at `x = 0`. Between bounces the arc is polynomial in `t`, so the
//! production paths use the closed form; the Runge–Kutta integrator exists to
//! cross-check it.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesicError {
    #[error("launch point must lie on the boundary x = 0, got x = {0}")]
    NotOnBoundary(f64),
    #[error("launch must point into the domain (ξ > 0), got ξ = {0}")]
    NotInward(f64),
    #[error("η = 0: the ray escapes to x = ∞ and never returns")]
    NoReflection,
    #[error("phase point is not on the unit energy level (ξ² + (1+x)η² = {0})")]
    EnergyNotUnit(f64),
    #[error("integration time must be finite and non-negative, got {0}")]
    BadTime(f64),
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget exhausted at t = {0}")]
    StepBudget(f64),
    #[error("k and ℓ must be at least 1")]
    ZeroIndex,
    #[error("table holds no length above 2π·{ell}; increase ell_max")]
    TableExhausted { ell: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub x: f64,
    /// Unwrapped; reduce mod 2π only when comparing.
    pub y: f64,
    pub xi: f64,
    pub eta: f64,
}

impl PhasePoint {
    /// `ξ² + (1+x)η²`.
    pub fn energy(&self) -> f64 {
        self.xi * self.xi + (1.0 + self.x) * self.eta * self.eta
    }

    /// Boundary point with unit energy launched at angle data `(ξ0, η0)`.
    pub fn launch(xi0: f64, eta0: f64) -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            xi: xi0,
            eta: eta0,
        }
    }
}

const UNIT_ENERGY_TOL: f64 = 1e-12;

fn check_unit(p: &PhasePoint) -> Result<(), GeodesicError> {
    let e = p.energy();
    if (e - 1.0).abs() > UNIT_ENERGY_TOL {
        return Err(GeodesicError::EnergyNotUnit(e));
    }
    Ok(())
}

/// One boundary-to-boundary arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeFlight {
    pub end: PhasePoint,
    pub time: f64,
    pub delta_y: f64,
    /// Largest `x` reached, `ξ0²/η0²`: the caustic.
    pub apex_x: f64,
}

/// Position along the exact arc launched from the boundary at `start`.
pub fn arc_point(start: &PhasePoint, t: f64) -> PhasePoint {
    let (xi0, eta) = (start.xi, start.eta);
    let eta2 = eta * eta;
    PhasePoint {
        x: start.x + xi0 * t - eta2 * t * t / 4.0,
        y: start.y + eta * (1.0 + start.x) * t + eta * xi0 * t * t / 2.0 - eta * eta2 * t * t * t / 12.0,
        xi: xi0 - eta2 * t / 2.0,
        eta,
    }
}

/// Closed-form arc from the boundary back to the boundary:
/// `T = 4ξ0/η0²`, `Δy = 4ξ0/η0 + (8/3)ξ0³/η0³`.
pub fn free_flight(start: &PhasePoint) -> Result<FreeFlight, GeodesicError> {
    if start.x != 0.0 {
        return Err(GeodesicError::NotOnBoundary(start.x));
    }
    if start.eta == 0.0 {
        return Err(GeodesicError::NoReflection);
    }
    if !(start.xi > 0.0) {
        return Err(GeodesicError::NotInward(start.xi));
    }
    check_unit(start)?;
    let (xi0, eta) = (start.xi, start.eta);
    let ratio = xi0 / eta;
    let time = 4.0 * xi0 / (eta * eta);
    let delta_y = 4.0 * ratio + 8.0 / 3.0 * ratio * ratio * ratio;
    Ok(FreeFlight {
        end: PhasePoint {
            x: 0.0,
            y: start.y + delta_y,
            xi: -xi0,
            eta,
        },
        time,
        delta_y,
        apex_x: ratio * ratio,
    })
}

/// Composes `count` exact arcs with reflection, returning the final point
/// (after the last reflection) and the total time.
pub fn exact_arcs(start: &PhasePoint, count: usize) -> Result<(PhasePoint, f64), GeodesicError> {
    let mut p = *start;
    let mut total = crate::summation::NeumaierSum::new();
    for _ in 0..count {
        let arc = free_flight(&p)?;
        total.add(arc.time);
        p = PhasePoint {
            xi: -arc.end.xi,
            ..arc.end
        };
    }
    Ok((p, total.total()))
}

// ---------------------------------------------------------------------------
// Dormand–Prince 5(4).

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            h_init: 1e-2,
            h_max: 0.25,
            h_min: 1e-13,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub point: PhasePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<FlowSample>,
    pub reflection_times: Vec<f64>,
    /// Points just after each reflection.
    pub reflection_points: Vec<PhasePoint>,
    pub max_energy_drift: f64,
}

type State = [f64; 4];

fn rhs(s: &State) -> State {
    let (x, xi, eta) = (s[0], s[2], s[3]);
    [xi, (1.0 + x) * eta, -0.5 * eta * eta, 0.0]
}

fn axpy(base: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *base;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step; returns the 5th-order solution and the
/// embedded error vector.
fn dp_step(s: &State, h: f64) -> (State, State) {
    let k1 = rhs(s);
    let k2 = rhs(&axpy(s, h, &[(1.0 / 5.0, &k1)]));
    let k3 = rhs(&axpy(s, h, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]));
    let k4 = rhs(&axpy(
        s,
        h,
        &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)],
    ));
    let k5 = rhs(&axpy(
        s,
        h,
        &[
            (19372.0 / 6561.0, &k1),
            (-25360.0 / 2187.0, &k2),
            (64448.0 / 6561.0, &k3),
            (-212.0 / 729.0, &k4),
        ],
    ));
    let k6 = rhs(&axpy(
        s,
        h,
        &[
            (9017.0 / 3168.0, &k1),
            (-355.0 / 33.0, &k2),
            (46732.0 / 5247.0, &k3),
            (49.0 / 176.0, &k4),
            (-5103.0 / 18656.0, &k5),
        ],
    ));
    let y5 = axpy(
        s,
        h,
        &[
            (35.0 / 384.0, &k1),
            (500.0 / 1113.0, &k3),
            (125.0 / 192.0, &k4),
            (-2187.0 / 6784.0, &k5),
            (11.0 / 84.0, &k6),
        ],
    );
    let k7 = rhs(&y5);
    let e = [
        35.0 / 384.0 - 5179.0 / 57600.0,
        0.0,
        500.0 / 1113.0 - 7571.0 / 16695.0,
        125.0 / 192.0 - 393.0 / 640.0,
        -2187.0 / 6784.0 + 92097.0 / 339200.0,
        11.0 / 84.0 - 187.0 / 2100.0,
        -1.0 / 40.0,
    ];
    let ks = [k1, k2, k3, k4, k5, k6, k7];
    let mut err = [0.0; 4];
    for (c, k) in e.iter().zip(ks.iter()) {
        for i in 0..4 {
            err[i] += h * c * k[i];
        }
    }
    (y5, err)
}

fn error_norm(err: &State, a: &State, b: &State, opts: &FlowOptions) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        let scale = opts.atol + opts.rtol * a[i].abs().max(b[i].abs());
        worst = worst.max(err[i].abs() / scale);
    }
    worst
}

fn to_point(s: &State) -> PhasePoint {
    PhasePoint {
        x: s[0],
        y: s[1],
        xi: s[2],
        eta: s[3],
    }
}

/// Step length `h` from `s` such that the RK step lands on `x = 0`, taking
/// the last crossing in `(0, h_hi]`. The arc is concave in `x`, so Newton
/// from the outside of that crossing converges monotonically onto it.
fn locate_boundary(s: &State, h_hi: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = h_hi;
    let mut h = h_hi;
    for _ in 0..200 {
        let (y, _) = dp_step(s, h);
        let x = y[0];
        if x > 0.0 {
            lo = h;
        } else {
            hi = h;
        }
        let mut next = h - x / y[2];
        if !(next > lo && next <= hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - h).abs() <= 4.0 * f64::EPSILON * h_hi || hi - lo <= 4.0 * f64::EPSILON * h_hi {
            return next;
        }
        h = next;
    }
    h
}

enum Stop {
    Time(f64),
    Reflections(usize),
}

fn integrate(
    start: &PhasePoint,
    stop: Stop,
    reflect: bool,
    opts: &FlowOptions,
) -> Result<(Trajectory, f64), GeodesicError> {
    check_unit(start)?;
    let mut state: State = [start.x, start.y, start.xi, start.eta];
    let mut t = 0.0;
    let mut h = opts.h_init.min(opts.h_max);
    let mut traj = Trajectory {
        samples: vec![FlowSample { t, point: *start }],
        reflection_times: Vec::new(),
        reflection_points: Vec::new(),
        max_energy_drift: 0.0,
    };
    let t_end = match stop {
        Stop::Time(te) => te,
        Stop::Reflections(_) => f64::INFINITY,
    };
    let mut steps = 0;
    while t < t_end {
        steps += 1;
        if steps > opts.max_steps {
            return Err(GeodesicError::StepBudget(t));
        }
        let h_try = h.min(t_end - t);
        let (next, err) = dp_step(&state, h_try);
        let norm = error_norm(&err, &state, &next, opts);
        if norm > 1.0 {
            h = h_try * (0.9 * norm.powf(-0.2)).max(0.2);
            if h < opts.h_min * (1.0 + t) {
                return Err(GeodesicError::StepUnderflow { t, h });
            }
            continue;
        }
        let growth = if norm == 0.0 {
            5.0
        } else {
            (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
        };

        // A whole arc can fit inside one step, so any step ending at x < 0
        // crosses the boundary.
        if next[0] < 0.0 {
            let h_hit = locate_boundary(&state, h_try);
            if h_hit < opts.h_min * (1.0 + t) {
                return Err(GeodesicError::StepUnderflow { t, h: h_hit });
            }
            let (mut hit, _) = dp_step(&state, h_hit);
            hit[0] = 0.0;
            t += h_hit;
            traj.samples.push(FlowSample {
                t,
                point: to_point(&hit),
            });
            if !reflect {
                record_drift(&mut traj, &hit);
                return Ok((traj, t));
            }
            hit[2] = hit[2].abs();
            traj.reflection_times.push(t);
            traj.reflection_points.push(to_point(&hit));
            record_drift(&mut traj, &hit);
            state = hit;
            if let Stop::Reflections(count) = stop {
                if traj.reflection_times.len() >= count {
                    return Ok((traj, t));
                }
            }
            h = (h_try * growth).min(opts.h_max);
            continue;
        }

        t += h_try;
        state = next;
        record_drift(&mut traj, &state);
        traj.samples.push(FlowSample {
            t,
            point: to_point(&state),
        });
        h = (h_try * growth).min(opts.h_max);
    }
    Ok((traj, t))
}

fn record_drift(traj: &mut Trajectory, s: &State) {
    let drift = (to_point(s).energy() - 1.0).abs();
    traj.max_energy_drift = traj.max_energy_drift.max(drift);
}

/// Numerically integrates the flow up to `t_end`. With `reflect` the ray is
/// reflected at `x = 0`; without, integration stops at the first boundary hit.
pub fn integrate_flow(
    start: &PhasePoint,
    t_end: f64,
    reflect: bool,
    opts: &FlowOptions,
) -> Result<Trajectory, GeodesicError> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(GeodesicError::BadTime(t_end));
    }
    integrate(start, Stop::Time(t_end), reflect, opts).map(|(traj, _)| traj)
}

/// Integrates until the `count`-th reflection and returns the trajectory.
pub fn integrate_reflections(
    start: &PhasePoint,
    count: usize,
    opts: &FlowOptions,
) -> Result<Trajectory, GeodesicError> {
    if start.eta == 0.0 {
        return Err(GeodesicError::NoReflection);
    }
    integrate(start, Stop::Reflections(count), true, opts).map(|(traj, _)| traj)
}

// ---------------------------------------------------------------------------
// Closed geodesics.

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedGeodesic {
    pub k: usize,
    pub ell: usize,
    pub eta0: f64,
    pub xi0: f64,
    pub length: f64,
    /// `L η0² / (4k ξ0) - 1`.
    pub residual1: f64,
    /// `L (η0/3 + 2/(3η0)) / (2πℓ) - 1`.
    pub residual2: f64,
}

impl ClosedGeodesic {
    /// Height of the caustic `ξ0²/η0²`.
    pub fn caustic(&self) -> f64 {
        (self.xi0 / self.eta0).powi(2)
    }

    pub fn launch(&self) -> PhasePoint {
        PhasePoint::launch(self.xi0, self.eta0)
    }
}

/// `g = 3η³ / ((η² + 2) ξ0)` with `η² = 1 - ξ0²`; decreasing in `ξ0`.
fn g_of_xi0(xi0: f64) -> f64 {
    let eta2 = (1.0 - xi0) * (1.0 + xi0);
    let eta = eta2.sqrt();
    3.0 * eta2 * eta / ((eta2 + 2.0) * xi0)
}

/// Solves `3η³/((η²+2)√(1-η²)) = 2k/(πℓ)` by bisection in `ξ0 = √(1-η²)` and
/// sets `L = 6πℓη0/(η0²+2)`.
pub fn closed_geodesic(k: usize, ell: usize) -> Result<ClosedGeodesic, GeodesicError> {
    if k == 0 || ell == 0 {
        return Err(GeodesicError::ZeroIndex);
    }
    let target = 2.0 * k as f64 / (PI * ell as f64);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g_of_xi0(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xi0 = 0.5 * (lo + hi);
    let eta2 = (1.0 - xi0) * (1.0 + xi0);
    let eta0 = eta2.sqrt();
    let length = 6.0 * PI * ell as f64 * eta0 / (eta2 + 2.0);
    Ok(ClosedGeodesic {
        k,
        ell,
        eta0,
        xi0,
        length,
        residual1: length * eta2 / (4.0 * k as f64 * xi0) - 1.0,
        residual2: length * (eta0 / 3.0 + 2.0 / (3.0 * eta0)) / (2.0 * PI * ell as f64) - 1.0,
    })
}

/// Samples `(t, x, y)` along the exact closed geodesic, `per_arc` points per
/// bounce plus the final point.
pub fn sample_closed_geodesic(geo: &ClosedGeodesic, per_arc: usize) -> Vec<(f64, f64, f64)> {
    let per_arc = per_arc.max(1);
    let arc_time = 4.0 * geo.xi0 / (geo.eta0 * geo.eta0);
    let mut out = Vec::with_capacity(geo.k * per_arc + 1);
    let mut start = geo.launch();
    for arc in 0..geo.k {
        let t0 = arc as f64 * arc_time;
        for i in 0..per_arc {
            let s = arc_time * i as f64 / per_arc as f64;
            let p = arc_point(&start, s);
            out.push((t0 + s, p.x.max(0.0), p.y));
        }
        let end = arc_point(&start, arc_time);
        start = PhasePoint::launch(geo.xi0, geo.eta0);
        start.y = end.y;
    }
    out.push((geo.k as f64 * arc_time, 0.0, start.y));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthSpectrumTable {
    pub entries: Vec<ClosedGeodesic>,
    pub k_max: usize,
    pub ell_max: usize,
}

/// Lengths closer than this are treated as one entry.
pub const DUPLICATE_TOL: f64 = 1e-9;

/// All `L_{k,ℓ}`, `k ≤ k_max`, `ℓ ≤ ell_max`, sorted by length.
pub fn length_spectrum(k_max: usize, ell_max: usize) -> Result<LengthSpectrumTable, GeodesicError> {
    if k_max == 0 || ell_max == 0 {
        return Err(GeodesicError::ZeroIndex);
    }
    let mut entries = Vec::with_capacity(k_max * ell_max);
    for ell in 1..=ell_max {
        for k in 1..=k_max {
            entries.push(closed_geodesic(k, ell)?);
        }
    }
    entries.sort_by(|a, b| {
        a.length
            .total_cmp(&b.length)
            .then(a.ell.cmp(&b.ell))
            .then(a.k.cmp(&b.k))
    });
    entries.dedup_by(|later, earlier| (later.length - earlier.length).abs() < DUPLICATE_TOL);
    Ok(LengthSpectrumTable {
        entries,
        k_max,
        ell_max,
    })
}

impl LengthSpectrumTable {
    /// Lengths with the given winding number, in increasing `k`.
    pub fn with_ell(&self, ell: usize) -> Vec<ClosedGeodesic> {
        let mut out: Vec<ClosedGeodesic> =
            self.entries.iter().filter(|g| g.ell == ell).copied().collect();
        out.sort_by_key(|g| g.k);
        out
    }

    /// Entry nearest to `t`.
    pub fn nearest(&self, t: f64) -> Option<&ClosedGeodesic> {
        self.entries
            .iter()
            .min_by(|a, b| (a.length - t).abs().total_cmp(&(b.length - t).abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapEstimate {
    pub ell: usize,
    pub gap: f64,
    pub k: usize,
    pub ell_attaining: usize,
    pub length: f64,
}

/// `inf{L ∈ table : L > 2πℓ} - 2πℓ`.
pub fn gap_below(ell: usize, table: &LengthSpectrumTable) -> Result<GapEstimate, GeodesicError> {
    if ell == 0 {
        return Err(GeodesicError::ZeroIndex);
    }
    let level = 2.0 * PI * ell as f64;
    table
        .entries
        .iter()
        .find(|g| g.length > level)
        .map(|g| GapEstimate {
            ell,
            gap: g.length - level,
            k: g.k,
            ell_attaining: g.ell,
            length: g.length,
        })
        .ok_or(GeodesicError::TableExhausted { ell })
}

// ---------------------------------------------------------------------------
// Stationary points of the principal symbol.

/// `(3π/2)^{2/3}`.
fn c0() -> f64 {
    crate::spectrum::bohr_sommerfeld_constant()
}

/// `F0(ξ,η) = (η² + (3πξ/2)^{2/3} η^{4/3})^{1/2}` and its gradient.
pub fn principal_phase(xi: f64, eta: f64) -> (f64, f64, f64) {
    let c = c0();
    let xi13 = xi.cbrt();
    let eta13 = eta.cbrt();
    let f = (eta * eta + c * xi13 * xi13 * eta13 * eta13 * eta13 * eta13).sqrt();
    let d_xi = c * (2.0 / 3.0) / xi13 * eta13.powi(4) / (2.0 * f);
    let d_eta = (2.0 * eta + c * xi13 * xi13 * (4.0 / 3.0) * eta13) / (2.0 * f);
    (f, d_xi, d_eta)
}

/// Point on `F0 = 1` above `η ∈ (0,1)`: `ξ = (2/(3π)) (1-η²)^{3/2} / η²`.
fn level_xi(eta: f64) -> f64 {
    let s = (1.0 - eta) * (1.0 + eta);
    2.0 / (3.0 * PI) * s * s.sqrt() / (eta * eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryPoint {
    pub xi: f64,
    pub eta: f64,
    pub time: f64,
}

/// Solves `T ∇F0 = 2π(k, ℓ)` on `F0 = 1`: the direction of `∇F0` fixes the
/// point, then `T = 2πℓ / ∂_η F0`.
pub fn stationary_time(k: usize, ell: usize) -> Result<StationaryPoint, GeodesicError> {
    if k == 0 || ell == 0 {
        return Err(GeodesicError::ZeroIndex);
    }
    let target = k as f64 / ell as f64;
    // ∂ξF0/∂ηF0 increases from 0 to ∞ as η runs over (0, 1).
    let ratio = |eta: f64| {
        let (_, dx, dy) = principal_phase(level_xi(eta), eta);
        dx / dy
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eta = 0.5 * (lo + hi);
    let xi = level_xi(eta);
    let (_, _, d_eta) = principal_phase(xi, eta);
    Ok(StationaryPoint {
        xi,
        eta,
        time: 2.0 * PI * ell as f64 / d_eta,
    })
}

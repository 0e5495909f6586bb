//! Peak detection against the length spectrum and the one-sided smoothness
//! metric at `t = 2πℓ`.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use super::{evaluate, windowed_trace, PhaseModel, TraceError, TraceRequest};
use crate::airy::AiryZeroTable;
use crate::geodesics::{gap_below, GeodesicError, LengthSpectrumTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error("window [{0}, {1}] is empty or not finite")]
    Window(f64, f64),
    #[error("delta = {delta} must lie in (0, {gap}), the verified length gap above 2π·{ell}")]
    DeltaExceedsGap { ell: usize, delta: f64, gap: f64 },
    #[error("cutoffs must be non-empty, positive and strictly increasing")]
    Cutoffs,
    #[error("ell must be at least 1")]
    Ell,
}

/// Noise floor for peaks, as a multiple of the median `|Z|` on the window.
pub const PEAK_FLOOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub t: f64,
    pub abs: f64,
}

/// Grid-level local maxima of `|Z|` with `t` in `[a, b]` above
/// `PEAK_FLOOR ×` the median of `|Z|` over that window. Both neighbours
/// must exist in the grid.
pub fn detect_peaks(t_grid: &[f64], abs: &[f64], window: (f64, f64)) -> Vec<Peak> {
    let inside: Vec<usize> = (0..t_grid.len())
        .filter(|&i| t_grid[i] >= window.0 && t_grid[i] <= window.1)
        .collect();
    if inside.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<f64> = inside.iter().map(|&i| abs[i]).collect();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };
    let floor = PEAK_FLOOR * median;
    inside
        .into_iter()
        .filter(|&i| i > 0 && i + 1 < abs.len())
        .filter(|&i| abs[i] > abs[i - 1] && abs[i] >= abs[i + 1] && abs[i] > floor)
        .map(|i| Peak { t: t_grid[i], abs: abs[i] })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakMatch {
    pub t_peak: f64,
    pub abs: f64,
    /// Nearest closed geodesic, if one lies within the tolerance.
    pub matched_k: Option<usize>,
    pub matched_ell: Option<usize>,
    pub length: Option<f64>,
    /// `t_peak - L` for the nearest length, matched or not.
    pub offset: f64,
}

pub fn match_peaks(peaks: &[Peak], table: &LengthSpectrumTable, tol: f64) -> Vec<PeakMatch> {
    peaks
        .iter()
        .map(|p| {
            let nearest = table.nearest(p.t);
            let offset = nearest.map_or(f64::INFINITY, |g| p.t - g.length);
            let hit = nearest.filter(|_| offset.abs() <= tol);
            PeakMatch {
                t_peak: p.t,
                abs: p.abs,
                matched_k: hit.map(|g| g.k),
                matched_ell: hit.map(|g| g.ell),
                length: hit.map(|g| g.length),
                offset,
            }
        })
        .collect()
}

/// Sample spacing `1/(4Λ)` used by the peak scan and the smoothness metric.
pub fn diagnostic_spacing(cutoff: f64) -> f64 {
    0.25 / cutoff
}

/// `n + 1` points `a, a + h, ...` covering `[a, b]` with `h ≤ spacing`.
pub fn uniform_grid(a: f64, b: f64, spacing: f64) -> Vec<f64> {
    let n = ((b - a) / spacing).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    (0..=n).map(|i| a + h * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakReport {
    pub cutoff: f64,
    pub window: (f64, f64),
    pub tolerance: f64,
    pub matches: Vec<PeakMatch>,
}

/// Full Gaussian-mollified trace on `window` (padded by one sample each side),
/// its peaks, and their nearest lengths within `2π/Λ`.
pub fn trace_peaks(
    window: (f64, f64),
    cutoff: f64,
    zeros: &AiryZeroTable,
    table: &LengthSpectrumTable,
) -> Result<PeakReport, DiagnosticsError> {
    if !(window.0.is_finite() && window.1.is_finite() && window.0 < window.1) {
        return Err(DiagnosticsError::Window(window.0, window.1));
    }
    let h = diagnostic_spacing(cutoff);
    let grid = uniform_grid(window.0 - h, window.1 + h, h);
    let res = windowed_trace(&TraceRequest::new(grid, cutoff), zeros)?;
    let abs: Vec<f64> = res.values.iter().map(|z| z.norm()).collect();
    let peaks = detect_peaks(&res.t_grid, &abs, window);
    let tolerance = 2.0 * PI / cutoff;
    Ok(PeakReport {
        cutoff,
        window,
        tolerance,
        matches: match_peaks(&peaks, table, tolerance),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymmetryRow {
    pub cutoff: f64,
    pub left_metric: f64,
    pub right_metric: f64,
    pub ratio: f64,
}

/// Largest `|Re Z(t+h) - 2 Re Z(t) + Re Z(t-h)| / h²` over grid indices
/// `lo..=hi` (offsets from the centre sample `c`).
fn second_difference_max(re: &[f64], h: f64, c: usize, lo: i64, hi: i64) -> f64 {
    (lo..=hi)
        .map(|i| (c as i64 + i) as usize)
        .map(|i| ((re[i + 1] - 2.0 * re[i] + re[i - 1]) / (h * h)).abs())
        .fold(0.0, f64::max)
}

/// One-sided smoothness metric at `2πℓ` with the Friedlander phase.
///
/// `left_metric` is the largest second difference of `Re Z_Λ` on
/// `[2πℓ - δ, 2πℓ - δ/8]` and `right_metric` the same on `[2πℓ + δ/8, 2πℓ + δ]`,
/// sampled at spacing `1/(4Λ)`. `δ` must be below the verified gap above `2πℓ`.
pub fn smoothness_asymmetry(
    ell: usize,
    delta: f64,
    cutoffs: &[f64],
    zeros: &AiryZeroTable,
    table: &LengthSpectrumTable,
) -> Result<Vec<AsymmetryRow>, DiagnosticsError> {
    smoothness_asymmetry_with(ell, delta, cutoffs, zeros, table, PhaseModel::Friedlander)
}

/// As [`smoothness_asymmetry`] with a chosen phase; [`PhaseModel::Flat`] is
/// the control experiment.
pub fn smoothness_asymmetry_with(
    ell: usize,
    delta: f64,
    cutoffs: &[f64],
    zeros: &AiryZeroTable,
    table: &LengthSpectrumTable,
    phase: PhaseModel,
) -> Result<Vec<AsymmetryRow>, DiagnosticsError> {
    if ell == 0 {
        return Err(DiagnosticsError::Ell);
    }
    if cutoffs.is_empty()
        || cutoffs.iter().any(|c| !(c.is_finite() && *c > 0.0))
        || cutoffs.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(DiagnosticsError::Cutoffs);
    }
    let gap = gap_below(ell, table)?.gap;
    if !(delta > 0.0 && delta < gap) {
        return Err(DiagnosticsError::DeltaExceedsGap { ell, delta, gap });
    }
    let centre = 2.0 * PI * ell as f64;
    let mut rows = Vec::with_capacity(cutoffs.len());
    for &cutoff in cutoffs {
        let h = diagnostic_spacing(cutoff);
        // Window edges in whole samples; the slack keeps exact edges inside.
        let inner = (delta / (8.0 * h) - 1e-9).ceil() as i64;
        let outer = (delta / h + 1e-9).floor() as i64;
        let n = outer + 1;
        // Symmetric about the centre so both sides see the same stencil.
        let grid: Vec<f64> = (-n..=n).map(|i| centre + h * i as f64).collect();
        let req = TraceRequest {
            phase,
            ..TraceRequest::new(grid, cutoff)
        };
        let res = windowed_trace(&req, zeros)?;
        let re: Vec<f64> = res.values.iter().map(|z| z.re).collect();
        let c = n as usize;
        let left = second_difference_max(&re, h, c, -outer, -inner);
        let right = second_difference_max(&re, h, c, inner, outer);
        rows.push(AsymmetryRow {
            cutoff,
            left_metric: left,
            right_metric: right,
            ratio: left / right,
        });
    }
    Ok(rows)
}


#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistencyRow {
    pub t: f64,
    /// `|Z_{2Λ}(t) - Z_Λ(t)|`.
    pub change: f64,
    pub bound: f64,
    /// Distance from `t` to `{0} ∪ L_F ∪ 2πℕ`.
    pub distance: f64,
}

fn singular_distance(t: f64, table: &LengthSpectrumTable) -> f64 {
    let lengths = table.entries.iter().map(|g| (t - g.length).abs());
    let q = (t / (2.0 * PI)).round();
    lengths.fold(t.abs().min((t - 2.0 * PI * q).abs()), f64::min)
}

/// Compares `Z_Λ` and `Z_{2Λ}` at the points `ts` against the bound
///
/// `(5/4) max |Z''| / Λ² + Z_Λ(0) erfc(Λ d / 4)`,
///
/// with `d` the distance to the nearest singular time and `Z''` taken from
/// second differences of `Z_{4Λ}` within `d/2` of `t`. The Gaussian kernel of
/// `Z_Λ` has variance `2/Λ²`, so for `Z` of class `C²` near `t` the bias
/// `Z_Λ - Z` is at most `max |Z''| / Λ²`; the erfc term bounds the weight the
/// kernel puts beyond `d/2`.
pub fn cutoff_consistency(
    ts: &[f64],
    cutoff: f64,
    zeros: &AiryZeroTable,
    table: &LengthSpectrumTable,
) -> Result<Vec<ConsistencyRow>, DiagnosticsError> {
    let mut points = ts.to_vec();
    if points.is_empty() || points.iter().any(|t| !t.is_finite()) {
        return Err(TraceError::EmptyGrid.into());
    }
    points.sort_by(f64::total_cmp);
    let distances: Vec<f64> = points.iter().map(|&t| singular_distance(t, table)).collect();
    let at = |grid: Vec<f64>, lam: f64| evaluate(&TraceRequest::new(grid, lam), zeros).map(|r| r.values);
    let z0 = at(vec![0.0], cutoff)?[0].re;
    let coarse = at(points.clone(), cutoff)?;
    let fine = at(points.clone(), 2.0 * cutoff)?;

    let h = diagnostic_spacing(4.0 * cutoff);
    let lo = points.iter().zip(&distances).map(|(t, d)| t - 0.5 * d).fold(f64::INFINITY, f64::min) - h;
    let hi = points.iter().zip(&distances).map(|(t, d)| t + 0.5 * d).fold(f64::NEG_INFINITY, f64::max) + h;
    let n = ((hi - lo) / h).ceil() as usize;
    let dense: Vec<f64> = (0..=n).map(|i| lo + h * i as f64).collect();
    let sharp = windowed_trace(&TraceRequest::new(dense, 4.0 * cutoff), zeros)?.values;
    let curvature: Vec<f64> = (0..=n)
        .map(|i| {
            if i == 0 || i == n {
                0.0
            } else {
                ((sharp[i + 1] - 2.0 * sharp[i] + sharp[i - 1]) / (h * h)).norm()
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(points.len());
    for (i, &t) in points.iter().enumerate() {
        let distance = distances[i];
        let first = ((t - 0.5 * distance - lo) / h).floor().max(1.0) as usize;
        let last = (((t + 0.5 * distance - lo) / h).ceil() as usize).min(n - 1);
        let max_curvature = curvature[first..=last].iter().copied().fold(0.0, f64::max);
        let tail = z0 * libm::erfc(cutoff * distance / 4.0);
        rows.push(ConsistencyRow {
            t,
            change: (fine[i] - coarse[i]).norm(),
            bound: 1.25 * max_curvature / (cutoff * cutoff) + tail,
            distance,
        });
    }
    Ok(rows)
}

use std::f64::consts::{PI, SQRT_2};

use friedlander::airy::{airy_ai, principal_seed, zero_table, AI_AT_ZERO};
use friedlander::spectrum::{
    actions_from_energy, bohr_sommerfeld, eigenfunction_eval, eigenvalue, energy_from_actions,
    energy_squared_from_actions, enumerate_below, phase_from_zero, sector_deviation,
    wkb_phase_residual, SpectrumError, DEFAULT_CAUSTIC_MARGIN,
};
use proptest::prelude::*;

const LAMBDA_1_1: f64 = 3.338107410459767038489;
const LAMBDA_2_3: f64 = 26.687529987708903963;
const BS_1_1: f64 = 3.8107836664019090836;
const SQRT_GAP_1_1: f64 = 0.12507403608522515525;

#[test]
fn eigenvalue_reference_points() {
    let z = zero_table(5).unwrap();
    let p = eigenvalue(1, 1, &z).unwrap();
    assert!((p.lambda - LAMBDA_1_1).abs() < 1e-13);
    assert_eq!(eigenvalue(1, -1, &z).unwrap().lambda, p.lambda);
    assert!((eigenvalue(2, 3, &z).unwrap().lambda - LAMBDA_2_3).abs() < 1e-12);
    assert!((p.sqrt_lambda * p.sqrt_lambda - p.lambda).abs() < 1e-14);
}

#[test]
fn bohr_sommerfeld_reference_points() {
    let bs = bohr_sommerfeld(1, 1).unwrap();
    assert!((bs.big_lambda - BS_1_1).abs() < 1e-13);
    let z = zero_table(1).unwrap();
    let gap = bs.big_lambda.sqrt() - eigenvalue(1, 1, &z).unwrap().sqrt_lambda;
    assert!((gap - SQRT_GAP_1_1).abs() < 1e-13);
}

#[test]
fn bohr_sommerfeld_bounded_along_rays() {
    let z = zero_table(4000).unwrap();
    for ratio in [1usize, 2, 3] {
        let mut worst: f64 = 0.0;
        for m in [10, 100, 1000, 4000 / ratio] {
            let n = (ratio * m) as i64;
            let d = bohr_sommerfeld(m, n).unwrap().big_lambda.sqrt()
                - eigenvalue(m, n, &z).unwrap().sqrt_lambda;
            assert!(d > 0.0);
            worst = worst.max(d);
        }
        assert!(worst < 0.6, "ratio {ratio}: {worst}");
    }
}

#[test]
fn sector_maximum_non_increasing_in_lower_cutoff() {
    let z = zero_table(500).unwrap();
    let maxima: Vec<f64> = [10, 50, 200]
        .iter()
        .map(|&lo| sector_deviation(0.5, 2.0, lo, 500, &z).unwrap().max_deviation)
        .collect();
    assert!(maxima.windows(2).all(|w| w[1] <= w[0]), "{maxima:?}");
    let narrow = sector_deviation(0.5, 2.0, 10, 50, &z).unwrap().max_deviation;
    assert!(maxima[0] <= 2.0 * narrow);
}

#[test]
fn action_example() {
    let a = actions_from_energy(1.0, 1.0 / SQRT_2).unwrap();
    assert!((a.i1 - 2.0 / 3.0 * SQRT_2).abs() < 1e-15);
    assert!((a.i2 - 2.0 * PI / SQRT_2).abs() < 1e-15);
}

/// `I1 = ∮ ξ dx` over the bouncing arc, with the substitution
/// `x = x_c (1 - u²)` removing the square-root endpoint.
#[test]
fn action_matches_loop_integral() {
    let (h, j): (f64, f64) = (1.3, 0.7);
    let xc = (h * h - j * j) / (j * j);
    let xi = |x: f64| (h * h - (1.0 + x) * j * j).max(0.0).sqrt();
    let steps = 2000;
    let du = 1.0 / steps as f64;
    let f = |u: f64| xi(xc * (1.0 - u * u)) * 2.0 * xc * u;
    let mut simpson = f(0.0) + f(1.0);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        simpson += w * f(i as f64 * du);
    }
    let loop_integral = 2.0 * simpson * du / 3.0;
    let a = actions_from_energy(h, j).unwrap();
    assert!((loop_integral - a.i1).abs() < 1e-10, "{loop_integral} vs {}", a.i1);
}

#[test]
fn quantized_actions_give_bohr_sommerfeld() {
    for (m, n) in [(1usize, 1i64), (3, 2), (17, 40), (250, 9)] {
        let h2 = energy_squared_from_actions(2.0 * PI * m as f64, 2.0 * PI * n as f64).unwrap();
        let bs = bohr_sommerfeld(m, n).unwrap().big_lambda;
        assert!(((h2 - bs) / bs).abs() < 1e-13, "({m},{n})");
    }
}

#[test]
fn vanishing_caustic_gap() {
    let a = actions_from_energy(1.0, 1.0 - 1e-9).unwrap();
    assert!(a.i1 < 1e-12);
}

#[test]
fn eigenfunction_boundary_and_turning_point() {
    let z = zero_table(20).unwrap();
    for (m, n) in [(1usize, 1i64), (5, -3), (20, 7)] {
        let t = z.get(m).unwrap();
        let at_boundary = eigenfunction_eval(m, n, 0.0, 0.4, &z).unwrap();
        assert!(at_boundary.norm() < 1e-12);
        let nu = (n.unsigned_abs() as f64).powf(2.0 / 3.0);
        let turning = eigenfunction_eval(m, n, t / nu, 1.1, &z).unwrap();
        assert!((turning.norm() - AI_AT_ZERO).abs() < 1e-12);
        assert!((turning.arg() - (n as f64 * 1.1).sin().atan2((n as f64 * 1.1).cos())).abs() < 1e-12);
        // Monotone decay beyond the caustic.
        let mut previous = f64::INFINITY;
        for i in 1..40 {
            let x = t / nu + i as f64 * 0.2;
            let v = eigenfunction_eval(m, n, x, 0.0, &z).unwrap().norm();
            assert!(v < previous);
            previous = v;
        }
    }
    assert!(eigenfunction_eval(1, 1, -0.1, 0.0, &z).is_err());
}

#[test]
fn wkb_single_point_at_boundary() {
    let z = zero_table(60).unwrap();
    for m in [1usize, 10, 60] {
        let r = wkb_phase_residual(m, 1, &[0.0], &z, DEFAULT_CAUSTIC_MARGIN).unwrap();
        // θ(t_m^{3/2}) = mπ = (2/3)(3πm/2)
        assert!(r.raw[0].abs() < 1e-9 * m as f64, "m = {m}: {}", r.raw[0]);
        assert_eq!(r.residual, 0.0);
    }
}

#[test]
fn wkb_residual_bounded_in_sector() {
    let z = zero_table(200).unwrap();
    let mut residuals = Vec::new();
    for m in [10usize, 50, 200] {
        let n = m as i64;
        let t = z.get(m).unwrap();
        let caustic = t / (m as f64).powf(2.0 / 3.0);
        let grid: Vec<f64> = (0..200).map(|i| 0.9 * caustic * i as f64 / 199.0).collect();
        let r = wkb_phase_residual(m, n, &grid, &z, DEFAULT_CAUSTIC_MARGIN).unwrap();
        assert!(r.residual < 1.0, "m = {m}: {}", r.residual);
        residuals.push(r.residual);
    }
    assert!((residuals[2] - residuals[1]).abs() < 0.1);
}

#[test]
fn wkb_rejects_caustic() {
    let z = zero_table(5).unwrap();
    let t = z.get(5).unwrap();
    let err = wkb_phase_residual(5, 1, &[0.0, t - 0.1], &z, DEFAULT_CAUSTIC_MARGIN).unwrap_err();
    assert!(matches!(err, SpectrumError::CausticGrid { .. }));
    assert!(wkb_phase_residual(5, 1, &[], &z, 1.0).is_err());
}

#[test]
fn enumeration_examples() {
    let z = zero_table(1).unwrap();
    assert!(enumerate_below(3.0, &z).unwrap().is_empty());
    let pts = enumerate_below(3.5, &z).unwrap();
    let idx: Vec<(usize, i64)> = pts.iter().map(|p| (p.m, p.n)).collect();
    assert_eq!(idx, vec![(1, -1), (1, 1)]);
}

#[test]
fn enumeration_extends_table_and_is_complete() {
    let z = zero_table(2).unwrap();
    let e = 120.0;
    let pts = enumerate_below(e, &z).unwrap();
    let big = zero_table(400).unwrap();
    let mut brute = 0;
    for m in 1..=400 {
        for n in 1..=11i64 {
            if eigenvalue(m, n, &big).unwrap().lambda <= e {
                brute += 2;
            }
        }
    }
    assert_eq!(pts.len(), brute);
    assert!(pts.windows(2).all(|w| w[0].lambda <= w[1].lambda));
    assert!(pts.iter().all(|p| p.lambda <= e));
}

/// The lattice is three-halves dimensional in energy: the count behaves like
/// `(2π/9) E^{3/2}`.
#[test]
fn counting_function_growth() {
    let z = zero_table(16).unwrap();
    let limit = 2.0 * PI / 9.0;
    let mut previous_gap = f64::INFINITY;
    for e in [100.0, 400.0, 1600.0, 6400.0] {
        let count = enumerate_below(e, &z).unwrap().len() as f64;
        let gap = (count / e.powf(1.5) - limit).abs();
        assert!(gap < previous_gap, "E = {e}: {}", count / e.powf(1.5));
        previous_gap = gap;
    }
    assert!(previous_gap / limit < 0.1);
}

#[test]
fn monotone_in_both_indices() {
    let z = zero_table(60).unwrap();
    for m in 1..60 {
        for n in 1..30i64 {
            let here = eigenvalue(m, n, &z).unwrap().lambda;
            assert!(eigenvalue(m + 1, n, &z).unwrap().lambda > here);
            assert!(eigenvalue(m, n + 1, &z).unwrap().lambda > here);
            let bs = bohr_sommerfeld(m, n).unwrap().big_lambda;
            assert!(bohr_sommerfeld(m + 1, n).unwrap().big_lambda > bs);
            assert!(bs > (n * n) as f64);
        }
    }
}

#[test]
fn lattice_phase_uses_shared_helper() {
    let z = zero_table(30).unwrap();
    for m in 1..=30 {
        for n in [-5i64, 1, 8] {
            let p = eigenvalue(m, n, &z).unwrap();
            assert_eq!(p.sqrt_lambda, phase_from_zero(z.get(m).unwrap(), n.abs() as f64));
        }
    }
    assert!(principal_seed(1) > z.get(1).unwrap());
    assert!(airy_ai(-z.get(30).unwrap()).unwrap().ai.abs() < 1e-12);
}

proptest! {
    #[test]
    fn action_round_trip(h in 0.01f64..100.0, frac in 0.001f64..0.999, sign in prop::bool::ANY) {
        let j = if sign { frac * h } else { -frac * h };
        let a = actions_from_energy(h, j).unwrap();
        let back = energy_from_actions(a.i1, a.i2).unwrap();
        prop_assert!(((back.h * back.h - h * h) / (h * h)).abs() < 1e-12);
        prop_assert!(((back.j - j) / j).abs() < 1e-14);
    }

    #[test]
    fn symmetric_in_n(m in 1usize..50, n in 1i64..500) {
        let z = zero_table(50).unwrap();
        prop_assert_eq!(eigenvalue(m, n, &z).unwrap().lambda, eigenvalue(m, -n, &z).unwrap().lambda);
        prop_assert_eq!(bohr_sommerfeld(m, n).unwrap().big_lambda, bohr_sommerfeld(m, -n).unwrap().big_lambda);
        let a = eigenfunction_eval(m, n, 0.3, 0.7, &z).unwrap();
        let b = eigenfunction_eval(m, -n, 0.3, -0.7, &z).unwrap();
        prop_assert_eq!(a, b);
    }
}

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use friedlander::geodesics::{
    arc_point, closed_geodesic, exact_arcs, free_flight, gap_below, integrate_flow,
    integrate_reflections, length_spectrum, principal_phase, sample_closed_geodesic,
    stationary_time, FlowOptions, GeodesicError, PhasePoint,
};
use proptest::prelude::*;

/// (k, ℓ, η0, L) from 40-digit bisection.
const GEODESIC_REFERENCE: &[(usize, usize, f64, f64)] = &[
    (1, 1, 0.71874655181229841705, 5.3834823153169433757),
    (2, 1, 0.84850412635200459814, 5.8802079351012656977),
    (10, 1, 0.98825715508303472941, 6.2581071718695618301),
    (200, 1, 0.99996916144915961327, 6.2831207157500208444),
    (1, 2, 0.5862228886124522134, 9.429741488766719092),
    (2, 2, 0.71874655181229841705, 10.766964630633886751),
    (3, 2, 0.79713454223566080067, 11.402821788504023013),
    (1, 3, 0.51591254814732431447, 12.87380112700898954),
];

const GAP_BELOW_1: f64 = 3.1465561815871326151;
const DEFECT_200_1: f64 = 6.4591429565632502903e-5;

fn wrap(y: f64) -> f64 {
    let r = y.rem_euclid(2.0 * PI);
    r.min(2.0 * PI - r)
}

#[test]
fn reference_geodesics() {
    for &(k, ell, eta0, length) in GEODESIC_REFERENCE {
        let g = closed_geodesic(k, ell).unwrap();
        assert!((g.eta0 - eta0).abs() < 1e-13, "({k},{ell}) η0 = {}", g.eta0);
        assert!(((g.length - length) / length).abs() < 1e-13, "({k},{ell}) L = {}", g.length);
        assert!(g.residual1.abs() < 1e-10 && g.residual2.abs() < 1e-10);
        assert!((g.xi0 * g.xi0 + g.eta0 * g.eta0 - 1.0).abs() < 1e-15);
        assert!(g.length < 2.0 * PI * ell as f64);
    }
    let defect = 2.0 * PI - closed_geodesic(200, 1).unwrap().length;
    assert!(((defect - DEFECT_200_1) / DEFECT_200_1).abs() < 1e-8);
}

#[test]
fn free_flight_example() {
    let arc = free_flight(&PhasePoint::launch(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).unwrap();
    assert!((arc.time - 4.0 * 2f64.sqrt()).abs() < 1e-14);
    assert!((arc.delta_y - 20.0 / 3.0).abs() < 1e-14);
    assert_eq!(arc.end.xi, -FRAC_1_SQRT_2);
    assert_eq!(arc.end.x, 0.0);
    assert!((arc.apex_x - 1.0).abs() < 1e-15);
}

#[test]
fn grazing_limit() {
    let mut previous = (f64::INFINITY, f64::INFINITY);
    for xi0 in [1e-1f64, 1e-2, 1e-3, 1e-4] {
        let eta = (1.0 - xi0 * xi0).sqrt();
        let arc = free_flight(&PhasePoint::launch(xi0, eta)).unwrap();
        assert!(arc.time < previous.0 && arc.delta_y < previous.1);
        previous = (arc.time, arc.delta_y);
    }
    assert!(previous.0 < 1e-3);
}

#[test]
fn apex_is_caustic() {
    let p = PhasePoint::launch(0.6, 0.8);
    let arc = free_flight(&p).unwrap();
    let top = arc_point(&p, arc.time / 2.0);
    assert!((top.x - arc.apex_x).abs() < 1e-15);
    assert!(top.xi.abs() < 1e-15);
    for i in 0..=100 {
        let q = arc_point(&p, arc.time * i as f64 / 100.0);
        assert!(q.x <= arc.apex_x + 1e-15);
        assert!((q.energy() - 1.0).abs() < 1e-14);
    }
}

#[test]
fn integrator_matches_free_flight() {
    for (xi0, eta0) in [(0.6, 0.8), (FRAC_1_SQRT_2, FRAC_1_SQRT_2), (0.05, (1.0f64 - 0.0025).sqrt())] {
        let p = PhasePoint::launch(xi0, eta0);
        let arc = free_flight(&p).unwrap();
        let traj = integrate_flow(&p, arc.time * 1.5, false, &FlowOptions::default()).unwrap();
        let last = traj.samples.last().unwrap();
        assert!((last.t - arc.time).abs() < 1e-8);
        assert!((last.point.y - arc.end.y).abs() < 1e-8);
        assert!((last.point.xi - arc.end.xi).abs() < 1e-8);
        assert!(traj.samples.iter().all(|s| s.point.eta == eta0));
    }
}

#[test]
fn reflection_restores_launch_velocity() {
    let p = PhasePoint::launch(0.6, 0.8);
    let traj = integrate_reflections(&p, 3, &FlowOptions::default()).unwrap();
    for q in &traj.reflection_points {
        assert!((q.xi - 0.6).abs() < 1e-12);
        assert_eq!(q.eta, 0.8);
        // ẏ = (1+x)η at x = 0
        assert_eq!((1.0 + q.x) * q.eta, 0.8);
    }
}

#[test]
fn energy_drift_over_long_run() {
    let p = PhasePoint::launch(0.3, (1.0f64 - 0.09).sqrt());
    let traj = integrate_flow(&p, 1000.0, true, &FlowOptions::default()).unwrap();
    assert!(traj.max_energy_drift < 1e-9, "{:e}", traj.max_energy_drift);
    let arc = free_flight(&p).unwrap();
    let expected = (1000.0 / arc.time).floor() as usize;
    assert_eq!(traj.reflection_times.len(), expected);
}

#[test]
fn integrator_rejects_off_shell_start() {
    let p = PhasePoint::launch(0.6, 0.81);
    assert!(matches!(
        integrate_flow(&p, 1.0, true, &FlowOptions::default()),
        Err(GeodesicError::EnergyNotUnit(_))
    ));
    assert!(integrate_flow(&PhasePoint::launch(0.6, 0.8), -1.0, true, &FlowOptions::default()).is_err());
}

#[test]
fn tangential_launch_underflows() {
    let xi0: f64 = 1e-15;
    let p = PhasePoint::launch(xi0, (1.0 - xi0 * xi0).sqrt());
    let opts = FlowOptions {
        h_init: 1e-3,
        ..FlowOptions::default()
    };
    assert!(matches!(
        integrate_flow(&p, 1.0, true, &opts),
        Err(GeodesicError::StepUnderflow { .. }) | Err(GeodesicError::StepBudget(_))
    ));
}

/// Numerical integration of k bounces closes up after time L with Δy = 2πℓ.
#[test]
fn integrated_geodesics_close() {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = |bound: u64| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        1 + state % bound
    };
    for _ in 0..50 {
        let (k, ell) = (next(40) as usize, next(6) as usize);
        let g = closed_geodesic(k, ell).unwrap();
        let traj = integrate_reflections(&g.launch(), k, &FlowOptions::default()).unwrap();
        let t = *traj.reflection_times.last().unwrap();
        let y = traj.reflection_points.last().unwrap().y;
        assert!((t - g.length).abs() < 1e-6, "({k},{ell})");
        assert!((y - 2.0 * PI * ell as f64).abs() < 1e-6, "({k},{ell})");
        assert!(wrap(y) < 1e-6);
    }
}

#[test]
fn exact_arcs_close() {
    for k in 1..=40 {
        for ell in 1..=6 {
            let g = closed_geodesic(k, ell).unwrap();
            let (end, t) = exact_arcs(&g.launch(), k).unwrap();
            assert!((t - g.length).abs() < 1e-12 * g.length);
            assert!((end.y - 2.0 * PI * ell as f64).abs() < 1e-11);
        }
    }
}

#[test]
fn increasing_in_k_and_accumulating() {
    let table = length_spectrum(200, 6).unwrap();
    for ell in 1..=6 {
        let row = table.with_ell(ell);
        assert_eq!(row.len(), 200);
        assert!(row.windows(2).all(|w| w[1].length - w[0].length > 1e-9));
        assert!(row.iter().all(|g| g.length < 2.0 * PI * ell as f64));
    }
    assert_eq!((table.entries[0].k, table.entries[0].ell), (1, 1));
    for g in &table.entries {
        let q = (g.length / (2.0 * PI)).round();
        assert!((g.length - 2.0 * PI * q).abs() > 1e-9);
    }
}

#[test]
fn gap_values() {
    let table = length_spectrum(200, 6).unwrap();
    let gap = gap_below(1, &table).unwrap();
    assert!((gap.gap - GAP_BELOW_1).abs() < 1e-12);
    assert_eq!((gap.k, gap.ell_attaining), (1, 2));
    for ell in 1..6 {
        assert!(gap_below(ell, &table).unwrap().gap > 0.0);
    }
    assert_eq!(
        gap_below(6, &table),
        Err(GeodesicError::TableExhausted { ell: 6 })
    );
}

#[test]
fn gap_refines_monotonically() {
    let mut previous = f64::INFINITY;
    for k_max in [5, 20, 80, 200] {
        let gap = gap_below(1, &length_spectrum(k_max, 4).unwrap()).unwrap().gap;
        assert!(gap > 0.0 && gap <= previous);
        previous = gap;
    }
}

#[test]
fn homogeneity() {
    for (k, ell) in [(1, 1), (3, 2), (7, 5), (13, 1)] {
        let base = closed_geodesic(k, ell).unwrap().length;
        for c in 2..=5 {
            let scaled = closed_geodesic(c * k, c * ell).unwrap().length;
            assert!((scaled - c as f64 * base).abs() < 1e-12 * scaled);
        }
    }
}

#[test]
fn stationary_points_reproduce_lengths() {
    for k in 1..=40 {
        for ell in 1..=6 {
            let s = stationary_time(k, ell).unwrap();
            let g = closed_geodesic(k, ell).unwrap();
            assert!((s.time - g.length).abs() < 1e-8, "({k},{ell}): {} vs {}", s.time, g.length);
            let (f, dx, dy) = principal_phase(s.xi, s.eta);
            assert!((f - 1.0).abs() < 1e-12);
            assert!((s.time * dx - 2.0 * PI * k as f64).abs() < 1e-8);
            assert!((s.time * dy - 2.0 * PI * ell as f64).abs() < 1e-8);
        }
    }
}

#[test]
fn trajectory_samples() {
    let g = closed_geodesic(3, 1).unwrap();
    let pts = sample_closed_geodesic(&g, 50);
    assert_eq!(pts.len(), 151);
    let top = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    assert!(top <= g.caustic() + 1e-15 && top > 0.99 * g.caustic());
    let last = pts.last().unwrap();
    assert!((last.0 - g.length).abs() < 1e-12);
    assert!((last.2 - 2.0 * PI).abs() < 1e-11);
}

proptest! {
    #[test]
    fn free_flight_matches_integration(theta in 0.05f64..1.5) {
        let p = PhasePoint::launch(theta.cos(), theta.sin());
        let arc = free_flight(&p).unwrap();
        let traj = integrate_reflections(&p, 1, &FlowOptions::default()).unwrap();
        let q = traj.reflection_points[0];
        prop_assert!((traj.reflection_times[0] - arc.time).abs() < 1e-8);
        prop_assert!((q.y - arc.end.y).abs() < 1e-8);
    }

    #[test]
    fn residuals_small(k in 1usize..2000, ell in 1usize..50) {
        let g = closed_geodesic(k, ell).unwrap();
        prop_assert!(g.residual1.abs() < 1e-10);
        prop_assert!(g.residual2.abs() < 1e-10);
        prop_assert!(g.length < 2.0 * PI * ell as f64);
    }
}

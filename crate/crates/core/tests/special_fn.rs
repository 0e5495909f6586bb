use std::f64::consts::{FRAC_PI_4, PI};

use friedlander::airy::{
    airy_ai, airy_zero, asymptotic_zero, principal_seed, refine_zero, tau, tau_domain_start,
    theta, theta_inverse, theta_prime, zero_table, AiryZeroTable, PhaseFunction,
    AI_AT_ZERO, DEFAULT_ZERO_TOL,
};
use proptest::prelude::*;

/// (x, Ai(x), Ai'(x)) to 20 significant digits, computed with 40-digit
/// arithmetic.
const AIRY_REFERENCE: &[(f64, f64, f64)] = &[
    (-100.0, 0.17675339323955287809, -0.2422970316605838054),
    (-73.5, -0.019369271877107588197, -1.6436488451091080836),
    (-50.0, -0.16188142361232092392, 0.96898983727674908714),
    (-30.0, -0.087968188456842162833, 1.2286206026374851347),
    (-20.0, -0.17640612707798468959, 0.8928628567364712384),
    (-12.0, -0.066555175054373129474, 1.0231104533679707299),
    (-10.5, -0.31192603505105060085, 0.090957487390681672879),
    (-10.0, 0.040241238486443190689, 0.9962650441327900559),
    (-9.9, 0.13623502644797942888, 0.90781333153715091824),
    (-7.0, 0.18428083525050563728, -0.77100816841012654773),
    (-5.0, 0.35076100902411431979, 0.32719281855444313679),
    (-4.5, 0.29215278105595946688, -0.52336253231574770071),
    (-3.0, -0.37881429367765807435, 0.31458376921659881365),
    (-2.5, -0.11232506769296608919, 0.67885273426479436337),
    (-1.0, 0.5355608832923521188, -0.010160567116645209395),
    (-0.5, 0.4757280916105395888, -0.20408167033954738614),
    (0.0, 0.35502805388781723926, -0.25881940379280679841),
    (0.7, 0.18916240039815008218, -0.19985119158228048105),
    (1.5, 0.071749497008105409674, -0.097382012842301319218),
    (2.4, 0.018556093622975470043, -0.030439520128972596664),
    (2.5, 0.015725923380470489995, -0.026250881035903230365),
    (3.3, 0.0037872884268267545819, -0.0071424877858847401285),
    (4.5, 0.00033025032351430898366, -0.00071786656755750888869),
    (5.5, 3.3685311908599814425e-5, -8.046339130556514338e-5),
    (6.0, 9.9476943602528895702e-6, -2.4765200397034954754e-5),
    (7.9, 6.2396400972839341797e-8, -1.7729958329430335231e-7),
    (8.0, 4.6922076160992316256e-8, -1.3414392979067865743e-7),
    (8.1, 3.5224356235735714843e-8, -1.0130972032660844188e-7),
    (10.0, 1.1047532552898685934e-10, -3.5206336767389236366e-10),
    (15.0, 2.164962520737992299e-18, -8.4205679540177727661e-18),
    (30.0, 3.2082175915504955711e-49, -1.7598765814327259821e-48),
    (50.0, 4.5849417240748284783e-104, -3.2443318198287992961e-103),
    (100.0, 2.6344821520881844896e-291, -2.6351403616044099336e-290),
];

/// (m, t_m) from the same arithmetic.
const ZERO_REFERENCE: &[(usize, f64)] = &[
    (1, 2.338107410459767038489),
    (2, 4.087949444130970616637),
    (3, 5.52055982809555105913),
    (10, 12.82877675286575720041),
    (50, 38.02100867725525443313),
    (100, 60.45555727411669870732),
    (1000, 281.0315196125215528353),
    (10_000, 1304.628463767694750426),
    (100_000, 6055.639744320185478073),
    (1_000_000, 28107.83197937958348761),
];

#[test]
fn ai_matches_reference_values() {
    for &(x, ai, dai) in AIRY_REFERENCE {
        let v = airy_ai(x).unwrap();
        if x <= 0.0 {
            assert!((v.ai - ai).abs() < 1e-12, "Ai({x}) = {} vs {ai}", v.ai);
            assert!((v.ai_prime - dai).abs() < 1e-12, "Ai'({x}) = {} vs {dai}", v.ai_prime);
        } else {
            assert!(((v.ai - ai) / ai).abs() < 1e-12, "Ai({x}) = {:e} vs {ai:e}", v.ai);
            assert!(((v.ai_prime - dai) / dai).abs() < 1e-12, "Ai'({x})");
        }
    }
}

#[test]
fn error_estimate_within_budget() {
    let mut x = -100.0;
    while x <= 100.0 {
        let v = airy_ai(x).unwrap();
        assert!(v.est_abs_error <= 1e-12, "x = {x}: {:e}", v.est_abs_error);
        x += 0.37;
    }
}

#[test]
fn error_estimate_covers_actual_error() {
    for &(x, ai, _) in AIRY_REFERENCE {
        let v = airy_ai(x).unwrap();
        assert!(
            (v.ai - ai).abs() <= v.est_abs_error + 2.0 * f64::EPSILON * ai.abs(),
            "x = {x}: err {:e} est {:e}",
            (v.ai - ai).abs(),
            v.est_abs_error
        );
    }
}

#[test]
fn origin_is_exact() {
    assert_eq!(airy_ai(0.0).unwrap().ai, AI_AT_ZERO);
}

#[test]
fn ai_positive_and_decreasing_on_positive_axis() {
    let mut previous = f64::INFINITY;
    let mut x = 0.0;
    while x < 104.0 {
        let v = airy_ai(x).unwrap();
        assert!(v.ai > 0.0 && v.ai < previous, "x = {x}");
        previous = v.ai;
        x += 0.125;
    }
}

/// Ai'' = x Ai, checked with a Richardson-extrapolated second difference.
#[test]
fn ode_residual_on_dense_grid() {
    let ai = |x: f64| airy_ai(x).unwrap().ai;
    let second = |x: f64, h: f64| (ai(x + h) - 2.0 * ai(x) + ai(x - h)) / (h * h);
    let h = 2e-3;
    let mut x = -40.0;
    while x <= 10.0 {
        let v = airy_ai(x).unwrap();
        let d2 = (4.0 * second(x, h / 2.0) - second(x, h)) / 3.0;
        let amplitude = (v.ai * v.ai + v.ai_prime * v.ai_prime / x.abs().max(1.0)).sqrt();
        let scale = amplitude * (1.0 + x.abs());
        let residual = (d2 - x * v.ai).abs() / scale;
        assert!(residual < 1e-6, "x = {x}: relative residual {residual:e}");
        x += 0.0173;
    }
}

#[test]
fn zeros_match_reference() {
    for &(m, t) in ZERO_REFERENCE {
        let z = airy_zero(m).unwrap();
        assert!(((z - t) / t).abs() < 1e-13, "t_{m} = {z} vs {t}");
    }
}

#[test]
fn zero_residuals_and_deviation_bound() {
    let table = zero_table(300).unwrap();
    for m in 1..=300 {
        let t = table.get(m).unwrap();
        assert!(airy_ai(-t).unwrap().ai.abs() < DEFAULT_ZERO_TOL);
        let dev = (t - principal_seed(m)).abs();
        assert!(dev <= 0.5 * (m as f64).powf(-1.0 / 3.0), "m = {m}");
    }
}

/// The scaled deviation approaches the constant (3π/2)^{2/3}/6 ≈ 0.468.
#[test]
fn scaled_deviation_is_nearly_constant() {
    let d = |m: usize| (principal_seed(m) - airy_zero(m).unwrap()) * (m as f64).cbrt();
    let limit = (1.5 * PI).powf(2.0 / 3.0) / 6.0;
    assert!((d(1) - 0.472676255942142).abs() < 1e-12);
    for m in [10, 100, 1000, 10_000] {
        assert!((d(m) - limit).abs() < 0.01, "m = {m}: {}", d(m));
    }
    assert!((d(1) / d(10) - 1.0).abs() < 0.02);
    // Unscaled, the deviation ratio between m = 1 and m = 10 is about 10^{1/3}.
    let raw = |m: usize| principal_seed(m) - airy_zero(m).unwrap();
    let ratio = raw(1) / raw(10);
    assert!((2.0..=2.3).contains(&ratio), "{ratio}");
}

#[test]
fn table_single_entry_and_monotone() {
    let one = zero_table(1).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one.get(1), Some(airy_zero(1).unwrap()));
    assert_eq!(one.get(2), None);
    let ten = zero_table(10).unwrap();
    assert!(ten.zeros().windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn derivative_zeros_interlace() {
    let table = zero_table(200).unwrap();
    for m in 1..200 {
        let a = airy_ai(-table.get(m).unwrap()).unwrap().ai_prime;
        let b = airy_ai(-table.get(m + 1).unwrap()).unwrap().ai_prime;
        assert!(a * b < 0.0, "no Ai' sign change between t_{m} and t_{}", m + 1);
    }
}

#[test]
fn asymptotic_zero_accuracy() {
    for &(m, t) in ZERO_REFERENCE {
        let rel = ((asymptotic_zero(m) - t) / t).abs();
        let bound = if m == 1 { 2e-3 } else if m < 10 { 1e-5 } else { 1e-13 };
        assert!(rel < bound, "m = {m}: {rel:e}");
    }
}

#[test]
fn theta_hits_multiples_of_pi() {
    for &(m, t) in ZERO_REFERENCE.iter().take(7) {
        let value = theta(t.powf(1.5)).unwrap();
        assert!((value - m as f64 * PI).abs() < 1e-9 * m as f64, "m = {m}: {value}");
    }
}

#[test]
fn theta_inversion_reproduces_zeros() {
    let table = zero_table(100).unwrap();
    for m in 1..=100 {
        let t = theta_inverse(PI * m as f64).unwrap().powf(2.0 / 3.0);
        assert!((t - table.get(m).unwrap()).abs() < 1e-9, "m = {m}");
        assert!((tau(m as f64).unwrap() - t).abs() < 1e-12);
    }
}

#[test]
fn theta_principal_part() {
    // θ(s) - (2s/3 + π/4) = O(1/s)
    let mut previous = f64::INFINITY;
    for s in [10.0, 100.0, 1000.0, 1e4] {
        let r = (theta(s).unwrap() - 2.0 * s / 3.0 - FRAC_PI_4).abs();
        assert!(r * s < 0.2, "s = {s}: {r:e}");
        assert!(r < previous);
        previous = r;
    }
}

/// Oracle for the branch: unwrap the principal argument continuously while
/// walking in small steps from s = 1/4, counting every crossing of the cut.
#[test]
fn theta_agrees_with_continuous_walk() {
    let arg = |s: f64| {
        let z = s.powf(2.0 / 3.0);
        let v = airy_ai(-z).unwrap();
        (s.cbrt() * v.ai).atan2(-v.ai_prime)
    };
    let phase = PhaseFunction::new();
    let mut s: f64 = 0.25;
    let mut unwrapped = arg(s);
    assert!(unwrapped > 0.0 && unwrapped < PI);
    assert!((unwrapped - phase.branch_base).abs() < 1e-14);
    let step = 0.01;
    let mut checked = 0;
    while s < 400.0 {
        let next = s + step;
        let mut delta = arg(next) - arg(s);
        if delta > PI {
            delta -= 2.0 * PI;
        } else if delta < -PI {
            delta += 2.0 * PI;
        }
        unwrapped += delta;
        s = next;
        if (s * 100.0).round() as i64 % 250 == 0 {
            assert!((theta(s).unwrap() - unwrapped).abs() < 1e-9, "s = {s}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn theta_prime_matches_difference_quotient() {
    for s in [0.3, 0.8, 2.0, 7.5, 31.0, 32.0, 150.0, 2000.0] {
        let h = 1e-5 * s;
        let fd = (theta(s + h).unwrap() - theta(s - h).unwrap()) / (2.0 * h);
        let exact = theta_prime(s).unwrap();
        assert!((fd - exact).abs() < 1e-7, "s = {s}: {fd} vs {exact}");
    }
}

#[test]
fn tau_domain() {
    let start = tau_domain_start();
    assert!(start > 0.0 && start < 1.0);
    assert!(tau(start * 0.99).is_err());
    assert!(tau(start + 1e-3).is_ok());
}

#[test]
fn refinement_reports_diagnostics() {
    let z = refine_zero(7, DEFAULT_ZERO_TOL).unwrap();
    assert_eq!(z.m, 7);
    assert_eq!(z.seed, principal_seed(7));
    assert!(z.residual < DEFAULT_ZERO_TOL);
    assert!(z.iterations < 20);
}

#[test]
fn cache_round_trip_reverifies() {
    let table = zero_table(40).unwrap();
    let back = AiryZeroTable::from_zeros(table.zeros().to_vec(), DEFAULT_ZERO_TOL).unwrap();
    assert_eq!(back, table);
}

proptest! {
    #[test]
    fn theta_strictly_increasing(s in 0.2501f64..5000.0, ds in 1e-6f64..10.0) {
        prop_assert!(theta(s + ds).unwrap() > theta(s).unwrap());
        prop_assert!(theta_prime(s).unwrap() > 0.0);
    }

    #[test]
    fn theta_satisfies_tangent_relation(s in 0.2501f64..3000.0) {
        let z = s.powf(2.0 / 3.0);
        let v = airy_ai(-z).unwrap();
        prop_assume!(v.ai_prime.abs() > 1e-3);
        let lhs = theta(s).unwrap().tan();
        let rhs = -s.cbrt() * v.ai / v.ai_prime;
        prop_assert!((lhs - rhs).abs() < 1e-8 * (1.0 + rhs.abs()).powi(2));
    }

    #[test]
    fn inverse_round_trip(s in 0.26f64..1e5) {
        let back = theta_inverse(theta(s).unwrap()).unwrap();
        prop_assert!(((back - s) / s).abs() < 1e-12);
    }
}

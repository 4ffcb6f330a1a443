use aztec_lshape::exact::{count, ln_rational, mirror_closed_form, Method};
use aztec_lshape::painleve::PainleveSolution;
use aztec_lshape::regimes::*;
use aztec_lshape::regions::RegionSpec;
use aztec_lshape::saddles::{edge_constants, kappa2};
use aztec_lshape::special::{log_barnes_g, log_barnes_g_asymptotic};
use aztec_lshape::{Exec, Weight};
use proptest::prelude::*;

const A: f64 = 0.7845;
const MU: f64 = 0.7;

fn l(a: f64) -> f64 {
    (1.0 + a * a).ln()
}

#[test]
fn f_blows_up_like_one_twelfth_over_kappa() {
    for &k in &[1e-4, 1e-5] {
        for eps in 0..=1 {
            let f = f_fn(k, MU, A, eps).unwrap();
            assert!((k * f - 1.0 / 12.0).abs() < 2.0 * k, "kappa {k}: {}", k * f);
        }
    }
}

#[test]
fn f_blows_up_like_one_eighth_near_kappa2() {
    let k2 = kappa2(MU, A).unwrap();
    for &d in &[1e-4, 1e-5] {
        let f = f_fn(k2 - d, MU, A, 1).unwrap();
        assert!((d * f - 0.125).abs() < 3.0 * d, "d {d}: {}", d * f);
    }
}

#[test]
fn g_near_zero_matches_two_term_expansion() {
    let xc = x0_constants(MU, A).unwrap();
    let g1 = -1.0 - xc.log_curv;
    let err = |k: f64| (g_fn(k, MU, A).unwrap() - (xc.phi0 + k * k.ln() + g1 * k)).abs();
    // Second order: shrinking kappa tenfold shrinks the error about a hundredfold.
    let (e1, e2) = (err(1e-2), err(1e-3));
    assert!(e2 < e1 / 50.0 && e2 < 1e-4, "{e1} {e2}");
}

#[test]
fn g_vanishes_quadratically_at_kappa2() {
    let k2 = kappa2(MU, A).unwrap();
    let (_, _, s) = edge_constants(MU, A).unwrap();
    let target = s.powi(3) / 4.0;
    let ratio = |d: f64| g_fn(k2 - d, MU, A).unwrap() / (d * d);
    let (r1, r2) = (ratio(1e-2), ratio(1e-3));
    assert!((r2 - target).abs() < (r1 - target).abs());
    assert!((r2 - target).abs() / target < 1e-2, "{r2} vs {target}");
}

#[test]
fn h_log_singularity_has_expected_constant() {
    let xc = x0_constants(MU, A).unwrap();
    for eps in 0..=1u8 {
        let h0 = 0.5 * xc.log_curv + eps as f64 * xc.log_one_minus_ax0;
        let dev = |k: f64| (h_fn(k, MU, A, eps).unwrap() + 0.5 * k.ln() - h0).abs();
        assert!(dev(1e-6) < 1e-3 && dev(1e-6) < dev(1e-3), "eps {eps}");
    }
}

#[test]
fn dg_agrees_with_cubic_fit() {
    let k2 = kappa2(MU, A).unwrap();
    for &k in &[0.1, 0.25, 0.4, 0.5] {
        assert!(k < k2);
        let d = dg_dkappa(k, MU, A).unwrap();
        // Derivative of the cubic through four symmetric points.
        let h = 1e-3;
        let g = |x: f64| g_fn(x, MU, A).unwrap();
        let fit = (g(k - 2.0 * h) - 8.0 * g(k - h) + 8.0 * g(k + h) - g(k + 2.0 * h)) / (12.0 * h);
        assert!((d - fit).abs() < 1e-7, "kappa {k}: {d} vs {fit}");
    }
}

#[test]
fn c_small_kappa_expansions() {
    let xc = x0_constants(MU, A).unwrap();
    let kp: f64 = 1e-2;
    let lk = kp.ln();
    for eps in 0..=1u8 {
        let e = eps as f64;
        let c = c_coefficients(kp, MU, A, eps, 1e-11).unwrap();
        let c2 = (0.5 - MU + MU * MU) * l(A) + kp * xc.phi0 + 0.5 * kp * kp * lk
            - 0.25 * kp * kp * (3.0 + 2.0 * xc.log_curv);
        let c1 = -0.5 * xc.phi0 + (0.5 - e * MU) * l(A) - 0.5 * kp * lk
            + 0.5 * kp * (1.0 + xc.log_curv + 2.0 * e * xc.log_one_minus_ax0);
        let c0 = lk / 24.0 - 0.125 * xc.log_curv - 0.5 * e * xc.log_one_minus_ax0
            + aztec_lshape::special::zeta_prime_minus_one();
        assert!((c.c2 - c2).abs() < 1e-5, "C2 {} vs {c2}", c.c2);
        assert!((c.c1 - c1).abs() < 5e-3, "C1 {} vs {c1}", c.c1);
        assert!((c.c0 - c0).abs() < 0.1, "C0 {} vs {c0}", c.c0);
    }
}

#[test]
fn c_coefficients_approach_half_log_at_kappa2() {
    let k2 = kappa2(MU, A).unwrap();
    let (_, cstar, _) = edge_constants(MU, A).unwrap();
    let half = 0.5 * l(A);
    let mut last = f64::INFINITY;
    for &d in &[0.1, 0.05, 0.02] {
        let c = c_coefficients(k2 - d, MU, A, 1, 1e-11).unwrap();
        let c2_dev = (c.c2 - half + d.powi(3) / (12.0 * cstar)).abs();
        assert!(c2_dev < 2.0 * d.powi(4) / cstar, "d {d}: {c2_dev}");
        let c1_dev = (c.c1 - half).abs();
        assert!(c1_dev < last && c1_dev < 2.0 * d, "d {d}: {c1_dev}");
        last = c1_dev;
    }
}

#[test]
fn c_coefficients_stable_under_tolerance_halving() {
    let a = c_coefficients(0.3, MU, A, 1, 1e-8).unwrap();
    let b = c_coefficients(0.3, MU, A, 1, 5e-9).unwrap();
    assert!((a.c2 - b.c2).abs() <= a.c2_err.max(1e-8));
    assert!((a.c1 - b.c1).abs() <= a.c1_err.max(1e-8));
    assert!((a.c0 - b.c0).abs() <= a.c0_err.max(1e-8));
}

#[test]
fn identities_hold_at_reference_points() {
    for &(a, mu) in &[(0.7845, 0.7), (0.75, 0.808)] {
        for eps in 0..=1 {
            let r = identity_checks(mu, a, eps).unwrap();
            assert!(r.g_residual.abs() < 1e-6, "{r:?}");
            assert!(r.h_residual.abs() < 1e-6, "{r:?}");
            assert!(r.f_residual.abs() < 1e-4, "{r:?}");
        }
    }
}

#[test]
fn barnes_small_values_and_asymptotics() {
    for k in 0..=2 {
        assert_eq!(log_barnes_g(k), 0.0);
    }
    assert!((log_barnes_g(3) - 2f64.ln()).abs() < 1e-15);
    let mut prev = f64::INFINITY;
    for k in [8u32, 16, 32, 64] {
        let exact = log_barnes_g(k);
        let rel = ((log_barnes_g_asymptotic(k as f64) - exact) / exact).abs();
        assert!(rel < prev, "k {k}");
        assert!(rel * (k as f64) < 1.0);
        prev = rel;
    }
}

#[test]
fn theorem1_at_k0_is_the_mirror_formula() {
    for n in [5u32, 12, 30] {
        for m in [1, n / 2, n - 1] {
            for eps in 0..=1u8 {
                let w = Weight::new(7845, 10000).unwrap();
                let exact = ln_rational(&mirror_closed_form(n, m, eps, w));
                let est = theorem1_logf(n, m, 0, eps, w.to_f64()).unwrap();
                assert!((est.log_f - exact).abs() < 1e-9 * exact.abs().max(1.0), "{n} {m} {eps}");
                assert_eq!(est.region_k, 1);
            }
        }
    }
}

#[test]
fn theorem1_residual_decreases_like_inverse_n() {
    let w = Weight::new(7845, 10000).unwrap();
    let mut prev = f64::INFINITY;
    for n in [20u32, 30, 40] {
        let m = 7 * n / 10;
        let exact = count(RegionSpec::for_epsilon(n, m as i32, 4, 1).unwrap(), w, Method::Determinant, Exec::Parallel)
            .unwrap()
            .log_value;
        let res = (exact - theorem1_logf(n, m, 3, 1, A).unwrap().log_f).abs();
        assert!(res < prev);
        prev = res;
    }
    // N * residual settles: the last two scaled residuals are within 5%.
    let scaled = |n: u32| {
        let m = 7 * n / 10;
        let exact = count(RegionSpec::for_epsilon(n, m as i32, 4, 1).unwrap(), w, Method::Determinant, Exec::Parallel)
            .unwrap()
            .log_value;
        n as f64 * (exact - theorem1_logf(n, m, 3, 1, A).unwrap().log_f)
    };
    let (s30, s40) = (scaled(30), scaled(40));
    assert!(((s40 - s30) / s40).abs() < 0.05, "{s30} {s40}");
}

#[test]
fn theorem2_agrees_with_small_kappa_substitution() {
    let (n, m, k) = (40, 28, 6);
    let t1 = theorem1_logf(n, m, k, 1, A).unwrap();
    let sub = theorem2_small_kappa_logf(n, m, k, 1, A).unwrap();
    let barnes = 1.0 / k as f64;
    assert!((t1.log_f - sub.log_f).abs() < sub.error_scale + t1.error_scale + barnes);
}

#[test]
fn theorem2_residual_small_for_epsilon_zero() {
    let w = Weight::new(7845, 10000).unwrap();
    let (n, m, k) = (32u32, 22u32, 8u32);
    let exact = count(RegionSpec::for_epsilon(n, m as i32, k as i32 + 1, 0).unwrap(), w, Method::Determinant, Exec::Parallel)
        .unwrap()
        .log_value;
    let est = theorem2_logf(n, m, k, 0, A).unwrap();
    assert!((exact - est.log_f).abs() < 0.05);
}

#[test]
fn theorem3_at_kappa2_is_tw_at_zero() {
    let pl = PainleveSolution::standard();
    // At a = 1 and mu = 9/10, kappa_2 = 0.7, so k = 7 sits on the edge.
    let k2 = kappa2(0.9, 1.0).unwrap();
    assert!((k2 - 0.7).abs() < 1e-12);
    let at_edge = theorem3_logf(10, 9, 7, 1, 1.0, pl).unwrap();
    let lfn = 55.0 * 2f64.ln();
    assert!((at_edge.log_f - lfn - pl.log_ftw(0.0).unwrap()).abs() < 1e-12);
    assert!(tw_argument(10, 9, 7, 1.0).unwrap().abs() < 1e-12);
}

#[test]
fn theorem3_deep_left_matches_tail_form() {
    let pl = PainleveSolution::standard();
    // Deepest point of the window: s = -N^(1/15) s*, about -5 here.
    let (n, m) = (400_000u32, 280_000u32);
    let k2 = kappa2(0.7, A).unwrap();
    let k = (n as f64 * k2 - (n as f64).powf(CRITICAL_WINDOW_EXPONENT)).ceil() as u32;
    let full = theorem3_logf(n, m, k, 1, A, pl).unwrap();
    let deep = theorem3_deep_left_logf(n, m, k, 1, A).unwrap();
    let s = tw_argument(n, m, k, A).unwrap();
    assert!(s < -4.5, "{s}");
    assert!((full.log_f - deep.log_f).abs() < 3.0 * s.abs().powf(-1.5));
}

#[test]
fn theorem3_right_correction_is_tiny() {
    let pl = PainleveSolution::standard();
    let (n, m) = (1000u32, 700u32);
    let k2 = kappa2(0.7, A).unwrap();
    let k = (n as f64 * (k2 + 0.025)) as u32;
    let est = theorem3_logf(n, m, k, 1, A, pl).unwrap();
    let lp = est.log_probability();
    assert!(lp <= 0.0 && lp.abs() < 1e-8, "{lp}");
    // Faster than exponential: the decay rate per unit s keeps growing.
    let f = |s: f64| -(-pl.log_ftw(s).unwrap()).ln();
    assert!(f(5.0) - f(4.0) > f(4.0) - f(3.0) && f(4.0) - f(3.0) > f(3.0) - f(2.0));
}

#[test]
fn theorem4_exact_at_full_corner() {
    let est = theorem4_logf(8, 7, 8, 1, 1.0).unwrap();
    assert_eq!(est.error_scale, 0.0);
    assert!((est.log_f - 36.0 * 2f64.ln()).abs() < 1e-12);
    let w = Weight::new(1, 1).unwrap();
    let exact = count(RegionSpec::for_epsilon(8, 7, 8, 1).unwrap(), w, Method::Determinant, Exec::Sequential).unwrap();
    assert!((exact.log_value - est.log_f).abs() < 1e-12);
}

#[test]
fn theorem4_small_corner_at_n8() {
    let w = Weight::new(1, 1).unwrap();
    // The epsilon = 0 region; with epsilon = 1 the gap is 0.036.
    let est = theorem4_logf(8, 7, 7, 0, 1.0).unwrap();
    let exact = count(RegionSpec::for_epsilon(8, 7, 7, 0).unwrap(), w, Method::Determinant, Exec::Sequential).unwrap();
    assert!((exact.log_value - est.log_f).abs() < 1e-2);
}

#[test]
fn small_corner_probability_monotone_at_n10() {
    let w = Weight::new(1, 1).unwrap();
    let (n, m) = (10u32, 8u32);
    let k2 = kappa2(0.8, 1.0).unwrap();
    let lfn = 55.0 * 2f64.ln();
    let start = (n as f64 * k2).floor() as u32 + 1;
    let mut prev = f64::INFINITY;
    for k in start..=m {
        let lp = count(RegionSpec::for_epsilon(n, m as i32, k as i32, 1).unwrap(), w, Method::Determinant, Exec::Sequential)
            .unwrap()
            .log_value
            - lfn;
        assert!(lp.abs() < prev, "k {k}");
        prev = lp.abs();
    }
}

#[test]
fn dispatch_examples() {
    let pl = PainleveSolution::standard();
    let d = regime_dispatch(200, 140, 3, 1, A, pl).unwrap();
    assert_eq!(d.primary.regime, Regime::AlmostMaximal);

    // a = 1, mu = 0.9: kappa_2 = 0.7.
    let d = regime_dispatch(100, 90, 70, 1, 1.0, pl).unwrap();
    assert_eq!(d.primary.regime, Regime::Critical);

    let d = regime_dispatch(100, 90, 80, 1, 1.0, pl).unwrap();
    assert_eq!(d.primary.regime, Regime::Small);

    let d = regime_dispatch(100, 90, 30, 1, 1.0, pl).unwrap();
    assert_eq!(d.primary.regime, Regime::Large);
    assert!(!d.ambiguous);
}

#[test]
fn dispatch_flags_overlap() {
    let pl = PainleveSolution::standard();
    // N kappa_2 = 7000 at N = 10000; N^0.4 = 39.8 and N^(1/3) = 21.5.
    let d = regime_dispatch(10000, 9000, 6970, 1, 1.0, pl).unwrap();
    assert!(d.ambiguous);
    assert_eq!(d.primary.regime, Regime::Critical);
    assert_eq!(d.alternative.unwrap().regime, Regime::Large);
}

#[test]
fn overlap_predictions_close_at_n48() {
    let pl = PainleveSolution::standard();
    let n = 48u32;
    let m = 34u32;
    let k2 = kappa2(m as f64 / n as f64, A).unwrap();
    let k = (n as f64 * k2 - (n as f64).powf(0.37)).round() as u32;
    let t2 = theorem2_logf(n, m, k - 1, 1, A).unwrap();
    let t3 = theorem3_logf(n, m, k, 1, A, pl).unwrap();
    assert!((t2.log_f - t3.log_f).abs() < 1.0, "{} {}", t2.log_f, t3.log_f);
}

#[test]
fn regime_errors() {
    assert!(matches!(theorem2_logf(40, 28, 30, 1, A), Err(aztec_lshape::Error::Regime(_))));
    assert!(matches!(theorem4_logf(40, 28, 20, 1, A), Err(aztec_lshape::Error::Regime(_))));
    assert!(matches!(theorem1_logf(40, 28, 1, 2, A), Err(aztec_lshape::Error::Parameter(_))));
    // mu below the edge threshold has no critical regime.
    let pl = PainleveSolution::standard();
    assert!(matches!(theorem3_logf(40, 12, 10, 1, A, pl), Err(aztec_lshape::Error::Regime(_))));
}

#[test]
fn estimate_serializes_coefficient_keys() {
    let est = theorem1_logf(20, 14, 2, 1, A).unwrap();
    let v = serde_json::to_value(&est).unwrap();
    let c = &v["coefficients"];
    for key in ["N^2", "N", "log N", "1"] {
        assert!(c[key].is_number(), "{key}");
    }
    assert_eq!(v["regime"], "almost-maximal");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prediction_is_contraction(n in 10u32..400, frac in 0.3f64..0.9, k in 0u32..6, eps in 0u8..=1, a in 0.3f64..1.0) {
        let m = ((frac * n as f64) as u32).max(1);
        let est = theorem1_logf(n, m, k, eps, a).unwrap();
        let c = est.coefficients;
        let nf = n as f64;
        let manual = c.n2 * nf * nf + c.n1 * nf + c.log_n * nf.ln() + c.constant;
        prop_assert!((est.log_f - manual).abs() <= 1e-12 * manual.abs().max(1.0));
    }

    #[test]
    fn tw_argument_monotone_in_k(n in 20u32..200, k in 1u32..10) {
        let m = (0.8 * n as f64) as u32;
        let a = 0.9;
        let k = k.min(m - 1);
        let s1 = tw_argument(n, m, k, a).unwrap();
        let s2 = tw_argument(n, m, k + 1, a).unwrap();
        prop_assert!(s2 > s1);
    }
}

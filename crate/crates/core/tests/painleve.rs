use aztec_lshape::painleve::*;
use aztec_lshape::special::{airy_ai, zeta_prime_minus_one};
use aztec_lshape::Error;

fn sol() -> &'static PainleveSolution {
    PainleveSolution::standard()
}

/// `log F^TW(0)`, frozen after the dual-resolution check below.
const LOG_FTW_ZERO: f64 = -0.031105985360793;

#[test]
fn matches_airy_on_the_right() {
    let u = sol().u_at(8.0).unwrap();
    assert!((u / airy_ai(8.0) - 1.0).abs() < 1e-6);
}

#[test]
fn hastings_mcleod_value_at_origin() {
    // u(0) of the Hastings-McLeod solution, known to ten digits.
    assert!((sol().u_at(0.0).unwrap() - 0.3670615515).abs() < 1e-9);
}

#[test]
fn signs_and_monotonicity_on_grid() {
    let s = sol();
    assert!(s.u.iter().all(|&u| u > 0.0));
    assert!(s.q.iter().all(|&q| q <= 0.0));
    assert!(s.log_ftw.windows(2).all(|w| w[1] >= w[0]));
    assert!(s.log_ftw.last().unwrap().abs() < 1e-20);
}

#[test]
fn newton_residual_at_rounding_level() {
    assert!(sol().ode_residual() < 1e-13);
    assert!(sol().tol <= DEFAULT_TOL);
}

#[test]
fn derivative_identity() {
    let s = sol();
    let h = s.step();
    let mut worst: f64 = 0.0;
    for i in 2..s.grid.len() - 2 {
        let x = s.grid[i];
        if !(-8.0..=4.0).contains(&x) {
            continue;
        }
        let l = &s.log_ftw;
        let d = (-l[i + 2] + 8.0 * l[i + 1] - 8.0 * l[i - 1] + l[i - 2]) / (12.0 * h);
        worst = worst.max((d + s.q[i]).abs());
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn left_tail_at_minus_eight() {
    let s: f64 = -8.0;
    let t = s.abs();
    let tail = -t.powi(3) / 12.0 - t.ln() / 8.0 + 2f64.ln() / 24.0 + zeta_prime_minus_one();
    let grid = sol().log_ftw_grid(s).unwrap();
    assert!((grid - tail).abs() <= 3.0 * t.powf(-1.5));
    // The next term 3/(64|s|^3) accounts for nearly all of the gap.
    assert!((grid - left_tail_log_ftw(s)).abs() < 1e-5);
}

#[test]
fn right_tail_at_six() {
    let v = sol().log_ftw_grid(6.0).unwrap();
    assert!(v < 0.0);
    let lead = right_tail_leading(6.0);
    assert!((v.abs() / lead - 1.0).abs() < 0.2, "{v} vs {lead}");
    assert!((v - right_tail_log_ftw(6.0)).abs() < 1e-15);
}

#[test]
fn left_asymptotics_of_u_and_q() {
    let s: f64 = -10.0;
    let bound = 2.0 * s.abs().powf(-2.5);
    let u = sol().u_at(s).unwrap();
    let q = sol().q_at(s).unwrap();
    assert!((u - (-s / 2.0).sqrt()).abs() <= bound);
    assert!((q - left_asymptotic_q(s)).abs() <= bound);
}

#[test]
fn origin_value_is_resolution_independent() {
    let base = solve_fixed(DEFAULT_S_MIN, DEFAULT_S_MAX, 1664).unwrap();
    let fine = solve_fixed(DEFAULT_S_MIN, DEFAULT_S_MAX, 3328).unwrap();
    let (a, b) = (base.log_ftw_grid(0.0).unwrap(), fine.log_ftw_grid(0.0).unwrap());
    assert!((a - b).abs() < 1e-8);
    assert!((b - LOG_FTW_ZERO).abs() < 1e-10);
    assert!((sol().log_ftw(0.0).unwrap() - LOG_FTW_ZERO).abs() < 1e-10);
}

#[test]
fn fourth_order_convergence() {
    let n = 208;
    let sols: Vec<_> = [n, 2 * n, 4 * n]
        .iter()
        .map(|&k| solve_fixed(DEFAULT_S_MIN, DEFAULT_S_MAX, k).unwrap())
        .collect();
    let change = |a: &PainleveSolution, b: &PainleveSolution| {
        (0..a.grid.len())
            .map(|i| (a.log_ftw[i] - b.log_ftw[2 * i]).abs())
            .fold(0.0, f64::max)
    };
    let c1 = change(&sols[0], &sols[1]);
    let c2 = change(&sols[1], &sols[2]);
    // Halving the step at least halves the change; fourth order gives ~16.
    assert!(c2 < c1 / 2.0, "{c1} {c2}");
    assert!(c1 / c2 > 8.0, "ratio {}", c1 / c2);
}

#[test]
fn tail_sources() {
    let s = sol();
    assert_eq!(s.log_ftw_with_source(-12.0).unwrap().1, TwSource::LeftTail);
    assert_eq!(s.log_ftw_with_source(0.0).unwrap().1, TwSource::Grid);
    assert_eq!(s.log_ftw_with_source(7.0).unwrap().1, TwSource::RightTail);
    // Both sides of each switchover agree closely.
    let l = (s.log_ftw_grid(LEFT_SWITCH).unwrap() - left_tail_log_ftw(LEFT_SWITCH)).abs();
    let r = (s.log_ftw_grid(RIGHT_SWITCH).unwrap() - right_tail_log_ftw(RIGHT_SWITCH)).abs();
    assert!(l < 1e-6 && r < 1e-15);
}

#[test]
fn bad_inputs() {
    assert!(matches!(solve_hastings_mcleod(0.0, 8.0, 1e-10), Err(Error::Parameter(_))));
    assert!(matches!(solve_hastings_mcleod(-12.0, 8.0, 1e-14), Err(Error::Parameter(_))));
    assert!(matches!(sol().log_ftw(f64::NAN), Err(Error::Parameter(_))));
    assert!(matches!(sol().u_at(50.0), Err(Error::Range(_))));
}

//! Acceptance criteria. Runs as a plain binary so that every criterion
//! prints its own verdict line; exits non-zero when any criterion fails.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use aztec_lshape::exact::{count, count_auto, frozen_probability, ln_rational, Method};
use aztec_lshape::experiment::round_half_even;
use aztec_lshape::painleve::{left_asymptotic_q, right_tail_leading, PainleveSolution};
use aztec_lshape::regimes::{identity_checks, theorem1_logf, theorem2_logf, tw_argument};
use aztec_lshape::regions::{build_region, RegionSpec};
use aztec_lshape::saddles::{kappa2, x0_phi0, xstar, solve_z0, PhaseParams};
use aztec_lshape::sampler::{estimate_frozen_probability, sample_tiling_stream, vertical_count_mean};
use aztec_lshape::special::zeta_prime_minus_one;
use aztec_lshape::{Exec, Weight};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Outcome of one criterion: verdict and a one-line summary of the evidence.
struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn w(s: &str) -> Weight {
    s.parse().unwrap()
}

/// `(1 + a^2)^e` computed from scratch.
fn power_of_base(a: Weight, e: u32) -> BigRational {
    let a = BigRational::new(BigInt::from(a.num()), BigInt::from(a.den()));
    (BigRational::one() + &a * &a).pow(e as i32)
}

fn triangular(n: u32) -> u32 {
    n * (n + 1) / 2
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn closed_forms() -> Verdict {
    let mut checked = 0;
    let mut bad = Vec::new();
    for a in ["1", "1/2", "2/3"].map(w) {
        for n in 1..=10u32 {
            let full = count_auto(RegionSpec::full(n), a, Exec::available()).unwrap();
            checked += 1;
            if full.value != power_of_base(a, triangular(n)) {
                bad.push(format!("A_{n}(a={a})"));
            }
            for eps in [0u8, 1] {
                for m in (eps as u32)..=n {
                    // With k = 1 the region splits into diamonds of orders
                    // m - eps and N - m.
                    let spec = RegionSpec::for_epsilon(n, m as i32, 1, eps).unwrap();
                    let got = count_auto(spec, a, Exec::available()).unwrap();
                    let want = power_of_base(a, triangular(m - eps as u32) + triangular(n - m));
                    checked += 1;
                    if got.value != want {
                        bad.push(format!("N={n} m={m} eps={eps} a={a}"));
                    }
                }
            }
        }
    }
    verdict(bad.is_empty(), format!("{checked} regions, mismatches {bad:?}"))
}

fn oracle_equivalence() -> Verdict {
    let mut specs = Vec::new();
    for n in 1..=8u32 {
        let ni = n as i32;
        specs.push(RegionSpec::full(n));
        for m in 0..=ni {
            for k in 0..=m + 1 {
                specs.push(RegionSpec::reduced(n, m, k));
                specs.push(RegionSpec::tilde(n, m, k));
            }
        }
    }
    let mut compared = 0;
    let mut bad = Vec::new();
    for spec in specs {
        if spec.validate().is_err() {
            continue;
        }
        let Ok(grid) = build_region(spec) else { continue };
        if grid.len() > 60 {
            continue;
        }
        for a in ["1", "2/3"].map(w) {
            let e = count(spec, a, Method::Enumerate, Exec::Sequential).map(|c| c.value);
            let d = count(spec, a, Method::Determinant, Exec::available()).map(|c| c.value);
            compared += 1;
            match (e, d) {
                (Ok(x), Ok(y)) if x == y => {}
                (x, y) => bad.push(format!("{spec:?} a={a}: {x:?} vs {y:?}")),
            }
        }
    }
    verdict(compared > 0 && bad.is_empty(), format!("{compared} comparisons, mismatches {bad:?}"))
}

fn almost_maximal() -> Verdict {
    let a = w("0.7845");
    let k = 3u32;
    let mut pass = true;
    let mut notes = Vec::new();
    for eps in [1u8, 0] {
        let mut scaled = Vec::new();
        let mut worst = (0u32, 0.0f64);
        for n in 12..=40u32 {
            let m = round_half_even(0.7 * n as f64) as u32;
            let spec = RegionSpec::for_epsilon(n, m as i32, k as i32 + 1, eps).unwrap();
            let exact = count_auto(spec, a, Exec::available()).unwrap().log_value;
            let pred = theorem1_logf(n, m, k, eps, a.to_f64()).unwrap().log_f;
            let r = exact - pred;
            scaled.push(n as f64 * r.abs());
            if r.abs() * n as f64 > worst.1 {
                worst = (n, r.abs() * n as f64);
            }
            pass &= r.abs() <= 5.0 / n as f64;
        }
        let (first, last) = (median(&scaled[..5]), median(&scaled[scaled.len() - 5..]));
        pass &= last <= first;
        notes.push(format!(
            "eps={eps}: max N|res| {:.3} at N={}, median N|res| first5 {first:.3} last5 {last:.3}",
            worst.1, worst.0
        ));
    }
    verdict(pass, format!("bound 5; {}", notes.join("; ")))
}

fn large_corner() -> Verdict {
    let a = w("0.7845");
    let mut res = Vec::new();
    for n in [16u32, 24, 32, 40, 48] {
        let m = round_half_even(0.7 * n as f64) as u32;
        let k = round_half_even(0.25 * n as f64) as u32;
        let spec = RegionSpec::for_epsilon(n, m as i32, k as i32 + 1, 1).unwrap();
        let exact = count_auto(spec, a, Exec::available()).unwrap().log_value;
        let pred = theorem2_logf(n, m, k, 1, a.to_f64()).unwrap().log_f;
        res.push((exact - pred).abs());
    }
    let decreasing = res.windows(2).all(|p| p[1] < p[0]);
    let last = *res.last().unwrap();
    verdict(decreasing && last < 0.1, format!("|res| {res:.4?}"))
}

fn identities() -> Verdict {
    let mut pass = true;
    let mut worst = [0.0f64; 3];
    for (a, mu) in [(0.7845, 0.7), (0.75, 0.808)] {
        for eps in [0u8, 1] {
            let r = identity_checks(mu, a, eps).unwrap();
            let g = r.g_residual.abs();
            let h = r.h_residual.abs();
            let f = r.f_residual.abs();
            pass &= g < 1e-6 && h < 1e-6 && f < 1e-4;
            worst = [worst[0].max(g), worst[1].max(h), worst[2].max(f)];
        }
    }
    verdict(pass, format!("max |res| G {:.2e} H {:.2e} F {:.2e}", worst[0], worst[1], worst[2]))
}

fn z0_solver() -> Verdict {
    let a = 0.7845;
    let threshold = a * a / (1.0 + a * a);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let mu = threshold + (1.0 - threshold) * (i as f64 + 0.5) / 20.0;
        let k2 = kappa2(mu, a).unwrap();
        for j in 0..20 {
            let kappa = k2 * (j as f64 + 0.5) / 20.0;
            let d = solve_z0(PhaseParams::new(mu, kappa, a, 1)).unwrap();
            worst = worst.max(d.residuals.0.abs()).max(d.residuals.1.abs());
        }
    }
    let mu = 0.7;
    let (x0, _, _) = x0_phi0(mu, a).unwrap();
    let xs = xstar(mu, a).unwrap();
    let k2 = kappa2(mu, a).unwrap();
    let lo = solve_z0(PhaseParams::new(mu, 1e-8, a, 1)).unwrap().z0;
    let hi = solve_z0(PhaseParams::new(mu, k2 - 1e-8, a, 1)).unwrap().z0;
    let (d0, ds) = ((lo - x0).norm(), (hi - xs).norm());
    verdict(
        worst < 1e-12 && d0 < 1e-6 && ds < 1e-6,
        format!("grid residual {worst:.2e}; |z0-x0| {d0:.3e}, |z0-x*| {ds:.3e} at offset 1e-8 (bound 1e-6)"),
    )
}

fn painleve() -> Verdict {
    let sol = PainleveSolution::standard();
    // Left tail.
    let s: f64 = -8.0;
    let t = s.abs();
    let tail = -t.powi(3) / 12.0 - t.ln() / 8.0 + 2f64.ln() / 24.0 + zeta_prime_minus_one();
    let left = (sol.log_ftw_grid(s).unwrap() - tail).abs();
    let left_ok = left <= 3.0 * t.powf(-1.5);
    // Right tail, compared in magnitude.
    let v = sol.log_ftw_grid(6.0).unwrap();
    let right = (v.abs() / right_tail_leading(6.0) - 1.0).abs();
    let right_ok = right <= 0.2;
    // Derivative identity on [-8, 4] by fourth-order differences.
    let h = sol.step();
    let mut deriv: f64 = 0.0;
    for i in 2..sol.grid.len() - 2 {
        if !(-8.0..=4.0).contains(&sol.grid[i]) {
            continue;
        }
        let l = &sol.log_ftw;
        let d = (-l[i + 2] + 8.0 * l[i + 1] - 8.0 * l[i - 1] + l[i - 2]) / (12.0 * h);
        deriv = deriv.max((d + sol.q[i]).abs());
    }
    let deriv_ok = deriv < 1e-8;
    // u and q at s = -10.
    let s: f64 = -10.0;
    let bound = 2.0 * s.abs().powf(-2.5);
    let du = (sol.u_at(s).unwrap() - (-s / 2.0).sqrt()).abs();
    let dq = (sol.q_at(s).unwrap() - left_asymptotic_q(s)).abs();
    verdict(
        left_ok && right_ok && deriv_ok && du <= bound && dq <= bound,
        format!(
            "left {left:.2e} (bound {:.2e}); right rel {right:.3}; d/ds {deriv:.2e}; u {du:.2e} q {dq:.2e} (bound {bound:.2e})",
            3.0 * 8f64.powf(-1.5)
        ),
    )
}

fn critical_bridge() -> Verdict {
    let (n, a) = (48u32, w("0.7845"));
    let m = round_half_even(0.7 * n as f64) as u32;
    let mu = m as f64 / n as f64;
    let k2 = kappa2(mu, a.to_f64()).unwrap();
    let centre = (n as f64 * k2).round() as i64;
    let sol = PainleveSolution::standard();
    let mut pass = true;
    let mut notes = Vec::new();
    for eps in [1u8, 0] {
        let mut worst = (0i64, 0.0f64);
        for dk in -4..=4i64 {
            let k = centre + dk;
            let spec = RegionSpec::for_epsilon(n, m as i32, k as i32, eps).unwrap();
            let log_p = ln_rational(&frozen_probability(spec, a, Exec::available()).unwrap());
            let s = tw_argument(n, m, k as u32, a.to_f64()).unwrap();
            let diff = log_p - sol.log_ftw(s).unwrap();
            if diff.abs() > worst.1.abs() {
                worst = (k, diff);
            }
            pass &= diff.abs() <= 0.15;
        }
        notes.push(format!("eps={eps}: worst {:.3} at k={}", worst.1, worst.0));
    }
    verdict(pass, format!("N={n} m={m} kappa2={k2:.5}, k in {}..={}; {}", centre - 4, centre + 4, notes.join("; ")))
}

/// All tilings of `A_n` by backtracking, as sorted `(i, j, vertical)` lists.
fn all_tilings(n: u32) -> Vec<Vec<(i32, i32, bool)>> {
    let ni = n as i32;
    let inside = |i: i32, j: i32| {
        let mx = i.abs().max((i + 1).abs());
        let my = j.abs().max((j + 1).abs());
        mx + my <= ni + 1
    };
    let mut cells = Vec::new();
    for j in -ni - 1..=ni {
        for i in -ni - 1..=ni {
            if inside(i, j) {
                cells.push((i, j));
            }
        }
    }
    fn go(
        cells: &[(i32, i32)],
        covered: &mut HashMap<(i32, i32), bool>,
        cur: &mut Vec<(i32, i32, bool)>,
        out: &mut Vec<Vec<(i32, i32, bool)>>,
    ) {
        let Some(&(i, j)) = cells.iter().find(|c| !covered[c]) else {
            let mut t = cur.clone();
            t.sort();
            out.push(t);
            return;
        };
        for (other, vertical) in [((i + 1, j), false), ((i, j + 1), true)] {
            if covered.get(&other) == Some(&false) {
                covered.insert((i, j), true);
                covered.insert(other, true);
                cur.push((i, j, vertical));
                go(cells, covered, cur, out);
                cur.pop();
                covered.insert((i, j), false);
                covered.insert(other, false);
            }
        }
    }
    let mut covered: HashMap<_, _> = cells.iter().map(|&c| (c, false)).collect();
    let mut out = Vec::new();
    go(&cells, &mut covered, &mut Vec::new(), &mut out);
    out
}

const SEED: u64 = 42;

fn sampler() -> Verdict {
    let a: f64 = 0.7845;
    let mut pass = true;
    let mut notes = Vec::new();
    for n in 1..=3u32 {
        let tilings = all_tilings(n);
        let z = (1.0 + a * a).powi(triangular(n) as i32);
        let mut counts: HashMap<_, u64> = tilings.iter().map(|t| (t.clone(), 0)).collect();
        let samples = 100_000u64;
        for s in 0..samples {
            let t = sample_tiling_stream(n, a, SEED, s).unwrap();
            let mut key: Vec<_> = t.dominoes.iter().map(|d| (d.cell.i, d.cell.j, d.vertical)).collect();
            key.sort();
            *counts.get_mut(&key).expect("sample is a tiling") += 1;
        }
        let stat: f64 = tilings
            .iter()
            .map(|t| {
                let v = t.iter().filter(|d| d.2).count() as i32;
                let e = samples as f64 * a.powi(v) / z;
                (counts[t] as f64 - e).powi(2) / e
            })
            .sum();
        let crit = ChiSquared::new((tilings.len() - 1) as f64).unwrap().inverse_cdf(0.99);
        pass &= stat < crit;
        notes.push(format!("chi2 N={n} {stat:.1}/{crit:.1}"));
    }
    let n = 16u32;
    let (mean, se) = vertical_count_mean(n, a, 10_000, SEED, Exec::available()).unwrap();
    let expected = (n * (n + 1)) as f64 * a * a / (1.0 + a * a);
    let z = (mean - expected) / se;
    pass &= z.abs() <= 3.0;
    notes.push(format!("E[v] z {z:.2}"));
    let aw = w("0.7845");
    for eps in [1u8, 0] {
        let spec = RegionSpec::for_epsilon(6, 4, 3, eps).unwrap();
        let exact = frozen_probability(spec, aw, Exec::available()).unwrap();
        let exact = ln_rational(&exact).exp();
        let est = estimate_frozen_probability(6, 4, 3, eps, a, 20_000, SEED, Exec::available()).unwrap();
        let z = (est.estimate - exact) / est.stderr;
        pass &= z.abs() <= 3.0;
        notes.push(format!("frozen eps={eps} z {z:.2}"));
    }
    verdict(pass, notes.join(", "))
}

type Criterion = (u32, &'static str, Duration, fn() -> Verdict);

fn main() {
    let mins = |m: u64| Duration::from_secs(60 * m);
    let criteria: [Criterion; 9] = [
        (1, "closed-form exactness", mins(2), closed_forms),
        (2, "enumeration vs determinant", mins(5), oracle_equivalence),
        (3, "almost-maximal residuals", mins(30), almost_maximal),
        (4, "large-corner residuals", mins(60), large_corner),
        (5, "integral identities", mins(5), identities),
        (6, "z0 solver", mins(1), z0_solver),
        (7, "Painleve II / Tracy-Widom", mins(2), painleve),
        (8, "critical bridging", mins(30), critical_bridge),
        (9, "sampler statistics", mins(10), sampler),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let t = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| verdict(false, "panicked".into()));
        let elapsed = t.elapsed();
        let pass = v.pass && elapsed <= limit;
        if !pass {
            failed.push(id);
        }
        println!(
            "criterion {id} [{name}]: {} ({:.1}s of {}s) {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            v.detail
        );
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}

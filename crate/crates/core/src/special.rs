//! Special functions: the Airy function, the Glaisher-Kinkelin constant
//! (hence `zeta'(-1)`) and Barnes' G-function at integers.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;

use crate::quadrature::{composite_gauss, gauss_legendre};

const AI0: f64 = 0.355_028_053_887_817_239_26;
const AIP0: f64 = 0.258_819_403_792_806_798_41;

/// `(Ai(x), Ai'(x))`.
///
/// For `x <= 2` the Maclaurin series is used; it is accurate to about
/// 1e-15 on `[-6, 2]` and degrades slowly further left. For `x > 2`
/// the representation `Ai(x) = e^{-zeta}/pi * int_0^inf cos(t^3/3)
/// exp(-sqrt(x) t^2) dt`, with `zeta = 2 x^{3/2} / 3`, is integrated by
/// composite Gauss-Legendre, giving full relative accuracy.
pub fn airy(x: f64) -> (f64, f64) {
    if x <= 2.0 {
        airy_series(x)
    } else {
        airy_integral(x)
    }
}

pub fn airy_ai(x: f64) -> f64 {
    airy(x).0
}

fn airy_series(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut g, mut fp, mut gp) = (1.0, x, 0.0, 1.0);
    let (mut a, mut b) = (1.0, x);
    let mut e = 0.5 * x * x;
    let mut h = 1.0;
    fp += e;
    for k in 1..200 {
        let kf = k as f64;
        a *= x3 / ((3.0 * kf) * (3.0 * kf - 1.0));
        b *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf));
        h *= x3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        if k > 1 {
            e *= x3 / ((3.0 * kf - 3.0) * (3.0 * kf - 1.0));
            fp += e;
        }
        f += a;
        g += b;
        gp += h;
        let scale = f.abs() + g.abs() + 1.0;
        if a.abs() + b.abs() + e.abs() + h.abs() < 1e-18 * scale {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp)
}

fn airy_integral(x: f64) -> (f64, f64) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let rule = RULE.get_or_init(|| gauss_legendre(16));
    let sx = x.sqrt();
    let zeta = 2.0 / 3.0 * x * sx;
    // exp(-sqrt(x) t^2) < 1e-19 beyond t_max.
    let tmax = (44.0 / sx).sqrt();
    let panels = (tmax.powi(3) / 3.0 / 1.5).ceil().max(8.0) as usize;
    let i = composite_gauss(|t| (t * t * t / 3.0).cos() * (-sx * t * t).exp(), 0.0, tmax, panels, rule);
    let j = composite_gauss(
        |t| t * t * (t * t * t / 3.0).cos() * (-sx * t * t).exp(),
        0.0,
        tmax,
        panels,
        rule,
    );
    let pre = (-zeta).exp() / PI;
    (pre * i, pre * (-sx * i - j / (2.0 * sx)))
}

/// `int_s^inf Ai(x)^2 dx = Ai'(s)^2 - s Ai(s)^2`.
pub fn airy_square_tail(s: f64) -> f64 {
    let (ai, aip) = airy(s);
    aip * aip - s * ai * ai
}

/// `int_s^inf (x - s) Ai(x)^2 dx`, obtained by integrating the identity
/// above: `(2 s^2 Ai^2 - 2 s Ai'^2 - Ai Ai') / 3`.
pub fn airy_square_moment_tail(s: f64) -> f64 {
    let (ai, aip) = airy(s);
    (2.0 * s * s * ai * ai - 2.0 * s * aip * aip - ai * aip) / 3.0
}

/// Bernoulli numbers `B_2, B_4, ..., B_20`.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// `log A` for the Glaisher-Kinkelin constant, from the Euler-Maclaurin
/// expansion of `sum_{k<=n} k log k`.
pub fn log_glaisher() -> f64 {
    // Grouping as sum k log(k/n) keeps the cancellation against n^2/4 mild.
    let n = 8usize;
    let nf = n as f64;
    let s: f64 = (1..=n).map(|k| k as f64 * (k as f64 / nf).ln()).sum();
    let mut v = nf * nf / 4.0 - nf.ln() / 12.0 + s;
    for (idx, b) in BERNOULLI_EVEN.iter().enumerate().skip(1) {
        let j = (idx + 1) as f64;
        let two_j = 2.0 * j;
        v += b / (two_j * (two_j - 1.0) * (two_j - 2.0)) * nf.powf(2.0 - two_j);
    }
    v
}

/// `zeta'(-1) = 1/12 - log A`.
pub fn zeta_prime_minus_one() -> f64 {
    1.0 / 12.0 - log_glaisher()
}

/// `log(n!)` by direct summation for small `n`, Stirling otherwise.
pub fn log_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 256 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// `G(k + 1) = prod_{j=1}^{k-1} j!` as an exact integer.
pub fn barnes_g_exact(k: u32) -> BigUint {
    let mut acc = BigUint::one();
    let mut fact = BigUint::one();
    for j in 1..k {
        fact *= j;
        acc *= &fact;
    }
    acc
}

/// `log G(k + 1) = sum_{j=1}^{k-1} log j!`.
pub fn log_barnes_g(k: u32) -> f64 {
    (1..k).map(|j| log_factorial(j as u64)).sum()
}

/// Large-`k` expansion of `log G(k + 1)` in powers of `log(k + 1/2)`,
/// with error `O(1/k)`.
pub fn log_barnes_g_asymptotic(k: f64) -> f64 {
    let l = (k + 0.5).ln();
    k * k / 2.0 * l - 0.75 * k * k - k / 4.0 + k / 2.0 * (2.0 * PI).ln() - l / 12.0
        + 1.0 / 16.0
        + zeta_prime_minus_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from an arbitrary-precision evaluation.
    const AIRY_REF: [(f64, f64, f64); 13] = [
        (0.0, 0.35502805388781723926, -0.25881940379280679841),
        (0.5, 0.23169360648083348977, -0.22491053266468389314),
        (1.0, 0.13529241631288141552, -0.15914744129679321279),
        (2.0, 0.034924130423274379135, -0.053090384433653631704),
        (2.5, 0.015725923380470489995, -0.026250881035903230365),
        (3.0, 0.0065911393574607191443, -0.011912976705951318474),
        (5.0, 0.00010834442813607441735, -0.000247413890868462476),
        (8.0, 4.6922076160992316256e-8, -1.3414392979067865743e-7),
        (10.0, 1.1047532552898685934e-10, -3.5206336767389236366e-10),
        (12.0, 1.393184688875360839e-13, -4.854736554985308463e-13),
        (20.0, 1.6916728686705403136e-27, -7.5863916257483549605e-27),
        (-2.0, 0.22740742820168557599, 0.61825902074169104141),
        (-5.0, 0.35076100902411431979, 0.32719281855444313679),
    ];

    #[test]
    fn airy_matches_reference_values() {
        for (x, ai, aip) in AIRY_REF {
            let (a, ap) = airy(x);
            let tol = if x < 0.0 { 1e-13 } else { 1e-14 };
            assert!(((a - ai) / ai).abs() < tol, "Ai({x}) = {a} vs {ai}");
            assert!(((ap - aip) / aip).abs() < tol, "Ai'({x}) = {ap} vs {aip}");
        }
    }

    #[test]
    fn airy_branches_agree_at_switch() {
        let (a, b) = airy_series(2.0);
        let (c, d) = airy_integral(2.0);
        assert!(((a - c) / a).abs() < 1e-14);
        assert!(((b - d) / b).abs() < 1e-14);
    }

    #[test]
    fn airy_satisfies_ode() {
        // Ai'' = x Ai, checked with a central difference of Ai'.
        for x in [-3.0, 0.7, 2.2, 4.0, 9.0] {
            let h = 1e-5;
            let d2 = (airy(x + h).1 - airy(x - h).1) / (2.0 * h);
            let ai = airy(x).0;
            assert!((d2 - x * ai).abs() < 1e-9 * (1.0 + ai.abs()), "x={x}");
        }
    }

    #[test]
    fn airy_tail_integral() {
        // Compare the closed form with a direct quadrature of Ai^2.
        let rule = gauss_legendre(20);
        for s in [1.0, 4.0, 8.0] {
            let direct = composite_gauss(|x| airy(x).0.powi(2), s, s + 20.0, 200, &rule);
            let closed = airy_square_tail(s);
            assert!(((direct - closed) / closed).abs() < 1e-10, "s={s}");
            let direct = composite_gauss(|x| (x - s) * airy(x).0.powi(2), s, s + 20.0, 200, &rule);
            let closed = airy_square_moment_tail(s);
            assert!(((direct - closed) / closed).abs() < 1e-10, "s={s}");
        }
    }

    /// Independent route: `log A = (gamma + log 2 pi - 6 zeta'(2) / pi^2) / 12`
    /// with `zeta'(2) = -sum log k / k^2` summed with an Euler-Maclaurin tail.
    fn log_glaisher_via_zeta2() -> f64 {
        let n = 2000usize;
        let nf = n as f64;
        let mut s: f64 = (2..n).map(|k| (k as f64).ln() / (k as f64).powi(2)).sum();
        // Tail sum_{k>=n} of log k / k^2.
        let l = nf.ln();
        s += (l + 1.0) / nf + 0.5 * l / (nf * nf) - (1.0 - 2.0 * l) / (12.0 * nf.powi(3));
        let euler_gamma = 0.577_215_664_901_532_860_6;
        (euler_gamma + (2.0 * PI).ln() + 6.0 * s / (PI * PI)) / 12.0
    }

    #[test]
    fn glaisher_two_ways() {
        let a = log_glaisher();
        assert!((a - 0.248_754_477_033_784_262_5).abs() < 1e-14, "{a}");
        assert!((a - log_glaisher_via_zeta2()).abs() < 1e-11);
        assert!((zeta_prime_minus_one() + 0.165_421_143_700_450_929_2).abs() < 1e-14);
    }

    #[test]
    fn barnes_small_values() {
        assert_eq!(barnes_g_exact(0), BigUint::one());
        assert_eq!(barnes_g_exact(1), BigUint::one());
        assert_eq!(barnes_g_exact(2), BigUint::one());
        assert_eq!(barnes_g_exact(3), BigUint::from(2u32));
        assert_eq!(barnes_g_exact(4), BigUint::from(12u32));
        assert!((log_barnes_g(10) - 48.961_295_178_820_227_06).abs() < 1e-12);
    }

    #[test]
    fn barnes_asymptotics_error_decays() {
        let mut prev = f64::INFINITY;
        for k in [8u32, 16, 32, 64] {
            let err = (log_barnes_g(k) - log_barnes_g_asymptotic(k as f64)).abs();
            assert!(err < prev, "k={k}");
            // O(1/k) with a modest constant.
            assert!(err * (k as f64) < 0.2, "k={k} err={err}");
            prev = err;
        }
    }
}

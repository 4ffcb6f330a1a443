//! Asymptotic predictions of `log F_N^{m,k}(a; epsilon)` in the four
//! regimes of the removed corner.
//!
//! Indexing follows the natural statements of each expansion: the
//! almost-maximal and large-corner formulas take `k >= 0` and predict the
//! region with parameter `k + 1`, while the critical and small-corner
//! formulas predict the region with parameter `k` itself. Every
//! [`RegimeEstimate`] records the region it predicts in `region_k`, and
//! [`regime_dispatch`] always takes the region's own `k`.

pub mod coefficients;

use serde::{Deserialize, Serialize};

pub use coefficients::*;

use crate::error::{Error, Result};
use crate::painleve::PainleveSolution;
use crate::saddles::{edge_constants, kappa2, mu_threshold, DEGENERATE_STRIP};
use crate::special::{log_barnes_g, zeta_prime_minus_one};

/// Largest `k` (region parameter minus one) the dispatcher labels almost
/// maximal.
pub const ALMOST_MAXIMAL_MAX_K: u32 = 5;

/// Exponent `c` of the critical window `k >= N kappa_2 - N^c`.
pub const CRITICAL_WINDOW_EXPONENT: f64 = 0.4;
/// Exponent of the large-corner upper limit `k <= N kappa_2 - N^{1/3}`.
pub const LARGE_UPPER_EXPONENT: f64 = 1.0 / 3.0;
/// Margin `delta` separating the critical and small-corner regimes.
pub const SMALL_CORNER_DELTA: f64 = 0.03;
/// Default quadrature tolerance for the large-corner coefficients.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    AlmostMaximal,
    Large,
    Critical,
    Small,
}

impl Regime {
    pub fn number(self) -> u8 {
        match self {
            Regime::AlmostMaximal => 1,
            Regime::Large => 2,
            Regime::Critical => 3,
            Regime::Small => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::AlmostMaximal => "almost-maximal",
            Regime::Large => "large",
            Regime::Critical => "critical",
            Regime::Small => "small",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "almost-maximal" => Ok(Regime::AlmostMaximal),
            "2" | "large" => Ok(Regime::Large),
            "3" | "critical" => Ok(Regime::Critical),
            "4" | "small" => Ok(Regime::Small),
            other => Err(Error::param(format!("unknown regime {other:?}"))),
        }
    }
}

/// Coefficients of `N^2`, `N`, `log N` and `1`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Expansion {
    #[serde(rename = "N^2")]
    pub n2: f64,
    #[serde(rename = "N")]
    pub n1: f64,
    #[serde(rename = "log N")]
    pub log_n: f64,
    #[serde(rename = "1")]
    pub constant: f64,
}

impl Expansion {
    pub fn contract(&self, n: u32) -> f64 {
        let nf = n as f64;
        self.n2 * nf * nf + self.n1 * nf + self.log_n * nf.ln() + self.constant
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeEstimate {
    pub regime: Regime,
    pub n: u32,
    pub m: u32,
    /// Parameter `k` of the region `A_N^{m,k}` whose log count is predicted.
    pub region_k: u32,
    pub epsilon: u8,
    pub a: f64,
    pub log_f: f64,
    pub coefficients: Expansion,
    /// Order of the stated error term evaluated with unit constants.
    pub error_scale: f64,
}

impl RegimeEstimate {
    fn new(
        regime: Regime,
        (n, m, region_k, epsilon, a): (u32, u32, u32, u8, f64),
        coefficients: Expansion,
        error_scale: f64,
    ) -> Self {
        RegimeEstimate {
            regime,
            n,
            m,
            region_k,
            epsilon,
            a,
            log_f: coefficients.contract(n),
            coefficients,
            error_scale,
        }
    }

    /// Predicted `log P = log F - log F_N(a)`.
    pub fn log_probability(&self) -> f64 {
        let nf = self.n as f64;
        self.log_f - 0.5 * nf * (nf + 1.0) * (1.0 + self.a * self.a).ln()
    }
}

fn check_common(n: u32, m: u32, eps: u8, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("N must be positive"));
    }
    if eps > 1 {
        return Err(Error::param(format!("epsilon = {eps} must be 0 or 1")));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::param(format!("a = {a} must lie in (0, 1]")));
    }
    if m == 0 || m > n {
        return Err(Error::param(format!("m = {m} must lie in 1..=N")));
    }
    let mu = m as f64 / n as f64;
    if mu >= 1.0 {
        return Err(Error::regime("mu = 1 is outside every asymptotic regime"));
    }
    Ok(mu)
}

/// `log F_N(a)` split into its `N^2` and `N` parts.
fn diamond_expansion(a: f64) -> Expansion {
    let l = (1.0 + a * a).ln();
    Expansion {
        n2: 0.5 * l,
        n1: 0.5 * l,
        ..Expansion::default()
    }
}

/// Almost-maximal corner: predicts `log F_N^{m,k+1}` for fixed `k >= 0`.
pub fn theorem1_logf(n: u32, m: u32, k: u32, eps: u8, a: f64) -> Result<RegimeEstimate> {
    let mu = check_common(n, m, eps, a)?;
    if k + 1 > m + 1 {
        return Err(Error::param(format!("k + 1 = {} exceeds m + 1", k + 1)));
    }
    let xc = x0_constants(mu, a)?;
    let l = (1.0 + a * a).ln();
    let kf = k as f64;
    let e = eps as f64;
    let coefficients = Expansion {
        n2: (0.5 - mu + mu * mu) * l,
        n1: kf * xc.phi0 + (0.5 - e * mu) * l,
        log_n: -0.5 * kf * kf,
        constant: log_barnes_g(k) - 0.5 * kf * kf * xc.log_curv
            + e * kf * xc.log_one_minus_ax0
            - 0.5 * kf * (2.0 * std::f64::consts::PI).ln(),
    };
    Ok(RegimeEstimate::new(
        Regime::AlmostMaximal,
        (n, m, k + 1, eps, a),
        coefficients,
        (n as f64).powf(-0.5),
    ))
}

/// Large corner: predicts `log F_N^{m,k+1}` with `kappa_+ = (2k+1)/(2N)`.
pub fn theorem2_logf(n: u32, m: u32, k: u32, eps: u8, a: f64) -> Result<RegimeEstimate> {
    theorem2_logf_tol(n, m, k, eps, a, DEFAULT_TOL)
}

pub fn theorem2_logf_tol(n: u32, m: u32, k: u32, eps: u8, a: f64, tol: f64) -> Result<RegimeEstimate> {
    let mu = check_common(n, m, eps, a)?;
    if k == 0 {
        return Err(Error::regime("the large-corner expansion needs k >= 1"));
    }
    let k2 = kappa2(mu, a)?;
    let kp = (2.0 * k as f64 + 1.0) / (2.0 * n as f64);
    if kp >= k2 || kp >= mu {
        return Err(Error::regime(format!(
            "kappa_+ = {kp} must lie below kappa_2 = {k2} and mu = {mu}"
        )));
    }
    let c = c_coefficients(kp, mu, a, eps, tol)?;
    let coefficients = Expansion {
        n2: c.c2,
        n1: c.c1,
        log_n: -1.0 / 12.0,
        constant: c.c0,
    };
    let scale = 1.0 / (n as f64 * (k2 - kp).powi(2));
    Ok(RegimeEstimate::new(
        Regime::Large,
        (n, m, k + 1, eps, a),
        coefficients,
        scale,
    ))
}

/// Large-corner prediction with the coefficients replaced by their small
/// `kappa_+` expansions; used to compare with the almost-maximal formula.
pub fn theorem2_small_kappa_logf(n: u32, m: u32, k: u32, eps: u8, a: f64) -> Result<RegimeEstimate> {
    let mu = check_common(n, m, eps, a)?;
    let xc = x0_constants(mu, a)?;
    let l = (1.0 + a * a).ln();
    let e = eps as f64;
    let kp = (2.0 * k as f64 + 1.0) / (2.0 * n as f64);
    let lk = kp.ln();
    let coefficients = Expansion {
        n2: (0.5 - mu + mu * mu) * l + kp * xc.phi0 + 0.5 * kp * kp * lk
            - 0.25 * kp * kp * (3.0 + 2.0 * xc.log_curv),
        n1: -0.5 * xc.phi0 + (0.5 - e * mu) * l - 0.5 * kp * lk
            + 0.5 * kp * (1.0 + xc.log_curv + 2.0 * e * xc.log_one_minus_ax0),
        log_n: -1.0 / 12.0,
        constant: lk / 24.0 - 0.125 * xc.log_curv - 0.5 * e * xc.log_one_minus_ax0
            + zeta_prime_minus_one(),
    };
    let nf = n as f64;
    let scale = kp.powi(3) * nf * nf + kp * kp * nf + kp;
    Ok(RegimeEstimate::new(
        Regime::Large,
        (n, m, k + 1, eps, a),
        coefficients,
        scale,
    ))
}

fn edge_checked(mu: f64, a: f64) -> Result<(f64, f64)> {
    let th = mu_threshold(a);
    if mu <= th + DEGENERATE_STRIP {
        return Err(Error::regime(format!(
            "mu = {mu} must exceed a^2/(1+a^2) = {th:.6} by at least {DEGENERATE_STRIP}"
        )));
    }
    let (_, c, _) = edge_constants(mu, a)?;
    Ok((kappa2(mu, a)?, c))
}

/// Argument `N^{2/3} (kappa - kappa_2) / c*^{1/3}` of the Tracy-Widom
/// distribution for the region `A_N^{m,k}`.
pub fn tw_argument(n: u32, m: u32, k: u32, a: f64) -> Result<f64> {
    let mu = check_common(n, m, 1, a)?;
    let (k2, c) = edge_checked(mu, a)?;
    let kappa = k as f64 / n as f64;
    Ok((n as f64).powf(2.0 / 3.0) * (kappa - k2) / c.cbrt())
}

/// Critical corner: predicts `log F_N^{m,k}` as `log F_N + log F^TW(s)`.
pub fn theorem3_logf(
    n: u32,
    m: u32,
    k: u32,
    eps: u8,
    a: f64,
    painleve: &PainleveSolution,
) -> Result<RegimeEstimate> {
    let mu = check_common(n, m, eps, a)?;
    let (k2, _) = edge_checked(mu, a)?;
    let nf = n as f64;
    let lo = nf * k2 - nf.powf(CRITICAL_WINDOW_EXPONENT);
    let hi = nf * (k2 + SMALL_CORNER_DELTA);
    let kf = k as f64;
    if kf < lo || kf > hi {
        return Err(Error::regime(format!(
            "k = {k} outside the critical window [{lo:.3}, {hi:.3}]"
        )));
    }
    let s = tw_argument(n, m, k, a)?;
    let mut coefficients = diamond_expansion(a);
    coefficients.constant = painleve.log_ftw(s)?;
    Ok(RegimeEstimate::new(
        Regime::Critical,
        (n, m, k, eps, a),
        coefficients,
        nf.powf(-1.0 / 3.0),
    ))
}

/// Deep-left form of the critical expansion with `M = N^{2/3}(kappa_2 - kappa)`.
pub fn theorem3_deep_left_logf(n: u32, m: u32, k: u32, eps: u8, a: f64) -> Result<RegimeEstimate> {
    let mu = check_common(n, m, eps, a)?;
    let (k2, c) = edge_checked(mu, a)?;
    let nf = n as f64;
    let big_m = nf.powf(2.0 / 3.0) * (k2 - k as f64 / nf);
    if big_m <= 0.0 {
        return Err(Error::regime("the deep-left form needs kappa < kappa_2"));
    }
    let mut coefficients = diamond_expansion(a);
    coefficients.constant = -big_m.powi(3) / (12.0 * c) - 0.125 * big_m.ln()
        + (2.0 * c).ln() / 24.0
        + zeta_prime_minus_one();
    Ok(RegimeEstimate::new(
        Regime::Critical,
        (n, m, k, eps, a),
        coefficients,
        big_m.powf(-1.5) + big_m * big_m / nf.cbrt(),
    ))
}

/// Small corner: `log F_N^{m,k} ~ log F_N(a)` up to exponentially small terms.
pub fn theorem4_logf(n: u32, m: u32, k: u32, eps: u8, a: f64) -> Result<RegimeEstimate> {
    let mu = check_common(n, m, eps, a)?;
    let nf = n as f64;
    let kappa = k as f64 / nf;
    if k > m + 1 {
        return Err(Error::param(format!("k = {k} exceeds m + 1 = {}", m + 1)));
    }
    let scale = if k == m + 1 {
        0.0
    } else {
        let (k2, _) = edge_checked(mu, a)?;
        if kappa < k2 + SMALL_CORNER_DELTA {
            return Err(Error::regime(format!(
                "kappa = {kappa} must exceed kappa_2 + {SMALL_CORNER_DELTA} = {}",
                k2 + SMALL_CORNER_DELTA
            )));
        }
        (-nf * (kappa - k2).powf(1.5)).exp()
    };
    Ok(RegimeEstimate::new(
        Regime::Small,
        (n, m, k, eps, a),
        diamond_expansion(a),
        scale,
    ))
}

/// Outcome of [`regime_dispatch`]; `alternative` is set when the point
/// lies in the overlap of the large and critical windows.
#[derive(Debug, Clone, Serialize)]
pub struct Dispatch {
    pub primary: RegimeEstimate,
    pub alternative: Option<RegimeEstimate>,
    pub ambiguous: bool,
}

/// Regime a region `A_N^{m,k}` falls into. Thresholds:
/// almost maximal for `k - 1 <= 5`; large for `k - 1 <= N kappa_2 - N^{1/3}`
/// (or any `k` when `mu` is at or below the edge threshold); critical for
/// `N kappa_2 - N^{0.4} <= k < N (kappa_2 + 0.03)`; small above.
pub fn classify(n: u32, m: u32, k: u32, a: f64) -> Result<(Regime, Option<Regime>)> {
    if k == 0 {
        return Err(Error::Untileable("k = 0 leaves an untileable region".into()));
    }
    let mu = check_common(n, m, 1, a)?;
    if k > m + 1 {
        return Err(Error::param(format!("k = {k} exceeds m + 1 = {}", m + 1)));
    }
    if k == m + 1 {
        return Ok((Regime::Small, None));
    }
    if k - 1 <= ALMOST_MAXIMAL_MAX_K {
        return Ok((Regime::AlmostMaximal, None));
    }
    let nf = n as f64;
    let kf = k as f64;
    if mu <= mu_threshold(a) + DEGENERATE_STRIP {
        return Ok((Regime::Large, None));
    }
    let k2 = kappa2(mu, a)?;
    let large = kf - 1.0 <= nf * k2 - nf.powf(LARGE_UPPER_EXPONENT);
    let critical = kf >= nf * k2 - nf.powf(CRITICAL_WINDOW_EXPONENT)
        && kf < nf * (k2 + SMALL_CORNER_DELTA);
    Ok(match (large, critical) {
        (true, true) => (Regime::Critical, Some(Regime::Large)),
        (true, false) => (Regime::Large, None),
        (false, true) => (Regime::Critical, None),
        (false, false) if kf >= nf * (k2 + SMALL_CORNER_DELTA) => (Regime::Small, None),
        // Between the large-corner limit and the critical window.
        (false, false) => (Regime::Critical, None),
    })
}

/// Estimate for `A_N^{m,k}` in the regime chosen by [`classify`].
pub fn regime_estimate(
    regime: Regime,
    n: u32,
    m: u32,
    k: u32,
    eps: u8,
    a: f64,
    painleve: &PainleveSolution,
) -> Result<RegimeEstimate> {
    if k == 0 && matches!(regime, Regime::AlmostMaximal | Regime::Large) {
        return Err(Error::Untileable("k = 0 leaves an untileable region".into()));
    }
    match regime {
        Regime::AlmostMaximal => theorem1_logf(n, m, k - 1, eps, a),
        Regime::Large => theorem2_logf(n, m, k - 1, eps, a),
        Regime::Critical => theorem3_logf(n, m, k, eps, a, painleve),
        Regime::Small => theorem4_logf(n, m, k, eps, a),
    }
}

pub fn regime_dispatch(
    n: u32,
    m: u32,
    k: u32,
    eps: u8,
    a: f64,
    painleve: &PainleveSolution,
) -> Result<Dispatch> {
    let (primary, alternative) = classify(n, m, k, a)?;
    let est = match primary {
        // Between the two windows the critical formula is used outside its
        // stated range; fall back to the deep-left form there.
        Regime::Critical => match theorem3_logf(n, m, k, eps, a, painleve) {
            Err(Error::Regime(_)) => theorem3_deep_left_logf(n, m, k, eps, a)?,
            other => other?,
        },
        r => regime_estimate(r, n, m, k, eps, a, painleve)?,
    };
    let alt = match alternative {
        Some(r) => Some(regime_estimate(r, n, m, k, eps, a, painleve)?),
        None => None,
    };
    Ok(Dispatch {
        ambiguous: alt.is_some(),
        primary: est,
        alternative: alt,
    })
}

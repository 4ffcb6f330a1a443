//! The functions `G`, `H`, `F` of the liquid regime and the integrated
//! coefficients `C_2`, `C_1`, `C_0`.
//!
//! All three functions are explicit in `z_0 = X + iY`. They are evaluated
//! in forms that avoid cancellation when `z_0` approaches the real axis
//! (both ends of `(0, kappa_2)`): every `|c| - Re c` or `|c| + Re c` that can
//! cancel goes through [`abs_minus_re`] / [`abs_plus_re`].

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::TanhSinh;
use crate::saddles::{abs_minus_re, abs_plus_re, kappa2, solve_z0, LiquidSaddleData, PhaseParams};
use crate::special::zeta_prime_minus_one;

/// Closest approach to `kappa_2` at which `z_0` is solved. Beyond this the
/// imaginary part is ill-conditioned (relative error ~ 1e-16 / distance).
pub const KAPPA2_CUTOFF: f64 = 1e-6;
/// Closest approach to `kappa = 0` for `G` and `H`.
pub const KAPPA0_CUTOFF: f64 = 1e-13;
/// Closest approach to `kappa = 0` for `F - 1/(12 kappa)`, which loses
/// about `1e-16 / kappa^2` to cancellation.
pub const KAPPA0_CUTOFF_F: f64 = 2e-6;

fn liquid(kappa: f64, mu: f64, a: f64, eps: u8) -> Result<LiquidSaddleData> {
    solve_z0(PhaseParams::new(mu, kappa, a, eps))
}

pub fn g_from(d: &LiquidSaddleData) -> f64 {
    let PhaseParams { mu, kappa, a, .. } = d.params;
    let z = d.z0;
    let (x, y) = (z.re, z.im);
    let r = d.abs_z0;
    let w = z - 1.0 / a;
    let zp = z + a;
    let l = (abs_plus_re(z) / y).ln();
    let t1 = (4.0 * r * r / (y * abs_plus_re(z))).ln() - x / r * l;
    let t2 = (abs_minus_re(z.conj() * w) / (0.5 * y * abs_minus_re(w))).ln()
        + (x - 1.0 / a) / d.abs_z0_minus_inva * l;
    let t3 = (abs_plus_re(z.conj() * zp) / (0.5 * y * abs_plus_re(zp))).ln()
        - (x + a) / d.abs_z0_plus_a * l;
    0.5 * (mu - kappa) * t1 - 0.5 * (1.0 - mu) * t2 - 0.5 * mu * t3
}

pub fn h_from(d: &LiquidSaddleData) -> f64 {
    let a = d.params.a;
    let eps = d.params.epsilon as f64;
    let z = d.z0;
    let y = z.im;
    let w = z - 1.0 / a;
    let r = d.abs_z0;
    let slack1 = abs_minus_re(z) + abs_plus_re(w);
    let slack2 = (2.0 / a) * abs_plus_re(z) / (r + 1.0 / a + d.abs_z0_minus_inva);
    let inner = (a * y * y / (2.0 * abs_plus_re(w))) * (slack1 / slack2)
        * (abs_plus_re(z) / abs_minus_re(z));
    0.5 * eps * inner.ln() + 0.5 * (2.0 * r / abs_plus_re(z)).ln()
}

/// `F` assembled from the residues of the first-order jump correction at
/// `z_0` and its conjugate. The `19/48` term enters through a real part.
pub fn f_from(d: &LiquidSaddleData) -> f64 {
    let PhaseParams { mu, kappa, a, epsilon } = d.params;
    let eps = epsilon as f64;
    let z = d.z0;
    let y = z.im;
    let sy = y.sqrt();
    let gamma = (mu - kappa) / ((1.0 - mu + kappa) * d.abs_z0);
    let ia = 1.0 / a;
    let q = 0.5 * (kappa + 1.0 - mu) * (z - gamma) / (z * (z + a) * (z - ia));
    let dq = 1.0 / (z - gamma) - 1.0 / z - 1.0 / (z + a) - 1.0 / (z - ia);
    let e0 = -SQRT_2 * sy * q;
    let e1 = 0.4 * dq - Complex64::new(0.0, 0.1 / y);
    // z + |z| and 1/a - z + |1/a - z| with their real parts from abs_plus_re.
    let zpl = Complex64::new(abs_plus_re(z), y);
    let v = ia - z;
    let vpl = Complex64::new(abs_plus_re(v), v.im);
    let rot = Complex64::from_polar(1.0, FRAC_PI_4);
    let g1 = rot * SQRT_2 * sy * (1.0 / zpl + eps / vpl);
    let ze0 = z * e0;
    let big_w = 5.0 / 12.0 / (z * ze0) + 0.625 * e1 / ze0 - g1 * g1 / ze0;
    let t = abs_minus_re(z) / y;
    let c = 2.0 * SQRT_2;
    sy / c * (t * big_w.im - big_w.re) - (0.1875 / ze0).im / (c * sy)
        + t * ((19.0 / 48.0 / ze0).re / (c * sy) + (rot.conj() * g1 / (2.0 * ze0)).im)
}

pub fn g_fn(kappa: f64, mu: f64, a: f64) -> Result<f64> {
    Ok(g_from(&liquid(kappa, mu, a, 1)?))
}

pub fn h_fn(kappa: f64, mu: f64, a: f64, eps: u8) -> Result<f64> {
    Ok(h_from(&liquid(kappa, mu, a, eps)?))
}

pub fn f_fn(kappa: f64, mu: f64, a: f64, eps: u8) -> Result<f64> {
    Ok(f_from(&liquid(kappa, mu, a, eps)?))
}

/// `dG/dkappa` by a Richardson-extrapolated central difference.
pub fn dg_dkappa(kappa: f64, mu: f64, a: f64) -> Result<f64> {
    let k2 = kappa2(mu, a)?;
    let h = (1e-4 * kappa.min(k2 - kappa)).max(1e-6);
    if kappa - 2.0 * h <= 0.0 || kappa + 2.0 * h >= k2 {
        return Err(Error::regime(format!(
            "kappa = {kappa} too close to the ends of (0, {k2}) for a derivative"
        )));
    }
    let g = |k: f64| g_fn(k, mu, a);
    let d1 = (g(kappa + h)? - g(kappa - h)?) / (2.0 * h);
    let d2 = (g(kappa + 2.0 * h)? - g(kappa - 2.0 * h)?) / (4.0 * h);
    Ok((4.0 * d1 - d2) / 3.0)
}

/// Constants of the almost-maximal regime at `x_0`.
#[derive(Debug, Clone, Copy)]
pub struct X0Constants {
    pub x0: f64,
    pub phi0: f64,
    /// `log(|x_0|^2 phi_0''(x_0))`.
    pub log_curv: f64,
    /// `log(1 - a x_0)`.
    pub log_one_minus_ax0: f64,
}

pub fn x0_constants(mu: f64, a: f64) -> Result<X0Constants> {
    let (x0, phi0, pp) = crate::saddles::x0_phi0(mu, a)?;
    Ok(X0Constants {
        x0,
        phi0,
        log_curv: (x0 * x0 * pp).ln(),
        log_one_minus_ax0: (1.0 - a * x0).ln(),
    })
}

/// A quadrature result with the piece added analytically (or by constant
/// extrapolation) for the cut-off end region.
#[derive(Debug, Clone, Copy)]
pub struct ProfileIntegral {
    pub value: f64,
    pub error: f64,
}

/// `int_0^{upper} f(kappa) dkappa` for one of the profile functions, with
/// `upper <= kappa_2`. Nodes within the cutoffs of either end reuse the
/// value at the cutoff, which is exact to `O(cutoff)` for bounded
/// integrands and `O(cutoff log cutoff)` for logarithmic ones.
pub(crate) fn integrate_profile<F>(
    upper: f64,
    k2: f64,
    low_cut: f64,
    tol: f64,
    f: F,
) -> Result<ProfileIntegral>
where
    F: Fn(f64) -> Result<f64>,
{
    let ts = TanhSinh::with_tol(tol);
    let r = ts.integrate(0.0, upper, |x, dl, _| {
        let kappa = if dl < low_cut {
            low_cut
        } else if k2 - x < KAPPA2_CUTOFF {
            k2 - KAPPA2_CUTOFF
        } else {
            x
        };
        f(kappa)
    })?;
    Ok(ProfileIntegral {
        value: r.value,
        error: r.error,
    })
}

/// `(C_2, C_1, C_0)` at `kappa_+`, with quadrature error bars.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CCoefficients {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    pub c2_err: f64,
    pub c1_err: f64,
    pub c0_err: f64,
}

pub fn c_coefficients(kappa_plus: f64, mu: f64, a: f64, eps: u8, tol: f64) -> Result<CCoefficients> {
    let k2 = kappa2(mu, a)?;
    if !(kappa_plus > 0.0 && kappa_plus < k2) {
        return Err(Error::regime(format!(
            "kappa_+ = {kappa_plus} outside (0, kappa_2 = {k2})"
        )));
    }
    let l = (1.0 + a * a).ln();
    let xc = x0_constants(mu, a)?;
    let ig = integrate_profile(kappa_plus, k2, KAPPA0_CUTOFF, tol, |k| g_fn(k, mu, a))?;
    let ih = integrate_profile(kappa_plus, k2, KAPPA0_CUTOFF, tol, |k| h_fn(k, mu, a, eps))?;
    let i_f = integrate_profile(kappa_plus, k2, KAPPA0_CUTOFF_F, tol, |k| {
        Ok(f_fn(k, mu, a, eps)? - 1.0 / (12.0 * k))
    })?;
    let dg = dg_dkappa(kappa_plus, mu, a)?;
    let eps_f = eps as f64;
    Ok(CCoefficients {
        c2: (0.5 - mu + mu * mu) * l + ig.value,
        c1: ih.value - 0.5 * xc.phi0 + (0.5 - eps_f * mu) * l,
        c0: i_f.value + kappa_plus.ln() / 12.0 - dg / 24.0 - xc.log_curv / 6.0
            - 0.5 * eps_f * xc.log_one_minus_ax0
            + zeta_prime_minus_one(),
        c2_err: ig.error,
        c1_err: ih.error,
        c0_err: i_f.error,
    })
}

/// Residuals (computed minus claimed) of the three integral identities
/// over `(0, kappa_2)`.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct IdentityReport {
    pub mu: f64,
    pub a: f64,
    pub epsilon: u8,
    pub kappa2: f64,
    pub g_integral: f64,
    pub g_claimed: f64,
    pub g_residual: f64,
    pub h_integral: f64,
    pub h_claimed: f64,
    pub h_residual: f64,
    pub f_integral: f64,
    pub f_claimed: f64,
    pub f_residual: f64,
}

pub fn identity_checks(mu: f64, a: f64, eps: u8) -> Result<IdentityReport> {
    let (_, cstar, _) = crate::saddles::edge_constants(mu, a)?;
    let k2 = kappa2(mu, a)?;
    let xc = x0_constants(mu, a)?;
    let l = (1.0 + a * a).ln();
    let eps_f = eps as f64;
    let tol = 1e-9;
    let ig = integrate_profile(k2, k2, KAPPA0_CUTOFF, tol, |k| g_fn(k, mu, a))?.value;
    let ih = integrate_profile(k2, k2, KAPPA0_CUTOFF, tol, |k| h_fn(k, mu, a, eps))?.value;
    let i_f = integrate_profile(k2, k2, KAPPA0_CUTOFF_F, tol, |k| {
        Ok(f_fn(k, mu, a, eps)? - 1.0 / (12.0 * k) - 1.0 / (8.0 * (k2 - k)))
    })?
    .value;
    let g_claimed = mu * (1.0 - mu) * l;
    let h_claimed = 0.5 * xc.phi0 + eps_f * mu * l;
    let f_claimed = -5.0 / 24.0 * k2.ln() + xc.log_curv / 6.0 + 0.5 * eps_f * xc.log_one_minus_ax0
        + (2.0 * cstar).ln() / 24.0;
    Ok(IdentityReport {
        mu,
        a,
        epsilon: eps,
        kappa2: k2,
        g_integral: ig,
        g_claimed,
        g_residual: ig - g_claimed,
        h_integral: ih,
        h_claimed,
        h_residual: ih - h_claimed,
        f_integral: i_f,
        f_claimed,
        f_residual: i_f - f_claimed,
    })
}

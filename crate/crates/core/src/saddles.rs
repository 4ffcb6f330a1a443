//! Saddle points and critical-curve constants.
//!
//! With `mu = m/N`, `kappa = k/N` and weight `a`, the relevant phase is
//! `phi(z) = (kappa - mu) log z + (1 - mu) log(1 - a z) + mu log(z + a)`.
//! At `kappa = 0` its derivative reduces to that of
//! `phi_0(z) = (1 - mu) log(1 - a z) + mu log(z / (z + a))`, whose real
//! saddle `x_0 < -a` drives the almost-maximal regime. For
//! `0 < kappa < kappa_2` the branch point `z_0` lies in the upper half
//! plane and is found through a root `gamma` of a quartic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the excluded strip around `mu = a^2/(1+a^2)` for edge
/// constants.
pub const DEGENERATE_STRIP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseParams {
    pub mu: f64,
    pub kappa: f64,
    pub a: f64,
    pub epsilon: u8,
}

impl PhaseParams {
    pub fn new(mu: f64, kappa: f64, a: f64, epsilon: u8) -> Self {
        PhaseParams {
            mu,
            kappa,
            a,
            epsilon,
        }
    }
}

/// Constants depending on `(mu, a)` only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleData {
    pub mu: f64,
    pub a: f64,
    pub kappa2: f64,
    pub x0: f64,
    pub phi0_at_x0: f64,
    pub phi0pp_at_x0: f64,
    /// Edge constants, present when `mu` is above `a^2/(1+a^2)`.
    pub xstar: Option<f64>,
    pub cstar: Option<f64>,
    pub sstar: Option<f64>,
}

/// The point `z_0` of the liquid regime and its `gamma` parametrisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiquidSaddleData {
    pub params: PhaseParams,
    #[serde(with = "complex_serde")]
    pub z0: Complex64,
    pub gamma: f64,
    pub abs_z0: f64,
    pub abs_z0_plus_a: f64,
    pub abs_z0_minus_inva: f64,
    /// Residuals of the two defining equations.
    pub residuals: (f64, f64),
}

mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

fn check_mu_a(mu: f64, a: f64) -> Result<()> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::param(format!("mu = {mu} must lie in (0, 1)")));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::param(format!("a = {a} must lie in (0, 1]")));
    }
    Ok(())
}

/// `kappa_2(mu) = (a^2 (2 mu - 1) + 2 a sqrt(mu (1 - mu))) / (1 + a^2)`.
pub fn kappa2(mu: f64, a: f64) -> Result<f64> {
    check_mu_a(mu, a)?;
    Ok((a * a * (2.0 * mu - 1.0) + 2.0 * a * (mu * (1.0 - mu)).sqrt()) / (1.0 + a * a))
}

/// Threshold `a^2 / (1 + a^2)` above which the corner tip can meet the
/// arctic curve.
pub fn mu_threshold(a: f64) -> f64 {
    a * a / (1.0 + a * a)
}

pub fn phi0(z: f64, mu: f64, a: f64) -> f64 {
    (1.0 - mu) * (1.0 - a * z).ln() + mu * (z / (z + a)).ln()
}

pub fn phi0_prime(z: f64, mu: f64, a: f64) -> f64 {
    -a * (1.0 - mu) / (1.0 - a * z) + mu * a / (z * (z + a))
}

pub fn phi0_second(z: f64, mu: f64, a: f64) -> f64 {
    let u = 1.0 - a * z;
    -a * a * (1.0 - mu) / (u * u) - mu / (z * z) + mu / ((z + a) * (z + a))
}

/// `(x_0, phi_0(x_0), phi_0''(x_0))`.
pub fn x0_phi0(mu: f64, a: f64) -> Result<(f64, f64, f64)> {
    check_mu_a(mu, a)?;
    if 1.0 - mu < 1e-12 {
        return Err(Error::param("mu too close to 1: x0 degenerates"));
    }
    let x0 = (-a - (a * a + 4.0 * mu * (1.0 - mu)).sqrt()) / (2.0 * (1.0 - mu));
    Ok((x0, phi0(x0, mu, a), phi0_second(x0, mu, a)))
}

/// `x*` in the form `(kappa_2 + a^2 (2 mu - kappa_2 - 1)) / (2 a (1 + kappa_2 - mu))`,
/// which is the double root of the critical-point quadratic at
/// `kappa = kappa_2` and has no removable singularity at `mu = 1/(1+a^2)`.
pub fn xstar(mu: f64, a: f64) -> Result<f64> {
    let k2 = kappa2(mu, a)?;
    Ok((k2 + a * a * (2.0 * mu - k2 - 1.0)) / (2.0 * a * (1.0 + k2 - mu)))
}

/// `(x*, c*, s*)` with `s* = c*^{-1/3}`.
pub fn edge_constants(mu: f64, a: f64) -> Result<(f64, f64, f64)> {
    check_mu_a(mu, a)?;
    let th = mu_threshold(a);
    if mu <= th {
        return Err(Error::regime(format!(
            "edge constants need mu > a^2/(1+a^2) = {th:.6}, got {mu}"
        )));
    }
    if mu < th + DEGENERATE_STRIP {
        return Err(Error::regime(format!(
            "mu = {mu} lies in the degenerate strip above a^2/(1+a^2) = {th:.6}, where the corner tip touches the boundary"
        )));
    }
    let k2 = kappa2(mu, a)?;
    let x = xstar(mu, a)?;
    let ax = a * x;
    let c = mu - k2 + a.powi(3) * (1.0 - mu) * x.powi(3) / (1.0 - ax).powi(3)
        - mu * x.powi(3) / (x + a).powi(3);
    if !(c > 0.0) {
        return Err(Error::Internal(format!("c* = {c} is not positive")));
    }
    Ok((x, c, c.powf(-1.0 / 3.0)))
}

pub fn saddle_data(mu: f64, a: f64) -> Result<SaddleData> {
    let k2 = kappa2(mu, a)?;
    let (x0, p0, pp) = x0_phi0(mu, a)?;
    let edge = edge_constants(mu, a).ok();
    Ok(SaddleData {
        mu,
        a,
        kappa2: k2,
        x0,
        phi0_at_x0: p0,
        phi0pp_at_x0: pp,
        xstar: edge.map(|e| e.0),
        cstar: edge.map(|e| e.1),
        sstar: edge.map(|e| e.2),
    })
}

/// Coefficients of `p(gamma)`, highest degree first.
pub fn quartic_coefficients(mu: f64, kappa: f64, a: f64) -> [f64; 5] {
    let a2 = a * a;
    [
        a * (kappa + 1.0 - mu),
        a2 * kappa + a2 - kappa + 2.0 * mu - 2.0,
        -3.0 * a,
        a2 * (kappa - 1.0) + (2.0 * mu - kappa),
        a * (mu - kappa),
    ]
}

pub fn eval_poly(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Bisection to full precision on a bracket with a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Real roots of `p` on `(-inf, -a)`, `(-a, 0)`, `(0, 1/a)` and `(1/a, inf)`,
/// one per interval when a sign change exists there.
pub fn quartic_roots(mu: f64, kappa: f64, a: f64) -> [Option<f64>; 4] {
    let c = quartic_coefficients(mu, kappa, a);
    let bound = 1.0 + c[1..].iter().map(|x| (x / c[0]).abs()).fold(0.0, f64::max);
    let p = |g: f64| eval_poly(&c, g);
    let edges = [-bound, -a, 0.0, 1.0 / a, bound];
    let mut out = [None; 4];
    for i in 0..4 {
        out[i] = bisect(p, edges[i], edges[i + 1]);
    }
    out
}

/// `|c| + Re c` without cancellation.
pub fn abs_plus_re(c: Complex64) -> f64 {
    if c.re < 0.0 {
        c.im * c.im / (c.norm() - c.re)
    } else {
        c.norm() + c.re
    }
}

/// `|c| - Re c` without cancellation.
pub fn abs_minus_re(c: Complex64) -> f64 {
    if c.re > 0.0 {
        c.im * c.im / (c.norm() + c.re)
    } else {
        c.norm() - c.re
    }
}

fn z0_residuals(z: Complex64, mu: f64, kappa: f64, a: f64) -> (f64, f64) {
    let r0 = z.norm();
    let rp = (z + a).norm();
    let rm = (z - 1.0 / a).norm();
    (
        (1.0 - mu) / rm + (mu - kappa) / r0 - mu / rp,
        kappa + 1.0 - mu - a * mu / rp - (1.0 - mu) / (a * rm),
    )
}

/// Solves for `z_0` in the upper half plane, `0 < kappa < kappa_2`.
pub fn solve_z0(params: PhaseParams) -> Result<LiquidSaddleData> {
    let PhaseParams { mu, kappa, a, .. } = params;
    check_mu_a(mu, a)?;
    let k2 = kappa2(mu, a)?;
    if !(kappa > 0.0 && kappa < k2) {
        return Err(Error::regime(format!(
            "kappa = {kappa} outside the liquid range (0, kappa_2 = {k2})"
        )));
    }
    let c = quartic_coefficients(mu, kappa, a);
    let gamma = bisect(|g| eval_poly(&c, g), 0.0, 1.0 / a).ok_or_else(|| {
        Error::regime(format!(
            "quartic has no root in (0, 1/a) at mu = {mu}, kappa = {kappa}"
        ))
    })?;
    let s = kappa + 1.0 - mu;
    let rp = (1.0 + a * a) * mu / ((a + gamma) * s);
    let rm = (1.0 + a * a) * (1.0 - mu) / (a * (1.0 - a * gamma) * s);
    let r0 = (mu - kappa) / ((1.0 - mu + kappa) * gamma);
    // Law of cosines in the triangles (-a, 0, z0) and (0, 1/a, z0). Both
    // give Re z0; average them weighted by conditioning.
    let x_from_p = (rp * rp - r0 * r0 - a * a) / (2.0 * a);
    let x_from_m = (r0 * r0 + 1.0 / (a * a) - rm * rm) * a / 2.0;
    let x = 0.5 * (x_from_p + x_from_m);
    // Im z0 from Heron-type product, stable for thin triangles:
    // 4 a^2 Y^2 = (r0 + rp + a)(-r0 + rp + a)(r0 - rp + a)(r0 + rp - a).
    let heron = (r0 + rp + a) * (rp + a - r0) * (r0 - rp + a) * (r0 + rp - a);
    if !(heron > 0.0) {
        return Err(Error::Internal(format!(
            "z0 reconstruction failed (degenerate triangle) at mu = {mu}, kappa = {kappa}"
        )));
    }
    let y = heron.sqrt() / (2.0 * a);
    let mut z = Complex64::new(x, y);
    let mut res = z0_residuals(z, mu, kappa, a);
    // Newton polish on the original system.
    for _ in 0..4 {
        if res.0.abs().max(res.1.abs()) < 1e-15 {
            break;
        }
        let h = 1e-7 * (1.0 + z.norm());
        let rx = z0_residuals(z + Complex64::new(h, 0.0), mu, kappa, a);
        let ry = z0_residuals(z + Complex64::new(0.0, h), mu, kappa, a);
        let j = [
            [(rx.0 - res.0) / h, (ry.0 - res.0) / h],
            [(rx.1 - res.1) / h, (ry.1 - res.1) / h],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dx = (res.0 * j[1][1] - res.1 * j[0][1]) / det;
        let dy = (j[0][0] * res.1 - j[1][0] * res.0) / det;
        let cand = Complex64::new(z.re - dx, z.im - dy);
        let cres = z0_residuals(cand, mu, kappa, a);
        if cand.im > 0.0 && cres.0.abs().max(cres.1.abs()) < res.0.abs().max(res.1.abs()) {
            z = cand;
            res = cres;
        } else {
            break;
        }
    }
    if !(z.im > 0.0) {
        return Err(Error::Internal(format!("Im z0 = {} is not positive", z.im)));
    }
    Ok(LiquidSaddleData {
        params,
        z0: z,
        gamma,
        abs_z0: z.norm(),
        abs_z0_plus_a: (z + a).norm(),
        abs_z0_minus_inva: (z - 1.0 / a).norm(),
        residuals: res,
    })
}

/// Leading coefficient of `Im z_0 ~ c sqrt(kappa_2 - kappa)` as
/// `kappa -> kappa_2`.
pub fn z0_edge_sqrt_coefficient(mu: f64, a: f64) -> f64 {
    let a2 = a * a;
    let r = (mu * (1.0 - mu)).sqrt();
    2f64.sqrt() * (1.0 + a2).powf(1.5) * r.sqrt()
        / (a.sqrt() * (1.0 - (1.0 - a2) * mu + 2.0 * a * r))
}

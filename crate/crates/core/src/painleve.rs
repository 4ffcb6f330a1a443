//! Hastings-McLeod solution of Painleve II and the Tracy-Widom
//! distribution `F^TW(s) = exp(-int_s^inf (x - s) u(x)^2 dx)`.
//!
//! `u'' = s u + 2 u^3` is solved as a two-point boundary-value problem with
//! the fourth-order Numerov scheme and damped Newton iterations on the
//! tridiagonal Jacobian. Shooting is useless here: the solution separates
//! two exponentially diverging families.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{airy, airy_square_moment_tail, airy_square_tail, zeta_prime_minus_one};

/// Below this `s` the left-tail expansion replaces the grid.
pub const LEFT_SWITCH: f64 = -10.0;
/// Above this `s` the Airy closed form replaces the grid.
pub const RIGHT_SWITCH: f64 = 6.0;
pub const DEFAULT_S_MIN: f64 = -16.0;
pub const DEFAULT_S_MAX: f64 = 10.0;
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_NEWTON: usize = 60;
const MAX_REFINE: usize = 8;
const INITIAL_STEP: f64 = 1.0 / 32.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwSource {
    Grid,
    LeftTail,
    RightTail,
}

impl TwSource {
    pub fn label(self) -> &'static str {
        match self {
            TwSource::Grid => "grid",
            TwSource::LeftTail => "left-tail",
            TwSource::RightTail => "right-tail",
        }
    }
}

/// Tabulated Hastings-McLeod data on a uniform grid.
#[derive(Debug, Clone, Serialize)]
pub struct PainleveSolution {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub u_prime: Vec<f64>,
    /// `q(s) = -int_s^inf u^2`.
    pub q: Vec<f64>,
    pub log_ftw: Vec<f64>,
    /// Richardson estimate of the error in `u` and `log F^TW`.
    pub tol: f64,
    pub newton_iterations: usize,
}

/// `sqrt(-s/2) (1 + 1/(8 s^3) - 73/(128 s^6))` and its derivative.
pub fn left_asymptotic_u(s: f64) -> (f64, f64) {
    let r = (-s / 2.0).sqrt();
    let s3 = s * s * s;
    let corr = 1.0 + 1.0 / (8.0 * s3) - 73.0 / (128.0 * s3 * s3);
    let dcorr = -3.0 / (8.0 * s3 * s) + 6.0 * 73.0 / (128.0 * s3 * s3 * s);
    (r * corr, -corr / (4.0 * r) + r * dcorr)
}

/// `-s^2/4 + 1/(8 s)`.
pub fn left_asymptotic_q(s: f64) -> f64 {
    -s * s / 4.0 + 1.0 / (8.0 * s)
}

/// `-|s|^3/12 - log|s|/8 + log 2/24 + zeta'(-1) + 3/(64 |s|^3)`.
pub fn left_tail_log_ftw(s: f64) -> f64 {
    let t = s.abs();
    -t.powi(3) / 12.0 - t.ln() / 8.0 + 2f64.ln() / 24.0 + zeta_prime_minus_one()
        + 3.0 / (64.0 * t.powi(3))
}

/// Leading right-tail magnitude `exp(-4/3 s^{3/2}) / (16 pi s^{3/2})`.
pub fn right_tail_leading(s: f64) -> f64 {
    let p = s.powf(1.5);
    (-4.0 / 3.0 * p).exp() / (16.0 * std::f64::consts::PI * p)
}

/// `log F^TW` with `u` replaced by `Ai`; exact up to `O(Ai^4)` terms.
pub fn right_tail_log_ftw(s: f64) -> f64 {
    -airy_square_moment_tail(s)
}

fn solve_tridiagonal(lower: &[f64], diag: &mut [f64], upper: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    for i in 1..n {
        if diag[i - 1] == 0.0 {
            return Err(Error::Solver("singular tridiagonal pivot".into()));
        }
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
    Ok(())
}

fn rhs_f(s: f64, u: f64) -> f64 {
    s * u + 2.0 * u * u * u
}

fn numerov_residual(s: &[f64], u: &[f64], h: f64) -> Vec<f64> {
    let c = h * h / 12.0;
    (1..u.len() - 1)
        .map(|i| {
            u[i + 1] - 2.0 * u[i] + u[i - 1]
                - c * (rhs_f(s[i + 1], u[i + 1]) + 10.0 * rhs_f(s[i], u[i]) + rhs_f(s[i - 1], u[i - 1]))
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Raw Numerov solve on `n` intervals; returns the grid, `u` and the
/// Newton iteration count.
fn solve_grid(s_min: f64, s_max: f64, n: usize, guess: Option<&dyn Fn(f64) -> f64>) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let h = (s_max - s_min) / n as f64;
    let s: Vec<f64> = (0..=n).map(|i| s_min + h * i as f64).collect();
    let init = |x: f64| match guess {
        Some(g) => g(x),
        None => airy(x).0.max((-x / 2.0).max(0.0).sqrt()),
    };
    let mut u: Vec<f64> = s.iter().map(|&x| init(x)).collect();
    u[0] = left_asymptotic_u(s_min).0;
    u[n] = airy(s_max).0;

    let c = h * h / 12.0;
    let mut trace = Vec::new();
    let mut res = numerov_residual(&s, &u, h);
    let mut norm = max_abs(&res);
    for it in 0..MAX_NEWTON {
        trace.push(norm);
        if norm < 1e-15 {
            return Ok((s, u, it));
        }
        let m = n - 1;
        let fu = |i: usize| s[i] + 6.0 * u[i] * u[i];
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        for j in 0..m {
            let i = j + 1;
            diag[j] = -2.0 - 10.0 * c * fu(i);
            if j > 0 {
                lower[j] = 1.0 - c * fu(i - 1);
            }
            if j + 1 < m {
                upper[j] = 1.0 - c * fu(i + 1);
            }
        }
        let mut delta: Vec<f64> = res.iter().map(|r| -r).collect();
        solve_tridiagonal(&lower, &mut diag, &upper, &mut delta)?;

        let mut lambda = 1.0;
        loop {
            let mut trial = u.clone();
            for j in 0..m {
                trial[j + 1] += lambda * delta[j];
            }
            let tres = numerov_residual(&s, &trial, h);
            let tnorm = max_abs(&tres);
            if tnorm < norm || lambda < 1e-4 {
                // Accept a non-decreasing step only at the rounding floor.
                if tnorm >= norm && norm > 1e-13 {
                    return Err(Error::Solver(format!(
                        "Newton stalled after {it} iterations; residual trace {trace:?}"
                    )));
                }
                if tnorm >= norm {
                    return Ok((s, u, it));
                }
                u = trial;
                res = tres;
                norm = tnorm;
                break;
            }
            lambda *= 0.5;
        }
    }
    if norm < 1e-12 {
        return Ok((s, u, MAX_NEWTON));
    }
    Err(Error::Solver(format!(
        "Newton did not converge in {MAX_NEWTON} iterations; residual trace {trace:?}"
    )))
}

/// Cubic Hermite interpolation on `[x0, x0 + h]` at `t in [0, 1]`.
fn hermite(t: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

/// Integral of the Hermite cubic over a whole interval.
fn hermite_integral(h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    h * (y0 + y1) / 2.0 + h * h * (d0 - d1) / 12.0
}

impl PainleveSolution {
    fn from_grid(s: Vec<f64>, u: Vec<f64>, iterations: usize) -> Self {
        let n = s.len() - 1;
        let h = s[1] - s[0];
        let f: Vec<f64> = s.iter().zip(&u).map(|(&x, &y)| rhs_f(x, y)).collect();
        let mut up = vec![0.0; n + 1];
        for i in 1..n {
            up[i] = (u[i + 1] - u[i - 1]) / (2.0 * h) - h * (f[i + 1] - f[i - 1]) / 12.0;
        }
        up[0] = left_asymptotic_u(s[0]).1;
        up[n] = airy(s[n]).1;

        // Backward cumulative integrals of u^2 and x u^2.
        let s_max = s[n];
        let mut i0 = vec![0.0; n + 1];
        let mut i1 = vec![0.0; n + 1];
        for i in (0..n).rev() {
            let g = |j: usize| u[j] * u[j];
            let dg = |j: usize| 2.0 * u[j] * up[j];
            i0[i] = i0[i + 1] + hermite_integral(h, g(i), dg(i), g(i + 1), dg(i + 1));
            let xg = |j: usize| s[j] * g(j);
            let dxg = |j: usize| g(j) + s[j] * dg(j);
            i1[i] = i1[i + 1] + hermite_integral(h, xg(i), dxg(i), xg(i + 1), dxg(i + 1));
        }
        let tail0 = airy_square_tail(s_max);
        let tail1 = airy_square_moment_tail(s_max);
        let q: Vec<f64> = i0.iter().map(|v| -(v + tail0)).collect();
        let log_ftw: Vec<f64> = (0..=n)
            .map(|i| -(i1[i] - s[i] * i0[i] + tail1 + (s_max - s[i]) * tail0))
            .collect();
        PainleveSolution {
            grid: s,
            u,
            u_prime: up,
            q,
            log_ftw,
            tol: f64::NAN,
            newton_iterations: iterations,
        }
    }

    pub fn s_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn s_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    fn locate(&self, s: f64) -> Result<(usize, f64)> {
        if !(s >= self.s_min() && s <= self.s_max()) {
            return Err(Error::Range(format!(
                "s = {s} outside the grid [{}, {}]",
                self.s_min(),
                self.s_max()
            )));
        }
        let h = self.step();
        let n = self.grid.len() - 1;
        let i = (((s - self.s_min()) / h).floor() as usize).min(n - 1);
        Ok((i, (s - self.grid[i]) / h))
    }

    /// Interpolated `u(s)` on the grid.
    pub fn u_at(&self, s: f64) -> Result<f64> {
        let (i, t) = self.locate(s)?;
        Ok(hermite(t, self.step(), self.u[i], self.u_prime[i], self.u[i + 1], self.u_prime[i + 1]))
    }

    /// Interpolated `q(s)` on the grid, using `q' = u^2`.
    pub fn q_at(&self, s: f64) -> Result<f64> {
        let (i, t) = self.locate(s)?;
        let d = |j: usize| self.u[j] * self.u[j];
        Ok(hermite(t, self.step(), self.q[i], d(i), self.q[i + 1], d(i + 1)))
    }

    /// Interpolated `log F^TW(s)` on the grid, using `(log F^TW)' = -q`.
    pub fn log_ftw_grid(&self, s: f64) -> Result<f64> {
        let (i, t) = self.locate(s)?;
        Ok(hermite(t, self.step(), self.log_ftw[i], -self.q[i], self.log_ftw[i + 1], -self.q[i + 1]))
    }

    /// `log F^TW(s)` and where it came from.
    pub fn log_ftw_with_source(&self, s: f64) -> Result<(f64, TwSource)> {
        if !s.is_finite() {
            return Err(Error::param(format!("s = {s} is not finite")));
        }
        if s > RIGHT_SWITCH || s > self.s_max() {
            Ok((right_tail_log_ftw(s), TwSource::RightTail))
        } else if s < LEFT_SWITCH || s < self.s_min() {
            Ok((left_tail_log_ftw(s), TwSource::LeftTail))
        } else {
            Ok((self.log_ftw_grid(s)?, TwSource::Grid))
        }
    }

    pub fn log_ftw(&self, s: f64) -> Result<f64> {
        Ok(self.log_ftw_with_source(s)?.0)
    }

    /// Maximum Numerov residual over the interior nodes.
    pub fn ode_residual(&self) -> f64 {
        max_abs(&numerov_residual(&self.grid, &self.u, self.step()))
    }

    /// Solution on the default interval, computed once per process.
    pub fn standard() -> &'static PainleveSolution {
        static SOL: OnceLock<PainleveSolution> = OnceLock::new();
        SOL.get_or_init(|| {
            solve_hastings_mcleod(DEFAULT_S_MIN, DEFAULT_S_MAX, DEFAULT_TOL)
                .expect("default Hastings-McLeod solve")
        })
    }
}

/// Solves on a fixed number of intervals without refinement.
pub fn solve_fixed(s_min: f64, s_max: f64, intervals: usize) -> Result<PainleveSolution> {
    let (s, u, it) = solve_grid(s_min, s_max, intervals, None)?;
    Ok(PainleveSolution::from_grid(s, u, it))
}

/// Refines the grid until two successive solutions agree to `tol`.
pub fn solve_hastings_mcleod(s_min: f64, s_max: f64, tol: f64) -> Result<PainleveSolution> {
    if !(s_min < -1.0 && s_max > 1.0 && s_min.is_finite() && s_max.is_finite()) {
        return Err(Error::param(format!("interval [{s_min}, {s_max}] must contain [-1, 1]")));
    }
    if !(tol >= 1e-12) {
        return Err(Error::param(format!("tol = {tol} must be at least 1e-12")));
    }
    let mut n = ((s_max - s_min) / INITIAL_STEP).ceil() as usize;
    let mut coarse = solve_fixed(s_min, s_max, n)?;
    let mut estimate = f64::INFINITY;
    for _ in 0..MAX_REFINE {
        n *= 2;
        let prev = &coarse;
        let guess = |x: f64| prev.u_at(x).unwrap_or(0.0);
        let (s, u, it) = solve_grid(s_min, s_max, n, Some(&guess))?;
        let fine = PainleveSolution::from_grid(s, u, it);
        // Fourth-order scheme: the change over one halving is ~15x the
        // remaining error.
        let change = (0..coarse.grid.len())
            .map(|i| {
                let du = (coarse.u[i] - fine.u[2 * i]).abs();
                let dl = (coarse.log_ftw[i] - fine.log_ftw[2 * i]).abs();
                du.max(dl)
            })
            .fold(0.0, f64::max);
        estimate = change / 15.0;
        coarse = fine;
        if estimate <= tol {
            coarse.tol = estimate;
            return Ok(coarse);
        }
    }
    Err(Error::Accuracy {
        what: "Hastings-McLeod solution".into(),
        achieved: estimate,
        requested: tol,
    })
}

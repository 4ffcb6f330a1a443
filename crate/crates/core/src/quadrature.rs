//! Numerical integration: Gauss-Legendre rules and adaptive tanh-sinh.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss-Legendre rule with `panels` equal panels.
pub fn composite_gauss<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let mut s = 0.0;
        for (xi, wi) in rule.0.iter().zip(&rule.1) {
            s += wi * f(mid + 0.5 * h * xi);
        }
        total += 0.5 * h * s;
    }
    total
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error: f64,
    pub evaluations: usize,
}

/// Options for [`tanh_sinh`].
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    pub tol: f64,
    pub max_level: u32,
    /// Nodes closer than this to either endpoint are skipped; the caller
    /// accounts for the omitted end pieces analytically if needed.
    pub end_cutoff: f64,
}

impl Default for TanhSinh {
    fn default() -> Self {
        TanhSinh {
            tol: 1e-12,
            max_level: 12,
            end_cutoff: 0.0,
        }
    }
}

impl TanhSinh {
    pub fn with_tol(tol: f64) -> Self {
        TanhSinh {
            tol,
            ..Self::default()
        }
    }

    /// Integrates `f(x, x - a, b - x)` over `[a, b]`. Passing the endpoint
    /// distances lets integrands with endpoint singularities avoid
    /// cancellation in `x - a` or `b - x`.
    pub fn integrate<F>(&self, a: f64, b: f64, f: F) -> Result<Integral>
    where
        F: Fn(f64, f64, f64) -> Result<f64>,
    {
        let half = 0.5 * (b - a);
        let tmax = 4.0;
        let eval = |t: f64| -> Result<f64> {
            let s = 0.5 * PI * t.sinh();
            // 1 - tanh(s) and 1 + tanh(s) computed without cancellation.
            let e = (-2.0 * s.abs()).exp();
            let small = 2.0 * e / (1.0 + e);
            let (dl, dr) = if s >= 0.0 {
                (half * (2.0 - small), half * small)
            } else {
                (half * small, half * (2.0 - small))
            };
            if dl <= self.end_cutoff || dr <= self.end_cutoff || dl <= 0.0 || dr <= 0.0 {
                return Ok(0.0);
            }
            let x = if dl < dr { a + dl } else { b - dr };
            let cosh_s = s.cosh();
            let w = 0.5 * PI * t.cosh() / (cosh_s * cosh_s);
            let v = f(x, dl, dr)?;
            if !v.is_finite() {
                return Err(Error::Accuracy {
                    what: format!("non-finite integrand at x = {x:e}"),
                    achieved: f64::INFINITY,
                    requested: self.tol,
                });
            }
            Ok(half * w * v)
        };
        let mut h = 1.0;
        let mut evaluations = 1;
        let mut sum = eval(0.0)?;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            let t = k as f64 * h;
            sum += eval(t)? + eval(-t)?;
            evaluations += 2;
            k += 1;
        }
        let mut prev = sum * h;
        let mut err = f64::INFINITY;
        for _level in 1..=self.max_level {
            h *= 0.5;
            let mut k = 1;
            while (k as f64) * h <= tmax {
                let t = k as f64 * h;
                sum += eval(t)? + eval(-t)?;
                evaluations += 2;
                k += 2;
            }
            let cur = sum * h;
            err = (cur - prev).abs();
            if err <= self.tol * cur.abs().max(1.0) && _level >= 3 {
                return Ok(Integral {
                    value: cur,
                    error: err,
                    evaluations,
                });
            }
            prev = cur;
        }
        Err(Error::Accuracy {
            what: "tanh-sinh quadrature did not converge".into(),
            achieved: err,
            requested: self.tol,
        })
    }
}

//! Exact weighted tiling counts `F_N^{m,k}(a; epsilon)`.
//!
//! Two independent paths are provided: frontier enumeration (small
//! regions, used as an oracle) and a Kasteleyn determinant computed by
//! multi-modular arithmetic (scales to `N` around 64).

pub mod enumerate;
pub mod kasteleyn;
pub mod modular;

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::regions::{build_graph, build_region, MatchingGraph, RegionSpec, Variant};
use crate::weight::Weight;

pub use kasteleyn::Orientation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Enumerate,
    Determinant,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumerate" => Ok(Method::Enumerate),
            "determinant" | "det" => Ok(Method::Determinant),
            other => Err(Error::param(format!("unknown method {other:?}"))),
        }
    }
}

/// Exact value of a weighted count together with its natural log.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCount {
    pub value: BigRational,
    /// `ln value`, or `-inf` when the value is zero.
    pub log_value: f64,
    pub method: Method,
}

impl ExactCount {
    fn new(value: BigRational, method: Method) -> Self {
        let log_value = ln_rational(&value);
        ExactCount {
            value,
            log_value,
            method,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// `num/den` rendering.
    pub fn display_value(&self) -> String {
        format!("{}/{}", self.value.numer(), self.value.denom())
    }
}

/// Natural log of a positive rational, `-inf` at zero.
pub fn ln_rational(x: &BigRational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    modular::ln_bigint(x.numer()) - modular::ln_bigint(x.denom())
}

/// Sum over perfect matchings by enumeration; at most 60 vertices.
pub fn count_enumerate(g: &MatchingGraph) -> Result<ExactCount> {
    if !g.tileable || !g.balanced() {
        if g.vertex_count() > enumerate::MAX_VERTICES {
            return Err(Error::Capacity(format!(
                "enumeration limited to {} vertices",
                enumerate::MAX_VERTICES
            )));
        }
        return Ok(ExactCount::new(BigRational::zero(), Method::Enumerate));
    }
    let poly = enumerate::tiling_polynomial(g)?;
    Ok(ExactCount::new(poly.eval(g.a), Method::Enumerate))
}

/// Sum over perfect matchings as `|det K| / q^n` for `a = p/q`.
pub fn count_determinant(g: &MatchingGraph, exec: Exec) -> Result<ExactCount> {
    count_determinant_with(g, Orientation::VerticalByColumn, exec)
}

pub fn count_determinant_with(
    g: &MatchingGraph,
    orientation: Orientation,
    exec: Exec,
) -> Result<ExactCount> {
    if !g.tileable {
        return Ok(ExactCount::new(BigRational::zero(), Method::Determinant));
    }
    let Some(mat) = kasteleyn::SignedMatrix::kasteleyn(g, orientation) else {
        return Ok(ExactCount::new(BigRational::zero(), Method::Determinant));
    };
    let det = mat.det_exact(exec)?.abs();
    let den = BigInt::from(g.a.den()).pow(mat.n as u32);
    Ok(ExactCount::new(
        BigRational::new(det, den),
        Method::Determinant,
    ))
}

/// Counts a region with the requested method.
pub fn count(spec: RegionSpec, a: Weight, method: Method, exec: Exec) -> Result<ExactCount> {
    let grid = build_region(spec)?;
    let g = build_graph(&grid, a);
    match method {
        Method::Enumerate => count_enumerate(&g),
        Method::Determinant => count_determinant(&g, exec),
    }
}

/// Picks enumeration for small graphs and the determinant otherwise.
pub fn count_auto(spec: RegionSpec, a: Weight, exec: Exec) -> Result<ExactCount> {
    let grid = build_region(spec)?;
    let g = build_graph(&grid, a);
    if g.vertex_count() <= 24 {
        count_enumerate(&g)
    } else {
        count_determinant(&g, exec)
    }
}

/// `F_N(a) = (1 + a^2)^{N(N+1)/2}`.
pub fn diamond_closed_form(n: u32, a: Weight) -> BigRational {
    let a = a.to_rational();
    let base = BigRational::one() + &a * &a;
    base.pow((n * (n + 1) / 2) as i32)
}

/// Closed form of `F_N^{m,1}(a; epsilon)`: the region splits into two
/// smaller diamonds, giving `(1 + a^2)^{N(N+1)/2 - m(N + epsilon - m)}`.
pub fn mirror_closed_form(n: u32, m: u32, epsilon: u8, a: Weight) -> BigRational {
    let a = a.to_rational();
    let base = BigRational::one() + &a * &a;
    let e = (n * (n + 1) / 2) as i64 - m as i64 * (n as i64 + epsilon as i64 - m as i64);
    base.pow(e as i32)
}

/// `F_N^{m,k+1} / F_N^{m,k}` for two specs that differ only in `k` by one.
pub fn ratio(high: RegionSpec, low: RegionSpec, a: Weight, exec: Exec) -> Result<BigRational> {
    let same = high.n == low.n
        && high.m == low.m
        && high.epsilon == low.epsilon
        && high.variant == low.variant
        && high.k == low.k + 1;
    if !same {
        return Err(Error::param(
            "ratio needs two specs differing only by k -> k + 1",
        ));
    }
    let den = count_auto(low, a, exec)?;
    if den.is_zero() {
        return Err(Error::Untileable(format!(
            "denominator region (N={}, m={}, k={}) has no tilings",
            low.n, low.m, low.k
        )));
    }
    let num = count_auto(high, a, exec)?;
    Ok(num.value / den.value)
}

/// `P_N^{m,k}(a; epsilon) = F_N^{m,k}(a; epsilon) / F_N(a)`.
pub fn frozen_probability(spec: RegionSpec, a: Weight, exec: Exec) -> Result<BigRational> {
    if spec.variant == Variant::Full {
        return Err(Error::param("frozen probability needs a reduced variant"));
    }
    spec.validate()?;
    if !spec.tileable() {
        return Err(Error::Untileable(format!(
            "k = {} leaves an untileable region",
            spec.k
        )));
    }
    let num = count_auto(spec, a, exec)?;
    Ok(num.value / diamond_closed_form(spec.n, a))
}

/// Time-stamped wrapper used by the CLI.
pub fn count_timed(
    spec: RegionSpec,
    a: Weight,
    method: Method,
    exec: Exec,
) -> Result<(ExactCount, u128)> {
    let t = Instant::now();
    let c = count(spec, a, method, exec)?;
    Ok((c, t.elapsed().as_millis()))
}

//! Exhaustive matching enumeration with frontier memoization.
//!
//! Vertices are visited in their stored (column-major) order. The state
//! after deciding vertex `t` is the set of later vertices already covered,
//! kept as a bitmask of offsets relative to `t`. Each state carries the
//! generating polynomial of partial tilings by number of vertical dominoes.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::regions::MatchingGraph;
use crate::weight::Weight;

/// Largest graph accepted by the enumerator.
pub const MAX_VERTICES: usize = 60;

/// Weighted tiling polynomial: `coeffs[v]` counts tilings with `v`
/// vertical dominoes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingPolynomial {
    pub coeffs: Vec<u128>,
}

impl TilingPolynomial {
    pub fn total(&self) -> u128 {
        self.coeffs.iter().sum()
    }

    pub fn eval(&self, a: Weight) -> BigRational {
        let a = a.to_rational();
        let mut acc = BigRational::zero();
        let mut pw = BigRational::one();
        for &c in &self.coeffs {
            acc += &pw * BigRational::from_integer(BigInt::from(c));
            pw *= &a;
        }
        acc
    }
}

fn add_poly(dst: &mut Vec<u128>, src: &[u128], shift: usize) {
    if dst.len() < src.len() + shift {
        dst.resize(src.len() + shift, 0);
    }
    for (d, s) in dst[shift..].iter_mut().zip(src) {
        *d += *s;
    }
}

/// Counts perfect matchings of `g` by number of vertical edges.
pub fn tiling_polynomial(g: &MatchingGraph) -> Result<TilingPolynomial> {
    let n = g.vertex_count();
    if n > MAX_VERTICES {
        return Err(Error::Capacity(format!(
            "enumeration limited to {MAX_VERTICES} vertices, graph has {n}"
        )));
    }
    if n == 0 {
        return Ok(TilingPolynomial { coeffs: vec![1] });
    }
    // Forward neighbours (partner index > t) with verticality.
    let mut fwd: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for e in &g.edges {
        let (lo, hi) = if e.u < e.v { (e.u, e.v) } else { (e.v, e.u) };
        fwd[lo].push((hi, e.vertical));
    }
    let mut layer: HashMap<u64, Vec<u128>> = HashMap::new();
    layer.insert(0, vec![1]);
    for (t, nbrs) in fwd.iter().enumerate() {
        let mut next: HashMap<u64, Vec<u128>> = HashMap::with_capacity(layer.len() * 2);
        for (mask, poly) in layer {
            if mask & 1 == 1 {
                let entry = next.entry(mask >> 1).or_default();
                add_poly(entry, &poly, 0);
                continue;
            }
            for &(s, vertical) in nbrs {
                let bit = 1u64 << (s - t);
                if mask & bit != 0 {
                    continue;
                }
                let entry = next.entry((mask | bit) >> 1).or_default();
                add_poly(entry, &poly, vertical as usize);
            }
        }
        layer = next;
    }
    let coeffs = layer.remove(&0).unwrap_or_else(|| vec![0]);
    Ok(TilingPolynomial { coeffs })
}

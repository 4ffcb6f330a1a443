//! Signed bipartite adjacency (Kasteleyn) determinant, evaluated modulo a
//! family of word-size primes and lifted by Chinese remaindering.
//!
//! With `a = p/q`, vertical edges carry `p` and horizontal ones `q`, so
//! every perfect matching contributes `q^n a^v` and the weighted count is
//! `|det K| / q^n`, where `n` is the number of black vertices.

use num_bigint::BigInt;

use super::modular::{primes, Crt, Montgomery};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::regions::MatchingGraph;

/// Sign convention for a Kasteleyn weighting of a subgraph of `Z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Vertical edges in column `x` carry `(-1)^x`.
    VerticalByColumn,
    /// Horizontal edges in row `y` carry `(-1)^y`.
    HorizontalByRow,
}

/// Sparse integer matrix in row-major band form.
#[derive(Debug, Clone)]
pub struct SignedMatrix {
    pub n: usize,
    /// `rows[r]` lists `(column, value)` sorted by column.
    pub rows: Vec<Vec<(usize, i64)>>,
    /// Largest `r - c` over nonzero entries.
    pub lower: usize,
}

impl SignedMatrix {
    /// Builds the Kasteleyn matrix; `None` when colour classes differ.
    pub fn kasteleyn(g: &MatchingGraph, orientation: Orientation) -> Option<Self> {
        let mut black: Vec<usize> = Vec::new();
        let mut white: Vec<usize> = Vec::new();
        for (t, c) in g.vertices.iter().enumerate() {
            if c.is_black() {
                black.push(t)
            } else {
                white.push(t)
            }
        }
        if black.len() != white.len() {
            return None;
        }
        // Row-major order (j, i) keeps the matrix banded.
        let key = |t: &usize| (g.vertices[*t].j, g.vertices[*t].i);
        black.sort_by_key(key);
        white.sort_by_key(key);
        let n = black.len();
        let mut bpos = vec![usize::MAX; g.vertices.len()];
        let mut wpos = vec![usize::MAX; g.vertices.len()];
        for (r, &t) in black.iter().enumerate() {
            bpos[t] = r;
        }
        for (c, &t) in white.iter().enumerate() {
            wpos[t] = c;
        }
        let (p, q) = (g.a.num() as i64, g.a.den() as i64);
        let mut rows = vec![Vec::new(); n];
        for e in &g.edges {
            let (b, w) = if g.vertices[e.u].is_black() {
                (e.u, e.v)
            } else {
                (e.v, e.u)
            };
            let lo = if g.vertices[e.u] < g.vertices[e.v] {
                g.vertices[e.u]
            } else {
                g.vertices[e.v]
            };
            let sign = match (orientation, e.vertical) {
                (Orientation::VerticalByColumn, true) => parity_sign(lo.i),
                (Orientation::HorizontalByRow, false) => parity_sign(lo.j),
                _ => 1,
            };
            let w8 = if e.vertical { p } else { q };
            rows[bpos[b]].push((wpos[w], sign * w8));
        }
        let mut lower = 0;
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(&(c, _)) = row.first() {
                lower = lower.max(r.saturating_sub(c));
            }
        }
        Some(SignedMatrix { n, rows, lower })
    }

    /// Hadamard bound on `log2 |det|`.
    pub fn hadamard_log2(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| {
                let s: f64 = row.iter().map(|&(_, v)| (v as f64) * (v as f64)).sum();
                0.5 * s.max(1.0).log2()
            })
            .sum()
    }

    /// Determinant modulo a prime `p < 2^62` by banded elimination with a
    /// sliding window of candidate pivot rows.
    pub fn det_mod(&self, p: u64) -> u64 {
        let n = self.n;
        if n == 0 {
            return 1 % p;
        }
        let m = Montgomery::new(p);
        let l = self.lower;
        // Active rows: (original index, dense values, last nonzero column).
        let mut active: Vec<(usize, Vec<u64>, usize)> = Vec::with_capacity(l + 2);
        let mut spare: Vec<Vec<u64>> = Vec::new();
        let load = |r: usize, buf: Option<Vec<u64>>| -> (usize, Vec<u64>, usize) {
            let mut v = buf.unwrap_or_else(|| vec![0u64; n]);
            let mut last = 0;
            for &(c, x) in &self.rows[r] {
                v[c] = m.to_mont_signed(x);
                last = c;
            }
            (r, v, last)
        };
        let mut next = 0;
        while next < n && next <= l {
            active.push(load(next, None));
            next += 1;
        }
        let mut det = m.to_mont(1);
        let mut negate = false;
        for c in 0..n {
            let Some(pi) = active.iter().position(|(_, v, _)| v[c] != 0) else {
                return 0;
            };
            let (porig, prow, plast) = active.swap_remove(pi);
            // Inversions contributed by choosing `porig` before smaller rows.
            let smaller = active.iter().filter(|(o, _, _)| *o < porig).count();
            if smaller % 2 == 1 {
                negate = !negate;
            }
            let piv = prow[c];
            det = m.mul(det, piv);
            let inv = m.inv(piv);
            for (_, row, last) in active.iter_mut() {
                let x = row[c];
                if x == 0 {
                    continue;
                }
                let f = m.mul(x, inv);
                row[c] = 0;
                for j in c + 1..=plast {
                    let y = prow[j];
                    if y != 0 {
                        row[j] = m.sub(row[j], m.mul(f, y));
                    }
                }
                *last = (*last).max(plast);
            }
            let mut buf = prow;
            for x in &mut buf[c..=plast] {
                *x = 0;
            }
            spare.push(buf);
            if next < n {
                let b = spare.pop();
                active.push(load(next, b));
                next += 1;
            }
        }
        let d = m.from_mont(det);
        if negate && d != 0 {
            p - d
        } else {
            d
        }
    }

    /// Exact determinant via enough primes to exceed twice the Hadamard
    /// bound. The prime supply grows automatically.
    pub fn det_exact(&self, exec: Exec) -> Result<BigInt> {
        let need_bits = self.hadamard_log2() + 2.0;
        let per_prime = 61.0;
        let mut count = ((need_bits / per_prime).ceil() as usize).max(1) + 1;
        loop {
            let ps = primes(count);
            let residues = exec.map(&ps, |&p| self.det_mod(p));
            let mut crt = Crt::default();
            for (&r, &p) in residues.iter().zip(&ps) {
                crt.push(r, p);
            }
            if crt.modulus_bits() > need_bits {
                return Ok(crt.symmetric());
            }
            if count > 1 << 20 {
                return Err(Error::Internal("prime supply exhausted".into()));
            }
            count += count / 4 + 1;
        }
    }
}

fn parity_sign(x: i32) -> i64 {
    if x.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

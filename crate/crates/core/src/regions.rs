//! Geometry of the Aztec diamond `A_N` and its L-shaped reductions.
//!
//! Cells are unit squares addressed by their integer lower-left corner
//! `(i, j)`, exactly as in the usual Aztec-diamond coordinates: `A_N`
//! consists of the squares contained in `|x| + |y| <= N + 1`.
//!
//! The reduced domain `A_N^{m,k}` additionally keeps only squares below the
//! V-shaped curve `y = max(2m - 1 - N - x, x - 2m - 1 + N + 2k)`, whose tip
//! sits at `(2m - N - k, k - 1)`. The tilde domain is `A_N^{m+1,k+1}` with
//! the unit segment directly below the tip of its removed corner cut, so
//! that no domino may straddle it.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Full,
    Reduced,
    ReducedTilde,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Variant::Full),
            "reduced" => Ok(Variant::Reduced),
            "reduced-tilde" | "tilde" => Ok(Variant::ReducedTilde),
            other => Err(Error::param(format!("unknown variant {other:?}"))),
        }
    }
}

/// Parameters describing `A_N`, `A_N^{m,k}` or `Ã_N^{m,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionSpec {
    #[serde(rename = "N")]
    pub n: u32,
    pub m: i32,
    pub k: i32,
    pub epsilon: u8,
    pub variant: Variant,
}

impl RegionSpec {
    pub fn full(n: u32) -> Self {
        RegionSpec {
            n,
            m: n as i32,
            k: n as i32 + 1,
            epsilon: 1,
            variant: Variant::Full,
        }
    }

    pub fn reduced(n: u32, m: i32, k: i32) -> Self {
        RegionSpec {
            n,
            m,
            k,
            epsilon: 1,
            variant: Variant::Reduced,
        }
    }

    pub fn tilde(n: u32, m: i32, k: i32) -> Self {
        RegionSpec {
            n,
            m,
            k,
            epsilon: 0,
            variant: Variant::ReducedTilde,
        }
    }

    /// The domain counted by `F_N^{m,k}(a; epsilon)`: reduced for
    /// `epsilon = 1`, tilde for `epsilon = 0`.
    pub fn for_epsilon(n: u32, m: i32, k: i32, epsilon: u8) -> Result<Self> {
        match epsilon {
            1 => Ok(Self::reduced(n, m, k)),
            0 => Ok(Self::tilde(n, m, k)),
            e => Err(Error::param(format!("epsilon must be 0 or 1, got {e}"))),
        }
    }

    /// Same spec with `k` replaced.
    pub fn with_k(&self, k: i32) -> Self {
        RegionSpec { k, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("N must be positive"));
        }
        if self.epsilon > 1 {
            return Err(Error::param("epsilon must be 0 or 1"));
        }
        let n = self.n as i32;
        match self.variant {
            Variant::Full => Ok(()),
            Variant::Reduced => {
                if self.m < 1 || self.m > n {
                    return Err(Error::param(format!(
                        "m = {} violates 1 <= m <= N = {n}",
                        self.m
                    )));
                }
                if self.k > self.m + 1 {
                    return Err(Error::param(format!(
                        "k = {} violates k <= m + 1 = {}",
                        self.k,
                        self.m + 1
                    )));
                }
                Ok(())
            }
            Variant::ReducedTilde => {
                if self.m < 0 || self.m > n {
                    return Err(Error::param(format!(
                        "m = {} violates 0 <= m <= N = {n}",
                        self.m
                    )));
                }
                if self.k > self.m + 1 {
                    return Err(Error::param(format!(
                        "k = {} violates k <= m + 1 = {}",
                        self.k,
                        self.m + 1
                    )));
                }
                Ok(())
            }
        }
    }

    /// Untileable exactly when a corner is removed with `k <= 0`.
    pub fn tileable(&self) -> bool {
        match self.variant {
            Variant::Full => true,
            Variant::ReducedTilde if self.m == self.n as i32 => true,
            _ => self.k >= 1,
        }
    }

    /// `true` when the region coincides with the full diamond.
    pub fn is_full_diamond(&self) -> bool {
        match self.variant {
            Variant::Full => true,
            Variant::Reduced => self.k == self.m + 1,
            Variant::ReducedTilde => self.m == self.n as i32 || self.k == self.m + 1,
        }
    }
}

/// Unit square `[i, i+1] x [j, j+1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub i: i32,
    pub j: i32,
}

impl Cell {
    pub const fn new(i: i32, j: i32) -> Self {
        Cell { i, j }
    }

    /// Checkerboard colour; black when `i + j` is even.
    pub fn is_black(&self) -> bool {
        (self.i + self.j).rem_euclid(2) == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DominoType {
    North,
    South,
    East,
    West,
}

impl DominoType {
    pub fn is_vertical(&self) -> bool {
        matches!(self, DominoType::East | DominoType::West)
    }

    pub fn letter(&self) -> char {
        match self {
            DominoType::North => 'N',
            DominoType::South => 'S',
            DominoType::East => 'E',
            DominoType::West => 'W',
        }
    }

    /// Fill colour used in renderings: red, yellow, green, blue.
    pub fn color(&self) -> &'static str {
        match self {
            DominoType::North => "#d62728",
            DominoType::South => "#f2c300",
            DominoType::East => "#2ca02c",
            DominoType::West => "#1f5fbf",
        }
    }
}

/// Classifies the domino covering two adjacent cells of a diamond of order
/// `n`. Horizontal dominoes are north/south and vertical ones east/west,
/// according to the parity of `i + j + n` at the lower-left corner.
pub fn classify_domino(a: Cell, b: Cell, n: u32) -> Result<DominoType> {
    let (lo, vertical) = if a.j == b.j && (a.i - b.i).abs() == 1 {
        (if a.i < b.i { a } else { b }, false)
    } else if a.i == b.i && (a.j - b.j).abs() == 1 {
        (if a.j < b.j { a } else { b }, true)
    } else {
        return Err(Error::Structural(format!(
            "cells {a:?} and {b:?} are not adjacent"
        )));
    };
    let even = (lo.i + lo.j + n as i32).rem_euclid(2) == 0;
    Ok(match (vertical, even) {
        (false, true) => DominoType::North,
        (false, false) => DominoType::South,
        (true, true) => DominoType::East,
        (true, false) => DominoType::West,
    })
}

fn in_diamond(c: Cell, n: i32) -> bool {
    let mx = c.i.abs().max((c.i + 1).abs());
    let my = c.j.abs().max((c.j + 1).abs());
    mx + my <= n + 1
}

/// Whether the square lies below the V-curve of `A_N^{m,k}`.
fn below_corner(c: Cell, n: i32, m: i32, k: i32) -> bool {
    let tip = 2 * m - n - k;
    let dist = if c.i <= tip && tip <= c.i + 1 {
        0
    } else if tip < c.i {
        c.i - tip
    } else {
        tip - (c.i + 1)
    };
    c.j + 1 <= k - 1 + dist
}

fn diamond_cells(n: i32) -> impl Iterator<Item = Cell> {
    let r = -n - 1..=n;
    r.clone()
        .flat_map(move |i| r.clone().map(move |j| Cell::new(i, j)))
        .filter(move |c| in_diamond(*c, n))
}

/// Cell set of a region together with its optional cut segment.
#[derive(Debug, Clone)]
pub struct CellGrid {
    pub spec: RegionSpec,
    /// Cells in column-major order (`i`, then `j`).
    pub cells: Vec<Cell>,
    lookup: HashSet<Cell>,
    /// Pair of cells separated by the cut segment (tilde variant only).
    pub cut: Option<(Cell, Cell)>,
    pub tileable: bool,
}

impl CellGrid {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.lookup.contains(&c)
    }

    pub fn order(&self) -> u32 {
        self.spec.n
    }

    /// Type of the domino covering `a` and `b`, if both lie in the region,
    /// are adjacent and not separated by the cut.
    pub fn domino_type(&self, a: Cell, b: Cell) -> Option<DominoType> {
        if !self.contains(a) || !self.contains(b) || self.is_cut(a, b) {
            return None;
        }
        classify_domino(a, b, self.spec.n).ok()
    }

    pub fn is_cut(&self, a: Cell, b: Cell) -> bool {
        matches!(self.cut, Some((p, q)) if (p == a && q == b) || (p == b && q == a))
    }

    /// Cells of `A_N` not in this region (the removed corner).
    pub fn removed_corner(&self) -> Vec<Cell> {
        diamond_cells(self.spec.n as i32)
            .filter(|c| !self.contains(*c))
            .collect()
    }

    pub fn to_json(&self) -> RegionJson {
        RegionJson {
            n: self.spec.n,
            m: self.spec.m,
            k: self.spec.k,
            epsilon: self.spec.epsilon,
            variant: self.spec.variant,
            cells: self.cells.iter().map(|c| [c.i, c.j]).collect(),
        }
    }

    /// SVG drawing of the region boundary; the cut segment, if any, is
    /// drawn dashed.
    pub fn outline_svg(&self) -> String {
        let n = self.spec.n as f64;
        let scale = 20.0;
        let size = (2.0 * n + 4.0) * scale;
        let tx = |x: f64| (x + n + 2.0) * scale;
        let ty = |y: f64| (n + 2.0 - y) * scale;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
        );
        let _ = writeln!(out, r##"<g fill="#eeeeee" stroke="none">"##);
        for c in &self.cells {
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{scale}" height="{scale}"/>"#,
                tx(c.i as f64),
                ty(c.j as f64 + 1.0)
            );
        }
        let _ = writeln!(out, "</g>");
        let _ = writeln!(out, r#"<g stroke="black" stroke-width="2">"#);
        for c in &self.cells {
            let (x, y) = (c.i as f64, c.j as f64);
            let sides = [
                (Cell::new(c.i - 1, c.j), (x, y), (x, y + 1.0)),
                (Cell::new(c.i + 1, c.j), (x + 1.0, y), (x + 1.0, y + 1.0)),
                (Cell::new(c.i, c.j - 1), (x, y), (x + 1.0, y)),
                (Cell::new(c.i, c.j + 1), (x, y + 1.0), (x + 1.0, y + 1.0)),
            ];
            for (nb, p, q) in sides {
                if !self.contains(nb) {
                    let _ = writeln!(
                        out,
                        r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                        tx(p.0),
                        ty(p.1),
                        tx(q.0),
                        ty(q.1)
                    );
                }
            }
        }
        let _ = writeln!(out, "</g>");
        if let Some((p, q)) = self.cut {
            let x = p.i.max(q.i) as f64;
            let y = p.j as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="3" stroke-dasharray="4,2"/>"#,
                tx(x),
                ty(y),
                tx(x),
                ty(y + 1.0)
            );
        }
        out.push_str("</svg>\n");
        out
    }

    pub fn write_svg(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.outline_svg())?;
        Ok(())
    }
}

/// JSON form of a region: `{N, m, k, epsilon, variant, cells: [[i, j], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionJson {
    #[serde(rename = "N")]
    pub n: u32,
    pub m: i32,
    pub k: i32,
    pub epsilon: u8,
    pub variant: Variant,
    pub cells: Vec<[i32; 2]>,
}

/// Builds the exact cell set of `A_N`, `A_N^{m,k}` or `Ã_N^{m,k}`.
pub fn build_region(spec: RegionSpec) -> Result<CellGrid> {
    spec.validate()?;
    let n = spec.n as i32;
    let mut cut = None;
    let mut cells: Vec<Cell> = if spec.is_full_diamond() {
        diamond_cells(n).collect()
    } else {
        let (m, k) = match spec.variant {
            Variant::Reduced => (spec.m, spec.k),
            Variant::ReducedTilde => (spec.m + 1, spec.k + 1),
            Variant::Full => unreachable!(),
        };
        let cells: Vec<Cell> = diamond_cells(n)
            .filter(|c| below_corner(*c, n, m, k))
            .collect();
        if spec.variant == Variant::ReducedTilde {
            // Vertical unit segment below the tip of the removed corner.
            let x = 2 * spec.m - spec.k - n + 1;
            let y = spec.k - 1;
            let left = Cell::new(x - 1, y);
            let right = Cell::new(x, y);
            let set: HashSet<Cell> = cells.iter().copied().collect();
            if set.contains(&left) && set.contains(&right) {
                cut = Some((left, right));
            }
        }
        cells
    };
    cells.sort();
    let lookup = cells.iter().copied().collect();
    Ok(CellGrid {
        spec,
        cells,
        lookup,
        cut,
        tileable: spec.tileable(),
    })
}

/// An edge of the dimer graph, i.e. a potential domino.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub vertical: bool,
    pub kind: DominoType,
}

/// Weighted bipartite dimer graph of a region. Vertical dominoes carry
/// weight `a`, horizontal ones weight 1.
#[derive(Debug, Clone)]
pub struct MatchingGraph {
    pub spec: RegionSpec,
    pub a: Weight,
    /// Vertices in column-major cell order.
    pub vertices: Vec<Cell>,
    pub index: HashMap<Cell, usize>,
    pub edges: Vec<Edge>,
    pub tileable: bool,
}

impl MatchingGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn black_count(&self) -> usize {
        self.vertices.iter().filter(|c| c.is_black()).count()
    }

    pub fn white_count(&self) -> usize {
        self.vertices.len() - self.black_count()
    }

    pub fn balanced(&self) -> bool {
        self.black_count() == self.white_count()
    }

    /// Neighbour lists `(neighbour, edge index)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            adj[edge.u].push((edge.v, e));
            adj[edge.v].push((edge.u, e));
        }
        adj
    }
}

pub fn build_graph(grid: &CellGrid, a: Weight) -> MatchingGraph {
    let vertices = grid.cells.clone();
    let index: HashMap<Cell, usize> = vertices.iter().enumerate().map(|(t, c)| (*c, t)).collect();
    let mut edges = Vec::new();
    for (t, c) in vertices.iter().enumerate() {
        for (nb, vertical) in [(Cell::new(c.i + 1, c.j), false), (Cell::new(c.i, c.j + 1), true)] {
            if let Some(&s) = index.get(&nb) {
                if grid.is_cut(*c, nb) {
                    continue;
                }
                let kind = classify_domino(*c, nb, grid.spec.n)
                    .expect("neighbouring cells are adjacent");
                edges.push(Edge {
                    u: t,
                    v: s,
                    vertical,
                    kind,
                });
            }
        }
    }
    MatchingGraph {
        spec: grid.spec,
        a,
        vertices,
        index,
        edges,
        tileable: grid.tileable,
    }
}

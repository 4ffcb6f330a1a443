//! Random tilings of `A_N` distributed as `a^{v(T)} / (1 + a^2)^{N(N+1)/2}`,
//! with `v(T)` the number of vertical dominoes, generated by biased domino
//! shuffling.
//!
//! Each shuffling step deletes colliding pairs, slides every domino one
//! unit in its direction and fills the `2 x 2` holes that open up with two
//! horizontal dominoes (odds 1) or two vertical ones (odds `a^2`).

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::regions::{build_region, classify_domino, Cell, DominoType, RegionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Domino {
    /// Lower-left cell.
    pub cell: Cell,
    pub vertical: bool,
    pub kind: DominoType,
}

impl Domino {
    fn new(cell: Cell, vertical: bool, n: u32) -> Self {
        let other = partner(cell, vertical);
        let kind = classify_domino(cell, other, n).expect("adjacent cells");
        Domino { cell, vertical, kind }
    }

    pub fn cells(&self) -> [Cell; 2] {
        [self.cell, partner(self.cell, self.vertical)]
    }
}

fn partner(c: Cell, vertical: bool) -> Cell {
    if vertical {
        Cell::new(c.i, c.j + 1)
    } else {
        Cell::new(c.i + 1, c.j)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tiling {
    #[serde(rename = "N")]
    pub n: u32,
    pub seed: u64,
    pub dominoes: Vec<Domino>,
}

fn in_diamond(c: Cell, n: i32) -> bool {
    let mx = c.i.abs().max((c.i + 1).abs());
    let my = c.j.abs().max((c.j + 1).abs());
    mx + my <= n + 1
}

/// Dense indexing of the bounding square of `A_n`.
#[derive(Debug, Clone, Copy)]
struct Frame {
    n: i32,
    width: usize,
}

impl Frame {
    fn new(n: u32) -> Self {
        Frame {
            n: n as i32,
            width: 2 * n as usize + 2,
        }
    }

    fn index(&self, c: Cell) -> Option<usize> {
        let (x, y) = (c.i + self.n + 1, c.j + self.n + 1);
        let w = self.width as i32;
        (x >= 0 && y >= 0 && x < w && y < w).then(|| x as usize * self.width + y as usize)
    }

    fn len(&self) -> usize {
        self.width * self.width
    }
}

impl Tiling {
    pub fn vertical_count(&self) -> usize {
        self.dominoes.iter().filter(|d| d.vertical).count()
    }

    /// Sorted domino list; equal for equal tilings.
    pub fn canonical(&self) -> Vec<Domino> {
        let mut v = self.dominoes.clone();
        v.sort();
        v
    }

    /// For every cell of the bounding square, the index of the domino
    /// covering it.
    fn cover(&self) -> (Frame, Vec<Option<u32>>) {
        let frame = Frame::new(self.n);
        let mut cover = vec![None; frame.len()];
        for (t, d) in self.dominoes.iter().enumerate() {
            for c in d.cells() {
                if let Some(ix) = frame.index(c) {
                    cover[ix] = Some(t as u32);
                }
            }
        }
        (frame, cover)
    }

    /// Checks that the dominoes partition `A_N` and carry consistent types.
    pub fn validate(&self) -> Result<()> {
        let n = self.n as i32;
        let frame = Frame::new(self.n);
        let mut seen = vec![false; frame.len()];
        for d in &self.dominoes {
            let [p, q] = d.cells();
            if classify_domino(p, q, self.n)? != d.kind {
                return Err(Error::Structural(format!("domino {d:?} has the wrong type")));
            }
            for c in [p, q] {
                if !in_diamond(c, n) {
                    return Err(Error::Structural(format!("cell {c:?} lies outside A_{n}")));
                }
                let ix = frame.index(c).expect("inside the frame");
                if seen[ix] {
                    return Err(Error::Structural(format!("cell {c:?} covered twice")));
                }
                seen[ix] = true;
            }
        }
        let area = 2 * self.n as usize * (self.n as usize + 1);
        if 2 * self.dominoes.len() != area {
            return Err(Error::Structural(format!(
                "{} dominoes cannot cover {area} cells",
                self.dominoes.len()
            )));
        }
        Ok(())
    }

    /// Whether the tiling restricts to a tiling of the region `spec`: the
    /// removed corner is covered by north dominoes lying inside it, and no
    /// domino crosses the cut segment of a tilde region.
    pub fn frozen_on(&self, spec: RegionSpec) -> Result<bool> {
        if spec.n != self.n {
            return Err(Error::param(format!("region order {} differs from tiling order {}", spec.n, self.n)));
        }
        let grid = build_region(spec)?;
        let (frame, cover) = self.cover();
        let corner = grid.removed_corner();
        let inside = |c: Cell| !grid.contains(c);
        for c in &corner {
            let Some(t) = frame.index(*c).and_then(|ix| cover[ix]) else {
                return Err(Error::Structural(format!("cell {c:?} uncovered")));
            };
            let d = &self.dominoes[t as usize];
            if d.kind != DominoType::North || !d.cells().iter().all(|&x| inside(x)) {
                return Ok(false);
            }
        }
        if let Some((p, q)) = grid.cut {
            let tp = frame.index(p).and_then(|ix| cover[ix]);
            let tq = frame.index(q).and_then(|ix| cover[ix]);
            if tp.is_some() && tp == tq {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// SVG rendering with north, south, east and west dominoes in red,
    /// yellow, green and blue.
    pub fn render_svg(&self) -> String {
        let n = self.n as f64;
        let scale = (600.0 / (2.0 * n + 2.0)).clamp(2.0, 24.0);
        let size = (2.0 * n + 2.0) * scale;
        let legend_h = 24.0;
        let tx = |x: f64| (x + n + 1.0) * scale;
        let ty = |y: f64| (n + 1.0 - y) * scale;
        let stroke = (scale / 12.0).min(1.0);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{}" viewBox="0 0 {size} {}">"#,
            size + legend_h,
            size + legend_h
        );
        let _ = writeln!(out, r#"<g stroke="black" stroke-width="{stroke}">"#);
        for d in &self.dominoes {
            let (w, h) = if d.vertical { (1.0, 2.0) } else { (2.0, 1.0) };
            let _ = writeln!(
                out,
                r#"<rect class="{}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                d.kind.letter(),
                tx(d.cell.i as f64),
                ty(d.cell.j as f64 + h),
                w * scale,
                h * scale,
                d.kind.color()
            );
        }
        let _ = writeln!(out, "</g>");
        let _ = writeln!(out, r#"<g id="legend" font-size="12" font-family="sans-serif">"#);
        for (t, kind) in [DominoType::North, DominoType::South, DominoType::East, DominoType::West]
            .iter()
            .enumerate()
        {
            let x = 8.0 + 60.0 * t as f64;
            let y = size + 6.0;
            let _ = writeln!(
                out,
                r#"<rect x="{x}" y="{y}" width="12" height="12" fill="{}"/><text x="{}" y="{}">{}</text>"#,
                kind.color(),
                x + 16.0,
                y + 11.0,
                kind.letter()
            );
        }
        let _ = writeln!(out, "</g>");
        out.push_str("</svg>\n");
        out
    }

    pub fn write_svg(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.render_svg())?;
        Ok(())
    }
}

/// Incremental domino shuffler; after `t` steps it holds an exact sample
/// of order `t`.
pub struct Shuffler<R: Rng> {
    order: u32,
    target: u32,
    p_vertical: f64,
    dominoes: Vec<Domino>,
    frame: Frame,
    anchor: Vec<u32>,
    occupied: Vec<bool>,
    rng: R,
}

impl<R: Rng> Shuffler<R> {
    pub fn new(target: u32, a: f64, rng: R) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::param(format!("a = {a} must lie in (0, 1]")));
        }
        let frame = Frame::new(target.max(1));
        Ok(Shuffler {
            order: 0,
            target,
            p_vertical: a * a / (1.0 + a * a),
            dominoes: Vec::new(),
            frame,
            anchor: vec![0; frame.len()],
            occupied: vec![false; frame.len()],
            rng,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dominoes(&self) -> &[Domino] {
        &self.dominoes
    }

    /// Active square of the frame for order `n`, as index ranges.
    fn clear(&mut self, n: i32) {
        let f = self.frame;
        for i in -n - 1..=n {
            for j in -n - 1..=n {
                let ix = f.index(Cell::new(i, j)).expect("inside the frame");
                self.anchor[ix] = 0;
                self.occupied[ix] = false;
            }
        }
    }

    /// Advances from order `n` to `n + 1`.
    pub fn step(&mut self) -> Result<()> {
        if self.order >= self.target {
            return Err(Error::Capacity(format!("shuffler sized for order {}", self.target)));
        }
        let n = self.order as i32;
        let next = self.order + 1;
        let f = self.frame;

        // Destruction of colliding pairs.
        self.clear(n + 1);
        for (t, d) in self.dominoes.iter().enumerate() {
            let ix = f.index(d.cell).expect("inside the frame");
            self.anchor[ix] = t as u32 + 1;
        }
        let mut alive = vec![true; self.dominoes.len()];
        for (t, d) in self.dominoes.iter().enumerate() {
            let (facing, opposite) = match d.kind {
                DominoType::North => (Cell::new(d.cell.i, d.cell.j + 1), DominoType::South),
                DominoType::East => (Cell::new(d.cell.i + 1, d.cell.j), DominoType::West),
                _ => continue,
            };
            if let Some(&s) = f.index(facing).map(|ix| &self.anchor[ix]) {
                if s > 0 && self.dominoes[s as usize - 1].kind == opposite {
                    alive[t] = false;
                    alive[s as usize - 1] = false;
                }
            }
        }

        // Sliding.
        let mut moved = Vec::with_capacity(2 * next as usize * (next as usize + 1) / 2);
        for (d, live) in self.dominoes.iter().zip(alive) {
            if !live {
                continue;
            }
            let c = d.cell;
            let cell = match d.kind {
                DominoType::North => Cell::new(c.i, c.j + 1),
                DominoType::South => Cell::new(c.i, c.j - 1),
                DominoType::East => Cell::new(c.i + 1, c.j),
                DominoType::West => Cell::new(c.i - 1, c.j),
            };
            moved.push(Domino { cell, ..*d });
        }
        for d in &moved {
            for c in d.cells() {
                let ix = f
                    .index(c)
                    .ok_or_else(|| Error::Internal(format!("domino left the frame at {c:?}")))?;
                if self.occupied[ix] {
                    return Err(Error::Internal(format!("sliding collision at {c:?}")));
                }
                self.occupied[ix] = true;
            }
        }

        // Creation: the holes are 2 x 2 blocks; the first empty cell in
        // row-major order is always a block's lower-left corner.
        let m = n + 1;
        for j in -m - 1..=m {
            for i in -m - 1..=m {
                let c = Cell::new(i, j);
                if !in_diamond(c, m) || self.occupied[f.index(c).expect("inside the frame")] {
                    continue;
                }
                let block = [c, Cell::new(i + 1, j), Cell::new(i, j + 1), Cell::new(i + 1, j + 1)];
                for b in block {
                    let ix = f.index(b).filter(|_| in_diamond(b, m));
                    match ix {
                        Some(ix) if !self.occupied[ix] => self.occupied[ix] = true,
                        _ => return Err(Error::Internal(format!("hole at {c:?} is not a 2x2 block"))),
                    }
                }
                if self.rng.random::<f64>() < self.p_vertical {
                    moved.push(Domino::new(c, true, next));
                    moved.push(Domino::new(Cell::new(i + 1, j), true, next));
                } else {
                    moved.push(Domino::new(c, false, next));
                    moved.push(Domino::new(Cell::new(i, j + 1), false, next));
                }
            }
        }
        self.dominoes = moved;
        self.order = next;
        Ok(())
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Exact sample of `A_N`; sample `stream` of the family keyed by `seed`.
pub fn sample_tiling_stream(n: u32, a: f64, seed: u64, stream: u64) -> Result<Tiling> {
    if n == 0 {
        return Err(Error::param("N must be positive"));
    }
    let mut sh = Shuffler::new(n, a, rng_for(seed, stream))?;
    for _ in 0..n {
        sh.step()?;
    }
    Ok(Tiling {
        n,
        seed,
        dominoes: sh.dominoes,
    })
}

pub fn sample_tiling(n: u32, a: f64, seed: u64) -> Result<Tiling> {
    sample_tiling_stream(n, a, seed, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrozenEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub successes: u64,
    pub samples: u64,
    /// One-sided 95% upper bound `3/samples`, reported when no sample hits.
    pub upper_bound: Option<f64>,
}

/// Monte-Carlo estimate of the probability that a random tiling of `A_N`
/// restricts to a tiling of the L-shaped region `(N, m, k, eps)`.
pub fn estimate_frozen_probability(
    n: u32,
    m: i32,
    k: i32,
    eps: u8,
    a: f64,
    samples: u64,
    seed: u64,
    exec: Exec,
) -> Result<FrozenEstimate> {
    let spec = RegionSpec::for_epsilon(n, m, k, eps)?;
    spec.validate()?;
    if samples == 0 {
        return Err(Error::param("samples must be positive"));
    }
    if spec.is_full_diamond() {
        return Ok(FrozenEstimate {
            estimate: 1.0,
            stderr: 0.0,
            successes: samples,
            samples,
            upper_bound: None,
        });
    }
    if !spec.tileable() {
        return Err(Error::Untileable(format!("{spec:?}")));
    }
    let hits = exec.map_range(samples as usize, |t| {
        sample_tiling_stream(n, a, seed, t as u64).and_then(|tiling| tiling.frozen_on(spec))
    });
    let mut successes = 0u64;
    for h in hits {
        successes += h? as u64;
    }
    let p = successes as f64 / samples as f64;
    Ok(FrozenEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        successes,
        samples,
        upper_bound: (successes == 0).then(|| 3.0 / samples as f64),
    })
}

/// Sample mean and standard error of `v(T)` over `samples` tilings.
pub fn vertical_count_mean(n: u32, a: f64, samples: u64, seed: u64, exec: Exec) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::param("need at least two samples"));
    }
    let counts = exec.map_range(samples as usize, |t| {
        sample_tiling_stream(n, a, seed, t as u64).map(|x| x.vertical_count() as f64)
    });
    let v: Vec<f64> = counts.into_iter().collect::<Result<_>>()?;
    let s = samples as f64;
    let mean = v.iter().sum::<f64>() / s;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (s - 1.0);
    Ok((mean, (var / s).sqrt()))
}

//! Discrete balls as row lists along the contiguous axis.

use crate::grid_domain::{edt::squared_edt, Grid};

/// One run of cells `(c0 + d0, c1 + d1, c2 + lo ..= c2 + hi)` relative to a
/// center cell `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Row {
    pub d0: i32,
    pub d1: i32,
    pub lo: i32,
    pub hi: i32,
}

/// Cells `j` with `|j - c - offset|^2 <= rho2` (cell units). Rows are in
/// row-major order so iterating them visits cells in grid order.
#[derive(Clone, Debug)]
pub struct BallShape {
    pub rho2: f64,
    pub offset: [f64; 3],
    pub rows: Vec<Row>,
    pub count: usize,
    /// Smallest and largest offset per axis.
    pub lo: [i32; 3],
    pub hi: [i32; 3],
}

impl BallShape {
    pub fn new(grid: &Grid, rho2: f64, offset: [f64; 3]) -> BallShape {
        let a0 = grid.a0();
        let rho = rho2.sqrt();
        let span = |a: usize| -> (i32, i32) {
            if a < a0 {
                (0, 0)
            } else {
                ((offset[a] - rho).floor() as i32 - 1, (offset[a] + rho).ceil() as i32 + 1)
            }
        };
        let (r0, r1) = (span(0), span(1));
        let mut rows = Vec::new();
        let mut count = 0usize;
        let (mut blo, mut bhi) = ([0i32; 3], [0i32; 3]);
        for d0 in r0.0..=r0.1 {
            let e0 = (d0 as f64 - offset[0]).powi(2);
            for d1 in r1.0..=r1.1 {
                let e1 = (d1 as f64 - offset[1]).powi(2);
                let s = rho2 - e0 - e1;
                if s < 0.0 {
                    continue;
                }
                let o = offset[2];
                let inside = |t: i32| (t as f64 - o).powi(2) <= s;
                let mut lo = (o - s.sqrt()).ceil() as i32;
                let mut hi = (o + s.sqrt()).floor() as i32;
                while inside(lo - 1) {
                    lo -= 1;
                }
                while !inside(lo) && lo <= hi {
                    lo += 1;
                }
                while inside(hi + 1) {
                    hi += 1;
                }
                while !inside(hi) && hi >= lo {
                    hi -= 1;
                }
                if lo > hi {
                    continue;
                }
                rows.push(Row { d0, d1, lo, hi });
                count += (hi - lo + 1) as usize;
                for (a, (l, u)) in [(d0, d0), (d1, d1), (lo, hi)].into_iter().enumerate() {
                    blo[a] = blo[a].min(l);
                    bhi[a] = bhi[a].max(u);
                }
            }
        }
        BallShape { rho2, offset, rows, count, lo: blo, hi: bhi }
    }

    /// Whether the ball around cell `c` lies inside the grid.
    #[inline]
    pub fn fits(&self, grid: &Grid, c: [usize; 3]) -> bool {
        (0..3).all(|a| {
            c[a] as i64 + self.lo[a] as i64 >= 0 && (c[a] as i64 + self.hi[a] as i64) < grid.shape[a] as i64
        })
    }

    /// Visits the clipped rows around `c` as `(row index, lo, hi)` with
    /// absolute last-axis bounds.
    #[inline]
    pub fn for_rows(&self, grid: &Grid, c: [usize; 3], mut f: impl FnMut(usize, usize, usize)) {
        let n = grid.shape;
        for r in &self.rows {
            let j0 = c[0] as i64 + r.d0 as i64;
            let j1 = c[1] as i64 + r.d1 as i64;
            if j0 < 0 || j1 < 0 || j0 >= n[0] as i64 || j1 >= n[1] as i64 {
                continue;
            }
            let lo = (c[2] as i64 + r.lo as i64).max(0);
            let hi = (c[2] as i64 + r.hi as i64).min(n[2] as i64 - 1);
            if lo > hi {
                continue;
            }
            f(j0 as usize * n[1] + j1 as usize, lo as usize, hi as usize);
        }
    }
}

/// Geometric ladder `rho^2 = 4 * 2^k` (radius `2h * sqrt(2)^k`) with
/// `r < bound` and `r <= cap`.
pub fn radius_ladder(h: f64, bound: f64, cap: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let rho2 = 4.0 * 2f64.powi(k);
        let r = h * rho2.sqrt();
        if r >= bound || r > cap {
            break;
        }
        out.push((rho2, r));
        k += 1;
    }
    out
}

/// Row prefix sums of a per-cell quantity.
pub struct RowPrefix {
    n2: usize,
    p: Vec<f64>,
}

impl RowPrefix {
    pub fn new(grid: &Grid, g: impl Fn(usize) -> f64) -> RowPrefix {
        let n2 = grid.shape[2];
        let rows = grid.shape[0] * grid.shape[1];
        let mut p = vec![0.0; rows * (n2 + 1)];
        for r in 0..rows {
            let base = r * (n2 + 1);
            let mut acc = 0.0;
            for t in 0..n2 {
                acc += g(r * n2 + t);
                p[base + t + 1] = acc;
            }
        }
        RowPrefix { n2, p }
    }

    #[inline]
    pub fn range(&self, row: usize, lo: usize, hi: usize) -> f64 {
        let b = row * (self.n2 + 1);
        self.p[b + hi + 1] - self.p[b + lo]
    }

    #[inline]
    pub fn row_total(&self, row: usize) -> f64 {
        self.p[row * (self.n2 + 1) + self.n2]
    }

    pub fn row_len(&self) -> usize {
        self.n2
    }
}

/// Squared cell-unit distance from every cell to the nearest blocked cell.
/// With `outside_blocked`, cells beyond the grid edge count as blocked.
pub fn clearance(grid: &Grid, blocked: &[bool], outside_blocked: bool) -> Vec<i64> {
    let pad = if outside_blocked { 1 } else { 0 };
    let mut shape = [1usize; 3];
    for a in grid.a0()..3 {
        shape[a] = grid.shape[a] + 2 * pad;
    }
    let len = shape[0] * shape[1] * shape[2];
    let mut feat = vec![false; len];
    let lflat = |i: [usize; 3]| (i[0] * shape[1] + i[1]) * shape[2] + i[2];
    for (l, ft) in feat.iter_mut().enumerate() {
        let i = [l / (shape[1] * shape[2]), (l / shape[2]) % shape[1], l % shape[2]];
        let mut inside = true;
        let mut gi = [0usize; 3];
        for a in 0..3 {
            if a < grid.a0() {
                continue;
            }
            if i[a] < pad || i[a] >= grid.shape[a] + pad {
                inside = false;
            } else {
                gi[a] = i[a] - pad;
            }
        }
        *ft = if inside { blocked[grid.flat(gi)] } else { true };
    }
    let (d, _) = squared_edt(shape, &feat);
    let mut out = vec![0i64; grid.len()];
    for (k, o) in out.iter_mut().enumerate() {
        let i = grid.unflat(k);
        let mut li = i;
        for a in grid.a0()..3 {
            li[a] += pad;
        }
        *o = d[lflat(li)];
    }
    out
}

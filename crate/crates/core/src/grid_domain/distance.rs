use serde::{Deserialize, Serialize};

use super::edt::{squared_edt, INF};
use super::{Face, Grid, GridDomain};
use crate::error::{Error, Result};
use crate::P3;

/// Distance from every cell center to the interface (face midpoints).
///
/// Distances come from an exact integer transform on the doubled lattice
/// (cell centers at odd, face midpoints at even coordinates), so
/// `values[k] = sqrt(D) * h / 2` with `D` an exact integer.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceField {
    /// Unsigned distance for every cell (infinite without an interface).
    pub values: Vec<f64>,
    /// Squared doubled-lattice distance, exact.
    pub squared: Vec<i64>,
    /// Nearest interface face per cell (`u32::MAX` if none).
    pub nearest: Vec<u32>,
    /// Normalized central-difference gradient of the signed distance.
    pub gradient: Vec<P3>,
    /// Reach estimate (at least `h`; infinite if no ambiguity was found).
    pub reach: f64,
    face_points: Vec<P3>,
    index: FaceIndex,
}

impl DistanceField {
    pub(crate) fn compute(grid: &Grid, mask: &[bool], faces: &[Face]) -> DistanceField {
        let h = grid.h;
        let mut lshape = [1usize; 3];
        for a in grid.a0()..3 {
            lshape[a] = 2 * grid.shape[a] + 1;
        }
        let lat_len = lshape[0] * lshape[1] * lshape[2];
        let lflat = |c: [usize; 3]| (c[0] * lshape[1] + c[1]) * lshape[2] + c[2];
        let cell_lat = |k: usize| {
            let i = grid.unflat(k);
            let mut c = [0usize; 3];
            for a in grid.a0()..3 {
                c[a] = 2 * i[a] + 1;
            }
            c
        };
        let mut feat = vec![false; lat_len];
        let mut face_at = std::collections::HashMap::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            let mut c = cell_lat(f.cell);
            let a = f.axis as usize;
            c[a] = (c[a] as i64 + f.side as i64) as usize;
            let l = lflat(c);
            feat[l] = true;
            face_at.entry(l).or_insert(fi as u32);
        }
        let (dsq, src) = squared_edt(lshape, &feat);
        let n = grid.len();
        let mut squared = vec![INF; n];
        let mut values = vec![f64::INFINITY; n];
        let mut nearest = vec![u32::MAX; n];
        for k in 0..n {
            let l = lflat(cell_lat(k));
            if dsq[l] < INF {
                squared[k] = dsq[l];
                values[k] = (dsq[l] as f64).sqrt() * h * 0.5;
                nearest[k] = face_at[&(src[l] as usize)];
            }
        }
        let face_points: Vec<P3> = faces
            .iter()
            .map(|f| {
                let mut p = grid.center(f.cell);
                p[f.axis as usize] += 0.5 * f.side as f64 * h;
                p
            })
            .collect();
        let gradient = gradient_field(grid, mask, &values);
        let reach = estimate_reach(grid, mask, &values, &nearest, &face_points);
        let index = FaceIndex::new(grid, &face_points);
        DistanceField { values, squared, nearest, gradient, reach, face_points, index }
    }

    /// Signed value at a cell (positive in Ω).
    pub fn signed(&self, mask: &[bool], k: usize) -> f64 {
        if mask[k] {
            self.values[k]
        } else {
            -self.values[k]
        }
    }

    /// Whether the gradient at cell `k` lies inside the reach.
    pub fn reliable(&self, k: usize) -> bool {
        self.values[k] < self.reach
    }

    pub fn face_points(&self) -> &[P3] {
        &self.face_points
    }

    /// Exact distance from an arbitrary point to the interface, with the
    /// index of a nearest face.
    pub fn distance_to_interface(&self, x: &P3) -> Option<(f64, usize)> {
        self.index.nearest(&self.face_points, x)
    }

    /// Nearest boundary point `x - d(x) grad d(x)`. Points at or beyond the
    /// reach estimate get an ambiguity error listing every interface point
    /// within `d + h`.
    pub fn project(&self, dom: &GridDomain, x: &P3) -> Result<P3> {
        let (d, fi) = self
            .distance_to_interface(x)
            .ok_or_else(|| Error::invalid("domain has no boundary interface"))?;
        if d >= self.reach {
            let near = self
                .index
                .within(&self.face_points, x, d + dom.grid.h)
                .into_iter()
                .map(|j| self.face_points[j][dom.grid.a0()..].to_vec())
                .collect();
            return Err(Error::Ambiguous {
                point: x[dom.grid.a0()..].to_vec(),
                distance: d,
                reach: self.reach,
                near,
            });
        }
        Ok(self.face_points[fi])
    }
}

fn gradient_field(grid: &Grid, mask: &[bool], values: &[f64]) -> Vec<P3> {
    let n = grid.len();
    let st = grid.strides();
    let sd = |k: usize| if mask[k] { values[k] } else { -values[k] };
    let mut out = vec![[0.0; 3]; n];
    for k in 0..n {
        if !values[k].is_finite() {
            continue;
        }
        let i = grid.unflat(k);
        let mut g = [0.0; 3];
        for a in grid.a0()..3 {
            let lo = i[a] > 0 && values[k - st[a]].is_finite();
            let hi = i[a] + 1 < grid.shape[a] && values[k + st[a]].is_finite();
            g[a] = match (lo, hi) {
                (true, true) => (sd(k + st[a]) - sd(k - st[a])) / (2.0 * grid.h),
                (false, true) => (sd(k + st[a]) - sd(k)) / grid.h,
                (true, false) => (sd(k) - sd(k - st[a])) / grid.h,
                _ => 0.0,
            };
        }
        let m = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        if m > 0.0 {
            out[k] = [g[0] / m, g[1] / m, g[2] / m];
        }
    }
    out
}

/// Smallest depth at which neighboring Ω cells see nearest interface points
/// further apart than the near-set width `3 sqrt(2 d h + h^2)` allows.
fn estimate_reach(grid: &Grid, mask: &[bool], values: &[f64], nearest: &[u32], pts: &[P3]) -> f64 {
    let h = grid.h;
    let st = grid.strides();
    let mut reach = f64::INFINITY;
    for k in 0..grid.len() {
        if !mask[k] || nearest[k] == u32::MAX {
            continue;
        }
        let i = grid.unflat(k);
        for a in grid.a0()..3 {
            if i[a] + 1 >= grid.shape[a] {
                continue;
            }
            let j = k + st[a];
            if !mask[j] || nearest[j] == u32::MAX {
                continue;
            }
            let d = values[k].max(values[j]);
            if values[k].min(values[j]) >= reach {
                continue;
            }
            let p = pts[nearest[k] as usize];
            let q = pts[nearest[j] as usize];
            let jump = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
            if jump > 3.0 * (2.0 * d * h + h * h).sqrt() {
                reach = reach.min(values[k].min(values[j]));
            }
        }
    }
    reach.max(h)
}

/// Uniform buckets over the interface points for nearest and range queries.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct FaceIndex {
    lo: P3,
    size: f64,
    dims: [usize; 3],
    cells: Vec<Vec<u32>>,
}

impl FaceIndex {
    fn new(grid: &Grid, pts: &[P3]) -> FaceIndex {
        let size = 4.0 * grid.h;
        let lo = grid.lo_corner();
        let hi = grid.hi_corner();
        let mut dims = [1usize; 3];
        for a in grid.a0()..3 {
            dims[a] = (((hi[a] - lo[a]) / size).ceil() as usize).max(1);
        }
        let mut cells = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        let mut idx = FaceIndex { lo, size, dims, cells: Vec::new() };
        for (j, p) in pts.iter().enumerate() {
            let b = idx.bucket(p);
            cells[idx.flat(b)].push(j as u32);
        }
        idx.cells = cells;
        idx
    }

    fn bucket(&self, p: &P3) -> [i64; 3] {
        let mut b = [0i64; 3];
        for a in 0..3 {
            b[a] = (((p[a] - self.lo[a]) / self.size).floor() as i64).clamp(0, self.dims[a] as i64 - 1);
        }
        b
    }

    fn flat(&self, b: [i64; 3]) -> usize {
        ((b[0] as usize * self.dims[1]) + b[1] as usize) * self.dims[2] + b[2] as usize
    }

    /// Visits buckets at Chebyshev ring `r` around `c`.
    fn ring(&self, c: [i64; 3], r: i64, mut f: impl FnMut(usize)) {
        let rng = |a: usize| {
            if self.dims[a] == 1 {
                (0, 0)
            } else {
                ((c[a] - r).max(0), (c[a] + r).min(self.dims[a] as i64 - 1))
            }
        };
        let (r0, r1, r2) = (rng(0), rng(1), rng(2));
        for i in r0.0..=r0.1 {
            for j in r1.0..=r1.1 {
                for k in r2.0..=r2.1 {
                    let m = (i - c[0]).abs().max((j - c[1]).abs()).max((k - c[2]).abs());
                    if m == r {
                        f(self.flat([i, j, k]));
                    }
                }
            }
        }
    }

    fn max_ring(&self, c: [i64; 3]) -> i64 {
        (0..3)
            .map(|a| c[a].max(self.dims[a] as i64 - 1 - c[a]))
            .max()
            .unwrap_or(0)
    }

    fn nearest(&self, pts: &[P3], x: &P3) -> Option<(f64, usize)> {
        if pts.is_empty() {
            return None;
        }
        let c = self.bucket(x);
        let mut best: Option<(f64, usize)> = None;
        for r in 0..=self.max_ring(c) {
            if let Some((bd, _)) = best {
                let reach = (r - 1).max(0) as f64 * self.size;
                if reach > bd && r > 0 {
                    break;
                }
            }
            self.ring(c, r, |b| {
                for &j in &self.cells[b] {
                    let p = pts[j as usize];
                    let d = ((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2) + (p[2] - x[2]).powi(2)).sqrt();
                    let better = match best {
                        None => true,
                        Some((bd, bj)) => d < bd || (d == bd && (j as usize) < bj),
                    };
                    if better {
                        best = Some((d, j as usize));
                    }
                }
            });
        }
        best
    }

    fn within(&self, pts: &[P3], x: &P3, radius: f64) -> Vec<usize> {
        let mut out: Vec<usize> = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| ((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2) + (p[2] - x[2]).powi(2)).sqrt() <= radius)
            .map(|(j, _)| j)
            .collect();
        out.sort_unstable();
        out
    }
}

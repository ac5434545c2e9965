//! Dyadic Whitney decompositions, the chain distance `d1`, the logarithmic
//! distance `d2` and an empirical uniform-domain constant.
//!
//! A decomposition keeps the maximal dyadic cubes `Q` with
//! `d(Q, A^c) >= sqrt(n) l(Q)`. Its parent then fails the test, which gives
//! `d(Q, A^c) < 4 sqrt(n) l(Q)`, and touching cubes differ by at most two
//! levels. Every condition is re-checked on the output.

use std::collections::{HashMap, VecDeque};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_domain::edt::{squared_edt, INF};
use crate::grid_domain::{Grid, GridDomain, Shape};
use crate::par;

/// Closed cube `prod [i_a 2^-k, (i_a + 1) 2^-k]` over the active axes. The
/// leading `3 - dim` indices are always zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: i32,
    pub index: [i64; 3],
}

impl DyadicCube {
    pub fn side(&self) -> f64 {
        2f64.powi(-self.level)
    }

    pub fn lo(&self, a: usize) -> f64 {
        self.index[a] as f64 * self.side()
    }

    pub fn hi(&self, a: usize) -> f64 {
        (self.index[a] + 1) as f64 * self.side()
    }

    pub fn center(&self, dim: usize) -> Vec<f64> {
        (3 - dim..3).map(|a| (self.index[a] as f64 + 0.5) * self.side()).collect()
    }

    /// Enclosing cube at a coarser `level`.
    pub fn ancestor(&self, level: i32) -> DyadicCube {
        debug_assert!(level <= self.level);
        let s = (self.level - level) as u32;
        let mut index = self.index;
        for i in &mut index {
            *i >>= s;
        }
        DyadicCube { level, index }
    }

    pub fn children(&self, dim: usize) -> Vec<DyadicCube> {
        (0..1usize << dim)
            .map(|bits| {
                let mut index = self.index;
                for j in 0..dim {
                    let a = 3 - dim + j;
                    index[a] = 2 * index[a] + ((bits >> j) & 1) as i64;
                }
                DyadicCube { level: self.level + 1, index }
            })
            .collect()
    }
}

/// Euclidean distance between two closed cubes.
pub fn cube_distance(a: &DyadicCube, b: &DyadicCube, dim: usize) -> f64 {
    let mut s = 0.0;
    for ax in 3 - dim..3 {
        let g = (a.lo(ax) - b.hi(ax)).max(b.lo(ax) - a.hi(ax)).max(0.0);
        s += g * g;
    }
    s.sqrt()
}

/// `|log(l(a)/l(b))| + log(d(a,b)/(l(a)+l(b)) + 1)`.
pub fn d2(a: &DyadicCube, b: &DyadicCube, dim: usize) -> f64 {
    let (la, lb) = (a.side(), b.side());
    (la / lb).ln().abs() + (cube_distance(a, b, dim) / (la + lb) + 1.0).ln()
}

/// An open set `A` seen through a window, queried cube by cube.
pub trait Region: Sync {
    fn dim(&self) -> usize;
    /// Coarsest and finest cube levels.
    fn levels(&self) -> (i32, i32);
    /// Cubes at the coarsest level covering the window.
    fn top_cubes(&self) -> Vec<DyadicCube>;
    /// `d(Q, R^n \ A)` when `Q` lies in the window.
    fn distance(&self, q: &DyadicCube) -> Option<f64>;
    /// Whether the interior of `Q` meets `A` inside the window.
    fn meets(&self, q: &DyadicCube) -> bool;
    /// `(sqrt(n) l <= d, d <= 4 sqrt(n) l)`, or `None` outside the window.
    fn whitney_bounds(&self, q: &DyadicCube) -> Option<(bool, bool)> {
        let d = self.distance(q)?;
        let s = (self.dim() as f64).sqrt() * q.side();
        Some((d >= s, d <= 4.0 * s))
    }
}

/// Mask-backed region on a dyadic grid: `A` is the interior of the union of
/// member cells. Cells beyond the grid are either part of the complement or,
/// with `outside_is_member`, unknown territory outside the window.
pub struct MaskRegion {
    dim: usize,
    h: f64,
    level: i32,
    min_level: i32,
    outside_is_member: bool,
    /// Global index of the aligned array's first cell at the finest level.
    g0: [i64; 3],
    /// Per level from `min_level` to `level`: block dims and reductions.
    dims: Vec<[usize; 3]>,
    mind2: Vec<Vec<i64>>,
    members: Vec<Vec<u32>>,
    outside: Vec<Vec<u32>>,
}

const COMPLEMENT: u8 = 0;
const MEMBER: u8 = 1;
const OUTSIDE: u8 = 2;

impl MaskRegion {
    pub fn new(grid: &Grid, member: &[bool], outside_is_member: bool, min_level: Option<i32>) -> Result<Self> {
        let level = grid
            .dyadic_level()
            .ok_or_else(|| Error::invalid("Whitney decomposition needs h = 2^-m with faces on multiples of h"))?
            as i32;
        let dim = grid.dim;
        let a0 = grid.a0();
        let extent = (a0..3).map(|a| grid.shape[a] as f64 * grid.h).fold(f64::INFINITY, f64::min);
        let min_level = min_level.unwrap_or_else(|| (4.0 / extent).log2().ceil() as i32).min(level);
        let span = 1i64 << (level - min_level);
        let base = grid.base_index();
        let mut g0 = [0i64; 3];
        let mut m = [1usize; 3];
        for a in a0..3 {
            g0[a] = base[a].div_euclid(span) * span;
            let g1 = (base[a] + grid.shape[a] as i64 + span - 1).div_euclid(span) * span;
            m[a] = (g1 - g0[a]) as usize;
        }
        let len = m[0] * m[1] * m[2];
        let mut state = vec![if outside_is_member { OUTSIDE } else { COMPLEMENT }; len];
        for k in 0..grid.len() {
            let i = grid.unflat(k);
            let mut l = 0usize;
            for a in 0..3 {
                let j = if a < a0 { 0 } else { (base[a] + i[a] as i64 - g0[a]) as usize };
                l = l * m[a] + j;
            }
            state[l] = if member[k] { MEMBER } else { COMPLEMENT };
        }
        let d2 = box_distance_sq(&state, m, a0, !outside_is_member);

        let mut dims = vec![m];
        let mut mind2 = vec![d2];
        let mut members = vec![state.iter().map(|&s| u32::from(s == MEMBER)).collect::<Vec<_>>()];
        let mut outside = vec![state.iter().map(|&s| u32::from(s == OUTSIDE)).collect::<Vec<_>>()];
        for _ in min_level..level {
            let pd = *dims.last().unwrap();
            let mut nd = pd;
            for a in a0..3 {
                nd[a] = pd[a] / 2;
            }
            let nl = nd[0] * nd[1] * nd[2];
            let (mut md, mut mm, mut mo) = (vec![INF; nl], vec![0u32; nl], vec![0u32; nl]);
            let (pdm, pmm, pom) = (mind2.last().unwrap(), members.last().unwrap(), outside.last().unwrap());
            for i0 in 0..pd[0] {
                for i1 in 0..pd[1] {
                    for i2 in 0..pd[2] {
                        let p = (i0 * pd[1] + i1) * pd[2] + i2;
                        let c = [i0, i1, i2];
                        let mut q = 0usize;
                        for a in 0..3 {
                            q = q * nd[a] + if a < a0 { 0 } else { c[a] / 2 };
                        }
                        md[q] = md[q].min(pdm[p]);
                        mm[q] += pmm[p];
                        mo[q] += pom[p];
                    }
                }
            }
            dims.push(nd);
            mind2.push(md);
            members.push(mm);
            outside.push(mo);
        }
        dims.reverse();
        mind2.reverse();
        members.reverse();
        outside.reverse();
        Ok(MaskRegion { dim, h: grid.h, level, min_level, outside_is_member, g0, dims, mind2, members, outside })
    }

    /// `A = Ω`. Strips treat the tangential continuation as part of `A`.
    pub fn domain(dom: &GridDomain) -> Result<Self> {
        let strip = dom.shape.as_ref().is_some_and(|s| s.is_strip());
        Self::new(&dom.grid, &dom.mask, strip, None)
    }

    /// `A = int(Ω^c)` within the grid box; beyond the grid is unknown.
    pub fn complement(dom: &GridDomain, min_level: Option<i32>) -> Result<Self> {
        let inv: Vec<bool> = dom.mask.iter().map(|m| !m).collect();
        Self::new(&dom.grid, &inv, true, min_level)
    }

    pub fn outside_is_member(&self) -> bool {
        self.outside_is_member
    }

    fn slot(&self, q: &DyadicCube) -> Option<(usize, usize)> {
        if q.level < self.min_level || q.level > self.level {
            return None;
        }
        let li = (q.level - self.min_level) as usize;
        let d = self.dims[li];
        let sh = self.level - q.level;
        let mut l = 0usize;
        for a in 0..3 {
            let j = if a < 3 - self.dim { 0 } else { q.index[a] - (self.g0[a] >> sh) };
            if j < 0 || j as usize >= d[a] {
                return None;
            }
            l = l * d[a] + j as usize;
        }
        Some((li, l))
    }

    fn cells_per_side(&self, q: &DyadicCube) -> i64 {
        1i64 << (self.level - q.level)
    }

    /// Squared box distance to the complement in finest-cell units.
    fn d2_cells(&self, q: &DyadicCube) -> Option<i64> {
        let (li, l) = self.slot(q)?;
        (self.outside[li][l] == 0).then(|| self.mind2[li][l])
    }
}

/// Squared box distance (cell units) from each cell to the closed complement
/// cells: a Euclidean transform of the complement dilated by one cell.
fn box_distance_sq(state: &[u8], m: [usize; 3], a0: usize, pad_is_complement: bool) -> Vec<i64> {
    let mut p = m;
    for a in a0..3 {
        p[a] += 2;
    }
    let plen = p[0] * p[1] * p[2];
    let mut comp = vec![pad_is_complement; plen];
    let off = |i: [usize; 3]| -> usize {
        let mut l = 0;
        for a in 0..3 {
            l = l * p[a] + i[a] + usize::from(a >= a0);
        }
        l
    };
    for i0 in 0..m[0] {
        for i1 in 0..m[1] {
            for i2 in 0..m[2] {
                comp[off([i0, i1, i2])] = state[(i0 * m[1] + i1) * m[2] + i2] == COMPLEMENT;
            }
        }
    }
    let st = [p[1] * p[2], p[2], 1];
    for a in a0..3 {
        let prev = comp.clone();
        for (l, c) in comp.iter_mut().enumerate() {
            let i = (l / st[a]) % p[a];
            if (i > 0 && prev[l - st[a]]) || (i + 1 < p[a] && prev[l + st[a]]) {
                *c = true;
            }
        }
    }
    let (d, _) = squared_edt(p, &comp);
    let mut out = vec![0i64; m[0] * m[1] * m[2]];
    for i0 in 0..m[0] {
        for i1 in 0..m[1] {
            for i2 in 0..m[2] {
                out[(i0 * m[1] + i1) * m[2] + i2] = d[off([i0, i1, i2])];
            }
        }
    }
    out
}

impl Region for MaskRegion {
    fn dim(&self) -> usize {
        self.dim
    }

    fn levels(&self) -> (i32, i32) {
        (self.min_level, self.level)
    }

    fn top_cubes(&self) -> Vec<DyadicCube> {
        let d = self.dims[0];
        let sh = self.level - self.min_level;
        let mut out = Vec::new();
        for i0 in 0..d[0] {
            for i1 in 0..d[1] {
                for i2 in 0..d[2] {
                    let i = [i0, i1, i2];
                    let mut index = [0i64; 3];
                    for a in 3 - self.dim..3 {
                        index[a] = (self.g0[a] >> sh) + i[a] as i64;
                    }
                    out.push(DyadicCube { level: self.min_level, index });
                }
            }
        }
        out
    }

    fn distance(&self, q: &DyadicCube) -> Option<f64> {
        self.d2_cells(q).map(|d2| if d2 >= INF { f64::INFINITY } else { (d2 as f64).sqrt() * self.h })
    }

    fn meets(&self, q: &DyadicCube) -> bool {
        self.slot(q).is_some_and(|(li, l)| self.members[li][l] > 0)
    }

    fn whitney_bounds(&self, q: &DyadicCube) -> Option<(bool, bool)> {
        let d2 = self.d2_cells(q)?;
        let s = self.cells_per_side(q);
        let n = self.dim as i64;
        Some((d2 >= n * s * s, d2 <= 16 * n * s * s))
    }
}

/// Region given by an analytic shape; unbounded shapes are cut to their
/// bounding box, whose outside is treated as unknown.
pub struct ShapeRegion {
    shape: Shape,
    dim: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    min_level: i32,
    max_level: i32,
}

impl ShapeRegion {
    pub fn new(shape: Shape, max_level: i32) -> Result<Self> {
        shape.validate()?;
        if matches!(shape, Shape::PerturbedHalfSpace { .. }) {
            return Err(Error::Unsupported("analytic Whitney distances for the perturbed half-space".into()));
        }
        let (lo, hi) = shape.bbox();
        let extent = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
        let min_level = ((4.0 / extent).log2().ceil() as i32).min(max_level);
        Ok(ShapeRegion { dim: shape.dim(), shape, lo, hi, min_level, max_level })
    }

    pub fn with_min_level(mut self, level: i32) -> Self {
        self.min_level = level.min(self.max_level);
        self
    }

    fn bounds(&self, q: &DyadicCube) -> (Vec<f64>, Vec<f64>) {
        ((3 - self.dim..3).map(|a| q.lo(a)).collect(), (3 - self.dim..3).map(|a| q.hi(a)).collect())
    }

    fn in_window(&self, qlo: &[f64], qhi: &[f64]) -> bool {
        self.shape.is_bounded() || (0..self.dim).all(|j| qlo[j] >= self.lo[j] && qhi[j] <= self.hi[j])
    }
}

fn box_clearance(qlo: &[f64], qhi: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    (0..qlo.len()).map(|j| (qlo[j] - lo[j]).min(hi[j] - qhi[j])).fold(f64::INFINITY, f64::min).max(0.0)
}

fn box_gap(qlo: &[f64], qhi: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    (0..qlo.len()).map(|j| (qlo[j] - hi[j]).max(lo[j] - qhi[j]).max(0.0).powi(2)).sum::<f64>().sqrt()
}

fn box_overlap(qlo: &[f64], qhi: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    (0..qlo.len()).all(|j| qlo[j] < hi[j] && qhi[j] > lo[j])
}

fn min_dist(c: &[f64], qlo: &[f64], qhi: &[f64]) -> f64 {
    (0..c.len()).map(|j| (qlo[j] - c[j]).max(c[j] - qhi[j]).max(0.0).powi(2)).sum::<f64>().sqrt()
}

fn max_dist(c: &[f64], qlo: &[f64], qhi: &[f64]) -> f64 {
    (0..c.len()).map(|j| (c[j] - qlo[j]).abs().max((qhi[j] - c[j]).abs()).powi(2)).sum::<f64>().sqrt()
}

impl Region for ShapeRegion {
    fn dim(&self) -> usize {
        self.dim
    }

    fn levels(&self) -> (i32, i32) {
        (self.min_level, self.max_level)
    }

    fn top_cubes(&self) -> Vec<DyadicCube> {
        let s = 2f64.powi(-self.min_level);
        let mut ranges = [(0i64, 0i64); 3];
        for j in 0..self.dim {
            ranges[3 - self.dim + j] = ((self.lo[j] / s).floor() as i64, (self.hi[j] / s).ceil() as i64 - 1);
        }
        let mut out = Vec::new();
        for i0 in ranges[0].0..=ranges[0].1 {
            for i1 in ranges[1].0..=ranges[1].1 {
                for i2 in ranges[2].0..=ranges[2].1 {
                    out.push(DyadicCube { level: self.min_level, index: [i0, i1, i2] });
                }
            }
        }
        out
    }

    fn distance(&self, q: &DyadicCube) -> Option<f64> {
        let (ql, qh) = self.bounds(q);
        if !self.in_window(&ql, &qh) {
            return None;
        }
        let (lo, hi) = (&self.lo, &self.hi);
        Some(match &self.shape {
            Shape::Interval { .. } | Shape::Square { .. } | Shape::Cube { .. } => box_clearance(&ql, &qh, lo, hi),
            Shape::Disk { center, radius } | Shape::Ball { center, radius } => {
                (radius - max_dist(center, &ql, &qh)).max(0.0)
            }
            Shape::Annulus { center, r_in, r_out } => {
                (r_out - max_dist(center, &ql, &qh)).min(min_dist(center, &ql, &qh) - r_in).max(0.0)
            }
            Shape::LShape { lo: l, side } => {
                let cut_lo: Vec<f64> = l.iter().map(|x| x + side / 2.0).collect();
                box_clearance(&ql, &qh, lo, hi).min(box_gap(&ql, &qh, &cut_lo, hi))
            }
            Shape::HalfSpace { .. } => ql[self.dim - 1].max(0.0),
            Shape::Cusp { radius } => {
                let r = *radius;
                let a = (min_dist(&[-r, 0.0], &ql, &qh) - r).max(0.0);
                let b = (min_dist(&[r, 0.0], &ql, &qh) - r).max(0.0);
                box_clearance(&ql, &qh, lo, hi).min(a).min(b)
            }
            Shape::PerturbedHalfSpace { .. } => unreachable!(),
        })
    }

    fn meets(&self, q: &DyadicCube) -> bool {
        let (ql, qh) = self.bounds(q);
        let (lo, hi) = (&self.lo, &self.hi);
        match &self.shape {
            Shape::Interval { .. } | Shape::Square { .. } | Shape::Cube { .. } => box_overlap(&ql, &qh, lo, hi),
            Shape::Disk { center, radius } | Shape::Ball { center, radius } => min_dist(center, &ql, &qh) < *radius,
            Shape::Annulus { center, r_in, r_out } => {
                min_dist(center, &ql, &qh) < *r_out && max_dist(center, &ql, &qh) > *r_in
            }
            Shape::LShape { lo: l, side } => {
                let cut_lo: Vec<f64> = l.iter().map(|x| x + side / 2.0).collect();
                let inside_cut = (0..self.dim).all(|j| ql[j] >= cut_lo[j] && qh[j] <= hi[j]);
                box_overlap(&ql, &qh, lo, hi) && !inside_cut
            }
            Shape::HalfSpace { .. } => box_overlap(&ql, &qh, lo, hi),
            Shape::Cusp { radius } => {
                let r = *radius;
                box_overlap(&ql, &qh, lo, hi)
                    && max_dist(&[-r, 0.0], &ql, &qh) > r
                    && max_dist(&[r, 0.0], &ql, &qh) > r
            }
            Shape::PerturbedHalfSpace { .. } => unreachable!(),
        }
    }
}

/// Post-hoc check of the four Whitney conditions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Every point of the window part of `A` farther than `margin` from the
    /// complement lies in some cube.
    pub covers: bool,
    /// No cube contains another (dyadic cubes with overlapping interiors are
    /// nested).
    pub disjoint: bool,
    pub distance_ratio: bool,
    pub neighbor_ratio: bool,
    pub cubes_checked: usize,
    pub pairs_checked: usize,
    pub violations: Vec<String>,
}

impl Certificate {
    pub fn all(&self) -> bool {
        self.covers && self.disjoint && self.distance_ratio && self.neighbor_ratio
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WhitneyDecomposition {
    pub dim: usize,
    /// Sorted by `(level, index)`.
    pub cubes: Vec<DyadicCube>,
    /// Indices of touching cubes, sorted.
    pub adjacency: Vec<Vec<u32>>,
    /// `d(Q, A^c)` per cube.
    pub distances: Vec<f64>,
    pub min_level: i32,
    pub max_level: i32,
    /// Parts of `A` were left uncovered at the finest level.
    pub truncated: bool,
    /// Width of the uncovered strip along the complement.
    pub margin: f64,
    pub certificate: Certificate,
}

const MAX_VIOLATIONS: usize = 16;

/// Builds and certifies the decomposition of `region`.
pub fn whitney_decompose(region: &dyn Region) -> Result<WhitneyDecomposition> {
    let (min_level, max_level) = region.levels();
    let dim = region.dim();
    let tops = region.top_cubes();
    let parts = par::map_slice(&tops, |t| {
        let mut cubes = Vec::new();
        let mut left: Vec<(DyadicCube, f64)> = Vec::new();
        let mut stack = vec![*t];
        while let Some(q) = stack.pop() {
            if !region.meets(&q) {
                continue;
            }
            if region.whitney_bounds(&q).is_some_and(|b| b.0) {
                cubes.push(q);
            } else if q.level < max_level {
                stack.extend(q.children(dim));
            } else if let Some(d) = region.distance(&q) {
                left.push((q, d));
            }
        }
        (cubes, left)
    });
    let mut cubes = Vec::new();
    let mut margin: f64 = 0.0;
    let mut truncated = false;
    for (c, l) in parts {
        cubes.extend(c);
        for (q, d) in l {
            truncated = true;
            margin = margin.max(d + (dim as f64).sqrt() * q.side());
        }
    }
    if cubes.is_empty() {
        return Err(Error::invalid("no Whitney cube fits between the levels"));
    }
    cubes.sort_unstable();
    let distances = par::map_slice(&cubes, |q| region.distance(q).unwrap_or(f64::NAN));
    let index: HashMap<DyadicCube, u32> = cubes.iter().enumerate().map(|(i, q)| (*q, i as u32)).collect();
    let mut cert = Certificate { cubes_checked: cubes.len(), ..Default::default() };
    let mut violations = Vec::new();

    // disjoint interiors
    cert.disjoint = index.len() == cubes.len();
    for q in &cubes {
        for l in min_level..q.level {
            if index.contains_key(&q.ancestor(l)) {
                cert.disjoint = false;
                violations.push(format!("cube {q:?} lies inside a coarser cube"));
            }
        }
    }

    // distance to the complement relative to size
    cert.distance_ratio = true;
    for q in &cubes {
        if region.whitney_bounds(q) != Some((true, true)) {
            cert.distance_ratio = false;
            violations.push(format!("cube {q:?} breaks the distance bounds"));
        }
    }

    // adjacency and neighbor size ratio
    let adjacency = build_adjacency(&cubes, &index, dim, min_level);
    cert.neighbor_ratio = true;
    for (i, nb) in adjacency.iter().enumerate() {
        for &j in nb {
            cert.pairs_checked += 1;
            if (cubes[i].level - cubes[j as usize].level).abs() > 2 {
                cert.neighbor_ratio = false;
                violations.push(format!("touching cubes {:?} and {:?} differ by more than 4x", cubes[i], cubes[j as usize]));
            }
        }
    }

    // covering: walk the dyadic tree below each top cube
    cert.covers = true;
    let mut stack = tops.clone();
    while let Some(q) = stack.pop() {
        if index.contains_key(&q) || !region.meets(&q) {
            continue;
        }
        if q.level < max_level {
            stack.extend(q.children(dim));
            continue;
        }
        match region.distance(&q) {
            Some(d) if d + (dim as f64).sqrt() * q.side() > margin => {
                cert.covers = false;
                violations.push(format!("cell {q:?} is uncovered beyond the margin"));
            }
            _ => {}
        }
    }
    violations.truncate(MAX_VIOLATIONS);
    cert.violations = violations;
    Ok(WhitneyDecomposition { dim, cubes, adjacency, distances, min_level, max_level, truncated, margin, certificate: cert })
}

fn build_adjacency(cubes: &[DyadicCube], index: &HashMap<DyadicCube, u32>, dim: usize, min_level: i32) -> Vec<Vec<u32>> {
    let offsets: Vec<[i64; 3]> = (0..3usize.pow(dim as u32))
        .map(|mut t| {
            let mut e = [0i64; 3];
            for j in 0..dim {
                e[3 - dim + j] = (t % 3) as i64 - 1;
                t /= 3;
            }
            e
        })
        .filter(|e| e.iter().any(|&x| x != 0))
        .collect();
    let found = par::map_range(cubes.len(), |i| {
        let q = cubes[i];
        let mut out = Vec::new();
        for e in &offsets {
            let mut n = q;
            for a in 0..3 {
                n.index[a] += e[a];
            }
            for l in (min_level..=q.level).rev() {
                let anc = n.ancestor(l);
                if let Some(&j) = index.get(&anc) {
                    if q.ancestor(l) != anc {
                        out.push(j);
                    }
                    break;
                }
            }
        }
        out
    });
    let mut adj = vec![Vec::new(); cubes.len()];
    for (i, js) in found.into_iter().enumerate() {
        for j in js {
            adj[i].push(j);
            adj[j as usize].push(i as u32);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

impl WhitneyDecomposition {
    pub fn position(&self, q: &DyadicCube) -> Option<usize> {
        self.cubes.binary_search(q).ok()
    }

    /// Breadth-first chain lengths from cube `src`; `u32::MAX` if unreachable.
    pub fn chain_lengths(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.cubes.len()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = dist[u] + 1;
                    queue.push_back(v as usize);
                }
            }
        }
        dist
    }

    /// Largest cube, smallest index on ties.
    pub fn root(&self) -> usize {
        0
    }

    pub fn level_counts(&self) -> Vec<(i32, usize)> {
        let mut out: Vec<(i32, usize)> = Vec::new();
        for q in &self.cubes {
            match out.last_mut() {
                Some((l, c)) if *l == q.level => *c += 1,
                _ => out.push((q.level, 1)),
            }
        }
        out
    }
}

/// Length of the shortest Whitney chain between two cubes.
pub fn d1(dec: &WhitneyDecomposition, a: &DyadicCube, b: &DyadicCube) -> Result<usize> {
    let ia = dec.position(a).ok_or_else(|| Error::invalid("cube not in decomposition"))?;
    let ib = dec.position(b).ok_or_else(|| Error::invalid("cube not in decomposition"))?;
    match dec.chain_lengths(ia)[ib] {
        u32::MAX => Err(Error::Disconnected),
        d => Ok(d as usize),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformOptions {
    /// Random sources drawn per level.
    pub random_per_level: usize,
    /// Sources per level with the largest ratio as seen from the root.
    pub guided_per_level: usize,
    pub seed: u64,
}

impl Default for UniformOptions {
    fn default() -> Self {
        UniformOptions { random_per_level: 4, guided_per_level: 4, seed: 7 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformReport {
    /// `max d1 / max(d2, 1)`.
    pub k: f64,
    /// `max d1 / (d2 + 1)`.
    pub k_shifted: f64,
    pub witness: Option<(DyadicCube, DyadicCube)>,
    pub d1: usize,
    pub d2: f64,
    pub sources: usize,
    pub pairs: usize,
    pub disconnected: bool,
}

/// Samples sources stratified by level, runs one breadth-first search from
/// each and takes the largest ratio over all targets.
pub fn estimate_uniform_constant(dec: &WhitneyDecomposition, opts: &UniformOptions) -> UniformReport {
    let dim = dec.dim;
    let n = dec.cubes.len();
    let root = dec.root();
    let from_root = dec.chain_lengths(root);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut sources: Vec<usize> = vec![root];
    let mut start = 0usize;
    for (_, count) in dec.level_counts() {
        let ids: Vec<usize> = (start..start + count).collect();
        let mut guided: Vec<(f64, usize)> = ids
            .iter()
            .filter(|&&i| from_root[i] != u32::MAX)
            .map(|&i| (from_root[i] as f64 / d2(&dec.cubes[root], &dec.cubes[i], dim).max(1.0), i))
            .collect();
        guided.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        sources.extend(guided.iter().take(opts.guided_per_level).map(|g| g.1));
        let m = opts.random_per_level.min(count);
        sources.extend(sample(&mut rng, count, m).into_iter().map(|j| ids[j]));
        start += count;
    }
    sources.sort_unstable();
    sources.dedup();
    let per = par::map_slice(&sources, |&s| {
        let dist = dec.chain_lengths(s);
        let mut best = (f64::NEG_INFINITY, 0usize, 0.0f64);
        let mut shifted = 0.0f64;
        let mut disconnected = false;
        for (t, &dl) in dist.iter().enumerate() {
            if dl == u32::MAX {
                disconnected = true;
                continue;
            }
            let e = d2(&dec.cubes[s], &dec.cubes[t], dim);
            let r = dl as f64 / e.max(1.0);
            if r > best.0 {
                best = (r, t, e);
            }
            shifted = shifted.max(dl as f64 / (e + 1.0));
        }
        (best, shifted, disconnected, dist)
    });
    let mut rep = UniformReport {
        k: 0.0,
        k_shifted: 0.0,
        witness: None,
        d1: 0,
        d2: 0.0,
        sources: sources.len(),
        pairs: sources.len() * n,
        disconnected: false,
    };
    for (&s, ((r, t, e), shifted, disc, dist)) in sources.iter().zip(per) {
        rep.disconnected |= disc;
        rep.k_shifted = rep.k_shifted.max(shifted);
        if r > rep.k {
            rep.k = r;
            rep.witness = Some((dec.cubes[s], dec.cubes[t]));
            rep.d1 = dist[t] as usize;
            rep.d2 = e;
        }
    }
    rep
}

/// Axis-aligned rectangles `(x, y, side)` of a planar decomposition.
pub fn planar_squares(dec: &WhitneyDecomposition) -> Vec<(f64, f64, f64)> {
    dec.cubes.iter().map(|q| (q.lo(1), q.lo(2), q.side())).collect()
}

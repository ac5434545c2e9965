//! Extension operators: zero extension, reflections across a flat
//! boundary, the Jacobian-weighted reflection, McShane's Hölder extension
//! and the Jones extension with support near the domain.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid_domain::{Grid, GridDomain, Shape};
use crate::par;
use crate::whitney::{whitney_decompose, DyadicCube, MaskRegion, WhitneyDecomposition};

/// Where an extended value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "tag", content = "cube")]
pub enum Provenance {
    Original,
    /// Jones: average of `f*` over the matched interior cube (index into
    /// `JonesInfo::matching`).
    Matched(u32),
    /// Jones: Ω cell inside a large interior cube carrying the `g` part.
    GPart,
    Reflected,
    Extended,
    Zero,
}

impl Provenance {
    fn label(&self) -> &'static str {
        match self {
            Provenance::Original => "original",
            Provenance::Matched(_) => "matched",
            Provenance::GPart => "g_part",
            Provenance::Reflected => "reflected",
            Provenance::Extended => "extended",
            Provenance::Zero => "zero",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionResult {
    pub field: ScalarField,
    /// Cells where the value may be nonzero.
    pub support: Vec<bool>,
    pub provenance: Vec<Provenance>,
    /// Cells of the original grid sit at this index offset.
    pub offset: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionSummary {
    pub counts: BTreeMap<String, usize>,
    pub nonzero: usize,
    /// Physical bounding box `(lo, hi)` of the nonzero cells.
    pub support_bbox: Option<(Vec<f64>, Vec<f64>)>,
}

impl ExtensionResult {
    pub fn summary(&self) -> ExtensionSummary {
        let mut counts = BTreeMap::new();
        for p in &self.provenance {
            *counts.entry(p.label().to_string()).or_insert(0) += 1;
        }
        let g = &self.field.grid;
        let mut bbox: Option<(Vec<f64>, Vec<f64>)> = None;
        let mut nonzero = 0;
        for (k, v) in self.field.values.iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            nonzero += 1;
            let c = g.center(k);
            let p: Vec<f64> = (g.a0()..3).map(|a| c[a]).collect();
            match &mut bbox {
                None => bbox = Some((p.clone(), p)),
                Some((lo, hi)) => {
                    for j in 0..p.len() {
                        lo[j] = lo[j].min(p[j]);
                        hi[j] = hi[j].max(p[j]);
                    }
                }
            }
        }
        ExtensionSummary { counts, nonzero, support_bbox: bbox }
    }

    /// Cell index in the extended grid of an original cell.
    pub fn map_cell(&self, original: &Grid, k: usize) -> usize {
        let mut i = original.unflat(k);
        for a in original.a0()..3 {
            i[a] += self.offset[a];
        }
        self.field.grid.flat(i)
    }
}

/// `f` on Ω, zero elsewhere, on the grid grown by `pad` cells per side.
pub fn zero_extend(f: &ScalarField, dom: &GridDomain, pad: usize) -> ExtensionResult {
    let lo = [pad; 3];
    let big = dom.grid.extended(lo, lo);
    let vals: Vec<f64> = f.values.iter().zip(&dom.mask).map(|(&v, &m)| if m { v } else { 0.0 }).collect();
    let values = dom.grid.embed(&vals, lo, &big, 0.0);
    let support = dom.grid.embed(&dom.mask, lo, &big, false);
    let provenance = support.iter().map(|&s| if s { Provenance::Original } else { Provenance::Zero }).collect();
    ExtensionResult { field: ScalarField { grid: big, values }, support, provenance, offset: lo }
}

/// Reflection across `x_n = 0` of a half-space strip with sign `+1` (even)
/// or `-1` (odd). The result spans the Ω rows and their mirror images.
pub fn reflect_extend(f: &ScalarField, dom: &GridDomain, sign: f64) -> Result<ExtensionResult> {
    if !matches!(dom.shape, Some(Shape::HalfSpace { .. })) {
        return Err(Error::invalid("reflection needs a flat half-space domain"));
    }
    let g = &dom.grid;
    let an = 2;
    let base = g.base_index()[an];
    let first = usize::try_from(-base).map_err(|_| Error::invalid("grid does not reach x_n = 0"))?;
    let rows = g.shape[an] - first;
    let mut shape = g.shape;
    shape[an] = 2 * rows;
    let mut origin = g.origin;
    origin[an] = -(rows as f64 - 0.5) * g.h;
    let big = Grid { shape, origin, ..g.clone() };
    let mut values = vec![0.0; big.len()];
    let mut provenance = vec![Provenance::Original; big.len()];
    for (k, (v, p)) in values.iter_mut().zip(&mut provenance).enumerate() {
        let mut i = big.unflat(k);
        let below = i[an] < rows;
        let (src, s) = if below { (rows - 1 - i[an], sign) } else { (i[an] - rows, 1.0) };
        i[an] = first + src;
        let kk = g.flat(i);
        if !dom.mask[kk] {
            return Err(Error::invalid("half-space rows above x_n = 0 must lie in the domain"));
        }
        *v = s * f.values[kk];
        if below {
            *p = Provenance::Reflected;
        }
    }
    let mut offset = [0usize; 3];
    offset[an] = rows - first;
    let support = vec![true; big.len()];
    Ok(ExtensionResult { field: ScalarField { grid: big, values }, support, provenance, offset })
}

pub fn even_extend(f: &ScalarField, dom: &GridDomain) -> Result<ExtensionResult> {
    reflect_extend(f, dom, 1.0)
}

pub fn odd_extend(f: &ScalarField, dom: &GridDomain) -> Result<ExtensionResult> {
    reflect_extend(f, dom, -1.0)
}

/// Jacobian-weighted even reflection on a chart grid symmetric about
/// `y_n = 0`: `w(y', y_n) = w(y', -y_n) J(y', -y_n) / J(y', y_n)` below.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightedExtension {
    pub field: ScalarField,
    /// `J(y', -y_n) / J(y', y_n)` below the plane, one above.
    pub correction: ScalarField,
}

pub fn weighted_even_extend(w: &ScalarField, jac: &ScalarField) -> Result<WeightedExtension> {
    let g = &w.grid;
    if jac.grid != *g {
        return Err(Error::invalid("weight and Jacobian grids differ"));
    }
    let n = g.shape[2];
    let symmetric = n.is_multiple_of(2) && (g.origin[2] + (n as f64 / 2.0 - 0.5) * g.h).abs() < 1e-9 * g.h.max(1.0);
    if !symmetric {
        return Err(Error::invalid("chart grid must be symmetric about y_n = 0"));
    }
    if let Some(v) = jac.values.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::invalid(format!("Jacobian must be positive, found {v}")));
    }
    let half = n / 2;
    let mut out = w.values.clone();
    let mut corr = vec![1.0; g.len()];
    for k in 0..g.len() {
        let i = g.unflat(k);
        if i[2] < half {
            let mut m = i;
            m[2] = n - 1 - i[2];
            let km = g.flat(m);
            let c = jac.values[km] / jac.values[k];
            corr[k] = c;
            out[k] = w.values[km] * c;
        }
    }
    Ok(WeightedExtension {
        field: ScalarField { grid: g.clone(), values: out },
        correction: ScalarField { grid: g.clone(), values: corr },
    })
}

/// Discrete Hölder seminorm `max |f(x) - f(y)| / |x - y|^gamma` over
/// pairs of cells in `mask` (all cells when `None`).
pub fn holder_seminorm(f: &ScalarField, mask: Option<&[bool]>, gamma: f64) -> f64 {
    let g = &f.grid;
    let cells: Vec<usize> = (0..g.len()).filter(|&k| mask.is_none_or(|m| m[k])).collect();
    let pts: Vec<[f64; 3]> = cells.iter().map(|&k| g.center(k)).collect();
    let vals: Vec<f64> = cells.iter().map(|&k| f.values[k]).collect();
    let best = par::map_range(cells.len(), |i| {
        let mut m: f64 = 0.0;
        for j in i + 1..cells.len() {
            let d2: f64 = (0..3).map(|a| (pts[i][a] - pts[j][a]).powi(2)).sum();
            let q = (vals[i] - vals[j]).abs() / d2.powf(gamma / 2.0);
            if q > m || q.is_nan() {
                m = if q.is_nan() { f64::INFINITY } else { q };
            }
        }
        m
    });
    best.into_iter().fold(0.0, f64::max)
}

/// McShane extension of a Hölder function from the cells of `mask` to the
/// whole grid, clamped to `[-sup|phi|, sup|phi|]`.
pub fn mcshane_extend(phi: &ScalarField, mask: &[bool], gamma: f64) -> Result<ExtensionResult> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::invalid("gamma must lie in (0, 1]"));
    }
    let g = &phi.grid;
    let hol = holder_seminorm(phi, Some(mask), gamma);
    if !hol.is_finite() {
        return Err(Error::invalid("Hölder quotient is not finite"));
    }
    let bound = phi.max_abs(Some(mask));
    let inside: Vec<usize> = (0..g.len()).filter(|&k| mask[k]).collect();
    if inside.is_empty() {
        return Err(Error::EmptyMask);
    }
    let pts: Vec<[f64; 3]> = inside.iter().map(|&k| g.center(k)).collect();
    let values = par::map_range(g.len(), |k| {
        if mask[k] {
            return phi.values[k];
        }
        let x = g.center(k);
        let mut m = f64::INFINITY;
        for (p, &kk) in pts.iter().zip(&inside) {
            let d2: f64 = (0..3).map(|a| (x[a] - p[a]).powi(2)).sum();
            m = m.min(phi.values[kk] + hol * d2.powf(gamma / 2.0));
        }
        m.min(bound).max(-bound)
    });
    let provenance = mask.iter().map(|&m| if m { Provenance::Original } else { Provenance::Extended }).collect();
    Ok(ExtensionResult {
        field: ScalarField { grid: g.clone(), values },
        support: vec![true; g.len()],
        provenance,
        offset: [0; 3],
    })
}

/// Extra data of a Jones extension.
#[derive(Clone, Debug)]
pub struct JonesInfo {
    pub k_eps: i32,
    /// Complement cube and its matched interior cube, for complement cubes
    /// with side at most `2^-k_eps` (cells left over near the boundary act
    /// as cubes of side `h`).
    pub matching: Vec<(DyadicCube, DyadicCube)>,
    /// Largest interior cube (bounded domains).
    pub q0: Option<DyadicCube>,
    pub interior_cubes: usize,
    pub complement_cubes: usize,
    /// The extended domain `Ω` on the enlarged grid.
    pub domain: GridDomain,
    /// Cells within `2 eps` of Ω.
    pub neighborhood: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct JonesExtension {
    pub result: ExtensionResult,
    pub info: JonesInfo,
}

/// Cube collection with cells of side `h` filling what the decomposition
/// left uncovered.
struct Tiling {
    cubes: Vec<DyadicCube>,
    /// Cube index per grid cell, `u32::MAX` if none.
    owner: Vec<u32>,
}

fn tile(grid: &Grid, member: &[bool], dec: &WhitneyDecomposition) -> Tiling {
    let level = grid.dyadic_level().expect("dyadic grid") as i32;
    let base = grid.base_index();
    let a0 = grid.a0();
    let mut owner = vec![u32::MAX; grid.len()];
    let mut cubes = dec.cubes.clone();
    for (ci, q) in dec.cubes.iter().enumerate() {
        let s = 1i64 << (level - q.level);
        let mut lo = [0i64; 3];
        let mut hi = [1i64; 3];
        for a in a0..3 {
            lo[a] = q.index[a] * s - base[a];
            hi[a] = lo[a] + s;
        }
        for i0 in lo[0]..hi[0] {
            for i1 in lo[1]..hi[1] {
                for i2 in lo[2]..hi[2] {
                    if let Some(k) = grid.flat_checked([i0, i1, i2]) {
                        owner[k] = ci as u32;
                    }
                }
            }
        }
    }
    for k in 0..grid.len() {
        if member[k] && owner[k] == u32::MAX {
            let i = grid.unflat(k);
            let mut index = [0i64; 3];
            for a in a0..3 {
                index[a] = base[a] + i[a] as i64;
            }
            owner[k] = cubes.len() as u32;
            cubes.push(DyadicCube { level, index });
        }
    }
    Tiling { cubes, owner }
}

/// Squared center distance in units of `2^-level_max / 2`.
fn center_d2(a: &DyadicCube, b: &DyadicCube, level: i32, dim: usize) -> i128 {
    let c = |q: &DyadicCube, ax: usize| -> i128 {
        let s = 1i128 << (level - q.level);
        2 * q.index[ax] as i128 * s + s
    };
    (3 - dim..3).map(|ax| (c(a, ax) - c(b, ax)).pow(2)).sum()
}

/// Jones extension with support in the `eps`-neighborhood of Ω.
pub fn jones_extend(f: &ScalarField, dom: &GridDomain, eps: f64) -> Result<JonesExtension> {
    let g0 = &dom.grid;
    let level = g0
        .dyadic_level()
        .ok_or_else(|| Error::invalid("Jones extension needs a dyadic grid"))? as i32;
    let n = g0.dim;
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    let mut k_eps = (5.0 * (n as f64).sqrt() / eps).log2().floor() as i32;
    while 2f64.powi(-k_eps) >= eps / (5.0 * (n as f64).sqrt()) {
        k_eps += 1;
    }
    while 2f64.powi(-(k_eps - 1)) < eps / (5.0 * (n as f64).sqrt()) {
        k_eps -= 1;
    }
    if k_eps > level {
        return Err(Error::TooCoarse { feature: "eps / (5 sqrt n)".into(), size: eps / (5.0 * (n as f64).sqrt()), min: g0.h });
    }
    let strip = dom.shape.as_ref().is_some_and(|s| s.is_strip());
    let pad = (2.0 * eps / g0.h).ceil() as usize + 4;
    let (mut lo, mut hi) = ([0usize; 3], [0usize; 3]);
    for a in g0.a0()..3 {
        if !strip {
            lo[a] = pad;
            hi[a] = pad;
        }
    }
    if strip {
        lo[2] = pad;
    }
    let grid = g0.extended(lo, hi);
    let mask = g0.embed(&dom.mask, lo, &grid, false);
    let big = GridDomain::from_mask(grid.clone(), mask, dom.shape.clone())?;
    let vals = g0.embed(&f.values, lo, &grid, 0.0);

    let inner = whitney_decompose(&MaskRegion::domain(&big)?)?;
    let outer = whitney_decompose(&MaskRegion::complement(&big, Some(inner.min_level))?)?;
    let inv: Vec<bool> = big.mask.iter().map(|m| !m).collect();
    let ti = tile(&grid, &big.mask, &inner);
    let to = tile(&grid, &inv, &outer);

    // Averages over interior cubes; large cubes carry f* with mean zero.
    let cap = 2f64.powi(-k_eps);
    let mut sums = vec![0.0; ti.cubes.len()];
    let mut counts = vec![0usize; ti.cubes.len()];
    for k in 0..grid.len() {
        if big.mask[k] {
            let c = ti.owner[k] as usize;
            sums[c] += vals[k];
            counts[c] += 1;
        }
    }
    let fstar_avg: Vec<f64> = (0..ti.cubes.len())
        .map(|c| if ti.cubes[c].side() > cap { 0.0 } else { sums[c] / counts[c] as f64 })
        .collect();

    let q0 = (!strip).then(|| {
        let best = (0..ti.cubes.len()).min_by_key(|&c| (ti.cubes[c].level, ti.cubes[c].index)).unwrap();
        (best, ti.cubes[best])
    });
    // Complement cubes that may carry a nonzero value.
    let candidates: Vec<usize> = (0..to.cubes.len())
        .filter(|&c| {
            let s = to.cubes[c].side();
            s <= cap || q0.is_some_and(|(_, q)| s > q.side())
        })
        .collect();
    let matched = par::map_slice(&candidates, |&c| {
        let qc = &to.cubes[c];
        if let Some((i0, q)) = q0 {
            if qc.side() > q.side() {
                return i0;
            }
        }
        let mut best: Option<(i128, i32, [i64; 3], usize)> = None;
        for (i, q) in ti.cubes.iter().enumerate() {
            if q.level > qc.level {
                continue;
            }
            let key = (center_d2(q, qc, level, n), q.level, q.index, i);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        best.expect("an interior cube at least as large").3
    });
    let mut cube_value = vec![None; to.cubes.len()];
    let mut matching = Vec::with_capacity(candidates.len());
    for (&c, &m) in candidates.iter().zip(&matched) {
        cube_value[c] = Some((matching.len() as u32, fstar_avg[m]));
        matching.push((to.cubes[c], ti.cubes[m]));
    }

    let neighborhood: Vec<bool> =
        (0..grid.len()).map(|k| big.mask[k] || big.dist.values[k] < 2.0 * eps).collect();
    let mut values = vec![0.0; grid.len()];
    let mut provenance = vec![Provenance::Zero; grid.len()];
    let mut support = vec![false; grid.len()];
    for k in 0..grid.len() {
        if big.mask[k] {
            values[k] = vals[k];
            support[k] = true;
            let c = ti.owner[k] as usize;
            provenance[k] = if ti.cubes[c].side() > cap { Provenance::GPart } else { Provenance::Original };
        } else if neighborhood[k] {
            let c = to.owner[k];
            if c == u32::MAX {
                continue;
            }
            if let Some((mi, v)) = cube_value[c as usize] {
                values[k] = v;
                provenance[k] = Provenance::Matched(mi);
                support[k] = true;
            }
        }
    }
    let info = JonesInfo {
        k_eps,
        matching,
        q0: q0.map(|(_, q)| q),
        interior_cubes: ti.cubes.len(),
        complement_cubes: to.cubes.len(),
        domain: big,
        neighborhood,
    };
    Ok(JonesExtension {
        result: ExtensionResult { field: ScalarField { grid, values }, support, provenance, offset: lo },
        info,
    })
}

//! Sampled scalar and vector fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_domain::Grid;
use crate::P3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid("field length does not match grid"));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        ScalarField { grid: grid.clone(), values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        ScalarField { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(grid: &Grid, f: impl Fn(&P3) -> f64) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.center(k))).collect();
        ScalarField { grid: grid.clone(), values }
    }

    /// Copy with zeros outside `mask`.
    pub fn masked(&self, mask: &[bool]) -> Self {
        let values = self.values.iter().zip(mask).map(|(&v, &m)| if m { v } else { 0.0 }).collect();
        ScalarField { grid: self.grid.clone(), values }
    }

    pub fn scaled(&self, s: f64) -> Self {
        ScalarField { grid: self.grid.clone(), values: self.values.iter().map(|v| v * s).collect() }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &ScalarField, b: f64) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        ScalarField { grid: self.grid.clone(), values }
    }

    pub fn max_abs(&self, mask: Option<&[bool]>) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(k, _)| mask.is_none_or(|m| m[*k]))
            .fold(0.0, |acc, (_, v)| acc.max(v.abs()))
    }

    /// Multilinear interpolation at `p`. With a mask, only member corners
    /// contribute and weights are renormalized; if none is a member the
    /// nearest member cell within one cell is used.
    pub fn interpolate(&self, p: &P3, mask: Option<&[bool]>) -> Option<f64> {
        interpolate(&self.grid, &self.values, p, mask)
    }
}

pub(crate) fn interpolate(grid: &Grid, values: &[f64], p: &P3, mask: Option<&[bool]>) -> Option<f64> {
    let t = grid.to_index(p);
    let mut base = [0i64; 3];
    let mut frac = [0.0; 3];
    for a in grid.a0()..3 {
        let n = grid.shape[a] as i64;
        let f = t[a].floor();
        let b = (f as i64).clamp(0, n - 2);
        base[a] = b;
        frac[a] = (t[a] - b as f64).clamp(0.0, 1.0);
    }
    let mut acc = 0.0;
    let mut wsum = 0.0;
    let corners = 1usize << grid.dim;
    for c in 0..corners {
        let mut idx = base;
        let mut w = 1.0;
        for (bit, a) in (grid.a0()..3).enumerate() {
            let up = (c >> bit) & 1 == 1;
            if up {
                idx[a] += 1;
                w *= frac[a];
            } else {
                w *= 1.0 - frac[a];
            }
        }
        let k = grid.flat_checked(idx)?;
        if mask.is_none_or(|m| m[k]) && w > 0.0 {
            acc += w * values[k];
            wsum += w;
        }
    }
    if wsum > 0.0 {
        return Some(acc / wsum);
    }
    let m = mask?;
    // Nearest member among the corners.
    let mut best: Option<(f64, usize)> = None;
    for c in 0..corners {
        let mut idx = base;
        for (bit, a) in (grid.a0()..3).enumerate() {
            if (c >> bit) & 1 == 1 {
                idx[a] += 1;
            }
        }
        if let Some(k) = grid.flat_checked(idx) {
            if m[k] {
                let q = grid.center(k);
                let d = (0..3).map(|a| (q[a] - p[a]).powi(2)).sum::<f64>();
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, k));
                }
            }
        }
    }
    best.map(|(_, k)| values[k])
}

/// A vector field: one component per physical axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    pub grid: Grid,
    pub comps: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn new(grid: Grid, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != grid.dim || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::invalid("vector field needs one full-length component per axis"));
        }
        Ok(VectorField { grid, comps })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&P3) -> P3) -> Self {
        let n = grid.len();
        let a0 = grid.a0();
        let mut comps = vec![vec![0.0; n]; grid.dim];
        for k in 0..n {
            let v = f(&grid.center(k));
            for (j, c) in comps.iter_mut().enumerate() {
                c[k] = v[a0 + j];
            }
        }
        VectorField { grid: grid.clone(), comps }
    }

    pub fn component(&self, j: usize) -> ScalarField {
        ScalarField { grid: self.grid.clone(), values: self.comps[j].clone() }
    }

    /// Padded vector at cell `k`.
    #[inline]
    pub fn at(&self, k: usize) -> P3 {
        let mut v = [0.0; 3];
        let a0 = self.grid.a0();
        for (j, c) in self.comps.iter().enumerate() {
            v[a0 + j] = c[k];
        }
        v
    }

    pub fn scaled(&self, s: f64) -> Self {
        VectorField {
            grid: self.grid.clone(),
            comps: self.comps.iter().map(|c| c.iter().map(|v| v * s).collect()).collect(),
        }
    }

    /// Pointwise Euclidean norm.
    pub fn norm(&self) -> ScalarField {
        let values = (0..self.grid.len())
            .map(|k| self.comps.iter().map(|c| c[k] * c[k]).sum::<f64>().sqrt())
            .collect();
        ScalarField { grid: self.grid.clone(), values }
    }

    /// `g . v` for a padded direction field `g`.
    pub fn dot_field(&self, g: &[P3]) -> ScalarField {
        let values = (0..self.grid.len())
            .map(|k| {
                let v = self.at(k);
                v[0] * g[k][0] + v[1] * g[k][1] + v[2] * g[k][2]
            })
            .collect();
        ScalarField { grid: self.grid.clone(), values }
    }

    pub fn interpolate(&self, p: &P3, mask: Option<&[bool]>) -> Option<P3> {
        let a0 = self.grid.a0();
        let mut v = [0.0; 3];
        for (j, c) in self.comps.iter().enumerate() {
            v[a0 + j] = interpolate(&self.grid, c, p, mask)?;
        }
        Some(v)
    }

    /// Discrete divergence on Ω cells: central differences where both
    /// neighbors are in Ω, one-sided where only one is, zero otherwise.
    pub fn divergence(&self, mask: &[bool]) -> ScalarField {
        let g = &self.grid;
        let st = g.strides();
        let a0 = g.a0();
        let mut out = vec![0.0; g.len()];
        for k in 0..g.len() {
            if !mask[k] {
                continue;
            }
            let i = g.unflat(k);
            let mut s = 0.0;
            for (j, c) in self.comps.iter().enumerate() {
                let a = a0 + j;
                let lo = i[a] > 0 && mask[k - st[a]];
                let hi = i[a] + 1 < g.shape[a] && mask[k + st[a]];
                s += match (lo, hi) {
                    (true, true) => (c[k + st[a]] - c[k - st[a]]) / (2.0 * g.h),
                    (false, true) => (c[k + st[a]] - c[k]) / g.h,
                    (true, false) => (c[k] - c[k - st[a]]) / g.h,
                    _ => 0.0,
                };
            }
            out[k] = s;
        }
        ScalarField { grid: g.clone(), values: out }
    }
}

/// Random trigonometric sum `offset + sum a_k cos(w_k . x + phi_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSmooth {
    pub seed: u64,
    pub modes: usize,
    pub max_freq: f64,
    pub amplitude: f64,
    pub offset: f64,
    terms: Vec<(P3, f64, f64)>,
}

impl RandomSmooth {
    pub fn new(seed: u64, dim: usize, modes: usize, max_freq: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::with_capacity(modes);
        for _ in 0..modes {
            let mut w = [0.0; 3];
            for wa in w.iter_mut().skip(3 - dim) {
                *wa = rng.random_range(-max_freq..=max_freq);
            }
            let a = rng.random_range(-1.0..=1.0) / (modes as f64).sqrt();
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            terms.push((w, a, phi));
        }
        let offset = rng.random_range(-1.0..=1.0);
        RandomSmooth { seed, modes, max_freq, amplitude: 1.0, offset, terms }
    }

    pub fn eval(&self, p: &P3) -> f64 {
        let mut s = self.offset;
        for (w, a, phi) in &self.terms {
            s += a * (w[0] * p[0] + w[1] * p[1] + w[2] * p[2] + phi).cos();
        }
        self.amplitude * s
    }

    /// Gradient of [`RandomSmooth::eval`].
    pub fn grad(&self, p: &P3) -> P3 {
        let mut g = [0.0; 3];
        for (w, a, phi) in &self.terms {
            let s = -a * (w[0] * p[0] + w[1] * p[1] + w[2] * p[2] + phi).sin();
            for t in 0..3 {
                g[t] += s * w[t] * self.amplitude;
            }
        }
        g
    }

    pub fn sample(&self, grid: &Grid) -> ScalarField {
        ScalarField::from_fn(grid, |p| self.eval(p))
    }
}

/// A random smooth vector field with independent components.
pub fn random_vector_field(grid: &Grid, seed: u64, modes: usize, max_freq: f64) -> VectorField {
    let comps: Vec<RandomSmooth> = (0..grid.dim)
        .map(|j| RandomSmooth::new(seed.wrapping_mul(31).wrapping_add(j as u64 + 1), grid.dim, modes, max_freq))
        .collect();
    let a0 = grid.a0();
    VectorField::from_fn(grid, |p| {
        let mut v = [0.0; 3];
        for (j, c) in comps.iter().enumerate() {
            v[a0 + j] = c.eval(p);
        }
        v
    })
}

/// Dyadic rationals `k / 2^bits` with `|k| < 2^bits * range`; sums and
/// averages over dyadic cubes of such values are exact in floating point.
pub fn random_dyadic_field(grid: &Grid, seed: u64, bits: u32) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = (1u64 << bits) as f64;
    let values = (0..grid.len()).map(|_| rng.random_range(-64i64..=64) as f64 / scale).collect();
    ScalarField { grid: grid.clone(), values }
}

//! Lattice domains: grids, masks, the boundary interface, distance fields
//! and boundary sampling.

mod boundary;
mod distance;
pub mod edt;
mod shape;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::P3;

pub use boundary::{BoundaryMesh, BoundarySample};
pub use distance::DistanceField;
pub use shape::{bump, pad, phys, Shape};

/// Uniform lattice. `shape` and `origin` are padded to three axes with
/// leading singleton axes; `origin` is the center of cell zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub shape: [usize; 3],
    pub h: f64,
    pub origin: P3,
}

impl Grid {
    /// Builds a grid from physical extents and origin.
    pub fn new(shape: &[usize], h: f64, origin: &[f64]) -> Result<Grid> {
        let dim = shape.len();
        if !(1..=3).contains(&dim) || origin.len() != dim {
            return Err(Error::invalid("grid dimension must be 1, 2 or 3"));
        }
        if shape.iter().any(|&n| n < 2) {
            return Err(Error::invalid("every grid extent must be at least 2"));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid("spacing must be positive"));
        }
        let mut s = [1usize; 3];
        s[3 - dim..].copy_from_slice(shape);
        Ok(Grid { dim, shape: s, h, origin: pad(origin) })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1] * self.shape[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// First active (non-padded) axis.
    #[inline]
    pub fn a0(&self) -> usize {
        3 - self.dim
    }

    #[inline]
    pub fn strides(&self) -> [usize; 3] {
        [self.shape[1] * self.shape[2], self.shape[2], 1]
    }

    #[inline]
    pub fn flat(&self, i: [usize; 3]) -> usize {
        (i[0] * self.shape[1] + i[1]) * self.shape[2] + i[2]
    }

    #[inline]
    pub fn unflat(&self, k: usize) -> [usize; 3] {
        [k / (self.shape[1] * self.shape[2]), (k / self.shape[2]) % self.shape[1], k % self.shape[2]]
    }

    /// Flat index of a signed index triple, or `None` outside the grid.
    #[inline]
    pub fn flat_checked(&self, i: [i64; 3]) -> Option<usize> {
        for a in 0..3 {
            if i[a] < 0 || i[a] >= self.shape[a] as i64 {
                return None;
            }
        }
        Some(self.flat([i[0] as usize, i[1] as usize, i[2] as usize]))
    }

    #[inline]
    pub fn center_of(&self, i: [usize; 3]) -> P3 {
        [
            self.origin[0] + i[0] as f64 * self.h,
            self.origin[1] + i[1] as f64 * self.h,
            self.origin[2] + i[2] as f64 * self.h,
        ]
    }

    #[inline]
    pub fn center(&self, k: usize) -> P3 {
        self.center_of(self.unflat(k))
    }

    /// Continuous index coordinates of a point (cell centers are integers).
    #[inline]
    pub fn to_index(&self, p: &P3) -> P3 {
        [
            (p[0] - self.origin[0]) / self.h,
            (p[1] - self.origin[1]) / self.h,
            (p[2] - self.origin[2]) / self.h,
        ]
    }

    /// Physical extents.
    pub fn phys_shape(&self) -> Vec<usize> {
        self.shape[self.a0()..].to_vec()
    }

    pub fn phys_origin(&self) -> Vec<f64> {
        self.origin[self.a0()..].to_vec()
    }

    /// Lower corner of the grid box (cell faces).
    pub fn lo_corner(&self) -> P3 {
        let mut c = self.origin;
        for a in self.a0()..3 {
            c[a] -= 0.5 * self.h;
        }
        c
    }

    pub fn hi_corner(&self) -> P3 {
        let mut c = self.origin;
        for a in self.a0()..3 {
            c[a] += (self.shape[a] as f64 - 0.5) * self.h;
        }
        c
    }

    /// Cell faces sit on integer multiples of `h = 2^-m`.
    pub fn dyadic_level(&self) -> Option<u32> {
        let m = -self.h.log2();
        if (m - m.round()).abs() > 1e-12 || m < 0.0 {
            return None;
        }
        let m = m.round() as u32;
        for a in self.a0()..3 {
            let t = self.origin[a] / self.h - 0.5;
            if (t - t.round()).abs() > 1e-9 {
                return None;
            }
        }
        Some(m)
    }

    /// Integer index of cell zero's lower face (`origin = (base + 1/2) h`).
    pub fn base_index(&self) -> [i64; 3] {
        let mut b = [0i64; 3];
        for a in self.a0()..3 {
            b[a] = (self.origin[a] / self.h - 0.5).round() as i64;
        }
        b
    }

    /// Same lattice with `pad` extra cells on each side of every active axis.
    pub fn padded(&self, pad_cells: usize) -> Grid {
        let mut g = self.clone();
        for a in self.a0()..3 {
            g.shape[a] += 2 * pad_cells;
            g.origin[a] -= pad_cells as f64 * self.h;
        }
        g
    }

    /// Same lattice grown by `lo[a]` cells below and `hi[a]` above on each
    /// active axis.
    pub fn extended(&self, lo: [usize; 3], hi: [usize; 3]) -> Grid {
        let mut g = self.clone();
        for a in self.a0()..3 {
            g.shape[a] += lo[a] + hi[a];
            g.origin[a] -= lo[a] as f64 * self.h;
        }
        g
    }

    /// Copies cell values into a grid made by [`Grid::extended`] with the
    /// same `lo`, filling the rest with `fill`.
    pub fn embed<T: Copy>(&self, values: &[T], lo: [usize; 3], big: &Grid, fill: T) -> Vec<T> {
        let mut out = vec![fill; big.len()];
        for (k, v) in values.iter().enumerate() {
            let mut i = self.unflat(k);
            for a in self.a0()..3 {
                i[a] += lo[a];
            }
            out[big.flat(i)] = *v;
        }
        out
    }

    /// Cell diameter bound of the whole grid box.
    pub fn diameter(&self) -> f64 {
        let mut s = 0.0;
        for a in self.a0()..3 {
            s += (self.shape[a] as f64 * self.h).powi(2);
        }
        s.sqrt()
    }

    /// Visits the up to `2n` face neighbors of a cell.
    #[inline]
    pub fn face_neighbors(&self, k: usize, mut f: impl FnMut(usize, usize, i64)) {
        let i = self.unflat(k);
        let st = self.strides();
        for a in self.a0()..3 {
            if i[a] > 0 {
                f(k - st[a], a, -1);
            }
            if i[a] + 1 < self.shape[a] {
                f(k + st[a], a, 1);
            }
        }
    }
}

/// Spacing given as a number or a fraction string such as `"1/64"`.
pub fn parse_spacing(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| Error::invalid(format!("bad spacing {s}")))?;
        let b: f64 = b.trim().parse().map_err(|_| Error::invalid(format!("bad spacing {s}")))?;
        a / b
    } else {
        s.parse().map_err(|_| Error::invalid(format!("bad spacing {s}")))?
    };
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::invalid(format!("spacing must be positive, got {s}")));
    }
    Ok(v)
}

fn de_spacing<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Sp {
        Num(f64),
        Str(String),
    }
    match Sp::deserialize(d)? {
        Sp::Num(x) => Ok(x),
        Sp::Str(s) => parse_spacing(&s).map_err(serde::de::Error::custom),
    }
}

fn default_margin() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    #[serde(deserialize_with = "de_spacing")]
    pub h: f64,
    /// Extra cells around the shape's bounding box.
    #[serde(default = "default_margin")]
    pub margin: usize,
}

/// JSON domain description `{type, params, resolution}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    #[serde(flatten)]
    pub shape: Shape,
    pub resolution: Resolution,
}

impl DomainSpec {
    pub fn new(shape: Shape, h: f64) -> Self {
        DomainSpec { shape, resolution: Resolution { h, margin: default_margin() } }
    }

    pub fn with_margin(mut self, margin: usize) -> Self {
        self.resolution.margin = margin;
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// One face between an Ω cell and an in-grid non-Ω cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Face {
    /// The Ω cell owning the face.
    pub cell: usize,
    /// Padded axis index.
    pub axis: u8,
    /// +1 if the outside neighbor sits at `cell + e_axis`, else -1.
    pub side: i8,
}

/// Ω on a lattice with its interface, components and distance field.
#[derive(Clone, Debug)]
pub struct GridDomain {
    pub grid: Grid,
    pub mask: Vec<bool>,
    /// Analytic description if the mask was sampled from one.
    pub shape: Option<Shape>,
    /// Interface faces, ordered by owning cell then axis then side.
    pub faces: Vec<Face>,
    /// Ω cells with at least one interface face, ascending.
    pub boundary_cells: Vec<usize>,
    /// Component label per boundary cell.
    pub components: Vec<u32>,
    /// Component label per interface face.
    pub face_component: Vec<u32>,
    pub n_components: usize,
    pub dist: DistanceField,
}

impl GridDomain {
    /// Builds a domain from an explicit mask. Faces on the grid edge are
    /// never part of the interface.
    pub fn from_mask(grid: Grid, mask: Vec<bool>, shape: Option<Shape>) -> Result<GridDomain> {
        if mask.len() != grid.len() {
            return Err(Error::invalid("mask length does not match grid"));
        }
        if !mask.iter().any(|&m| m) {
            return Err(Error::EmptyMask);
        }
        let mut faces = Vec::new();
        let mut boundary_cells = Vec::new();
        for k in 0..grid.len() {
            if !mask[k] {
                continue;
            }
            let before = faces.len();
            let i = grid.unflat(k);
            let st = grid.strides();
            for a in grid.a0()..3 {
                if i[a] > 0 && !mask[k - st[a]] {
                    faces.push(Face { cell: k, axis: a as u8, side: -1 });
                }
                if i[a] + 1 < grid.shape[a] && !mask[k + st[a]] {
                    faces.push(Face { cell: k, axis: a as u8, side: 1 });
                }
            }
            if faces.len() > before {
                boundary_cells.push(k);
            }
        }
        let components = label_components(&grid, &boundary_cells);
        let n_components = components.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut face_component = Vec::with_capacity(faces.len());
        for f in &faces {
            let pos = boundary_cells.binary_search(&f.cell).expect("face owner is a boundary cell");
            face_component.push(components[pos]);
        }
        let dist = DistanceField::compute(&grid, &mask, &faces);
        Ok(GridDomain {
            grid,
            mask,
            shape,
            faces,
            boundary_cells,
            components,
            face_component,
            n_components,
            dist,
        })
    }

    /// The whole grid as the domain (no interface).
    pub fn whole_grid(grid: Grid) -> GridDomain {
        let n = grid.len();
        GridDomain::from_mask(grid, vec![true; n], None).expect("nonempty grid")
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn h(&self) -> f64 {
        self.grid.h
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn reach(&self) -> f64 {
        self.dist.reach
    }

    /// Midpoint of an interface face.
    pub fn face_point(&self, f: &Face) -> P3 {
        let mut p = self.grid.center(f.cell);
        p[f.axis as usize] += 0.5 * f.side as f64 * self.grid.h;
        p
    }

    /// Ω cells with `d < delta`.
    pub fn tubular_neighborhood(&self, delta: f64) -> Vec<bool> {
        self.mask
            .iter()
            .zip(&self.dist.values)
            .map(|(&m, &d)| m && d < delta)
            .collect()
    }

    /// Boundary samples with normals and surface weights.
    pub fn boundary_mesh(&self) -> BoundaryMesh {
        BoundaryMesh::build(self)
    }

    /// Nearest boundary point of `x`; see [`DistanceField::project`].
    pub fn project(&self, x: &P3) -> Result<P3> {
        self.dist.project(self, x)
    }
}

/// Union-find labeling of boundary cells with the full `3^n - 1`
/// neighborhood. Labels follow first appearance in row-major order.
fn label_components(grid: &Grid, cells: &[usize]) -> Vec<u32> {
    let n = cells.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut pos = std::collections::HashMap::with_capacity(n);
    for (j, &c) in cells.iter().enumerate() {
        pos.insert(c, j);
    }
    let a0 = grid.a0() as i64;
    for (j, &c) in cells.iter().enumerate() {
        let i = grid.unflat(c);
        for d0 in -1i64..=1 {
            for d1 in -1i64..=1 {
                for d2 in -1i64..=1 {
                    let d = [d0, d1, d2];
                    if (0..a0 as usize).any(|a| d[a] != 0) || d == [0, 0, 0] {
                        continue;
                    }
                    let q = [i[0] as i64 + d0, i[1] as i64 + d1, i[2] as i64 + d2];
                    if let Some(k) = grid.flat_checked(q) {
                        if let Some(&jj) = pos.get(&k) {
                            let (ra, rb) = (find(&mut parent, j), find(&mut parent, jj));
                            if ra != rb {
                                parent[ra.max(rb)] = ra.min(rb);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut label = vec![u32::MAX; n];
    let mut next = 0u32;
    let mut out = vec![0u32; n];
    for j in 0..n {
        let r = find(&mut parent, j);
        if label[r] == u32::MAX {
            label[r] = next;
            next += 1;
        }
        out[j] = label[r];
    }
    out
}

/// Samples the analytic indicator on a grid and builds the domain.
pub fn build_domain(spec: &DomainSpec) -> Result<GridDomain> {
    let shape = &spec.shape;
    shape.validate()?;
    let h = spec.resolution.h;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("spacing must be positive"));
    }
    for (name, size) in shape.features() {
        if size < 4.0 * h {
            return Err(Error::TooCoarse { feature: name.to_string(), size, min: 4.0 * h });
        }
    }
    let grid = grid_for(shape, &spec.resolution)?;
    let mask: Vec<bool> = (0..grid.len()).map(|k| shape.contains(&grid.center(k))).collect();
    GridDomain::from_mask(grid, mask, Some(shape.clone()))
}

/// Lattice with faces on multiples of `h` covering the shape.
pub fn grid_for(shape: &Shape, res: &Resolution) -> Result<Grid> {
    let h = res.h;
    let m = res.margin as i64;
    let (lo, hi) = shape.bbox();
    let dim = shape.dim();
    let mut n = Vec::with_capacity(dim);
    let mut origin = Vec::with_capacity(dim);
    let snap = |x: f64, up: bool| {
        let t = x / h;
        if (t - t.round()).abs() < 1e-9 {
            t.round() as i64
        } else if up {
            t.ceil() as i64
        } else {
            t.floor() as i64
        }
    };
    let snap_lo = |x: f64| snap(x, false);
    let snap_hi = |x: f64| snap(x, true);
    for a in 0..dim {
        let (l, u) = if shape.is_strip() {
            if a + 1 == dim {
                (snap_lo(lo[a]) - m, snap_hi(hi[a]))
            } else {
                ((lo[a] / h).round() as i64, (hi[a] / h).round() as i64)
            }
        } else {
            (snap_lo(lo[a]) - m, snap_hi(hi[a]) + m)
        };
        let mut o = (l as f64 + 0.5) * h;
        if let Shape::HalfSpace { shift, .. } = shape {
            if a + 1 < dim && !shift.is_empty() {
                o += shift[a] * h;
            }
        }
        n.push((u - l).max(2) as usize);
        origin.push(o);
    }
    Grid::new(&n, h, &origin)
}

//! Normal coordinates `y = (y', y_n)` near the boundary: `x = z(y') + y_n
//! nu(y')` with `z` a boundary parametrization and `nu = grad d` the inward
//! unit normal at `z`. The frame matrix is the Jacobian `A = dx/dy`; its last
//! column is `nu = -n` for the exterior normal `n`.
//!
//! Charts are analytic. On circles `y'` is signed arc length from the base
//! point; on graphs it is the graph parameter; on half-spaces `x = z0 + y`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid_domain::{pad, Grid, GridDomain, Shape};
use crate::par;
use crate::P3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChartKind {
    /// `Ω = {x_n > 0}`.
    HalfSpace { dim: usize },
    /// Circle of radius `radius`; `inward` when Ω lies inside it.
    Circle { center: [f64; 2], radius: f64, inward: bool },
    /// `Ω = {x_2 > amplitude * bump((x_1 - center) / width)}`.
    Graph { amplitude: f64, width: f64, center: f64 },
}

/// Chart spec as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    #[serde(flatten)]
    pub shape: Shape,
    pub z0: Vec<f64>,
    pub r: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalChart {
    pub kind: ChartKind,
    pub z0: Vec<f64>,
    /// Tangential half-width of the slab.
    pub r: f64,
    /// Normal half-depth of the slab.
    pub delta: f64,
    /// Normal depth up to which nearest points stay unique.
    pub reach: f64,
    /// Parameter of the base point (angle on circles, `x_1` on graphs).
    base: f64,
}

fn graph(amplitude: f64, width: f64, center: f64, s: f64) -> (f64, f64, f64) {
    Shape::PerturbedHalfSpace { extent: [0.0, 0.0], height: 0.0, amplitude, width, center }.psi(s)
}

impl NormalChart {
    pub fn new(shape: &Shape, z0: &[f64], r: f64, delta: f64) -> Result<Self> {
        shape.validate()?;
        if z0.len() != shape.dim() {
            return Err(Error::invalid("base point dimension does not match the shape"));
        }
        if !(r > 0.0 && delta > 0.0) {
            return Err(Error::invalid("slab extents must be positive"));
        }
        let near = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + b.abs());
        let (kind, reach, base) = match shape {
            Shape::HalfSpace { .. } => {
                if z0[z0.len() - 1] != 0.0 {
                    return Err(Error::invalid("base point must lie on x_n = 0"));
                }
                (ChartKind::HalfSpace { dim: z0.len() }, f64::INFINITY, 0.0)
            }
            Shape::Disk { center, radius } => {
                let c = [center[0], center[1]];
                let rho = ((z0[0] - c[0]).powi(2) + (z0[1] - c[1]).powi(2)).sqrt();
                if !near(rho, *radius) {
                    return Err(Error::invalid("base point is not on the circle"));
                }
                let th = (z0[1] - c[1]).atan2(z0[0] - c[0]);
                (ChartKind::Circle { center: c, radius: *radius, inward: true }, *radius, th)
            }
            Shape::Annulus { center, r_in, r_out } => {
                let c = [center[0], center[1]];
                let rho = ((z0[0] - c[0]).powi(2) + (z0[1] - c[1]).powi(2)).sqrt();
                let th = (z0[1] - c[1]).atan2(z0[0] - c[0]);
                let gap = (r_out - r_in) / 2.0;
                if near(rho, *r_out) {
                    (ChartKind::Circle { center: c, radius: *r_out, inward: true }, gap.min(*r_out), th)
                } else if near(rho, *r_in) {
                    (ChartKind::Circle { center: c, radius: *r_in, inward: false }, gap.min(*r_in), th)
                } else {
                    return Err(Error::invalid("base point is on neither circle"));
                }
            }
            Shape::PerturbedHalfSpace { amplitude, width, center, .. } => {
                let (p, _, _) = graph(*amplitude, *width, *center, z0[0]);
                if !near(z0[1], p) {
                    return Err(Error::invalid("base point is not on the graph"));
                }
                let mut kmax: f64 = 0.0;
                for i in 0..=4000 {
                    let s = center - width + 2.0 * width * i as f64 / 4000.0;
                    let (_, d1, d2) = graph(*amplitude, *width, *center, s);
                    kmax = kmax.max(d2.abs() / (1.0 + d1 * d1).powf(1.5));
                }
                let reach = if kmax > 0.0 { 1.0 / kmax } else { f64::INFINITY };
                (ChartKind::Graph { amplitude: *amplitude, width: *width, center: *center }, reach, z0[0])
            }
            other => return Err(Error::Unsupported(format!("normal chart for {}", other.name()))),
        };
        if let ChartKind::Circle { radius, .. } = kind {
            if r >= std::f64::consts::PI * radius {
                return Err(Error::invalid("tangential extent wraps around the circle"));
            }
        }
        if delta >= reach {
            return Err(Error::invalid(format!("slab depth {delta} is not below the reach {reach}")));
        }
        Ok(NormalChart { kind, z0: z0.to_vec(), r, delta, reach, base })
    }

    pub fn from_spec(spec: &ChartSpec) -> Result<Self> {
        Self::new(&spec.shape, &spec.z0, spec.r, spec.delta)
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ChartKind::HalfSpace { dim } => dim,
            _ => 2,
        }
    }

    fn check_slab(&self, y: &[f64]) -> Result<()> {
        let n = self.dim();
        if y.len() != n {
            return Err(Error::invalid("chart point has the wrong dimension"));
        }
        let tang = y[..n - 1].iter().map(|t| t * t).sum::<f64>().sqrt();
        if tang >= self.r || y[n - 1].abs() >= self.delta {
            return Err(Error::OutsideSlab(y.to_vec()));
        }
        Ok(())
    }

    /// Boundary point, its tangent derivative and the inward normal with its
    /// tangential derivative, for planar charts.
    fn planar(&self, s: f64) -> ([f64; 2], [f64; 2], [f64; 2], [f64; 2]) {
        match self.kind {
            ChartKind::Circle { center, radius, inward } => {
                let (sg, tau) = if inward { (1.0, 1.0) } else { (-1.0, -1.0) };
                let th = self.base + sg * s / radius;
                let (sn, cs) = th.sin_cos();
                let z = [center[0] + radius * cs, center[1] + radius * sn];
                let dz = [-sg * sn, sg * cs];
                let nu = [-tau * cs, -tau * sn];
                let dnu = [tau * sg * sn / radius, -tau * sg * cs / radius];
                (z, dz, nu, dnu)
            }
            ChartKind::Graph { amplitude, width, center } => {
                let x = self.base + s;
                let (p, p1, p2) = graph(amplitude, width, center, x);
                let nn = (1.0 + p1 * p1).sqrt();
                let nu = [-p1 / nn, 1.0 / nn];
                let dn = p1 * p2 / (nn * nn * nn);
                let dnu = [-p2 / nn + p1 * dn, -dn];
                ([x, p], [1.0, p1], nu, dnu)
            }
            ChartKind::HalfSpace { .. } => unreachable!(),
        }
    }

    /// `psi(y)`.
    pub fn map(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_slab(y)?;
        Ok(self.map_unchecked(y))
    }

    fn map_unchecked(&self, y: &[f64]) -> Vec<f64> {
        match self.kind {
            ChartKind::HalfSpace { .. } => self.z0.iter().zip(y).map(|(a, b)| a + b).collect(),
            _ => {
                let (z, _, nu, _) = self.planar(y[0]);
                vec![z[0] + y[1] * nu[0], z[1] + y[1] * nu[1]]
            }
        }
    }

    /// `psi^-1(x)` by nearest-point projection.
    pub fn inverse(&self, x: &[f64]) -> Result<Vec<f64>> {
        let y = match &self.kind {
            ChartKind::HalfSpace { .. } => x.iter().zip(&self.z0).map(|(a, b)| a - b).collect(),
            ChartKind::Circle { center, radius, inward } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                let rho = (dx * dx + dy * dy).sqrt();
                let (sg, tau) = if *inward { (1.0, 1.0) } else { (-1.0, -1.0) };
                let mut dth = dy.atan2(dx) - self.base;
                dth -= (dth / std::f64::consts::TAU).round() * std::f64::consts::TAU;
                vec![sg * radius * dth, tau * (radius - rho)]
            }
            ChartKind::Graph { amplitude, width, center } => {
                let mut s = x[0];
                for _ in 0..100 {
                    let (p, p1, p2) = graph(*amplitude, *width, *center, s);
                    let f = (x[0] - s) + (x[1] - p) * p1;
                    let df = -1.0 - p1 * p1 + (x[1] - p) * p2;
                    let step = f / df;
                    s -= step;
                    if step.abs() < 1e-15 {
                        break;
                    }
                }
                let (p, p1, _) = graph(*amplitude, *width, *center, s);
                let nn = (1.0 + p1 * p1).sqrt();
                vec![s - self.base, ((x[0] - s) * -p1 + (x[1] - p)) / nn]
            }
        };
        self.check_slab(&y)?;
        Ok(y)
    }

    /// Jacobian of `psi` at `y`.
    pub fn frame(&self, y: &[f64]) -> Result<FrameMatrix> {
        self.check_slab(y)?;
        let n = self.dim();
        let a = match self.kind {
            ChartKind::HalfSpace { .. } => DMatrix::identity(n, n),
            _ => {
                let (_, dz, nu, dnu) = self.planar(y[0]);
                let t = y[1];
                DMatrix::from_column_slice(2, 2, &[dz[0] + t * dnu[0], dz[1] + t * dnu[1], nu[0], nu[1]])
            }
        };
        Ok(FrameMatrix { a })
    }

    /// `det A(y)`.
    pub fn jacobian(&self, y: &[f64]) -> Result<f64> {
        Ok(self.frame(y)?.a.determinant())
    }

    /// Exterior unit normal at the boundary point `psi(y', 0)`.
    pub fn exterior_normal(&self, yt: &[f64]) -> Vec<f64> {
        match self.kind {
            ChartKind::HalfSpace { dim } => {
                let mut e = vec![0.0; dim];
                e[dim - 1] = -1.0;
                e
            }
            _ => {
                let (_, _, nu, _) = self.planar(yt[0]);
                vec![-nu[0], -nu[1]]
            }
        }
    }

    /// Cell-centered chart grid over `(-r, r)^(n-1) x (-delta, delta)` with
    /// spacing `h`, symmetric about `y_n = 0`.
    pub fn grid(&self, h: f64) -> Result<Grid> {
        let n = self.dim();
        let m = |e: f64| (((e / h).floor() as usize).max(1)) * 2;
        let mut shape: Vec<usize> = vec![m(self.r); n - 1];
        shape.push(m(self.delta));
        let origin: Vec<f64> = shape.iter().map(|&k| -(k as f64 / 2.0 - 0.5) * h).collect();
        Grid::new(&shape, h, &origin)
    }

    /// `J` sampled on a chart grid.
    pub fn jacobian_field(&self, grid: &Grid) -> Result<ScalarField> {
        let a0 = grid.a0();
        let vals: Result<Vec<f64>> = (0..grid.len())
            .map(|k| {
                let c = grid.center(k);
                self.jacobian(&c[a0..])
            })
            .collect();
        ScalarField::new(grid.clone(), vals?)
    }
}

/// Columns `a_1 .. a_n` of the Jacobian.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameMatrix {
    pub a: DMatrix<f64>,
}

impl FrameMatrix {
    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    /// Largest `|a_j . a_n|` over tangential columns.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.dim();
        let an = self.a.column(n - 1);
        (0..n - 1).map(|j| self.a.column(j).dot(&an).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LastRowReport {
    pub last_row: Vec<f64>,
    /// `max_j |(A^-1)_{nj} - a_{jn}|`.
    pub residual: f64,
    pub condition: f64,
}

const MAX_CONDITION: f64 = 1e12;

/// Last row of `A^-1`, compared with the transposed last column of `A`.
pub fn inverse_last_row(a: &DMatrix<f64>) -> Result<LastRowReport> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::invalid("frame matrix must be square"));
    }
    let sv = a.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Singular(condition));
    }
    let inv = a.clone().try_inverse().ok_or(Error::Singular(condition))?;
    let last_row: Vec<f64> = (0..n).map(|j| inv[(n - 1, j)]).collect();
    let residual = (0..n).map(|j| (last_row[j] - a[(j, n - 1)]).abs()).fold(0.0, f64::max);
    Ok(LastRowReport { last_row, residual, condition })
}

/// Random `(G | u)`: `u` a unit vector and the columns of `G` random
/// vectors in the orthogonal complement of `u`.
pub fn random_frame<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    loop {
        let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if un < 0.1 {
            continue;
        }
        u.iter_mut().for_each(|x| *x /= un);
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n - 1 {
            let mut g: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let d: f64 = g.iter().zip(&u).map(|(x, y)| x * y).sum();
            g.iter_mut().zip(&u).for_each(|(x, y)| *x -= d * y);
            for i in 0..n {
                a[(i, j)] = g[i];
            }
        }
        for i in 0..n {
            a[(i, n - 1)] = u[i];
        }
        let sv = a.clone().svd(false, false).singular_values;
        if sv.min() > 1e-3 * sv.max() {
            return a;
        }
    }
}

/// Output of the vector-field transform on a chart grid.
#[derive(Clone, Debug)]
pub struct VfgReport {
    /// `w = A^-1 v(psi(y))` on the chart grid.
    pub w: VectorField,
    /// `grad d(psi(y)) . v(psi(y))` with `grad d` from central differences
    /// of the analytic signed distance.
    pub check: ScalarField,
    /// Cells with `0 < y_n` where both sides are defined.
    pub valid: Vec<bool>,
    /// `max |w_n - check|` over valid cells.
    pub max_diff: f64,
}

/// Components of `v` in normal coordinates over the `y_n > 0` half of a
/// chart grid.
pub fn transform_vector_field(v: &VectorField, dom: &GridDomain, chart: &NormalChart, ygrid: &Grid) -> Result<VfgReport> {
    let shape = dom.shape.as_ref().ok_or_else(|| Error::invalid("transform needs an analytic domain"))?;
    let n = chart.dim();
    if ygrid.dim != n || v.grid.dim != n {
        return Err(Error::invalid("chart, field and grid dimensions differ"));
    }
    let a0 = ygrid.a0();
    let hx = dom.h();
    let rows = par::map_range(ygrid.len(), |k| -> Result<Option<(Vec<f64>, f64)>> {
        let c = ygrid.center(k);
        let y = &c[a0..];
        if y[n - 1] <= 0.0 || y[n - 1] >= chart.reach {
            return Ok(None);
        }
        let x = pad(&chart.map(y)?);
        let Some(vx) = v.interpolate(&x, Some(&dom.mask)) else { return Ok(None) };
        let vv: Vec<f64> = vx[3 - n..].to_vec();
        let frame = chart.frame(y)?;
        let lu = frame.a.clone().lu();
        let w = lu
            .solve(&nalgebra::DVector::from_vec(vv.clone()))
            .ok_or(Error::Singular(f64::INFINITY))?;
        let mut gd = [0.0; 3];
        for a in 3 - n..3 {
            let mut p: P3 = x;
            let mut q: P3 = x;
            p[a] += hx;
            q[a] -= hx;
            gd[a] = (shape.signed_distance(&p) - shape.signed_distance(&q)) / (2.0 * hx);
        }
        let gn = (gd.iter().map(|t| t * t).sum::<f64>()).sqrt();
        let check: f64 = (3 - n..3).map(|a| gd[a] / gn * vx[a]).sum();
        Ok(Some((w.iter().copied().collect(), check)))
    });
    let mut comps = vec![vec![0.0; ygrid.len()]; n];
    let mut check = vec![0.0; ygrid.len()];
    let mut valid = vec![false; ygrid.len()];
    let mut max_diff: f64 = 0.0;
    for (k, r) in rows.into_iter().enumerate() {
        if let Some((w, c)) = r? {
            for j in 0..n {
                comps[j][k] = w[j];
            }
            check[k] = c;
            valid[k] = true;
            max_diff = max_diff.max((w[n - 1] - c).abs());
        }
    }
    Ok(VfgReport {
        w: VectorField::new(ygrid.clone(), comps)?,
        check: ScalarField::new(ygrid.clone(), check)?,
        valid,
        max_diff,
    })
}

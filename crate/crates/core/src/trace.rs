//! Normal traces, the integration-by-parts pairing, trace-inequality
//! experiments and the log counterexample.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{random_vector_field, RandomSmooth, ScalarField, VectorField};
use crate::grid_domain::{BoundaryMesh, DomainSpec, Grid, GridDomain, Shape};
use crate::seminorms::{
    b_seminorm, bmo_seminorm, lp_ul, normal_b_seminorm, vbmo_norm, vector_bmo_b_norm, Lattice, SeminormParams,
};
use crate::stats::{fit_log_inverse, relative_range, LineFit};
use crate::{build_domain, P3};

/// Test vector fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFieldSpec {
    /// `v = (d_2 phi, -d_1 phi)` by central differences of a random smooth
    /// stream function `phi` (planar only).
    StreamFunction { seed: u64, modes: usize, max_freq: f64 },
    /// Gradient of a random harmonic polynomial of degree at most 4 (planar).
    GradientHarmonic { seed: u64 },
    /// `v_1 = v_2 = log|x_1 - x_2|` (planar).
    CounterexampleLog,
    /// Independent random smooth components.
    RandomSmooth { seed: u64, modes: usize, max_freq: f64 },
    /// Rotation `(-(x_2 - c_2), x_1 - c_1)` (planar).
    Rotation { center: [f64; 2] },
}

fn planar(grid: &Grid, what: &str) -> Result<()> {
    if grid.dim != 2 {
        return Err(Error::invalid(format!("{what} fields are planar")));
    }
    Ok(())
}

pub fn make_test_field(spec: &TestFieldSpec, grid: &Grid) -> Result<VectorField> {
    let h = grid.h;
    Ok(match spec {
        TestFieldSpec::StreamFunction { seed, modes, max_freq } => {
            planar(grid, "stream-function")?;
            let phi = RandomSmooth::new(*seed, 2, *modes, *max_freq);
            VectorField::from_fn(grid, |p| {
                let at = |d1: f64, d2: f64| phi.eval(&[0.0, p[1] + d1, p[2] + d2]);
                let v1 = (at(0.0, h) - at(0.0, -h)) / (2.0 * h);
                let v2 = -(at(h, 0.0) - at(-h, 0.0)) / (2.0 * h);
                [0.0, v1, v2]
            })
        }
        TestFieldSpec::GradientHarmonic { seed } => {
            planar(grid, "harmonic")?;
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            let coef: Vec<(f64, f64)> =
                (1..=4).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            VectorField::from_fn(grid, |p| {
                // u = sum a_k Re z^k + b_k Im z^k, grad u = conj of u'(z)
                let (x, y) = (p[1], p[2]);
                let (mut zr, mut zi) = (1.0, 0.0);
                let (mut gx, mut gy) = (0.0, 0.0);
                for (k, (a, b)) in coef.iter().enumerate() {
                    let kk = (k + 1) as f64;
                    // d/dz (a - i b) z^(k+1) = (k+1)(a - i b) z^k
                    let (re, im) = (kk * (a * zr + b * zi), kk * (a * zi - b * zr));
                    gx += re;
                    gy -= im;
                    let nr = zr * x - zi * y;
                    zi = zr * y + zi * x;
                    zr = nr;
                }
                [0.0, gx, gy]
            })
        }
        TestFieldSpec::CounterexampleLog => {
            planar(grid, "counterexample")?;
            VectorField::from_fn(grid, |p| {
                let l = (p[1] - p[2]).abs().ln();
                [0.0, l, l]
            })
        }
        TestFieldSpec::RandomSmooth { seed, modes, max_freq } => random_vector_field(grid, *seed, *modes, *max_freq),
        TestFieldSpec::Rotation { center } => {
            planar(grid, "rotation")?;
            VectorField::from_fn(grid, |p| [0.0, -(p[2] - center[1]), p[1] - center[0]])
        }
    })
}

/// `v . n` at every boundary sample: the value on the owner cell and the
/// next cell inward are extrapolated linearly to the face.
pub fn normal_trace(v: &VectorField, dom: &GridDomain, mesh: &BoundaryMesh) -> Result<Vec<f64>> {
    let g = &dom.grid;
    let st = g.strides();
    mesh.samples
        .iter()
        .map(|s| {
            let face = dom.faces[s.face];
            let a = face.axis as usize;
            let i = g.unflat(face.cell);
            let inward = i[a] as i64 - face.side as i64;
            if inward < 0 || inward >= g.shape[a] as i64 {
                return Err(Error::invalid("boundary sample has no interior stencil"));
            }
            let k2 = (face.cell as i64 - face.side as i64 * st[a] as i64) as usize;
            if !dom.mask[k2] {
                return Err(Error::invalid("boundary sample has no interior stencil"));
            }
            let (v1, v2) = (v.at(face.cell), v.at(k2));
            Ok((0..3).map(|ax| (1.5 * v1[ax] - 0.5 * v2[ax]) * s.normal[ax]).sum())
        })
        .collect()
}

/// Smooth test functions with exact gradients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TestFunction {
    /// `exp(1 - 1/(1 - |x - c|^2 / r^2))` inside the ball, zero outside.
    Bump { center: Vec<f64>, radius: f64 },
    /// `exp(-|x - c|^2 / w^2)`.
    Gaussian { center: Vec<f64>, width: f64 },
}

impl TestFunction {
    fn center(&self) -> &[f64] {
        match self {
            TestFunction::Bump { center, .. } | TestFunction::Gaussian { center, .. } => center,
        }
    }

    /// Value and gradient at a padded point.
    pub fn eval(&self, p: &P3) -> (f64, P3) {
        let c = crate::grid_domain::pad(self.center());
        let d: P3 = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
        let q: f64 = d.iter().map(|t| t * t).sum();
        match self {
            TestFunction::Bump { radius, .. } => {
                let t = q / (radius * radius);
                if t >= 1.0 {
                    return (0.0, [0.0; 3]);
                }
                let v = (1.0 - 1.0 / (1.0 - t)).exp();
                let dv = -v / ((1.0 - t) * (1.0 - t)) * 2.0 / (radius * radius);
                (v, [dv * d[0], dv * d[1], dv * d[2]])
            }
            TestFunction::Gaussian { width, .. } => {
                let v = (-q / (width * width)).exp();
                let dv = -2.0 * v / (width * width);
                (v, [dv * d[0], dv * d[1], dv * d[2]])
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IbpTerms {
    pub boundary: f64,
    pub divergence: f64,
    pub gradient: f64,
    /// `|boundary - divergence - gradient|`.
    pub residual: f64,
}

/// Both sides of `int_Γ (v.n) rho = int_Ω (div v) rho + int_Ω v . grad rho`
/// with midpoint quadrature and the exterior normal.
pub fn ibp_residual(v: &VectorField, rho: &TestFunction, dom: &GridDomain, mesh: &BoundaryMesh) -> Result<IbpTerms> {
    let g = &dom.grid;
    let hn = g.h.powi(g.dim as i32);
    let tr = normal_trace(v, dom, mesh)?;
    let boundary: f64 = mesh.samples.iter().zip(&tr).map(|(s, t)| t * rho.eval(&s.position).0 * s.weight).sum();
    let div = v.divergence(&dom.mask);
    let (mut dv, mut gr) = (0.0, 0.0);
    for k in 0..g.len() {
        if !dom.mask[k] {
            continue;
        }
        let (r, dr) = rho.eval(&g.center(k));
        let vk = v.at(k);
        dv += div.values[k] * r * hn;
        gr += (vk[0] * dr[0] + vk[1] * dr[1] + vk[2] * dr[2]) * hn;
    }
    Ok(IbpTerms { boundary, divergence: dv, gradient: gr, residual: (boundary - dv - gr).abs() })
}

/// Which norm bundle bounds the trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    /// `vbmo` on a half-space strip.
    Nth,
    /// `vbmo` on a curved domain.
    Ntg,
    /// Componentwise `BMO_b` on a curved domain.
    Trbb,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub h: f64,
    pub field: usize,
    pub sup_trace: f64,
    pub norm: f64,
    pub div_term: f64,
    pub ratio: f64,
    pub warnings: Vec<String>,
}

/// Trace, norm and `||div v||_{L^n_ul(Γ_delta)}` for one field.
pub fn trace_report(v: &VectorField, dom: &GridDomain, mode: TraceMode, p: &SeminormParams) -> Result<TraceReport> {
    let mesh = dom.boundary_mesh();
    let sup_trace = normal_trace(v, dom, &mesh)?.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let (norm, warnings) = match mode {
        TraceMode::Nth | TraceMode::Ntg => {
            let r = vbmo_norm(v, dom, p)?;
            (r.value, r.warnings)
        }
        TraceMode::Trbb => (vector_bmo_b_norm(v, dom, p)?.value, vec![]),
    };
    let div = v.divergence(&dom.mask);
    let tube = dom.tubular_neighborhood(p.delta);
    let div_term = lp_ul(&div, &tube, p.r0, dom.dim() as u32).value;
    let ratio = sup_trace / (norm + div_term);
    Ok(TraceReport { h: dom.h(), field: 0, sup_trace, norm, div_term, ratio, warnings })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceExperiment {
    pub mode: TraceMode,
    pub rows: Vec<TraceReport>,
    /// Largest ratio per level, in level order.
    pub max_ratio: Vec<f64>,
    /// Fields whose norm was not finite.
    pub excluded: Vec<(f64, usize)>,
}

/// Runs a field family on a domain shape at several spacings.
pub fn trace_inequality_experiment(
    family: &[TestFieldSpec],
    shape: &Shape,
    levels: &[f64],
    mode: TraceMode,
    p: &SeminormParams,
) -> Result<TraceExperiment> {
    let mut rows = Vec::new();
    let mut max_ratio = Vec::new();
    let mut excluded = Vec::new();
    for &h in levels {
        let dom = build_domain(&DomainSpec::new(shape.clone(), h))?;
        let mut m: f64 = 0.0;
        for (i, spec) in family.iter().enumerate() {
            let v = make_test_field(spec, &dom.grid)?;
            let mut r = trace_report(&v, &dom, mode, p)?;
            r.field = i;
            if !(r.norm.is_finite() && r.ratio.is_finite()) {
                excluded.push((h, i));
            } else {
                m = m.max(r.ratio);
            }
            rows.push(r);
        }
        max_ratio.push(m);
    }
    Ok(TraceExperiment { mode, rows, max_ratio, excluded })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub h: f64,
    pub sup_trace: f64,
    /// `[v]_{BMO^inf}` summed over components.
    pub bmo: f64,
    pub b_normal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub rows: Vec<CounterexampleRow>,
    pub trace_fit: Option<LineFit>,
    pub b_fit: Option<LineFit>,
    /// `(max - min) / min` of the BMO values.
    pub bmo_spread: f64,
}

/// The strip used for the counterexample: `(-1, 1) x (0, 1)` with cell
/// centers shifted by `h/2` off the diagonal.
pub fn counterexample_domain(h: f64) -> Result<GridDomain> {
    build_domain(&DomainSpec::new(Shape::HalfSpace { extent: vec![[-1.0, 1.0]], height: 1.0, shift: vec![0.5] }, h))
}

/// `log|x_1 - x_2|` on the strip at each spacing.
pub fn counterexample_report(levels: &[f64], nu: f64, lattice: Lattice) -> Result<CounterexampleReport> {
    let mut rows = Vec::new();
    for &h in levels {
        let dom = counterexample_domain(h)?;
        let v = make_test_field(&TestFieldSpec::CounterexampleLog, &dom.grid)?;
        let mesh = dom.boundary_mesh();
        let sup_trace = normal_trace(&v, &dom, &mesh)?.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        // both components coincide
        let one = bmo_seminorm(&v.component(0), &dom, f64::INFINITY, lattice).value;
        let b_normal = normal_b_seminorm(&v, &dom, nu, None)?.value;
        rows.push(CounterexampleRow { h, sup_trace, bmo: 2.0 * one, b_normal });
    }
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let tr: Vec<f64> = rows.iter().map(|r| r.sup_trace).collect();
    let bn: Vec<f64> = rows.iter().map(|r| r.b_normal).collect();
    let bm: Vec<f64> = rows.iter().map(|r| r.bmo).collect();
    Ok(CounterexampleReport {
        trace_fit: fit_log_inverse(&hs, &tr),
        b_fit: fit_log_inverse(&hs, &bn),
        bmo_spread: relative_range(&bm),
        rows,
    })
}

/// `[f]_{b^nu}` of a scalar restricted to one field component; convenience
/// for reports.
pub fn component_b(v: &VectorField, j: usize, dom: &GridDomain, nu: f64) -> Result<f64> {
    Ok(b_seminorm(&v.component(j), dom, nu, None)?.value)
}

/// Samples a scalar test function on a grid.
pub fn sample_test_function(rho: &TestFunction, grid: &Grid) -> ScalarField {
    ScalarField::from_fn(grid, |p| rho.eval(p).0)
}

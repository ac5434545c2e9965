//! Sup-over-balls seminorms on lattice domains.
//!
//! Balls are discrete: a ball of radius `r` around a center point is the set
//! of cells whose centers lie within `r`. Radii run over a geometric ladder
//! with ratio `sqrt 2` starting at `2h`. A ball "lies in Ω" when every one of
//! its cells is an Ω cell inside the grid.

pub mod balls;
pub mod engine;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid_domain::{Grid, GridDomain};
use crate::par;
use balls::{clearance, radius_ladder, BallShape, RowPrefix};
use engine::{nonneg_sum_bound, sup_search, Candidate, SupResult, EPS};

/// Which points serve as ball centers for the interior seminorms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterLattice {
    /// Cell centers.
    #[default]
    Cells,
    /// Cell centers, face and edge midpoints and vertices (step `h/2`).
    HalfStep,
}

/// Thinning of centers for large radii. `Adaptive { div }` keeps centers
/// whose indices are multiples of `max(1, floor(rho / div))`, where `rho`
/// is the radius in cells; the position error stays below `r / div`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterStride {
    #[default]
    Full,
    Adaptive { div: u32 },
}

impl CenterStride {
    pub fn stride(&self, rho2: f64) -> usize {
        match *self {
            CenterStride::Full => 1,
            CenterStride::Adaptive { div } => ((rho2.sqrt() / div.max(1) as f64).floor() as usize).max(1),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    #[serde(default)]
    pub centers: CenterLattice,
    #[serde(default)]
    pub stride: CenterStride,
}

/// Radius bounds and tube width. Infinite values are allowed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormParams {
    pub mu: f64,
    pub nu: f64,
    pub delta: f64,
    #[serde(default = "default_r0")]
    pub r0: f64,
    #[serde(default)]
    pub lattice: Lattice,
}

fn default_r0() -> f64 {
    1.0
}

impl Default for SeminormParams {
    fn default() -> Self {
        SeminormParams { mu: 0.25, nu: 0.25, delta: 0.25, r0: 1.0, lattice: Lattice::default() }
    }
}

impl SeminormParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mu", self.mu), ("nu", self.nu), ("delta", self.delta), ("r0", self.r0)] {
            if !(v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if !self.r0.is_finite() {
            return Err(Error::invalid("r0 must be finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Physical coordinates of the ball center.
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub kind: String,
    pub value: f64,
    pub witness: Option<Witness>,
    /// Admissible (center, radius) pairs.
    pub balls_checked: usize,
    /// Pairs evaluated exactly before the bound terminated the search.
    pub exact_evaluations: usize,
    /// No admissible ball existed; the value 0 is a convention.
    pub empty: bool,
}

impl SeminormReport {
    fn from_sup(kind: &str, sup: SupResult, witness: impl Fn(&Candidate) -> Witness) -> Self {
        SeminormReport {
            kind: kind.to_string(),
            value: sup.value,
            witness: sup.best.as_ref().map(witness),
            balls_checked: sup.candidates,
            exact_evaluations: sup.evaluated,
            empty: sup.best.is_none(),
        }
    }
}

/// Sum of several reports with the parts kept for inspection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub kind: String,
    pub value: f64,
    pub parts: Vec<SeminormReport>,
    pub warnings: Vec<String>,
}

impl NormReport {
    fn sum(kind: &str, parts: Vec<SeminormReport>, warnings: Vec<String>) -> Self {
        let value = parts.iter().map(|p| p.value).sum();
        NormReport { kind: kind.to_string(), value, parts, warnings }
    }
}

fn offsets(grid: &Grid, lattice: CenterLattice) -> Vec<[f64; 3]> {
    match lattice {
        CenterLattice::Cells => vec![[0.0; 3]],
        CenterLattice::HalfStep => {
            let a0 = grid.a0();
            (0..1usize << grid.dim)
                .map(|bits| {
                    let mut o = [0.0; 3];
                    for j in 0..grid.dim {
                        if (bits >> j) & 1 == 1 {
                            o[a0 + j] = 0.5;
                        }
                    }
                    o
                })
                .collect()
        }
    }
}

fn center_point(grid: &Grid, cell: usize, off: &[f64; 3]) -> Vec<f64> {
    let p = grid.center(cell);
    (grid.a0()..3).map(|a| p[a] + off[a] * grid.h).collect()
}

fn on_stride(grid: &Grid, c: [usize; 3], s: usize) -> bool {
    s == 1 || (grid.a0()..3).all(|a| c[a].is_multiple_of(s))
}

/// Masked copy with zeros outside Ω (fields may hold garbage there).
fn masked_vals(f: &[f64], mask: &[bool], map: impl Fn(f64) -> f64) -> Vec<f64> {
    f.iter().zip(mask).map(|(&v, &m)| if m { map(v) } else { 0.0 }).collect()
}

/// Which interior balls are admissible.
#[derive(Clone, Copy, PartialEq)]
enum Admit {
    /// `B_r ⊂ Ω`.
    Inside,
    /// `B_2r ⊂ Ω`.
    Doubled,
}

struct Interior<'a> {
    grid: &'a Grid,
    mask: &'a [bool],
    ladder: Vec<(f64, f64)>,
    offs: Vec<[f64; 3]>,
    shapes: Vec<BallShape>,
    clear: Vec<i64>,
    count: RowPrefix,
}

impl<'a> Interior<'a> {
    fn new(grid: &'a Grid, mask: &'a [bool], bound: f64, lattice: CenterLattice) -> Self {
        let ladder = radius_ladder(grid.h, bound, grid.diameter());
        let offs = offsets(grid, lattice);
        let mut shapes = Vec::new();
        for &(rho2, _) in &ladder {
            for o in &offs {
                shapes.push(BallShape::new(grid, rho2, *o));
            }
        }
        let blocked: Vec<bool> = mask.iter().map(|m| !m).collect();
        let clear = clearance(grid, &blocked, true);
        let count = RowPrefix::new(grid, |k| if mask[k] { 1.0 } else { 0.0 });
        Interior { grid, mask, ladder, offs, shapes, clear, count }
    }

    fn shape(&self, k: usize, oi: usize) -> &BallShape {
        &self.shapes[k * self.offs.len() + oi]
    }

    /// Ball of radius index `k`, offset `oi` around cell `c` lies in Ω.
    fn inside(&self, c: usize, k: usize, oi: usize) -> bool {
        let sh = self.shape(k, oi);
        let cl = self.clear[c] as f64;
        let o2: f64 = sh.offset.iter().map(|x| x * x).sum();
        if o2 == 0.0 {
            return cl > sh.rho2;
        }
        let (rho, o, r) = (sh.rho2.sqrt(), o2.sqrt(), cl.sqrt());
        if r + o <= rho - 1e-9 {
            return false;
        }
        if r - o > rho + 1e-9 {
            return true;
        }
        let c3 = self.grid.unflat(c);
        if !sh.fits(self.grid, c3) {
            return false;
        }
        let mut n = 0.0;
        sh.for_rows(self.grid, c3, |row, lo, hi| n += self.count.range(row, lo, hi));
        n as usize == sh.count
    }

    /// Enumerates admissible (cell, k, offset) triples with a bound from `ub`.
    fn candidates(
        &self,
        stride: CenterStride,
        admit: Admit,
        extra: impl Fn(usize, usize) -> bool + Sync + Send,
        ub: impl Fn(usize, &BallShape) -> f64 + Sync + Send,
    ) -> Vec<Candidate> {
        let n = self.grid.len();
        let chunk = 1024;
        let nchunks = n.div_ceil(chunk);
        let parts = par::map_range(nchunks, |ci| {
            let mut out = Vec::new();
            for c in ci * chunk..((ci + 1) * chunk).min(n) {
                if !self.mask[c] {
                    continue;
                }
                let c3 = self.grid.unflat(c);
                for (k, &(rho2, _)) in self.ladder.iter().enumerate() {
                    if !on_stride(self.grid, c3, stride.stride(rho2)) {
                        continue;
                    }
                    for oi in 0..self.offs.len() {
                        let ok = match admit {
                            Admit::Inside => self.inside(c, k, oi),
                            Admit::Doubled => (self.clear[c] as f64) > 4.0 * rho2,
                        };
                        if !ok || !extra(c, k) {
                            continue;
                        }
                        let sh = self.shape(k, oi);
                        out.push(Candidate {
                            ub: ub(c, sh),
                            k: k as u16,
                            center: c as u32,
                            shape: (k * self.offs.len() + oi) as u16,
                            off: oi as u16,
                        });
                    }
                }
            }
            out
        });
        parts.into_iter().flatten().collect()
    }

    fn witness(&self, c: &Candidate) -> Witness {
        let sh = &self.shapes[c.shape as usize];
        Witness {
            center: center_point(self.grid, c.center as usize, &sh.offset),
            radius: self.ladder[c.k as usize].1,
        }
    }
}

/// Mean oscillation of `f` over a ball, summed in grid order.
#[inline]
fn mean_oscillation(grid: &Grid, f: &[f64], sh: &BallShape, c: usize) -> f64 {
    let c3 = grid.unflat(c);
    let n2 = grid.shape[2];
    let mut sum = 0.0;
    let mut n = 0usize;
    sh.for_rows(grid, c3, |row, lo, hi| {
        let b = row * n2;
        for &v in &f[b + lo..=b + hi] {
            sum += v;
        }
        n += hi - lo + 1;
    });
    let mean = sum / n as f64;
    let mut dev = 0.0;
    sh.for_rows(grid, c3, |row, lo, hi| {
        let b = row * n2;
        for &v in &f[b + lo..=b + hi] {
            dev += (v - mean).abs();
        }
    });
    dev / n as f64
}

/// Plain sum over the clipped ball, in grid order.
#[inline]
fn ball_sum(grid: &Grid, g: &[f64], sh: &BallShape, c: usize) -> f64 {
    let c3 = grid.unflat(c);
    let n2 = grid.shape[2];
    let mut sum = 0.0;
    sh.for_rows(grid, c3, |row, lo, hi| {
        let b = row * n2;
        for &v in &g[b + lo..=b + hi] {
            sum += v;
        }
    });
    sum
}

struct OscBound {
    p1: RowPrefix,
    p2: RowPrefix,
    pg: RowPrefix,
    pa: RowPrefix,
}

impl OscBound {
    fn new(grid: &Grid, f: &[f64], mask: &[bool]) -> Self {
        let (mut s, mut n) = (0.0, 0usize);
        for (v, &m) in f.iter().zip(mask) {
            if m {
                s += v;
                n += 1;
            }
        }
        let gm = if n > 0 { s / n as f64 } else { 0.0 };
        let g = masked_vals(f, mask, |v| v - gm);
        OscBound {
            p1: RowPrefix::new(grid, |k| g[k]),
            p2: RowPrefix::new(grid, |k| g[k] * g[k]),
            pg: RowPrefix::new(grid, |k| g[k].abs()),
            pa: RowPrefix::new(grid, |k| if mask[k] { f[k].abs() } else { 0.0 }),
        }
    }

    /// Certified bound on the floating mean oscillation: standard deviation
    /// plus rounding allowances.
    fn bound(&self, grid: &Grid, c: usize, sh: &BallShape) -> f64 {
        let c3 = grid.unflat(c);
        let (mut s1, mut s2, mut tg, mut t2, mut ta) = (0.0, 0.0, 0.0, 0.0, 0.0);
        sh.for_rows(grid, c3, |row, lo, hi| {
            s1 += self.p1.range(row, lo, hi);
            s2 += self.p2.range(row, lo, hi);
            tg += self.pg.row_total(row);
            t2 += self.p2.row_total(row);
            ta += self.pa.row_total(row);
        });
        let n = sh.count as f64;
        let w = self.p1.row_len() as f64 + 2.0;
        let mean = s1 / n;
        let var = s2 / n - mean * mean;
        let var_err = 8.0 * w * EPS * (t2 + 2.0 * mean.abs() * tg) / n;
        let sd = (var.max(0.0) + var_err).sqrt();
        (sd + 8.0 * (n + w) * EPS * ta / n) * (1.0 + 1e-12) + f64::MIN_POSITIVE
    }
}

fn bmo_values(kind: &str, f: &[f64], grid: &Grid, mask: &[bool], mu: f64, lat: Lattice, admit: Admit) -> SeminormReport {
    let bound = if admit == Admit::Doubled { f64::INFINITY } else { mu };
    let centers = if admit == Admit::Doubled { CenterLattice::Cells } else { lat.centers };
    let it = Interior::new(grid, mask, bound, centers);
    let ob = OscBound::new(grid, f, mask);
    let cands = it.candidates(lat.stride, admit, |_, _| true, |c, sh| ob.bound(grid, c, sh));
    let sup = sup_search(cands, |c| mean_oscillation(grid, f, &it.shapes[c.shape as usize], c.center as usize));
    SeminormReport::from_sup(kind, sup, |c| it.witness(c))
}

/// `[f]_{BMO^mu}`: sup of mean oscillation over balls inside Ω with `r < mu`.
pub fn bmo_seminorm(f: &ScalarField, dom: &GridDomain, mu: f64, lat: Lattice) -> SeminormReport {
    bmo_values("bmo", &f.values, &dom.grid, &dom.mask, mu, lat, Admit::Inside)
}

/// `[f]_{b^nu}`: sup over interface centers and radii `r < nu` of
/// `r^-n` times the integral of `|f|` over `Ω ∩ B_r`. With `component`,
/// centers are restricted to one boundary component.
pub fn b_seminorm(f: &ScalarField, dom: &GridDomain, nu: f64, component: Option<u32>) -> Result<SeminormReport> {
    let grid = &dom.grid;
    let faces: Vec<usize> = (0..dom.faces.len())
        .filter(|&i| component.is_none_or(|c| dom.face_component[i] == c))
        .collect();
    if faces.is_empty() {
        return Err(Error::invalid("b seminorm needs a nonempty boundary"));
    }
    let n = grid.dim as i32;
    let hn = grid.h.powi(n);
    let ladder = radius_ladder(grid.h, nu, grid.diameter());
    let scale: Vec<f64> = ladder.iter().map(|&(_, r)| hn / r.powi(n)).collect();
    // shape index = k * 6 + axis * 2 + (side > 0)
    let mut shapes = Vec::new();
    for &(rho2, _) in &ladder {
        for axis in 0..3 {
            for side in [-0.5, 0.5] {
                let mut o = [0.0; 3];
                o[axis] = side;
                shapes.push(BallShape::new(grid, rho2, o));
            }
        }
    }
    let g = masked_vals(&f.values, &dom.mask, f64::abs);
    let p = RowPrefix::new(grid, |k| g[k]);
    let w = p.row_len();
    let cands: Vec<Candidate> = par::map_slice(&faces, |&fi| {
        let face = dom.faces[fi];
        let c3 = grid.unflat(face.cell);
        (0..ladder.len())
            .map(|k| {
                let si = k * 6 + face.axis as usize * 2 + usize::from(face.side > 0);
                let sh = &shapes[si];
                let (mut s, mut t) = (0.0, 0.0);
                sh.for_rows(grid, c3, |row, lo, hi| {
                    s += p.range(row, lo, hi);
                    t += p.row_total(row);
                });
                Candidate {
                    ub: nonneg_sum_bound(s, t, w, sh.count) * scale[k],
                    k: k as u16,
                    center: fi as u32,
                    shape: si as u16,
                    off: 0,
                }
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let sup = sup_search(cands, |c| {
        let cell = dom.faces[c.center as usize].cell;
        ball_sum(grid, &g, &shapes[c.shape as usize], cell) * scale[c.k as usize]
    });
    Ok(SeminormReport::from_sup("b", sup, |c| {
        let cell = dom.faces[c.center as usize].cell;
        Witness {
            center: center_point(grid, cell, &shapes[c.shape as usize].offset),
            radius: ladder[c.k as usize].1,
        }
    }))
}

/// `sup_x (integral over B_r0(x) ∩ region of |f|^p)^(1/p)` over all cell
/// centers of the grid.
pub fn lp_ul(f: &ScalarField, region: &[bool], r0: f64, p: u32) -> SeminormReport {
    let grid = &f.grid;
    let hn = grid.h.powi(grid.dim as i32);
    let rho2 = (r0 / grid.h).powi(2);
    let sh = BallShape::new(grid, rho2, [0.0; 3]);
    let g = masked_vals(&f.values, region, |v| v.abs().powi(p as i32));
    let pre = RowPrefix::new(grid, |k| g[k]);
    let w = pre.row_len();
    let finish = move |s: f64| if p == 1 { s * hn } else { (s * hn).powf(1.0 / p as f64) };
    let cands = par::map_range(grid.len(), |c| {
        let (mut s, mut t) = (0.0, 0.0);
        sh.for_rows(grid, grid.unflat(c), |row, lo, hi| {
            s += pre.range(row, lo, hi);
            t += pre.row_total(row);
        });
        Candidate { ub: finish(nonneg_sum_bound(s, t, w, sh.count)), k: 0, center: c as u32, shape: 0, off: 0 }
    });
    let sup = sup_search(cands, |c| finish(ball_sum(grid, &g, &sh, c.center as usize)));
    let kind = if p == 1 { "l1_ul".to_string() } else { format!("l{p}_ul") };
    SeminormReport::from_sup(&kind, sup, |c| Witness { center: center_point(grid, c.center as usize, &[0.0; 3]), radius: r0 })
}

/// `||f||_{L^1_ul}` over `region`.
pub fn l1_ul(f: &ScalarField, region: &[bool], r0: f64) -> SeminormReport {
    lp_ul(f, region, r0, 1)
}

/// `[f]_{Γ_delta}`: uniformly local L¹ norm over the tube `Γ_delta`.
pub fn tube_l1(f: &ScalarField, dom: &GridDomain, delta: f64, r0: f64) -> SeminormReport {
    let mut r = l1_ul(f, &dom.tubular_neighborhood(delta), r0);
    r.kind = "tube_l1".into();
    r
}

/// `||f||_{BMO_b^{mu,nu}} = [f]_{BMO^mu} + [f]_{b^nu}`.
pub fn bmo_b_norm(f: &ScalarField, dom: &GridDomain, mu: f64, nu: f64, lat: Lattice) -> Result<NormReport> {
    let a = bmo_seminorm(f, dom, mu, lat);
    let b = b_seminorm(f, dom, nu, None)?;
    Ok(NormReport::sum("bmo_b", vec![a, b], vec![]))
}

/// `||f||_{bmo^mu_delta} = [f]_{BMO^mu} + [f]_{Γ_delta}`.
pub fn bmo_delta_norm(f: &ScalarField, dom: &GridDomain, mu: f64, delta: f64, r0: f64, lat: Lattice) -> NormReport {
    let a = bmo_seminorm(f, dom, mu, lat);
    let b = tube_l1(f, dom, delta, r0);
    NormReport::sum("bmo_delta", vec![a, b], vec![])
}

fn reach_warnings(dom: &GridDomain, width: f64, what: &str) -> Vec<String> {
    if width > dom.reach() {
        vec![format!("{what} = {width} exceeds the reach estimate {}; the distance gradient is unreliable there", dom.reach())]
    } else {
        vec![]
    }
}

/// `[∇d · v]_{b^nu}`.
pub fn normal_b_seminorm(v: &VectorField, dom: &GridDomain, nu: f64, component: Option<u32>) -> Result<SeminormReport> {
    let s = v.dot_field(&dom.dist.gradient);
    let mut r = b_seminorm(&s, dom, nu, component)?;
    r.kind = "normal_b".into();
    Ok(r)
}

/// `||v||_{vbmo^{mu,nu}_delta}`: the componentwise `[v_i]_{BMO^mu}`, the tube
/// norm of `|v|` and `[∇d · v]_{b^nu}`.
pub fn vbmo_norm(v: &VectorField, dom: &GridDomain, p: &SeminormParams) -> Result<NormReport> {
    p.validate()?;
    let mut parts: Vec<SeminormReport> =
        (0..v.grid.dim).map(|j| bmo_seminorm(&v.component(j), dom, p.mu, p.lattice)).collect();
    parts.push(tube_l1(&v.norm(), dom, p.delta, p.r0));
    parts.push(normal_b_seminorm(v, dom, p.nu, None)?);
    let mut w = reach_warnings(dom, p.delta, "delta");
    w.extend(reach_warnings(dom, p.nu, "nu"));
    Ok(NormReport::sum("vbmo", parts, w))
}

/// `[v]_{vBMO^{mu,nu}}`: componentwise `BMO^mu` plus `[∇d · v]_{b^nu}`.
pub fn vbmo_seminorm(v: &VectorField, dom: &GridDomain, p: &SeminormParams) -> Result<NormReport> {
    let mut parts: Vec<SeminormReport> =
        (0..v.grid.dim).map(|j| bmo_seminorm(&v.component(j), dom, p.mu, p.lattice)).collect();
    parts.push(normal_b_seminorm(v, dom, p.nu, None)?);
    Ok(NormReport::sum("vbmo_seminorm", parts, reach_warnings(dom, p.nu, "nu")))
}

/// Componentwise `||v_i||_{BMO_b^{mu,nu}}`.
pub fn vector_bmo_b_norm(v: &VectorField, dom: &GridDomain, p: &SeminormParams) -> Result<NormReport> {
    let mut parts = Vec::new();
    for j in 0..v.grid.dim {
        let c = v.component(j);
        parts.push(bmo_seminorm(&c, dom, p.mu, p.lattice));
        parts.push(b_seminorm(&c, dom, p.nu, None)?);
    }
    Ok(NormReport::sum("bmo_b", parts, vec![]))
}

/// Miyachi norm: oscillation over balls with `B_2r ⊂ Ω`, plus the average
/// of `|f|` over balls with `B_2r ⊂ Ω` and `B_5r` meeting the complement.
pub fn miyachi_norm(f: &ScalarField, dom: &GridDomain) -> NormReport {
    let grid = &dom.grid;
    let osc = bmo_values("bmo_miyachi", &f.values, grid, &dom.mask, f64::INFINITY, Lattice::default(), Admit::Doubled);
    let it = Interior::new(grid, &dom.mask, f64::INFINITY, CenterLattice::Cells);
    let blocked: Vec<bool> = dom.mask.iter().map(|m| !m).collect();
    let near = clearance(grid, &blocked, false);
    let g = masked_vals(&f.values, &dom.mask, f64::abs);
    let p = RowPrefix::new(grid, |k| g[k]);
    let w = p.row_len();
    let cands = it.candidates(
        CenterStride::Full,
        Admit::Doubled,
        |c, k| (near[c] as f64) <= 25.0 * it.ladder[k].0,
        |c, sh| {
            let (mut s, mut t) = (0.0, 0.0);
            sh.for_rows(grid, grid.unflat(c), |row, lo, hi| {
                s += p.range(row, lo, hi);
                t += p.row_total(row);
            });
            nonneg_sum_bound(s, t, w, sh.count) / sh.count as f64
        },
    );
    let sup = sup_search(cands, |c| {
        let sh = &it.shapes[c.shape as usize];
        ball_sum(grid, &g, sh, c.center as usize) / sh.count as f64
    });
    let b = SeminormReport::from_sup("b_miyachi", sup, |c| it.witness(c));
    NormReport::sum("miyachi", vec![osc, b], vec![])
}

/// Seminorm of the zero extension over the whole grid.
pub fn whole_grid_bmo(f: &ScalarField, mu: f64, lat: Lattice) -> SeminormReport {
    let mask = vec![true; f.grid.len()];
    bmo_values("bmo_whole_grid", &f.values, &f.grid, &mask, mu, lat, Admit::Inside)
}

/// Bounds a user-supplied mask `BMO` computation: `[f]_{BMO^mu}` over balls
/// inside an arbitrary cell mask.
pub fn bmo_on_mask(f: &ScalarField, mask: &[bool], mu: f64, lat: Lattice) -> SeminormReport {
    bmo_values("bmo", &f.values, &f.grid, mask, mu, lat, Admit::Inside)
}

pub use balls::radius_ladder as ladder;

//! Analytic shape descriptors for the domain zoo.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::P3;

/// An open set with an analytic indicator. Parameters are physical
/// coordinates (length `dim`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum Shape {
    /// The open interval `(a, b)`.
    Interval { a: f64, b: f64 },
    /// Open square `lo + (0, side)^2`.
    Square { lo: Vec<f64>, side: f64 },
    /// Open cube `lo + (0, side)^3`.
    Cube { lo: Vec<f64>, side: f64 },
    Disk { center: Vec<f64>, radius: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, r_in: f64, r_out: f64 },
    /// Square `lo + (0, side)^2` minus its closed upper right quadrant.
    LShape { lo: Vec<f64>, side: f64 },
    /// `{x_n > 0}` sampled on the strip `extent × (0, height]`. `shift`
    /// offsets the tangential cell centers by the given fraction of `h`.
    HalfSpace {
        extent: Vec<[f64; 2]>,
        height: f64,
        #[serde(default)]
        shift: Vec<f64>,
    },
    /// `{x_2 > psi(x_1)}` with `psi(s) = amplitude * bump((s - center) / width)`
    /// and the smooth bump `exp(1 - 1/(1 - t^2))` on `|t| < 1`.
    PerturbedHalfSpace {
        extent: [f64; 2],
        height: f64,
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// Box `(-2.5r, 2.5r)^2` minus the closed disks of radius `r` centered
    /// at `(±r, 0)`. The disks touch at the origin, leaving two outward
    /// cusps.
    Cusp { radius: f64 },
}

/// Physical coordinates of a padded point.
#[inline]
pub fn phys(p: &P3, dim: usize) -> &[f64] {
    &p[3 - dim..]
}

/// Pads physical coordinates to three axes.
pub fn pad(x: &[f64]) -> P3 {
    let mut p = [0.0; 3];
    let off = 3 - x.len();
    p[off..].copy_from_slice(x);
    p
}

fn dist(a: &P3, b: &P3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Smooth compactly supported bump and its first two derivatives.
pub fn bump(t: f64) -> (f64, f64, f64) {
    if t.abs() >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let u = 1.0 - t * t;
    let b = (1.0 - 1.0 / u).exp();
    // d/dt (1 - 1/u) = -2t/u^2
    let g1 = -2.0 * t / (u * u);
    let g2 = -2.0 / (u * u) - 8.0 * t * t / (u * u * u);
    (b, b * g1, b * (g2 + g1 * g1))
}

/// Signed distance to an axis-aligned open box, positive inside.
fn box_sd(p: &P3, lo: &P3, hi: &P3, dim: usize) -> f64 {
    let mut inside = f64::INFINITY;
    let mut out2 = 0.0;
    let mut any_out = false;
    for a in 3 - dim..3 {
        let g = (p[a] - lo[a]).min(hi[a] - p[a]);
        inside = inside.min(g);
        if g < 0.0 {
            any_out = true;
            let e = if p[a] < lo[a] { lo[a] - p[a] } else { p[a] - hi[a] };
            out2 += e * e;
        }
    }
    if any_out {
        -out2.sqrt()
    } else {
        inside
    }
}

/// Distance from a point to a closed box (0 inside).
fn box_point_dist(p: &P3, lo: &P3, hi: &P3) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        let e = (lo[a] - p[a]).max(p[a] - hi[a]).max(0.0);
        s += e * e;
    }
    s.sqrt()
}

fn clamp_to_box(p: &P3, lo: &P3, hi: &P3) -> P3 {
    let mut q = *p;
    for a in 0..3 {
        q[a] = q[a].clamp(lo[a], hi[a]);
    }
    q
}

/// Nearest point on the boundary of an open box, for a point inside it.
fn box_face_project(p: &P3, lo: &P3, hi: &P3, dim: usize) -> P3 {
    let mut best = (f64::INFINITY, 0usize, 0.0);
    for a in 3 - dim..3 {
        let gl = p[a] - lo[a];
        let gh = hi[a] - p[a];
        if gl.abs() < best.0 {
            best = (gl.abs(), a, lo[a]);
        }
        if gh.abs() < best.0 {
            best = (gh.abs(), a, hi[a]);
        }
    }
    let mut q = clamp_to_box(p, lo, hi);
    if box_sd(p, lo, hi, dim) > 0.0 {
        q = *p;
        q[best.1] = best.2;
    }
    q
}

fn sphere_project(p: &P3, c: &P3, r: f64) -> P3 {
    let d = dist(p, c);
    if d == 0.0 {
        let mut q = *c;
        q[2] += r;
        return q;
    }
    let mut q = [0.0; 3];
    for a in 0..3 {
        q[a] = c[a] + r * (p[a] - c[a]) / d;
    }
    q
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Interval { .. } => 1,
            Shape::Cube { .. } | Shape::Ball { .. } => 3,
            Shape::HalfSpace { extent, .. } => extent.len() + 1,
            _ => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Shape::Interval { .. } => "interval",
            Shape::Square { .. } => "square",
            Shape::Cube { .. } => "cube",
            Shape::Disk { .. } => "disk",
            Shape::Ball { .. } => "ball",
            Shape::Annulus { .. } => "annulus",
            Shape::LShape { .. } => "l_shape",
            Shape::HalfSpace { .. } => "half_space",
            Shape::PerturbedHalfSpace { .. } => "perturbed_half_space",
            Shape::Cusp { .. } => "cusp",
        }
    }

    /// Checks parameter arity and signs.
    pub fn validate(&self) -> Result<()> {
        let want = |v: &Vec<f64>, n: usize, what: &str| -> Result<()> {
            if v.len() != n {
                return Err(Error::invalid(format!("{what} needs {n} coordinates, got {}", v.len())));
            }
            Ok(())
        };
        let pos = |x: f64, what: &str| -> Result<()> {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::invalid(format!("{what} must be positive and finite")));
            }
            Ok(())
        };
        match self {
            Shape::Interval { a, b } => pos(b - a, "interval length"),
            Shape::Square { lo, side } | Shape::LShape { lo, side } => {
                want(lo, 2, "lo")?;
                pos(*side, "side")
            }
            Shape::Cube { lo, side } => {
                want(lo, 3, "lo")?;
                pos(*side, "side")
            }
            Shape::Disk { center, radius } => {
                want(center, 2, "center")?;
                pos(*radius, "radius")
            }
            Shape::Ball { center, radius } => {
                want(center, 3, "center")?;
                pos(*radius, "radius")
            }
            Shape::Annulus { center, r_in, r_out } => {
                want(center, 2, "center")?;
                pos(*r_in, "r_in")?;
                pos(r_out - r_in, "annulus width")
            }
            Shape::HalfSpace { extent, height, shift } => {
                if extent.len() > 2 {
                    return Err(Error::invalid("half_space supports at most 3 dimensions"));
                }
                for e in extent {
                    pos(e[1] - e[0], "extent")?;
                }
                if !shift.is_empty() {
                    want(shift, extent.len(), "shift")?;
                }
                pos(*height, "height")
            }
            Shape::PerturbedHalfSpace { extent, height, amplitude, width, .. } => {
                pos(extent[1] - extent[0], "extent")?;
                pos(*width, "width")?;
                pos(height - amplitude.max(0.0), "height above the bump")
            }
            Shape::Cusp { radius } => pos(*radius, "radius"),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Shape::HalfSpace { .. } | Shape::PerturbedHalfSpace { .. })
    }

    /// Ω is a strip of a half-space: grid edges other than the bottom are
    /// not part of the boundary.
    pub fn is_strip(&self) -> bool {
        !self.is_bounded()
    }

    /// Bounding box of the region to sample (physical coordinates).
    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Shape::Interval { a, b } => (vec![*a], vec![*b]),
            Shape::Square { lo, side } | Shape::Cube { lo, side } | Shape::LShape { lo, side } => {
                (lo.clone(), lo.iter().map(|x| x + side).collect())
            }
            Shape::Disk { center, radius } | Shape::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Shape::Annulus { center, r_out, .. } => (
                center.iter().map(|c| c - r_out).collect(),
                center.iter().map(|c| c + r_out).collect(),
            ),
            Shape::HalfSpace { extent, height, .. } => {
                let mut lo: Vec<f64> = extent.iter().map(|e| e[0]).collect();
                let mut hi: Vec<f64> = extent.iter().map(|e| e[1]).collect();
                lo.push(0.0);
                hi.push(*height);
                (lo, hi)
            }
            Shape::PerturbedHalfSpace { extent, height, amplitude, .. } => {
                (vec![extent[0], amplitude.min(0.0)], vec![extent[1], *height])
            }
            Shape::Cusp { radius } => (vec![-2.5 * radius; 2], vec![2.5 * radius; 2]),
        }
    }

    /// Named feature sizes that must be resolved by at least 4h.
    pub fn features(&self) -> Vec<(&'static str, f64)> {
        match self {
            Shape::Interval { a, b } => vec![("length", b - a)],
            Shape::Square { side, .. } | Shape::Cube { side, .. } => vec![("side", *side)],
            Shape::LShape { side, .. } => vec![("arm width", side / 2.0)],
            Shape::Disk { radius, .. } | Shape::Ball { radius, .. } => vec![("radius", *radius)],
            Shape::Annulus { r_in, r_out, .. } => vec![("inner radius", *r_in), ("width", r_out - r_in)],
            Shape::HalfSpace { height, .. } => vec![("height", *height)],
            Shape::PerturbedHalfSpace { height, amplitude, width, .. } => {
                vec![("bump width", *width), ("clearance", height - amplitude.max(0.0))]
            }
            // The cusp is deliberately unresolved at its tip.
            Shape::Cusp { radius } => vec![("radius", *radius)],
        }
    }

    /// Boundary function of the perturbed half-space with two derivatives.
    pub fn psi(&self, s: f64) -> (f64, f64, f64) {
        match self {
            Shape::PerturbedHalfSpace { amplitude, width, center, .. } => {
                let (b, b1, b2) = bump((s - center) / width);
                (amplitude * b, amplitude * b1 / width, amplitude * b2 / (width * width))
            }
            _ => (0.0, 0.0, 0.0),
        }
    }

    fn lshape_boxes(lo: &[f64], side: f64) -> (P3, P3, P3, P3) {
        let l = pad(lo);
        let mut hi = l;
        let mut mid = l;
        for a in 1..3 {
            hi[a] += side;
            mid[a] += side / 2.0;
        }
        (l, hi, mid, hi)
    }

    fn cusp_centers(r: f64) -> (P3, P3) {
        ([0.0, -r, 0.0], [0.0, r, 0.0])
    }

    /// Open-set indicator at a padded point.
    pub fn contains(&self, p: &P3) -> bool {
        match self {
            Shape::Interval { a, b } => p[2] > *a && p[2] < *b,
            Shape::Square { lo, side } | Shape::Cube { lo, side } => {
                let l = pad(lo);
                (3 - lo.len()..3).all(|a| p[a] > l[a] && p[a] < l[a] + side)
            }
            Shape::Disk { center, radius } | Shape::Ball { center, radius } => {
                dist(p, &pad(center)) < *radius
            }
            Shape::Annulus { center, r_in, r_out } => {
                let d = dist(p, &pad(center));
                d > *r_in && d < *r_out
            }
            Shape::LShape { lo, side } => {
                let (l, h, ml, mh) = Self::lshape_boxes(lo, *side);
                let in_outer = (1..3).all(|a| p[a] > l[a] && p[a] < h[a]);
                let in_quadrant = (1..3).all(|a| p[a] >= ml[a] && p[a] <= mh[a]);
                in_outer && !in_quadrant
            }
            Shape::HalfSpace { .. } => p[2] > 0.0,
            Shape::PerturbedHalfSpace { .. } => p[2] > self.psi(p[1]).0,
            Shape::Cusp { radius } => {
                let r = *radius;
                let (cm, cp) = Self::cusp_centers(r);
                let in_box = (1..3).all(|a| p[a].abs() < 2.5 * r);
                in_box && dist(p, &cm) > r && dist(p, &cp) > r
            }
        }
    }

    /// Signed distance to the boundary, positive inside. Exact for points
    /// inside Ω; outside only the sign is guaranteed for the composite
    /// shapes (L-shape, cusp).
    pub fn signed_distance(&self, p: &P3) -> f64 {
        let dim = self.dim();
        match self {
            Shape::Interval { a, b } => (p[2] - a).min(b - p[2]),
            Shape::Square { lo, side } | Shape::Cube { lo, side } => {
                let l = pad(lo);
                let mut h = l;
                for a in 3 - dim..3 {
                    h[a] += side;
                }
                box_sd(p, &l, &h, dim)
            }
            Shape::Disk { center, radius } | Shape::Ball { center, radius } => {
                radius - dist(p, &pad(center))
            }
            Shape::Annulus { center, r_in, r_out } => {
                let d = dist(p, &pad(center));
                (r_out - d).min(d - r_in)
            }
            Shape::LShape { lo, side } => {
                let (l, h, ml, mh) = Self::lshape_boxes(lo, *side);
                let outer = box_sd(p, &l, &h, 2);
                let q = box_point_dist(p, &ml, &mh);
                if q == 0.0 {
                    // inside the removed closed quadrant
                    -box_sd(p, &ml, &mh, 2).max(0.0)
                } else {
                    outer.min(q)
                }
            }
            Shape::HalfSpace { .. } => p[2],
            Shape::PerturbedHalfSpace { .. } => {
                let q = self.project(p);
                let d = dist(p, &q);
                if self.contains(p) {
                    d
                } else {
                    -d
                }
            }
            Shape::Cusp { radius } => {
                let r = *radius;
                let (cm, cp) = Self::cusp_centers(r);
                let b = box_sd(p, &[0.0, -2.5 * r, -2.5 * r], &[0.0, 2.5 * r, 2.5 * r], 2);
                b.min(dist(p, &cm) - r).min(dist(p, &cp) - r)
            }
        }
    }

    /// Nearest boundary point for a point inside Ω (or near its boundary).
    pub fn project(&self, p: &P3) -> P3 {
        let dim = self.dim();
        match self {
            Shape::Interval { a, b } => {
                let mut q = *p;
                q[2] = if p[2] - a <= b - p[2] { *a } else { *b };
                q
            }
            Shape::Square { lo, side } | Shape::Cube { lo, side } => {
                let l = pad(lo);
                let mut h = l;
                for a in 3 - dim..3 {
                    h[a] += side;
                }
                box_face_project(p, &l, &h, dim)
            }
            Shape::Disk { center, radius } | Shape::Ball { center, radius } => {
                sphere_project(p, &pad(center), *radius)
            }
            Shape::Annulus { center, r_in, r_out } => {
                let c = pad(center);
                let d = dist(p, &c);
                if r_out - d <= d - r_in {
                    sphere_project(p, &c, *r_out)
                } else {
                    sphere_project(p, &c, *r_in)
                }
            }
            Shape::LShape { lo, side } => {
                let (l, h, ml, mh) = Self::lshape_boxes(lo, *side);
                let a = box_face_project(p, &l, &h, 2);
                let b = clamp_to_box(p, &ml, &mh);
                if dist(p, &a) <= dist(p, &b) {
                    a
                } else {
                    b
                }
            }
            Shape::HalfSpace { .. } => [p[0], p[1], 0.0],
            Shape::PerturbedHalfSpace { .. } => {
                let s = self.graph_foot(p);
                [0.0, s, self.psi(s).0]
            }
            Shape::Cusp { radius } => {
                let r = *radius;
                let (cm, cp) = Self::cusp_centers(r);
                let cands = [
                    box_face_project(p, &[0.0, -2.5 * r, -2.5 * r], &[0.0, 2.5 * r, 2.5 * r], 2),
                    sphere_project(p, &cm, r),
                    sphere_project(p, &cp, r),
                ];
                let mut best = cands[0];
                for c in &cands[1..] {
                    if dist(p, c) < dist(p, &best) {
                        best = *c;
                    }
                }
                best
            }
        }
    }

    /// Parameter of the nearest graph point for the perturbed half-space.
    fn graph_foot(&self, p: &P3) -> f64 {
        let x = p[1];
        let y = p[2];
        let f = |s: f64| (x - s).powi(2) + (y - self.psi(s).0).powi(2);
        let reach = (y - self.psi(x).0).abs();
        if reach == 0.0 {
            return x;
        }
        let n = 400;
        let mut best = (f(x), x);
        for i in 0..=n {
            let s = x - reach + 2.0 * reach * i as f64 / n as f64;
            let v = f(s);
            if v < best.0 {
                best = (v, s);
            }
        }
        // Newton on g(s) = (s - x) + (psi - y) psi'.
        let mut s = best.1;
        for _ in 0..30 {
            let (ps, p1, p2) = self.psi(s);
            let g = (s - x) + (ps - y) * p1;
            let dg = 1.0 + p1 * p1 + (ps - y) * p2;
            if dg <= 0.0 {
                break;
            }
            let step = g / dg;
            let cand = s - step;
            if f(cand) > f(s) {
                break;
            }
            s = cand;
            if step.abs() < 1e-15 {
                break;
            }
        }
        s
    }

    /// Outward unit normal at (or near) a boundary point.
    pub fn outward_normal(&self, p: &P3) -> P3 {
        match self {
            Shape::Disk { center, .. } | Shape::Ball { center, .. } => {
                let c = pad(center);
                let d = dist(p, &c);
                [(p[0] - c[0]) / d, (p[1] - c[1]) / d, (p[2] - c[2]) / d]
            }
            Shape::Annulus { center, r_in, r_out } => {
                let c = pad(center);
                let d = dist(p, &c);
                let s = if d >= 0.5 * (r_in + r_out) { 1.0 } else { -1.0 };
                [0.0, s * (p[1] - c[1]) / d, s * (p[2] - c[2]) / d]
            }
            Shape::HalfSpace { .. } => [0.0, 0.0, -1.0],
            Shape::PerturbedHalfSpace { .. } => {
                let s = self.graph_foot(p);
                let (_, d1, _) = self.psi(s);
                let m = (1.0 + d1 * d1).sqrt();
                [0.0, d1 / m, -1.0 / m]
            }
            _ => {
                // Central differences of the signed distance at the
                // projected point; exact away from corners.
                let q = self.project(p);
                let eta = 1e-7;
                let mut g = [0.0; 3];
                let dim = self.dim();
                for a in 3 - dim..3 {
                    let mut qp = q;
                    let mut qm = q;
                    qp[a] += eta;
                    qm[a] -= eta;
                    g[a] = -(self.signed_distance(&qp) - self.signed_distance(&qm)) / (2.0 * eta);
                }
                let m = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
                if m > 0.0 {
                    [g[0] / m, g[1] / m, g[2] / m]
                } else {
                    g
                }
            }
        }
    }
}

//! Brute-force oracles for the sup-over-balls seminorms. Each oracle
//! enumerates every admissible ball with integer membership tests and sums
//! cells in grid order, so values must agree bit for bit.

use vbmo_core::field::{RandomSmooth, ScalarField};
use vbmo_core::grid_domain::{DomainSpec, Shape};
use vbmo_core::seminorms::{
    b_seminorm, bmo_seminorm, l1_ul, lp_ul, miyachi_norm, CenterLattice, CenterStride, Lattice, SeminormReport,
};
use vbmo_core::{build_domain, Grid, GridDomain};

pub fn domains() -> Vec<(&'static str, GridDomain)> {
    let h = 1.0 / 16.0;
    let shapes = vec![
        ("square", Shape::Square { lo: vec![0.0, 0.0], side: 1.0 }),
        ("disk", Shape::Disk { center: vec![0.0, 0.0], radius: 0.7 }),
        ("annulus", Shape::Annulus { center: vec![0.0, 0.0], r_in: 0.3, r_out: 0.75 }),
        ("lshape", Shape::LShape { lo: vec![0.0, 0.0], side: 1.0 }),
        ("halfspace", Shape::HalfSpace { extent: vec![[-1.0, 1.0]], height: 1.0, shift: vec![] }),
    ];
    shapes
        .into_iter()
        .map(|(n, s)| {
            let d = build_domain(&DomainSpec::new(s, h)).unwrap();
            assert!(d.grid.shape.iter().all(|&m| m <= 32), "{n} grid too large");
            (n, d)
        })
        .collect()
}

fn fields(grid: &Grid, seed: u64) -> Vec<ScalarField> {
    (0..10).map(|i| RandomSmooth::new(seed * 100 + i, grid.dim, 6, 6.0).sample(grid)).collect()
}

/// Ladder as `(rho2 in cells, radius)`.
fn ladder(grid: &Grid, bound: f64) -> Vec<(i64, f64)> {
    let mut out = vec![];
    for k in 0..60 {
        let rho2 = 4i64 << k;
        let r = grid.h * (rho2 as f64).sqrt();
        if r >= bound || r > grid.diameter() {
            break;
        }
        out.push((rho2, r));
    }
    out
}

/// Cells with `|2j - 2c - o2|^2 <= 4 rho2` in doubled units, in grid
/// order. `None` if some such cell lies outside the grid and `whole` is set.
fn ball(grid: &Grid, c: [usize; 3], o2: [i64; 3], rho2: i64) -> (Vec<usize>, bool) {
    let mut cells = vec![];
    let mut clipped = false;
    let rho = (rho2 as f64).sqrt().ceil() as i64 + 1;
    let a0 = grid.a0();
    let lo = |a: usize| if a < a0 { 0 } else { -rho };
    let hi = |a: usize| if a < a0 { 0 } else { rho };
    for d0 in lo(0)..=hi(0) {
        for d1 in lo(1)..=hi(1) {
            for d2 in lo(2)..=hi(2) {
                let d = [d0, d1, d2];
                let s: i64 = (0..3).map(|a| (2 * d[a] - o2[a]).pow(2)).sum();
                if s > 4 * rho2 {
                    continue;
                }
                let j: Vec<i64> = (0..3).map(|a| c[a] as i64 + d[a]).collect();
                if (0..3).any(|a| j[a] < 0 || j[a] >= grid.shape[a] as i64) {
                    clipped = true;
                    continue;
                }
                cells.push(grid.flat([j[0] as usize, j[1] as usize, j[2] as usize]));
            }
        }
    }
    cells.sort_unstable();
    (cells, clipped)
}

fn osc(f: &[f64], cells: &[usize]) -> f64 {
    let mut s = 0.0;
    for &k in cells {
        s += f[k];
    }
    let m = s / cells.len() as f64;
    let mut d = 0.0;
    for &k in cells {
        d += (f[k] - m).abs();
    }
    d / cells.len() as f64
}

struct Oracle {
    value: f64,
    argmax: Vec<(Vec<f64>, f64)>,
    count: usize,
}

impl Oracle {
    fn new() -> Self {
        Oracle { value: f64::NEG_INFINITY, argmax: vec![], count: 0 }
    }
    fn push(&mut self, v: f64, center: Vec<f64>, r: f64) {
        self.count += 1;
        if v > self.value {
            self.value = v;
            self.argmax.clear();
        }
        if v == self.value {
            self.argmax.push((center, r));
        }
    }
    fn check(&self, rep: &SeminormReport, what: &str) -> Result<(), String> {
        if rep.balls_checked != self.count {
            return Err(format!("{what}: candidate count {} vs {}", rep.balls_checked, self.count));
        }
        if self.count == 0 {
            return if rep.empty && rep.value == 0.0 { Ok(()) } else { Err(format!("{what}: expected empty")) };
        }
        if rep.value != self.value {
            return Err(format!("{what}: value {} vs {}", rep.value, self.value));
        }
        let w = rep.witness.as_ref().ok_or(format!("{what}: no witness"))?;
        if !self.argmax.iter().any(|(c, r)| *c == w.center && *r == w.radius) {
            return Err(format!("{what}: witness {w:?} not a maximizer"));
        }
        Ok(())
    }
}

fn phys(grid: &Grid, k: usize, o2: [i64; 3]) -> Vec<f64> {
    let p = grid.center(k);
    (grid.a0()..3).map(|a| p[a] + o2[a] as f64 * 0.5 * grid.h).collect()
}

fn offsets2(grid: &Grid, half: bool) -> Vec<[i64; 3]> {
    if !half {
        return vec![[0; 3]];
    }
    (0..1 << grid.dim)
        .map(|b| {
            let mut o = [0; 3];
            for j in 0..grid.dim {
                o[grid.a0() + j] = (b >> j) & 1;
            }
            o
        })
        .collect()
}

fn oracle_bmo(dom: &GridDomain, f: &[f64], mu: f64, half: bool, stride_div: Option<u32>) -> Oracle {
    let g = &dom.grid;
    let mut o = Oracle::new();
    for c in 0..g.len() {
        if !dom.mask[c] {
            continue;
        }
        let ci = g.unflat(c);
        for &(rho2, r) in &ladder(g, mu) {
            if let Some(div) = stride_div {
                let s = (((rho2 as f64).sqrt() / div as f64).floor() as usize).max(1);
                if (g.a0()..3).any(|a| !ci[a].is_multiple_of(s)) {
                    continue;
                }
            }
            for off in offsets2(g, half) {
                let (cells, clipped) = ball(g, ci, off, rho2);
                if clipped || cells.iter().any(|&k| !dom.mask[k]) {
                    continue;
                }
                o.push(osc(f, &cells), phys(g, c, off), r);
            }
        }
    }
    o
}

pub fn check_bmo() -> Result<(), String> {
    for (name, dom) in domains() {
        for (i, f) in fields(&dom.grid, 1).iter().enumerate() {
            let mu = [0.3, 0.6, f64::INFINITY][i % 3];
            let rep = bmo_seminorm(f, &dom, mu, Lattice::default());
            oracle_bmo(&dom, &f.values, mu, false, None).check(&rep, &format!("{name} field {i}"))?;
        }
    }
    Ok(())
}

pub fn check_bmo_variants() -> Result<(), String> {
    for (name, dom) in domains() {
        let f = &fields(&dom.grid, 2)[0];
        let lat = Lattice { centers: CenterLattice::HalfStep, stride: CenterStride::Full };
        let rep = bmo_seminorm(f, &dom, 0.5, lat);
        oracle_bmo(&dom, &f.values, 0.5, true, None).check(&rep, &format!("{name} half step"))?;
        let lat = Lattice { centers: CenterLattice::Cells, stride: CenterStride::Adaptive { div: 2 } };
        let rep = bmo_seminorm(f, &dom, f64::INFINITY, lat);
        oracle_bmo(&dom, &f.values, f64::INFINITY, false, Some(2)).check(&rep, &format!("{name} stride"))?;
    }
    Ok(())
}

/// Interface faces recomputed from the mask.
fn faces(dom: &GridDomain) -> Vec<(usize, usize, i64)> {
    let g = &dom.grid;
    let mut out = vec![];
    for k in 0..g.len() {
        if !dom.mask[k] {
            continue;
        }
        let i = g.unflat(k);
        for a in g.a0()..3 {
            for s in [-1i64, 1] {
                let mut j = [i[0] as i64, i[1] as i64, i[2] as i64];
                j[a] += s;
                if let Some(n) = g.flat_checked(j) {
                    if !dom.mask[n] {
                        out.push((k, a, s));
                    }
                }
            }
        }
    }
    out
}

pub fn check_b() -> Result<(), String> {
    for (name, dom) in domains() {
        let g = &dom.grid;
        let n = g.dim as i32;
        let fs = faces(&dom);
        if fs.len() != dom.faces.len() {
            return Err(format!("{name}: face count"));
        }
        for (i, f) in fields(g, 3).iter().enumerate() {
            let nu = [0.2, 0.5, 2.0][i % 3];
            let mut o = Oracle::new();
            for &(c, a, s) in &fs {
                for &(rho2, r) in &ladder(g, nu) {
                    let mut o2 = [0; 3];
                    o2[a] = s;
                    let (cells, _) = ball(g, g.unflat(c), o2, rho2);
                    let mut sum = 0.0;
                    for &k in &cells {
                        if dom.mask[k] {
                            sum += f.values[k].abs();
                        }
                    }
                    let scale = g.h.powi(n) / r.powi(n);
                    o.push(sum * scale, phys(g, c, o2), r);
                }
            }
            let rep = b_seminorm(f, &dom, nu, None).unwrap();
            o.check(&rep, &format!("{name} field {i}"))?;
        }
    }
    Ok(())
}

pub fn check_lp_ul() -> Result<(), String> {
    for (name, dom) in domains() {
        let g = &dom.grid;
        let hn = g.h.powi(g.dim as i32);
        for (i, f) in fields(g, 4).iter().enumerate() {
            let p = 1 + (i as u32 % 2);
            let r0 = [0.25, 0.5][i % 2];
            let rho2 = (r0 / g.h).powi(2) as i64;
            let region = dom.tubular_neighborhood(0.2);
            let mut o = Oracle::new();
            for c in 0..g.len() {
                let (cells, _) = ball(g, g.unflat(c), [0; 3], rho2);
                let mut sum = 0.0;
                for &k in &cells {
                    if region[k] {
                        sum += f.values[k].abs().powi(p as i32);
                    }
                }
                let v = if p == 1 { sum * hn } else { (sum * hn).powf(1.0 / p as f64) };
                o.push(v, phys(g, c, [0; 3]), r0);
            }
            let rep = if p == 1 { l1_ul(f, &region, r0) } else { lp_ul(f, &region, r0, p) };
            o.check(&rep, &format!("{name} field {i}"))?;
        }
    }
    Ok(())
}

pub fn check_miyachi() -> Result<(), String> {
    for (name, dom) in domains() {
        let g = &dom.grid;
        for (i, f) in fields(g, 5).iter().enumerate() {
            let mut osc_o = Oracle::new();
            let mut b_o = Oracle::new();
            for c in 0..g.len() {
                if !dom.mask[c] {
                    continue;
                }
                let ci = g.unflat(c);
                for &(rho2, r) in &ladder(g, f64::INFINITY) {
                    let (big, clipped) = ball(g, ci, [0; 3], 4 * rho2);
                    if clipped || big.iter().any(|&k| !dom.mask[k]) {
                        continue;
                    }
                    let (cells, _) = ball(g, ci, [0; 3], rho2);
                    osc_o.push(osc(&f.values, &cells), phys(g, c, [0; 3]), r);
                    let (far, _) = ball(g, ci, [0; 3], 25 * rho2);
                    if far.iter().any(|&k| !dom.mask[k]) {
                        let mut s = 0.0;
                        for &k in &cells {
                            s += f.values[k].abs();
                        }
                        b_o.push(s / cells.len() as f64, phys(g, c, [0; 3]), r);
                    }
                }
            }
            let rep = miyachi_norm(f, &dom);
            osc_o.check(&rep.parts[0], &format!("{name} field {i} oscillation"))?;
            b_o.check(&rep.parts[1], &format!("{name} field {i} local part"))?;
        }
    }
    Ok(())
}

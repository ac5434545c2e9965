use vbmo_core::extension::*;
use vbmo_core::field::{random_dyadic_field, RandomSmooth};
use vbmo_core::grid_domain::{DomainSpec, Grid, Shape};
use vbmo_core::normal_coords::NormalChart;
use vbmo_core::{build_domain, GridDomain, ScalarField};

fn strip(h: f64) -> GridDomain {
    build_domain(&DomainSpec::new(Shape::HalfSpace { extent: vec![[-1.0, 1.0]], height: 1.0, shift: vec![] }, h)).unwrap()
}

fn disk(h: f64) -> GridDomain {
    build_domain(&DomainSpec::new(Shape::Disk { center: vec![0.0, 0.0], radius: 1.0 }, h)).unwrap()
}

fn smooth(grid: &Grid, seed: u64) -> ScalarField {
    RandomSmooth::new(seed, grid.dim, 6, 3.0).sample(grid)
}

#[test]
fn zero_extension_keeps_values_and_vanishes_outside() {
    let dom = disk(1.0 / 32.0);
    let f = smooth(&dom.grid, 1);
    let ext = zero_extend(&f, &dom, 5);
    let big = &ext.field.grid;
    assert_eq!(big.shape[1], dom.grid.shape[1] + 10);
    for k in 0..dom.grid.len() {
        let kk = ext.map_cell(&dom.grid, k);
        let want = if dom.mask[k] { f.values[k] } else { 0.0 };
        assert_eq!(ext.field.values[kk], want);
        assert_eq!(ext.support[kk], dom.mask[k]);
    }
    assert_eq!(ext.support.iter().filter(|s| **s).count(), dom.count());
    let s = ext.summary();
    assert_eq!(s.counts["original"], dom.count());
    assert_eq!(s.counts["zero"], big.len() - dom.count());
}

#[test]
fn reflections_mirror_across_the_plane() {
    let h = 1.0 / 16.0;
    let dom = strip(h);
    let f = smooth(&dom.grid, 2);
    let even = even_extend(&f, &dom).unwrap();
    let odd = odd_extend(&f, &dom).unwrap();
    let g = &even.field.grid;
    let rows = g.shape[2];
    assert_eq!(rows % 2, 0);
    for k in 0..g.len() {
        let i = g.unflat(k);
        let mut m = i;
        m[2] = rows - 1 - i[2];
        let km = g.flat(m);
        assert_eq!(even.field.values[k], even.field.values[km]);
        assert_eq!(odd.field.values[k], -odd.field.values[km]);
        let c = g.center(k);
        assert!((c[2] + g.center(km)[2]).abs() < 1e-12);
        if c[2] > 0.0 {
            assert_eq!(even.provenance[k], Provenance::Original);
        } else {
            assert_eq!(even.provenance[k], Provenance::Reflected);
        }
    }
    for k in 0..dom.grid.len() {
        if dom.mask[k] {
            assert_eq!(even.field.values[even.map_cell(&dom.grid, k)], f.values[k]);
        }
    }
}

#[test]
fn reflection_rejects_curved_domains() {
    let dom = disk(1.0 / 16.0);
    let f = ScalarField::constant(&dom.grid, 1.0);
    assert!(even_extend(&f, &dom).is_err());
    assert!(odd_extend(&f, &dom).is_err());
}

fn chart_grid(h: f64) -> (NormalChart, Grid) {
    let chart = NormalChart::new(&Shape::Disk { center: vec![0.0, 0.0], radius: 1.0 }, &[1.0, 0.0], 0.5, 0.25).unwrap();
    let grid = chart.grid(h).unwrap();
    (chart, grid)
}

#[test]
fn weighted_reflection_preserves_the_weighted_mass() {
    let (chart, grid) = chart_grid(1.0 / 32.0);
    let jac = chart.jacobian_field(&grid).unwrap();
    let w = smooth(&grid, 3);
    let ext = weighted_even_extend(&w, &jac).unwrap();
    let rows = grid.shape[2];
    for k in 0..grid.len() {
        let i = grid.unflat(k);
        if i[2] < rows / 2 {
            let mut m = i;
            m[2] = rows - 1 - i[2];
            let km = grid.flat(m);
            let lhs = ext.field.values[k] * jac.values[k];
            let rhs = w.values[km] * jac.values[km];
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        } else {
            assert_eq!(ext.field.values[k], w.values[k]);
            assert_eq!(ext.correction.values[k], 1.0);
        }
    }
}

#[test]
fn weighted_reflection_with_flat_jacobian_is_even_reflection() {
    let (_, grid) = chart_grid(1.0 / 16.0);
    let jac = ScalarField::constant(&grid, 1.0);
    let w = smooth(&grid, 4);
    let ext = weighted_even_extend(&w, &jac).unwrap();
    assert!(ext.correction.values.iter().all(|&c| c == 1.0));
    let mut bad = jac.clone();
    bad.values[0] = 0.0;
    assert!(weighted_even_extend(&w, &bad).is_err());
}

#[test]
fn mcshane_extension_keeps_the_holder_constant() {
    let grid = Grid::new(&[24, 24], 1.0 / 24.0, &[0.0, 0.0]).unwrap();
    let mask: Vec<bool> = (0..grid.len())
        .map(|k| {
            let c = grid.center(k);
            (c[1] - 0.5).powi(2) + (c[2] - 0.5).powi(2) < 0.1
        })
        .collect();
    for &gamma in &[0.5, 1.0] {
        let phi = ScalarField::from_fn(&grid, |p| (p[1] - 0.5).abs().powf(gamma) - 0.5 * p[2]);
        let ext = mcshane_extend(&phi, &mask, gamma).unwrap();
        let inside = holder_seminorm(&phi, Some(&mask), gamma);
        let all = holder_seminorm(&ext.field, None, gamma);
        assert!(all <= inside * (1.0 + 1e-12), "gamma {gamma}: {all} > {inside}");
        let bound = phi.max_abs(Some(&mask));
        assert!(ext.field.max_abs(None) <= bound);
        for k in 0..grid.len() {
            if mask[k] {
                assert_eq!(ext.field.values[k], phi.values[k]);
            }
        }
    }
    let phi = ScalarField::zeros(&grid);
    assert!(mcshane_extend(&phi, &mask, 1.5).is_err());
    assert!(mcshane_extend(&phi, &vec![false; grid.len()], 0.5).is_err());
}

#[test]
fn jones_extension_is_linear_and_local() {
    let h = 1.0 / 32.0;
    let eps = 0.25;
    for dom in [disk(h), strip(h)] {
        let f1 = random_dyadic_field(&dom.grid, 7, 12).masked(&dom.mask);
        let f2 = random_dyadic_field(&dom.grid, 8, 12).masked(&dom.mask);
        let e1 = jones_extend(&f1, &dom, eps).unwrap();
        let e2 = jones_extend(&f2, &dom, eps).unwrap().result.field;
        let e12 = jones_extend(&f1.combine(0.5, &f2, -2.0), &dom, eps).unwrap().result.field;
        for k in 0..e12.values.len() {
            assert_eq!(e12.values[k], 0.5 * e1.result.field.values[k] - 2.0 * e2.values[k]);
        }
        let big = &e1.info.domain;
        for k in 0..big.grid.len() {
            if big.mask[k] {
                assert!(e1.result.support[k]);
            } else if e1.result.field.values[k] != 0.0 {
                assert!(big.dist.values[k] <= eps + h, "cell {k} at distance {}", big.dist.values[k]);
            }
        }
        for k in 0..dom.grid.len() {
            if dom.mask[k] {
                assert_eq!(e1.result.field.values[e1.result.map_cell(&dom.grid, k)], f1.values[k]);
            }
        }
    }
}

#[test]
fn jones_extension_of_a_constant_is_constant_near_the_boundary() {
    let dom = disk(1.0 / 32.0);
    let f = ScalarField::constant(&dom.grid, 3.0).masked(&dom.mask);
    let ext = jones_extend(&f, &dom, 0.25).unwrap();
    let mut matched = 0;
    for (k, p) in ext.result.provenance.iter().enumerate() {
        if let Provenance::Matched(i) = p {
            let (qc, qi) = ext.info.matching[*i as usize];
            if qi.side() <= 2f64.powi(-ext.info.k_eps) {
                assert_eq!(ext.result.field.values[k], 3.0);
                matched += 1;
            }
            assert!(qi.side() >= qc.side());
        }
    }
    assert!(matched > 0);
}

#[test]
fn jones_rejects_bad_parameters() {
    let dom = disk(1.0 / 16.0);
    let f = ScalarField::zeros(&dom.grid);
    assert!(jones_extend(&f, &dom, 0.0).is_err());
    assert!(jones_extend(&f, &dom, 0.01).is_err());
}

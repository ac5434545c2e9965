use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;
use vbmo_core::build_domain;
use vbmo_core::grid_domain::{DomainSpec, Shape};
use vbmo_core::whitney::*;

fn shapes() -> Vec<Shape> {
    vec![
        Shape::Square { lo: vec![0.0, 0.0], side: 1.0 },
        Shape::Disk { center: vec![0.0, 0.0], radius: 1.0 },
        Shape::Annulus { center: vec![0.0, 0.0], r_in: 0.4, r_out: 1.0 },
        Shape::LShape { lo: vec![-1.0, -1.0], side: 2.0 },
        Shape::HalfSpace { extent: vec![[-1.0, 1.0]], height: 1.0, shift: vec![] },
    ]
}

fn touching(a: &DyadicCube, b: &DyadicCube, dim: usize) -> bool {
    a != b && cube_distance(a, b, dim) == 0.0
}

#[test]
fn mask_decompositions_are_certified() {
    for s in shapes() {
        let dom = build_domain(&DomainSpec::new(s.clone(), 1.0 / 64.0)).unwrap();
        let dec = whitney_decompose(&MaskRegion::domain(&dom).unwrap()).unwrap();
        assert!(dec.certificate.all(), "{}: {:?}", s.name(), dec.certificate.violations);
        assert!(dec.truncated);
        assert!(dec.margin <= 2.0 * 2f64.sqrt() / 64.0 + 1e-12);
    }
}

#[test]
fn analytic_decompositions_are_certified() {
    for s in shapes().into_iter().chain([Shape::Cusp { radius: 0.5 }, Shape::Interval { a: 0.0, b: 1.0 }]) {
        let dec = whitney_decompose(&ShapeRegion::new(s.clone(), 7).unwrap()).unwrap();
        assert!(dec.certificate.all(), "{}: {:?}", s.name(), dec.certificate.violations);
    }
    let ball = Shape::Ball { center: vec![0.0; 3], radius: 1.0 };
    let dec = whitney_decompose(&ShapeRegion::new(ball, 5).unwrap()).unwrap();
    assert!(dec.certificate.all());
}

/// Box distance from a cube to every complement cell, by enumeration.
#[test]
fn mask_distances_match_enumeration() {
    for s in shapes() {
        let dom = build_domain(&DomainSpec::new(s.clone(), 1.0 / 16.0)).unwrap();
        let g = &dom.grid;
        let strip = s.is_strip();
        let dec = whitney_decompose(&MaskRegion::domain(&dom).unwrap()).unwrap();
        let b = g.base_index();
        for (q, &d) in dec.cubes.iter().zip(&dec.distances) {
            let cells = 1i64 << (4 - q.level);
            let mut best = i64::MAX;
            for k in 0..g.len() {
                if dom.mask[k] {
                    continue;
                }
                let i = g.unflat(k);
                let mut s2 = 0;
                for a in 1..3 {
                    let c = b[a] + i[a] as i64;
                    let lo = q.index[a] * cells;
                    let gap = (lo - c - 1).max(c - (lo + cells)).max(0);
                    s2 += gap * gap;
                }
                best = best.min(s2);
            }
            if !strip {
                // cells beyond the grid edge belong to the complement too
                for a in 1..3 {
                    let lo = q.index[a] * cells - b[a];
                    let hi = lo + cells;
                    best = best.min(lo.pow(2)).min((g.shape[a] as i64 - hi).pow(2));
                }
            }
            assert_eq!(d, (best as f64).sqrt() / 16.0, "{} cube {q:?}", s.name());
        }
    }
}

#[test]
fn adjacency_and_chains_match_brute_force() {
    let dom = build_domain(&DomainSpec::new(Shape::LShape { lo: vec![0.0, 0.0], side: 1.0 }, 1.0 / 32.0)).unwrap();
    let dec = whitney_decompose(&MaskRegion::domain(&dom).unwrap()).unwrap();
    let n = dec.cubes.len();
    let adj: Vec<Vec<u32>> = (0..n)
        .map(|i| (0..n).filter(|&j| touching(&dec.cubes[i], &dec.cubes[j], 2)).map(|j| j as u32).collect())
        .collect();
    assert_eq!(adj, dec.adjacency);
    for src in [0, n / 3, n - 1] {
        let mut dist = vec![usize::MAX; n];
        dist[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if dist[v as usize] == usize::MAX {
                    dist[v as usize] = dist[u] + 1;
                    q.push_back(v as usize);
                }
            }
        }
        for t in 0..n {
            assert_eq!(d1(&dec, &dec.cubes[src], &dec.cubes[t]).unwrap(), dist[t]);
        }
    }
    assert_eq!(d1(&dec, &dec.cubes[0], &dec.cubes[0]).unwrap(), 0);
    let j = dec.adjacency[0][0] as usize;
    assert_eq!(d1(&dec, &dec.cubes[0], &dec.cubes[j]).unwrap(), 1);
}

#[test]
fn chain_distance_is_a_metric_and_d2_is_symmetric() {
    let dec = whitney_decompose(&ShapeRegion::new(Shape::Disk { center: vec![0.0, 0.0], radius: 1.0 }, 6).unwrap())
        .unwrap();
    let n = dec.cubes.len();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
        let (qa, qb, qc) = (&dec.cubes[a], &dec.cubes[b], &dec.cubes[c]);
        let ab = d1(&dec, qa, qb).unwrap();
        assert_eq!(ab, d1(&dec, qb, qa).unwrap());
        assert!(ab <= d1(&dec, qa, qc).unwrap() + d1(&dec, qc, qb).unwrap());
        assert_eq!(ab == 0, a == b);
        assert_eq!(d2(qa, qb, 2), d2(qb, qa, 2));
        assert!(d2(qa, qb, 2) >= 0.0);
        assert_eq!(d2(qa, qa, 2), 0.0);
    }
}

#[test]
fn d2_worked_example() {
    let a = DyadicCube { level: 0, index: [0, 0, 0] };
    let b = DyadicCube { level: 2, index: [0, 0, 8] };
    assert_eq!(cube_distance(&a, &b, 2), 1.0);
    let want = 4f64.ln() + (1.0f64 / 1.25 + 1.0).ln();
    assert!((d2(&a, &b, 2) - want).abs() < 1e-15);
    let c = DyadicCube { level: 0, index: [0, 0, 1] };
    assert_eq!(d2(&a, &c, 2), 0.0);
}

#[test]
fn half_plane_cube_distances_are_heights() {
    let s = Shape::HalfSpace { extent: vec![[-1.0, 1.0]], height: 1.0, shift: vec![] };
    let dec = whitney_decompose(&ShapeRegion::new(s, 10).unwrap()).unwrap();
    assert!(dec.certificate.all());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let r2 = 2f64.sqrt();
    for _ in 0..10_000 {
        let i = rng.random_range(0..dec.cubes.len());
        let q = dec.cubes[i];
        let d = q.lo(2);
        assert_eq!(dec.distances[i], d);
        assert!(r2 * q.side() <= d && d <= 4.0 * r2 * q.side());
    }
}

#[test]
fn touching_cubes_have_comparable_sizes() {
    let dom = build_domain(&DomainSpec::new(Shape::Disk { center: vec![0.0, 0.0], radius: 1.0 }, 1.0 / 64.0)).unwrap();
    let dec = whitney_decompose(&MaskRegion::domain(&dom).unwrap()).unwrap();
    for (i, nb) in dec.adjacency.iter().enumerate() {
        for &j in nb {
            let r = dec.cubes[i].side() / dec.cubes[j as usize].side();
            assert!([0.25, 0.5, 1.0, 2.0, 4.0].contains(&r));
        }
    }
}

#[test]
fn dyadic_translation_shifts_cubes() {
    let a = Shape::Square { lo: vec![0.0, 0.0], side: 1.0 };
    let b = Shape::Square { lo: vec![0.25, -0.5], side: 1.0 };
    let da = whitney_decompose(&ShapeRegion::new(a, 6).unwrap().with_min_level(2)).unwrap();
    let db = whitney_decompose(&ShapeRegion::new(b, 6).unwrap().with_min_level(2)).unwrap();
    let mut shifted: Vec<DyadicCube> = da
        .cubes
        .iter()
        .map(|q| {
            let s = 1i64 << q.level;
            DyadicCube { level: q.level, index: [0, q.index[1] + s / 4, q.index[2] - s / 2] }
        })
        .collect();
    shifted.sort();
    assert_eq!(shifted, db.cubes);
    // dilation by 2 lowers every level by one
    let c = Shape::Square { lo: vec![0.0, 0.0], side: 2.0 };
    let dc = whitney_decompose(&ShapeRegion::new(c, 5).unwrap().with_min_level(1)).unwrap();
    let mut dilated: Vec<DyadicCube> =
        da.cubes.iter().map(|q| DyadicCube { level: q.level - 1, index: q.index }).collect();
    dilated.sort();
    assert_eq!(dilated, dc.cubes);
}

#[test]
fn uniform_constant_separates_cusp() {
    let opts = UniformOptions::default();
    let k = |s: &Shape, lv| estimate_uniform_constant(&whitney_decompose(&ShapeRegion::new(s.clone(), lv).unwrap()).unwrap(), &opts).k;
    let cusp = Shape::Cusp { radius: 0.5 };
    let ks: Vec<f64> = (6..9).map(|l| k(&cusp, l)).collect();
    assert!(ks.windows(2).all(|w| w[1] > w[0]), "{ks:?}");
    let disk = Shape::Disk { center: vec![0.0, 0.0], radius: 1.0 };
    let kd: Vec<f64> = (6..9).map(|l| k(&disk, l)).collect();
    assert!(kd.iter().all(|x| (x - kd[2]).abs() / kd[2] <= 0.2), "{kd:?}");
}

#[test]
fn mask_region_needs_dyadic_grid() {
    let dom = build_domain(&DomainSpec::new(Shape::Square { lo: vec![0.0, 0.0], side: 1.0 }, 0.1)).unwrap();
    assert!(MaskRegion::domain(&dom).is_err());
    assert!(ShapeRegion::new(
        Shape::PerturbedHalfSpace { extent: [-1.0, 1.0], height: 1.0, amplitude: 0.1, width: 0.5, center: 0.0 },
        5
    )
    .is_err());
}

use vbmo_core::grid_domain::{pad, DomainSpec, Shape};
use vbmo_core::{build_domain, Error, GridDomain};

fn disk(r: f64, h: f64) -> GridDomain {
    build_domain(&DomainSpec::new(Shape::Disk { center: vec![0.0, 0.0], radius: r }, h)).unwrap()
}

fn zoo(h: f64) -> Vec<GridDomain> {
    let shapes = vec![
        Shape::Interval { a: 0.0, b: 1.0 },
        Shape::Square { lo: vec![0.0, 0.0], side: 1.0 },
        Shape::Disk { center: vec![0.1, -0.2], radius: 0.8 },
        Shape::Annulus { center: vec![0.0, 0.0], r_in: 0.4, r_out: 1.0 },
        Shape::LShape { lo: vec![-1.0, -1.0], side: 2.0 },
        Shape::HalfSpace { extent: vec![[-1.0, 1.0]], height: 1.0, shift: vec![] },
        Shape::PerturbedHalfSpace { extent: [-1.0, 1.0], height: 1.0, amplitude: 0.3, width: 0.5, center: 0.0 },
        Shape::Cusp { radius: 0.5 },
        Shape::Ball { center: vec![0.0, 0.0, 0.0], radius: 0.6 },
        Shape::Cube { lo: vec![0.0, 0.0, 0.0], side: 0.5 },
    ];
    shapes.into_iter().map(|s| build_domain(&DomainSpec::new(s, h)).unwrap()).collect()
}

/// Squared doubled-lattice distance to every interface face, by direct
/// enumeration.
fn brute_squared(dom: &GridDomain, k: usize) -> i64 {
    let i = dom.grid.unflat(k);
    dom.faces
        .iter()
        .map(|f| {
            let c = dom.grid.unflat(f.cell);
            let mut s = 0i64;
            for a in 0..3 {
                let mut fa = 2 * c[a] as i64 + 1;
                if a == f.axis as usize {
                    fa += f.side as i64;
                }
                let ca = 2 * i[a] as i64 + 1;
                s += (fa - ca) * (fa - ca);
            }
            s
        })
        .min()
        .unwrap()
}

#[test]
fn distance_transform_equals_brute_force() {
    for dom in zoo(1.0 / 16.0) {
        for k in 0..dom.grid.len() {
            assert_eq!(dom.dist.squared[k], brute_squared(&dom, k), "cell {k}");
            let d = (brute_squared(&dom, k) as f64).sqrt() * dom.h() * 0.5;
            assert_eq!(dom.dist.values[k], d);
        }
    }
}

#[test]
fn distance_is_one_lipschitz_on_neighbors() {
    for dom in zoo(1.0 / 32.0) {
        let g = &dom.grid;
        for k in 0..g.len() {
            g.face_neighbors(k, |j, _, _| {
                assert!((dom.dist.values[k] - dom.dist.values[j]).abs() <= g.h * (1.0 + 1e-12));
            });
        }
    }
}

#[test]
fn analytic_distance_within_half_cell() {
    for dom in zoo(1.0 / 32.0) {
        let shape = dom.shape.clone().unwrap();
        if matches!(shape, Shape::Cusp { .. }) {
            continue;
        }
        for k in 0..dom.grid.len() {
            if !dom.mask[k] {
                continue;
            }
            let exact = shape.signed_distance(&dom.grid.center(k));
            assert!(
                (dom.dist.values[k] - exact).abs() <= 0.5 * dom.h() + 1e-12,
                "{}: cell {k} {} vs {}",
                shape.name(),
                dom.dist.values[k],
                exact
            );
        }
    }
}

#[test]
fn half_space_distance_is_height() {
    let dom = build_domain(&DomainSpec::new(
        Shape::HalfSpace { extent: vec![[-1.0, 1.0]], height: 1.0, shift: vec![] },
        1.0 / 64.0,
    ))
    .unwrap();
    for k in 0..dom.grid.len() {
        if dom.mask[k] {
            assert_eq!(dom.dist.values[k], dom.grid.center(k)[2]);
            let g = dom.dist.gradient[k];
            assert_eq!(g, [0.0, 0.0, 1.0]);
        }
    }
    assert_eq!(dom.n_components, 1);
    assert!(dom.reach().is_infinite());
    // first layer only
    let tube = dom.tubular_neighborhood(dom.h() / 2.0 + 1e-15);
    for k in 0..dom.grid.len() {
        assert_eq!(tube[k], dom.mask[k] && dom.grid.unflat(k)[2] == 4);
    }
}

#[test]
fn disk_area_components_and_tube() {
    let h = 1.0 / 64.0;
    let dom = disk(1.0, h);
    let area = dom.count() as f64 * h * h;
    assert!((area - std::f64::consts::PI).abs() < 0.01);
    assert_eq!(dom.n_components, 1);
    let tube = dom.tubular_neighborhood(0.5);
    let cnt = tube.iter().filter(|&&t| t).count() as f64 * h * h;
    let exact = std::f64::consts::PI * (1.0 - 0.25);
    assert!((cnt - exact).abs() / exact < 0.05);
    let all = dom.tubular_neighborhood(10.0);
    assert_eq!(all, dom.mask);
    // perimeter from the surface weights
    let mesh = dom.boundary_mesh();
    assert!((mesh.total_weight() - std::f64::consts::TAU).abs() < 4.0 * h);
    for s in &mesh.samples {
        let n = s.normal;
        assert!(((n[1] * n[1] + n[2] * n[2]).sqrt() - 1.0).abs() < 1e-12);
        assert!(s.weight > 0.0);
    }
}

#[test]
fn annulus_has_two_components() {
    let dom = build_domain(&DomainSpec::new(
        Shape::Annulus { center: vec![0.0, 0.0], r_in: 0.4, r_out: 1.0 },
        1.0 / 32.0,
    ))
    .unwrap();
    assert_eq!(dom.n_components, 2);
    let mut counts = [0usize; 2];
    for &c in &dom.face_component {
        counts[c as usize] += 1;
    }
    assert!(counts[0] > counts[1]);
}

#[test]
fn perturbed_half_space_normals_span_the_plane() {
    let dom = build_domain(&DomainSpec::new(
        Shape::PerturbedHalfSpace { extent: [-1.0, 1.0], height: 1.0, amplitude: 0.3, width: 0.5, center: 0.0 },
        1.0 / 64.0,
    ))
    .unwrap();
    let mesh = dom.boundary_mesh();
    let max_tangential = mesh.samples.iter().map(|s| s.normal[1].abs()).fold(0.0, f64::max);
    assert!(max_tangential > 0.2);
}

#[test]
fn projection_on_disk_and_half_space() {
    let h = 1.0 / 64.0;
    let dom = disk(1.0, h);
    for &(x, y) in &[(0.3, 0.1), (-0.5, 0.6), (0.0, -0.8)] {
        let p = pad(&[x, y]);
        let q = dom.project(&p).unwrap();
        let r = (x * x + y * y).sqrt();
        assert!((q[1] - x / r).abs() < 2.0 * h && (q[2] - y / r).abs() < 2.0 * h);
    }
    let hs = build_domain(&DomainSpec::new(
        Shape::HalfSpace { extent: vec![[-1.0, 1.0]], height: 1.0, shift: vec![] },
        h,
    ))
    .unwrap();
    let q = hs.project(&pad(&[13.5 * h, 0.7])).unwrap();
    assert_eq!(q, pad(&[13.5 * h, 0.0]));
}

#[test]
fn gradient_projection_lands_near_interface() {
    let h = 1.0 / 64.0;
    let dom = disk(1.0, h);
    for k in 0..dom.grid.len() {
        if !dom.mask[k] || !dom.dist.reliable(k) {
            continue;
        }
        let x = dom.grid.center(k);
        let d = dom.dist.values[k];
        let g = dom.dist.gradient[k];
        let y = [x[0] - d * g[0], x[1] - d * g[1], x[2] - d * g[2]];
        let (dy, _) = dom.dist.distance_to_interface(&y).unwrap();
        assert!(dy <= h, "cell {k}: d={d} lands {dy} away");
    }
}

#[test]
fn reach_estimate_is_sensible() {
    let dom = disk(1.0, 1.0 / 64.0);
    assert!(dom.reach() > 0.25 && dom.reach() <= 1.0, "{}", dom.reach());
    let ann = build_domain(&DomainSpec::new(
        Shape::Annulus { center: vec![0.0, 0.0], r_in: 0.5, r_out: 1.0 },
        1.0 / 64.0,
    ))
    .unwrap();
    assert!(ann.reach() > 0.05 && ann.reach() <= 0.25 + 1.0 / 64.0, "{}", ann.reach());
}

#[test]
fn cusp_symmetric_point_is_ambiguous() {
    let h = 1.0 / 64.0;
    let dom = build_domain(&DomainSpec::new(Shape::Cusp { radius: 0.5 }, h)).unwrap();
    // On the symmetry axis inside the upper cusp, equidistant to both arcs.
    let x = pad(&[0.0, 0.3]);
    match dom.project(&x) {
        Err(Error::Ambiguous { near, distance, .. }) => {
            let left = near.iter().any(|p| p[0] < -h);
            let right = near.iter().any(|p| p[0] > h);
            assert!(left && right, "near set {near:?} at distance {distance}");
        }
        other => panic!("expected ambiguity, got {other:?}"),
    }
}

#[test]
fn errors_for_coarse_or_empty() {
    let r = build_domain(&DomainSpec::new(Shape::Disk { center: vec![0.0, 0.0], radius: 0.1 }, 0.05));
    assert!(matches!(r, Err(Error::TooCoarse { .. })));
    let grid = vbmo_core::Grid::new(&[4, 4], 0.25, &[0.0, 0.0]).unwrap();
    assert!(matches!(GridDomain::from_mask(grid, vec![false; 16], None), Err(Error::EmptyMask)));
}

#[test]
fn domain_spec_json_round_trip() {
    let js = r#"{"type":"disk","params":{"center":[0,0],"radius":1},"resolution":{"h":"1/64"}}"#;
    let spec = DomainSpec::from_json(js).unwrap();
    assert_eq!(spec.resolution.h, 1.0 / 64.0);
    assert_eq!(spec.resolution.margin, 4);
    let back: DomainSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(back, spec);
}

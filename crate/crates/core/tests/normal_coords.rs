use nalgebra::DMatrix;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vbmo_core::field::random_vector_field;
use vbmo_core::grid_domain::{DomainSpec, Shape};
use vbmo_core::normal_coords::*;
use vbmo_core::build_domain;

type Q = Ratio<i128>;

fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

/// Exact inverse by Gauss-Jordan elimination.
fn inverse(a: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { q(1, 1) } else { q(0, 1) }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| m[r][c] != q(0, 1)).expect("singular");
        m.swap(c, p);
        let piv = m[c][c];
        for x in m[c].iter_mut() {
            *x /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                let row = m[c].clone();
                for (x, y) in m[r].iter_mut().zip(row) {
                    *x -= f * y;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// `(G | u)` with a rational unit vector `u` and columns of `G`
/// orthogonal to it.
fn frames() -> Vec<Vec<Vec<Q>>> {
    vec![
        // u = (3/5, 4/5), g = 7 (-4/5, 3/5)
        vec![vec![q(-28, 5), q(3, 5)], vec![q(21, 5), q(4, 5)]],
        // u = (-5/13, 12/13), g = (12, 5) / 3
        vec![vec![q(4, 1), q(-5, 13)], vec![q(5, 3), q(12, 13)]],
        // u = (2/3, 1/3, 2/3), g1 = (1, -2, 0), g2 = (1, 2, -2) / 5
        vec![
            vec![q(1, 1), q(1, 5), q(2, 3)],
            vec![q(-2, 1), q(2, 5), q(1, 3)],
            vec![q(0, 1), q(-2, 5), q(2, 3)],
        ],
        // u = (1/3, -2/3, 2/3), g1 = (2, 1, 0), g2 = (0, 1, 1), not orthogonal to each other
        vec![
            vec![q(2, 1), q(0, 1), q(1, 3)],
            vec![q(1, 1), q(1, 1), q(-2, 3)],
            vec![q(0, 1), q(1, 1), q(2, 3)],
        ],
    ]
}

#[test]
fn last_row_of_inverse_is_the_normal_exactly() {
    for a in frames() {
        let n = a.len();
        let dot: Q = (0..n).map(|i| a[i][n - 1] * a[i][n - 1]).sum();
        assert_eq!(dot, q(1, 1));
        for j in 0..n - 1 {
            let d: Q = (0..n).map(|i| a[i][j] * a[i][n - 1]).sum();
            assert_eq!(d, q(0, 1));
        }
        let inv = inverse(&a);
        for j in 0..n {
            assert_eq!(inv[n - 1][j], a[j][n - 1], "column {j} of a {n}x{n} frame");
        }
        let af = DMatrix::from_fn(n, n, |i, j| *a[i][j].numer() as f64 / *a[i][j].denom() as f64);
        let rep = inverse_last_row(&af).unwrap();
        assert!(rep.residual < 1e-14, "{}", rep.residual);
    }
}

#[test]
fn random_frames_satisfy_the_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=4 {
        for _ in 0..200 {
            let a = random_frame(&mut rng, n);
            let rep = inverse_last_row(&a).unwrap();
            assert!(rep.residual <= 1e-10 * rep.condition, "n {n}: {}", rep.residual);
        }
    }
}

#[test]
fn singular_and_ragged_frames_are_rejected() {
    assert!(inverse_last_row(&DMatrix::zeros(2, 2)).is_err());
    assert!(inverse_last_row(&DMatrix::zeros(2, 3)).is_err());
}

fn disk_chart() -> NormalChart {
    NormalChart::new(&Shape::Disk { center: vec![0.0, 0.0], radius: 1.0 }, &[0.0, 1.0], 1.0, 0.5).unwrap()
}

#[test]
fn disk_chart_round_trips_and_has_the_expected_jacobian() {
    let c = disk_chart();
    for i in -9..=9 {
        for j in -9..=9 {
            let y = [i as f64 * 0.1, j as f64 * 0.05];
            let x = c.map(&y).unwrap();
            let back = c.inverse(&x).unwrap();
            assert!((back[0] - y[0]).abs() < 1e-12 && (back[1] - y[1]).abs() < 1e-12);
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            assert!((r - (1.0 - y[1])).abs() < 1e-12);
            let jac = c.jacobian(&y).unwrap();
            assert!((jac.abs() - (1.0 - y[1])).abs() < 1e-12, "{jac}");
            assert!(c.frame(&y).unwrap().orthogonality_defect() < 1e-14);
        }
    }
    let n = c.exterior_normal(&[0.0]);
    assert!((n[0]).abs() < 1e-15 && (n[1] - 1.0).abs() < 1e-15);
    assert!(c.map(&[1.0, 0.0]).is_err());
    assert!(c.map(&[0.0, 0.6]).is_err());
}

#[test]
fn annulus_inner_circle_faces_outward() {
    let s = Shape::Annulus { center: vec![0.0, 0.0], r_in: 0.5, r_out: 1.0 };
    let c = NormalChart::new(&s, &[0.5, 0.0], 0.4, 0.2).unwrap();
    let x = c.map(&[0.0, 0.1]).unwrap();
    assert!((x[0] - 0.6).abs() < 1e-12 && x[1].abs() < 1e-12);
    let n = c.exterior_normal(&[0.0]);
    assert!((n[0] + 1.0).abs() < 1e-12);
    assert!(NormalChart::new(&s, &[0.5, 0.0], 0.4, 0.3).is_err());
}

#[test]
fn graph_chart_frames_are_orthogonal() {
    let s = Shape::PerturbedHalfSpace { extent: [-1.0, 1.0], height: 1.0, amplitude: 0.2, width: 0.5, center: 0.0 };
    let (p, _, _) = s.psi(0.1);
    let c = NormalChart::new(&s, &[0.1, p], 0.3, 0.05).unwrap();
    for i in -5..=5 {
        let y = [i as f64 * 0.05, 0.03];
        let back = c.inverse(&c.map(&y).unwrap()).unwrap();
        assert!((back[0] - y[0]).abs() < 1e-10 && (back[1] - y[1]).abs() < 1e-10);
        let f = c.frame(&[y[0], 0.0]).unwrap();
        assert!(f.orthogonality_defect() < 1e-14);
        let rep = inverse_last_row(&f.a).unwrap();
        assert!(rep.residual < 1e-13);
    }
}

#[test]
fn half_space_chart_is_a_translation() {
    let s = Shape::HalfSpace { extent: vec![[-1.0, 1.0], [-1.0, 1.0]], height: 1.0, shift: vec![] };
    let c = NormalChart::new(&s, &[0.25, -0.5, 0.0], 0.5, 0.5).unwrap();
    assert_eq!(c.map(&[0.1, 0.2, 0.3]).unwrap(), vec![0.35, -0.3, 0.3]);
    assert_eq!(c.jacobian(&[0.0, 0.0, 0.1]).unwrap(), 1.0);
    assert!(NormalChart::new(&s, &[0.0, 0.0, 0.1], 0.5, 0.5).is_err());
}

#[test]
fn charts_validate_their_base_point() {
    let d = Shape::Disk { center: vec![0.0, 0.0], radius: 1.0 };
    assert!(NormalChart::new(&d, &[0.5, 0.0], 0.5, 0.2).is_err());
    assert!(NormalChart::new(&d, &[1.0, 0.0], 4.0, 0.2).is_err());
    assert!(NormalChart::new(&d, &[1.0, 0.0], 0.5, 1.0).is_err());
    assert!(NormalChart::new(&Shape::Cusp { radius: 0.5 }, &[0.0, 0.0], 0.1, 0.1).is_err());
}

#[test]
fn normal_component_matches_the_distance_gradient() {
    let h = 1.0 / 64.0;
    let shape = Shape::Disk { center: vec![0.0, 0.0], radius: 1.0 };
    let dom = build_domain(&DomainSpec::new(shape.clone(), h)).unwrap();
    let chart = NormalChart::new(&shape, &[1.0, 0.0], 0.8, 0.3).unwrap();
    let ygrid = chart.grid(h).unwrap();
    let v = random_vector_field(&dom.grid, 9, 6, 3.0);
    let rep = transform_vector_field(&v, &dom, &chart, &ygrid).unwrap();
    assert!(rep.valid.iter().filter(|b| **b).count() > 100);
    assert!(rep.max_diff <= 5.0 * h, "{}", rep.max_diff);
}

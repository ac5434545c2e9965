use proptest::prelude::*;
use vbmo_core::field::RandomSmooth;
use vbmo_core::grid_domain::{DomainSpec, Shape};
use vbmo_core::seminorms::{b_seminorm, bmo_b_norm, bmo_seminorm, Lattice};
use vbmo_core::{build_domain, GridDomain, ScalarField};

fn domains() -> Vec<GridDomain> {
    [
        Shape::Disk { center: vec![0.0, 0.0], radius: 1.0 },
        Shape::LShape { lo: vec![-1.0, -1.0], side: 2.0 },
        Shape::Interval { a: 0.0, b: 1.0 },
    ]
    .into_iter()
    .map(|s| build_domain(&DomainSpec::new(s, 1.0 / 16.0)).unwrap())
    .collect()
}

fn field(dom: &GridDomain, seed: u64) -> ScalarField {
    RandomSmooth::new(seed, dom.dim(), 5, 4.0).sample(&dom.grid)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bmo_is_monotone_in_mu(d in 0usize..3, seed in 0u64..1000, m1 in 0.05f64..0.5, m2 in 0.05f64..0.5) {
        let dom = &domains()[d];
        let f = field(dom, seed);
        let (lo, hi) = (m1.min(m2), m1.max(m2));
        let a = bmo_seminorm(&f, dom, lo, Lattice::default()).value;
        let b = bmo_seminorm(&f, dom, hi, Lattice::default()).value;
        prop_assert!(a <= b * (1.0 + 1e-12), "{} > {}", a, b);
    }

    #[test]
    fn bmo_scales_and_ignores_constants(d in 0usize..3, seed in 0u64..1000, s in -4.0f64..4.0, c in -10.0f64..10.0) {
        let dom = &domains()[d];
        let f = field(dom, seed);
        let g = ScalarField::from_fn(&dom.grid, |_| c).combine(1.0, &f, s);
        let a = bmo_seminorm(&f, dom, 0.3, Lattice::default()).value;
        let b = bmo_seminorm(&g, dom, 0.3, Lattice::default()).value;
        prop_assert!((b - s.abs() * a).abs() <= 1e-9 * (1.0 + c.abs()) * (1.0 + a), "{} vs {}", b, s.abs() * a);
    }

    #[test]
    fn bmo_obeys_the_triangle_inequality(d in 0usize..3, s1 in 0u64..1000, s2 in 0u64..1000) {
        let dom = &domains()[d];
        let (f, g) = (field(dom, s1), field(dom, s2));
        let sum = f.combine(1.0, &g, 1.0);
        let l = Lattice::default();
        let lhs = bmo_seminorm(&sum, dom, 0.3, l).value;
        let rhs = bmo_seminorm(&f, dom, 0.3, l).value + bmo_seminorm(&g, dom, 0.3, l).value;
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn b_is_dominated_by_larger_moduli(d in 0usize..3, seed in 0u64..1000, nu in 0.1f64..0.5) {
        let dom = &domains()[d];
        let f = field(dom, seed);
        let g = ScalarField::from_fn(&dom.grid, |_| 0.5).combine(1.0, &ScalarField { grid: f.grid.clone(), values: f.values.iter().map(|x| x.abs()).collect() }, 1.0);
        let bf = b_seminorm(&f, dom, nu, None).unwrap().value;
        let bg = b_seminorm(&g, dom, nu, None).unwrap().value;
        prop_assert!(bf <= bg * (1.0 + 1e-12));
        let wider = b_seminorm(&f, dom, 2.0 * nu, None).unwrap().value;
        prop_assert!(bf <= wider * (1.0 + 1e-12));
        let norm = bmo_b_norm(&f, dom, 0.3, nu, Lattice::default()).unwrap();
        prop_assert!(close(norm.value, bmo_seminorm(&f, dom, 0.3, Lattice::default()).value + bf));
    }
}

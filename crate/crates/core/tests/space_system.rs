use expanso_core::catalog;
use expanso_core::space::{build_grid, MetricFn, SampledSpace};
use expanso_core::system::{build_orbit_table, compose, inverse_system, kth_iterate, product, restrict, PointSet};
use proptest::prelude::*;

fn grid(kind: u8, h: f64) -> SampledSpace {
    match kind {
        0 => build_grid(&[], h, MetricFn::circle()).unwrap(),
        1 => build_grid(&[], h, MetricFn::torus(2)).unwrap(),
        2 => build_grid(&[(-1.0, 1.0)], h, MetricFn::euclidean(1)).unwrap(),
        _ => build_grid(&[(-1.0, 1.0), (0.0, 0.5)], h, MetricFn::euclidean(2)).unwrap(),
    }
}

proptest! {
    #[test]
    fn points_locate_to_their_index(kind in 0u8..4, k in 3u32..6) {
        let space = grid(kind, 1.0 / f64::from(1u32 << k));
        for i in space.members() {
            prop_assert_eq!(space.locate(&space.point(i), 1e-12), Some(i));
        }
    }

    #[test]
    fn refinement_keeps_coarse_points(kind in 0u8..4, f in 2usize..4) {
        let space = grid(kind, 0.125);
        let fine = space.refine(f).unwrap();
        prop_assert!(fine.len() > space.len());
        for p in space.points() {
            prop_assert!(fine.locate(&p, 1e-9).is_some());
        }
    }

    #[test]
    fn iterate_of_inverse_undoes_iterate(k in 1usize..4, n in 1usize..4, i in 0usize..64) {
        let e = catalog::catmap();
        let space = e.default_space().unwrap();
        let x = space.point(i * 61 % space.len());
        let it = kth_iterate(&e.system, k).unwrap();
        let mut y = x.to_vec();
        it.apply(n, &mut y);
        // block n of the k-iterate is undone by the matching inverse steps
        let inv = inverse_system(&e.system).unwrap();
        for m in ((n - 1) * k + 1..=n * k).rev() {
            inv.apply(m, &mut y);
        }
        prop_assert!(space.metric().dist(&y, &x) < 1e-9);
    }
}

#[test]
fn product_orbits_are_componentwise() {
    let d = catalog::doubling();
    let r = catalog::rotation();
    let p = product(&d.system, &r.system);
    let x = [0.3, 0.7];
    for n in 1..6 {
        let z = compose(&p, 1, n, &x);
        assert_eq!(z[0], compose(&d.system, 1, n, &x[..1])[0]);
        assert_eq!(z[1], compose(&r.system, 1, n, &x[1..])[0]);
    }
    let space = SampledSpace::product(&d.default_space().unwrap(), &r.default_space().unwrap()).unwrap();
    assert_eq!(space.len(), 512 * 64);
}

#[test]
fn restriction_to_dyadic_subgrid() {
    let e = catalog::doubling();
    let space = e.default_space().unwrap();
    let sub = PointSet::new(space.members().into_iter().filter(|&i| i % 8 == 0).collect());
    let r = restrict(&e.system, &space, &sub, 10).unwrap();
    assert_eq!(r.space.len(), 64);
    assert!(r.space.flags().has_isolated_points);
    let t = build_orbit_table(&r.system, &r.space, 10, false).unwrap();
    assert_eq!(t.space().len(), 64);
    // 1/512 maps to 2/512, outside the set
    let odd = PointSet::new(vec![1]);
    assert!(restrict(&e.system, &space, &odd, 10).is_err());
}

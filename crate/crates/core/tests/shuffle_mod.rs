use proptest::prelude::*;

use qshuffle::exact_ring::{LaurentPoly, Scalar};
use qshuffle::quiver_cells::orderings;
use qshuffle::root_data::CartanDatum;
use qshuffle::shuffle_mod::{
    euler_at, euler_comparable, generator, module_dimension, module_dimension_twisted, shuffle_product,
    wheel_check_finite, EllWeight, WheelOutcome, XPoint,
};
use qshuffle::theta_ideals::Window;

fn mono(dims: &[usize], e: Vec<i32>) -> LaurentPoly {
    LaurentPoly::monomial(dims, e, Scalar::one())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sl2_product_of_monomials(a in -3i32..=3, b in -3i32..=3) {
        // (z1 - z2) (z^a * z^b) = z1^a z2^b (q^-2 z1 - z2) - z2^a z1^b (q^-2 z2 - z1)
        let sl2 = CartanDatum::sl2();
        let p = shuffle_product(&sl2, &mono(&[1], vec![a]), &mono(&[1], vec![b])).unwrap();
        let d = [2];
        let qm2 = Scalar::q_pow(-2);
        let z1 = LaurentPoly::var(&d, 0);
        let z2 = LaurentPoly::var(&d, 1);
        let lhs = p.mul(&z1.sub(&z2));
        let rhs = mono(&d, vec![a, b])
            .mul(&z1.scale(&qm2).sub(&z2))
            .sub(&mono(&d, vec![b, a]).mul(&z2.scale(&qm2).sub(&z1)));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(p.is_color_symmetric());
    }

    #[test]
    fn product_is_associative(a in -2i32..=2, b in -2i32..=2, c in -2i32..=2, colors in prop::collection::vec(0usize..2, 3)) {
        let a2 = CartanDatum::type_a(2);
        let box_of = |i: usize, e: i32| {
            let mut dims = vec![0, 0];
            dims[i] = 1;
            mono(&dims, vec![e])
        };
        let (f, g, h) = (box_of(colors[0], a), box_of(colors[1], b), box_of(colors[2], c));
        let left = shuffle_product(&a2, &shuffle_product(&a2, &f, &g).unwrap(), &h).unwrap();
        let right = shuffle_product(&a2, &f, &shuffle_product(&a2, &g, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn generators_satisfy_wheels(d in prop::collection::vec(-1i32..=1, 3)) {
        let a2 = CartanDatum::type_a(2);
        for o in orderings(&[2, 1]) {
            let g = generator(&a2, &o, &d).unwrap();
            prop_assert!(g.is_color_symmetric());
            prop_assert_eq!(wheel_check_finite(&g, &a2, 0, 1).unwrap(), WheelOutcome::Pass);
        }
    }

    #[test]
    fn sl2_routes_agree(xs in prop::collection::vec(-3i64..=1, 1..=3)) {
        let sl2 = CartanDatum::sl2();
        let x = XPoint::new(vec![xs]);
        for psi in [EllWeight::fundamental(&sl2, 0, 0), EllWeight::prefundamental(0, 0)] {
            let a = module_dimension(&sl2, &x, &psi, Window::Auto).unwrap();
            let b = module_dimension_twisted(&sl2, &x, &psi, Window::Auto).unwrap();
            prop_assert!(a.certified && b.certified);
            prop_assert!(a.dim <= a.corank);
            prop_assert_eq!(a.dim, b.dim);
            if euler_comparable(&sl2, &x, &psi) {
                prop_assert_eq!(a.dim, euler_at(&sl2, &x, &psi));
            }
        }
    }
}

#[test]
fn generator_of_one_box_is_monomial() {
    let a2 = CartanDatum::type_a(2);
    for d in -2..=2 {
        assert_eq!(generator(&a2, &[1], &[d]).unwrap(), mono(&[0, 1], vec![d]));
    }
}

#[test]
fn iterated_boxes_are_generators() {
    // z^{d1} * z^{d2} equals the generator on the ordering (i1, i2)
    let a2 = CartanDatum::type_a(2);
    for (i, j) in [(0, 0), (0, 1), (1, 0)] {
        for (d1, d2) in [(0, 0), (1, -1), (-1, 2)] {
            let mut di = vec![0, 0];
            di[i] = 1;
            let mut dj = vec![0, 0];
            dj[j] = 1;
            let p = shuffle_product(&a2, &mono(&di, vec![d1]), &mono(&dj, vec![d2])).unwrap();
            assert_eq!(p, generator(&a2, &[i, j], &[d1, d2]).unwrap());
        }
    }
}

#[test]
fn fundamental_sl2_character() {
    // the fundamental module of sl2 has weights at n = 0 and n = 1
    let sl2 = CartanDatum::sl2();
    let psi = EllWeight::fundamental(&sl2, 0, 0);
    let nonzero: Vec<Vec<i64>> = (-4..=2)
        .flat_map(|s| [vec![s], vec![s, s], vec![s, s - 2]])
        .filter(|xs| module_dimension(&sl2, &XPoint::new(vec![xs.clone()]), &psi, Window::Auto).unwrap().dim > 0)
        .collect();
    assert_eq!(nonzero.len(), 1, "{nonzero:?}");
    assert_eq!(nonzero[0].len(), 1);
}

use proptest::prelude::*;

use qshuffle::root_data::{build_potential, graded_potential, quiver_from_x, CartanDatum, DatumFile};
use qshuffle::shuffle_mod::{EllWeight, XPoint};

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn admissible(d: &[Vec<i64>]) -> bool {
    let n = d.len();
    let diag_gcd = (0..n).fold(0, |g, i| gcd(g, d[i][i]));
    (0..n).all(|i| d[i][i] > 0)
        && (n == 0 || diag_gcd == 2)
        && (0..n)
            .all(|i| (0..n).all(|j| d[i][j] == d[j][i] && (i == j || (d[i][j] <= 0 && (2 * d[i][j]) % d[i][i] == 0))))
}

proptest! {
    #[test]
    fn validation_matches_rules(d in prop::collection::vec(prop::collection::vec(-3i64..=6, 2), 2)) {
        let names = vec!["a".to_string(), "b".to_string()];
        prop_assert_eq!(CartanDatum::new(names, d.clone()).is_ok(), admissible(&d));
    }
}

#[test]
fn standard_types() {
    let a3 = CartanDatum::type_a(3);
    assert!(a3.is_finite_type() && a3.is_simply_laced());
    assert_eq!((a3.c(0, 1), a3.c(0, 2)), (-1, 0));
    let b2 = CartanDatum::type_b2();
    assert!(b2.is_finite_type() && !b2.is_simply_laced());
    assert_eq!((b2.c(0, 1), b2.c(1, 0)), (-1, -2));
    // affine A1: c_12 c_21 = 4
    let affine = CartanDatum::new(vec!["0".into(), "1".into()], vec![vec![2, -2], vec![-2, 2]]).unwrap();
    assert!(!affine.is_finite_type());
}

#[test]
fn datum_files_parse() {
    let f = DatumFile::parse(r#"{"vertices": [1, 2], "d": [[2, -1], [-1, 2]]}"#).unwrap();
    assert_eq!(f.cartan().unwrap(), CartanDatum::type_a(2));
    let f = DatumFile::parse(r#"{"vertices": ["x"], "arrows": [["x", "x"]], "framing": {"x": 2}}"#).unwrap();
    let q = f.quiver().unwrap();
    assert_eq!((q.arrows.clone(), q.framing.clone()), (vec![(0, 0)], vec![2]));
    assert!(DatumFile::parse(r#"{"vertices": ["x"], "framing": {"y": 1}}"#).unwrap().quiver().is_err());
}

#[test]
fn potential_cycles_are_closed() {
    for datum in [CartanDatum::sl2(), CartanDatum::type_a(2), CartanDatum::type_a(3), CartanDatum::type_b2()] {
        let (q, w) = build_potential(&datum);
        w.validate(&q).unwrap();
        let r = datum.rank();
        // ordered adjacent pairs give distinct cycles; a non-adjacent pair
        // gives the 2-cycle twice, once from each order
        let pairs: Vec<(usize, usize)> =
            (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).filter(|&(i, j)| i != j).collect();
        let adjacent = pairs.iter().filter(|&&(i, j)| datum.c(i, j) != 0).count();
        assert_eq!(w.terms.len(), adjacent + (pairs.len() - adjacent) / 2);
        for (c, cy) in &w.terms {
            let expect = if cy.len() == 2 { 2 } else { 1 };
            assert_eq!(*c, qshuffle::exact_ring::Scalar::from_int(expect));
        }
        for &(i, j) in &pairs {
            let len = 2 + (-datum.c(i, j)) as usize;
            assert!(w.terms.iter().any(|(_, cy)| cy.len() == len));
        }
    }
}

#[test]
fn sl2_graded_quivers() {
    let sl2 = CartanDatum::sl2();
    let psi = EllWeight::fundamental(&sl2, 0, 0);
    let gq = quiver_from_x(&sl2, &XPoint::new(vec![vec![0, 0]]), &psi);
    assert_eq!((gq.labels.clone(), gq.dims.clone()), (vec![(0, 0)], vec![2]));
    assert!(gq.quiver.arrows.is_empty());
    assert_eq!(gq.quiver.framing, vec![1]);

    let gq = quiver_from_x(&sl2, &XPoint::new(vec![vec![0, -2]]), &psi);
    // arrows lower s by d_ii = 2
    assert_eq!(gq.quiver.arrows, vec![(gq.vertex(0, 0).unwrap(), gq.vertex(0, -2).unwrap())]);
    assert!(graded_potential(&gq, &sl2).is_zero());
}

#[test]
fn a2_graded_potential() {
    let a2 = CartanDatum::type_a(2);
    let none = EllWeight::new(Default::default(), Default::default());
    // (2,s) -> (1,s+1) -> (1,s-1) -> (2,s) closes at s = 0
    let x = XPoint::new(vec![vec![-1, 1], vec![0]]);
    let gq = quiver_from_x(&a2, &x, &none);
    let w = graded_potential(&gq, &a2);
    assert!(!w.is_zero());
    w.validate(&gq.quiver).unwrap();
    let sparse = quiver_from_x(&a2, &XPoint::new(vec![vec![1], vec![0]]), &none);
    assert!(graded_potential(&sparse, &a2).is_zero());
}

use proptest::prelude::*;

use qshuffle::exact_ring::linalg::{nullspace, rank, Echelon};
use qshuffle::exact_ring::residue::iterated_residue;
use qshuffle::exact_ring::sym::{color_groups, sym, sym_over_vandermonde, SymMode};
use qshuffle::exact_ring::{Factor, LaurentPoly, RationalExpr, Scalar, UPoly};

fn poly_scalar(cs: &[i64]) -> Scalar {
    Scalar::from_poly(UPoly::from_i64s(cs))
}

/// Rank of an integer matrix by fraction-free Bareiss elimination.
fn bareiss_rank(mut m: Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    let mut prev: i128 = 1;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        for i in r + 1..rows {
            for k in c + 1..cols {
                m[i][k] = (m[r][c] * m[i][k] - m[i][c] * m[r][k]) / prev;
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn eval_poly(cs: &[i64], q: i128) -> i128 {
    cs.iter().rev().fold(0i128, |acc, &c| acc * q + c as i128)
}

fn small_poly() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-2i64..=2, 1..=3)
}

fn laurent(dims: Vec<usize>) -> impl Strategy<Value = LaurentPoly> {
    let n: usize = dims.iter().sum();
    prop::collection::vec((prop::collection::vec(-2i32..=2, n), -3i64..=3, -1i64..=1), 0..4).prop_map(move |terms| {
        let mut p = LaurentPoly::zero(&dims);
        for (e, c, k) in terms {
            p.add_term(e, &(&Scalar::from_int(c) * &Scalar::q_pow(k)));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scalar_field_axioms(a in small_poly(), b in small_poly(), c in small_poly(), k in -2i64..=2) {
        let a = &poly_scalar(&a) * &Scalar::q_pow(k);
        let b = poly_scalar(&b);
        let c = poly_scalar(&c);
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            let binv = b.inv().unwrap();
            prop_assert_eq!(&(&a * &b) * &binv, a.clone());
            prop_assert!((&b * &binv).is_one());
        }
    }

    #[test]
    fn laurent_ring_axioms(f in laurent(vec![1, 1]), g in laurent(vec![1, 1]), h in laurent(vec![1, 1])) {
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        prop_assert_eq!(f.add(&g).mul(&h), f.mul(&h).add(&g.mul(&h)));
        prop_assert!(f.sub(&f).is_zero());
    }

    #[test]
    fn json_round_trip(f in laurent(vec![2, 1])) {
        let text = serde_json::to_string(&f).unwrap();
        let back: LaurentPoly = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn symmetrization_is_symmetric(f in laurent(vec![2, 1])) {
        let s = sym(&f, &color_groups(&[2, 1]), SymMode::Sum).unwrap();
        prop_assert!(s.is_color_symmetric());
        prop_assert_eq!(sym(&s, &color_groups(&[2, 1]), SymMode::Average).unwrap(), s);
    }

    #[test]
    fn vandermonde_quotient_of_antisymmetric(f in laurent(vec![3])) {
        // Sym[V f / V] = Sym[f] for any f
        let v = qshuffle::exact_ring::sym::vandermonde(&[3]);
        let lhs = sym_over_vandermonde(&v.mul(&f)).unwrap();
        prop_assert_eq!(lhs, sym(&f, &color_groups(&[3]), SymMode::Sum).unwrap());
    }

    #[test]
    fn rank_matches_specialized_oracle(
        entries in prop::collection::vec(prop::collection::vec(prop::collection::vec(-2i64..=2, 1..=3), 4), 1..=4),
        dup in any::<bool>(),
    ) {
        let mut entries = entries;
        if dup && entries.len() > 1 {
            // force a dependency: last row = first row + second row (as polynomials)
            let a = entries[0].clone();
            let b = entries[1].clone();
            let sum: Vec<Vec<i64>> = a.iter().zip(&b).map(|(x, y)| {
                let n = x.len().max(y.len());
                (0..n).map(|i| x.get(i).copied().unwrap_or(0) + y.get(i).copied().unwrap_or(0)).collect()
            }).collect();
            let last = entries.len() - 1;
            entries[last] = sum;
        }
        let m: Vec<Vec<Scalar>> = entries.iter().map(|r| r.iter().map(|c| poly_scalar(c)).collect()).collect();
        // minors have degree <= 8, so some q in 3..=11 avoids all their roots
        let oracle = (3..=11i128)
            .map(|q| bareiss_rank(entries.iter().map(|r| r.iter().map(|c| eval_poly(c, q)).collect()).collect()))
            .max()
            .unwrap();
        prop_assert_eq!(rank(&m, 4), oracle);
        let ns = nullspace(&m, 4);
        prop_assert_eq!(ns.len(), 4 - oracle);
        for x in &ns {
            for r in &m {
                let dot = r.iter().zip(x).fold(Scalar::zero(), |acc, (a, b)| &acc + &(a * b));
                prop_assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn echelon_contains_span(
        rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 5), 1..=4),
        coefs in prop::collection::vec(-3i64..=3, 4),
    ) {
        let m: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&c| Scalar::from_int(c)).collect()).collect();
        let mut e = Echelon::new(5);
        for r in &m {
            e.insert(r);
        }
        let mut comb = vec![Scalar::zero(); 5];
        for (r, &c) in m.iter().zip(&coefs) {
            for (k, v) in r.iter().enumerate() {
                comb[k] = &comb[k] + &(v * &Scalar::from_int(c));
            }
        }
        prop_assert!(e.contains(&comb));
        prop_assert!(!e.insert(&comb));
    }

    #[test]
    fn one_variable_residue(k in -4i32..=5, m in 1u32..=4, s in -2i64..=2) {
        // Res_{z = q^s} z^k / (z - q^s)^m = binom(k, m-1) q^{s (k - m + 1)}
        let numer = LaurentPoly::monomial(&[1], vec![k], Scalar::one());
        let expr = RationalExpr::from_signed(numer, &[(Factor::Linear { var: 0, shift: s }, m as i32)]);
        let got = iterated_residue(&expr, &[(0, s)]).unwrap();
        let expect = &Scalar::binomial(k as i64, m - 1) * &Scalar::q_pow(s * (k as i64 - m as i64 + 1));
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn separable_two_variable_residue(
        a in -3i32..=3, b in -3i32..=3, m in 1u32..=3, p in 1u32..=3, s in -2i64..=2, t in -2i64..=2, r in 0u32..=2,
    ) {
        // numerator (z2 - z1)^r expanded by hand into separable terms
        let single = |k: i32, m: u32, s: i64| &Scalar::binomial(k as i64, m - 1) * &Scalar::q_pow(s * (k as i64 - m as i64 + 1));
        let mut expect = Scalar::zero();
        for j in 0..=r {
            let c = &Scalar::binomial(r as i64, j) * &Scalar::from_int(if (r - j) % 2 == 0 { 1 } else { -1 });
            // z2^j z1^{r-j}
            let term = &single(a + (r - j) as i32, m, s) * &single(b + j as i32, p, t);
            expect = &expect + &(&c * &term);
        }
        let dims = [2];
        let diff = Factor::Difference { b: 1, a: 0, r: 0 }.to_poly(&dims);
        let numer = LaurentPoly::monomial(&dims, vec![a, b], Scalar::one()).mul(&diff.pow(r));
        let expr = RationalExpr::from_signed(
            numer,
            &[(Factor::Linear { var: 0, shift: s }, m as i32), (Factor::Linear { var: 1, shift: t }, p as i32)],
        );
        prop_assert_eq!(iterated_residue(&expr, &[(0, s), (1, t)]).unwrap(), expect);
    }
}

#[test]
fn inner_pole_feeds_outer_residue() {
    // Res_{z2=1} Res_{z1=1} 1 / ((z1 - 1)(z2 - z1)) = Res_{z2=1} 1/(z2 - 1) = 1
    let dims = [2];
    let expr = RationalExpr::from_signed(
        LaurentPoly::one(&dims),
        &[(Factor::Linear { var: 0, shift: 0 }, 1), (Factor::Difference { b: 1, a: 0, r: 0 }, 1)],
    );
    assert!(iterated_residue(&expr, &[(0, 0), (1, 0)]).unwrap().is_one());
}

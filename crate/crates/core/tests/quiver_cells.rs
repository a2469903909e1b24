use proptest::prelude::*;

use qshuffle::quiver_cells::{
    ambient_dimension, cell_dimension, collection_sets, dimension_histogram, enumerate_acceptable, grassmannian_euler,
    nilpotent_cell_dimension, orderings, tower_rank_product, PathOrder,
};
use qshuffle::root_data::Quiver;
use qshuffle::theta_ideals::{theta_intersected, theta_ordered, Window};

fn quiver_and_dims() -> impl Strategy<Value = (Quiver, Vec<usize>)> {
    (1usize..=2)
        .prop_flat_map(|k| {
            (
                Just(k),
                prop::collection::vec((0..k, 0..k), 0..=2),
                prop::collection::vec(0u32..=2, k),
                prop::collection::vec(0usize..=2, k),
            )
        })
        .prop_filter("total dimension at most 3", |(_, _, _, n)| n.iter().sum::<usize>() <= 3)
        .prop_map(|(k, arrows, framing, n)| {
            let names = (0..k).map(|i| format!("v{i}")).collect();
            (Quiver::new(names, arrows, framing).unwrap(), n)
        })
}

/// Counts stable framed representations' cells by brute force over all
/// subsets of candidate paths: an independent enumeration of acceptable
/// collections as path sets.
fn brute_force_count(q: &Quiver, n: &[usize], order: PathOrder) -> usize {
    use qshuffle::quiver_cells::FramedPath;
    let total: usize = n.iter().sum();
    // every member of a collection has length < total
    let mut paths: Vec<FramedPath> = Vec::new();
    let mut frontier: Vec<FramedPath> = Vec::new();
    for (v, &m) in q.framing.iter().enumerate() {
        for s in 1..=m {
            frontier.push(FramedPath::origin(v, s));
        }
    }
    for _ in 0..total {
        let mut next = Vec::new();
        for p in &frontier {
            let h = p.head(q);
            for (e, &(t, _)) in q.arrows.iter().enumerate() {
                if t == h {
                    next.push(p.extend(e));
                }
            }
        }
        paths.append(&mut frontier);
        frontier = next;
    }
    paths.sort_by(|a, b| order.cmp(a, b));
    let mut count = 0;
    let len = paths.len();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        q: &Quiver,
        n: &[usize],
        paths: &[FramedPath],
        start: usize,
        chosen: &mut Vec<usize>,
        count: &mut usize,
        len: usize,
    ) {
        let total: usize = n.iter().sum();
        if chosen.len() == total {
            let mut heads = vec![0usize; n.len()];
            for &c in chosen.iter() {
                heads[paths[c].head(q)] += 1;
            }
            let closed = chosen.iter().all(|&c| match paths[c].prefix() {
                None => true,
                Some(pre) => chosen.iter().any(|&d| paths[d] == pre),
            });
            if heads == n && closed {
                *count += 1;
            }
            return;
        }
        for i in start..len {
            chosen.push(i);
            rec(q, n, paths, i + 1, chosen, count, len);
            chosen.pop();
        }
    }
    rec(q, n, &paths, 0, &mut chosen, &mut count, len);
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn cells_are_acceptable_and_order_independent((q, n) in quiver_and_dims()) {
        let a = enumerate_acceptable(&q, &n, PathOrder::LengthLex);
        let b = enumerate_acceptable(&q, &n, PathOrder::ReversedSlot);
        prop_assert!(a.iter().all(|s| s.is_acceptable(&q, PathOrder::LengthLex)));
        prop_assert!(b.iter().all(|s| s.is_acceptable(&q, PathOrder::ReversedSlot)));
        prop_assert_eq!(a.len(), b.len());
        prop_assert_eq!(collection_sets(&a), collection_sets(&b));
        prop_assert_eq!(a.len(), brute_force_count(&q, &n, PathOrder::LengthLex));
        prop_assert_eq!(grassmannian_euler(&q, &n), a.len());
    }

    #[test]
    fn cell_dimensions_are_bounded((q, n) in quiver_and_dims()) {
        let cells = enumerate_acceptable(&q, &n, PathOrder::LengthLex);
        let amb = ambient_dimension(&q, &n);
        for s in &cells {
            let d = cell_dimension(s, &q, PathOrder::LengthLex);
            prop_assert!(nilpotent_cell_dimension(s, &q, PathOrder::LengthLex) <= d);
            prop_assert!(d as i64 <= amb);
        }
        // the moduli space is smooth and irreducible: one open cell
        if !cells.is_empty() {
            let h = dimension_histogram(&cells, &q, PathOrder::LengthLex, false);
            let (&top, &k) = h.iter().next_back().unwrap();
            prop_assert_eq!((top as i64, k), (amb, 1));
        }
    }

    #[test]
    fn quotient_dimension_is_cell_count((q, n) in quiver_and_dims()) {
        let count = enumerate_acceptable(&q, &n, PathOrder::LengthLex).len();
        prop_assert_eq!(theta_intersected(&q, &n, Window::Auto).unwrap().corank(), count);
    }

    #[test]
    fn ordered_quotient_is_tower_product((q, n) in quiver_and_dims()) {
        for o in orderings(&n) {
            let corank = theta_ordered(&q, &o, Window::Auto).unwrap().corank() as u64;
            prop_assert_eq!(corank, tower_rank_product(&q, &o));
        }
    }
}

#[test]
fn nilpotent_jordan_cells() {
    // Jordan quiver, one framing: the nilpotent locus is a point
    let q = Quiver::one_vertex(1, 1);
    for n in 1..=4 {
        let cells = enumerate_acceptable(&q, &[n], PathOrder::LengthLex);
        assert_eq!(cells.len(), 1);
        assert_eq!(nilpotent_cell_dimension(&cells[0], &q, PathOrder::LengthLex), 0);
        assert_eq!(cell_dimension(&cells[0], &q, PathOrder::LengthLex), n);
    }
}

#[test]
fn two_loops_count_catalan_like() {
    // one framing, two loops: collections are binary words closed under
    // prefixes, i.e. rooted plane binary trees with n nodes (Catalan)
    let q = Quiver::one_vertex(1, 2);
    let counts: Vec<usize> = (0..=4).map(|n| enumerate_acceptable(&q, &[n], PathOrder::LengthLex).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 5, 14]);
}

//! Framed paths, acceptable collections and the cell decomposition of stable
//! framed quiver moduli.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::par;
use crate::root_data::Quiver;

/// `e_k ... e_1 o_{i,l}`: a framing origin followed by arrows. `arrows` is
/// stored in traversal order `e_1, ..., e_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FramedPath {
    pub vertex: usize,
    /// 1-based framing slot.
    pub slot: u32,
    pub arrows: Vec<usize>,
}

impl FramedPath {
    pub fn origin(vertex: usize, slot: u32) -> Self {
        FramedPath { vertex, slot, arrows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_origin(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn head(&self, quiver: &Quiver) -> usize {
        self.arrows.last().map_or(self.vertex, |&e| quiver.head(e))
    }

    /// `e * self`.
    pub fn extend(&self, e: usize) -> Self {
        let mut p = self.clone();
        p.arrows.push(e);
        p
    }

    /// The path with its last arrow removed.
    pub fn prefix(&self) -> Option<Self> {
        if self.arrows.is_empty() {
            return None;
        }
        let mut p = self.clone();
        p.arrows.pop();
        Some(p)
    }

    pub fn display(&self, quiver: &Quiver) -> String {
        let mut s = String::new();
        for &e in self.arrows.iter().rev() {
            s.push_str(&format!("e{e}."));
        }
        s.push_str(&format!("o[{},{}]", quiver.vertices[self.vertex], self.slot));
        s
    }
}

/// A total order on framed paths with `p < e p` for every arrow `e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum PathOrder {
    /// Length, then origin vertex, then slot, then arrow ids lexicographically.
    #[default]
    LengthLex,
    /// Like `LengthLex` but with framing slots compared in reverse.
    ReversedSlot,
}

impl PathOrder {
    pub fn cmp(&self, a: &FramedPath, b: &FramedPath) -> Ordering {
        let slot = match self {
            PathOrder::LengthLex => a.slot.cmp(&b.slot),
            PathOrder::ReversedSlot => b.slot.cmp(&a.slot),
        };
        a.len().cmp(&b.len()).then(a.vertex.cmp(&b.vertex)).then(slot).then_with(|| a.arrows.cmp(&b.arrows))
    }

    pub fn less(&self, a: &FramedPath, b: &FramedPath) -> bool {
        self.cmp(a, b) == Ordering::Less
    }
}

pub fn default_path_order() -> PathOrder {
    PathOrder::LengthLex
}

/// Paths `p_1 < ... < p_n`, each an origin or a one-arrow extension of an
/// earlier member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AcceptableCollection {
    pub paths: Vec<FramedPath>,
}

impl AcceptableCollection {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// The ordering `i_1, ..., i_n` of heads.
    pub fn ordering(&self, quiver: &Quiver) -> Vec<usize> {
        self.paths.iter().map(|p| p.head(quiver)).collect()
    }

    pub fn contains(&self, p: &FramedPath) -> bool {
        self.paths.contains(p)
    }

    /// Checks sortedness and acceptability under `order`.
    pub fn is_acceptable(&self, quiver: &Quiver, order: PathOrder) -> bool {
        for (b, p) in self.paths.iter().enumerate() {
            if b > 0 && !order.less(&self.paths[b - 1], p) {
                return false;
            }
            match p.prefix() {
                None => {
                    if p.slot == 0 || p.slot > quiver.framing[p.vertex] {
                        return false;
                    }
                }
                Some(pre) => {
                    if !self.paths[..b].contains(&pre) {
                        return false;
                    }
                    let e = *p.arrows.last().unwrap();
                    if quiver.tail(e) != pre.head(quiver) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn search(
    quiver: &Quiver,
    order: PathOrder,
    chosen: &mut Vec<FramedPath>,
    remaining: &mut [usize],
    left: usize,
    out: &mut Vec<AcceptableCollection>,
) {
    if left == 0 {
        out.push(AcceptableCollection { paths: chosen.clone() });
        return;
    }
    for c in candidates(quiver, order, chosen, remaining) {
        let h = c.head(quiver);
        remaining[h] -= 1;
        chosen.push(c);
        search(quiver, order, chosen, remaining, left - 1, out);
        chosen.pop();
        remaining[h] += 1;
    }
}

/// Paths that may follow `chosen`: unused origins and one-arrow extensions
/// of members, strictly above the last member, with head budget left.
fn candidates(quiver: &Quiver, order: PathOrder, chosen: &[FramedPath], remaining: &[usize]) -> Vec<FramedPath> {
    let mut out: Vec<FramedPath> = Vec::new();
    let last = chosen.last();
    let ok =
        |p: &FramedPath| remaining[p.head(quiver)] > 0 && last.is_none_or(|l| order.less(l, p)) && !chosen.contains(p);
    for (v, &m) in quiver.framing.iter().enumerate() {
        for slot in 1..=m {
            let p = FramedPath::origin(v, slot);
            if ok(&p) {
                out.push(p);
            }
        }
    }
    for p in chosen {
        let h = p.head(quiver);
        for (e, &(t, _)) in quiver.arrows.iter().enumerate() {
            if t == h {
                let ep = p.extend(e);
                if ok(&ep) {
                    out.push(ep);
                }
            }
        }
    }
    out.sort_by(|a, b| order.cmp(a, b));
    out.dedup();
    out
}

fn cmp_collections(order: PathOrder, a: &AcceptableCollection, b: &AcceptableCollection) -> Ordering {
    for (p, q) in a.paths.iter().zip(&b.paths) {
        match order.cmp(p, q) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// All acceptable collections with head counts `n`, sorted
/// lexicographically under `order`.
pub fn enumerate_acceptable(quiver: &Quiver, n: &[usize], order: PathOrder) -> Vec<AcceptableCollection> {
    assert_eq!(n.len(), quiver.num_vertices(), "dimension vector length");
    let total: usize = n.iter().sum();
    if total == 0 {
        return vec![AcceptableCollection { paths: vec![] }];
    }
    let remaining = n.to_vec();
    // the first member is always an origin; branch on it in parallel
    let firsts = candidates(quiver, order, &[], &remaining);
    let mut out: Vec<AcceptableCollection> = par::map(&firsts, |first| {
        let mut rem = remaining.clone();
        rem[first.head(quiver)] -= 1;
        let mut chosen = vec![first.clone()];
        let mut acc = Vec::new();
        search(quiver, order, &mut chosen, &mut rem, total - 1, &mut acc);
        acc
    })
    .into_iter()
    .flatten()
    .collect();
    out.sort_by(|a, b| cmp_collections(order, a, b));
    out
}

fn cell_dim_impl(s: &AcceptableCollection, quiver: &Quiver, order: PathOrder, nilpotent: bool) -> usize {
    let mut count = 0;
    // framing coordinates: an unused origin is a combination of smaller
    // members at its vertex; the arrow scaling gives weight -len(p_b)
    for (v, &m) in quiver.framing.iter().enumerate() {
        for slot in 1..=m {
            let o = FramedPath::origin(v, slot);
            if s.contains(&o) {
                continue;
            }
            count += s
                .paths
                .iter()
                .filter(|pb| pb.head(quiver) == v && order.less(pb, &o) && (!nilpotent || pb.is_origin()))
                .count();
        }
    }
    for pa in &s.paths {
        let h = pa.head(quiver);
        for (e, &(t, he)) in quiver.arrows.iter().enumerate() {
            if t != h {
                continue;
            }
            let ep = pa.extend(e);
            if s.contains(&ep) {
                continue;
            }
            for pb in &s.paths {
                if pb.head(quiver) != he || !order.less(pb, &ep) {
                    continue;
                }
                if nilpotent && pb.len() != pa.len() + 1 {
                    continue;
                }
                count += 1;
            }
        }
    }
    count
}

/// Dimension of the affine cell indexed by `s`: the number of triples
/// `(a, b, e)` with `tail(e) = head(p_a)`, `head(p_b) = head(e)`,
/// `e p_a` not in `s` and `e p_a > p_b`, plus the framing coordinates
/// `(o, b)` with `o` an origin not in `s`, `head(p_b) = head(o)`, `o > p_b`.
pub fn cell_dimension(s: &AcceptableCollection, quiver: &Quiver, order: PathOrder) -> usize {
    cell_dim_impl(s, quiver, order, false)
}

/// Dimension of the nilpotent cell: the coordinates of [`cell_dimension`]
/// of scaling weight zero (`len(p_b) = len(p_a) + 1` for arrows, `p_b` an
/// origin for framing).
pub fn nilpotent_cell_dimension(s: &AcceptableCollection, quiver: &Quiver, order: PathOrder) -> usize {
    cell_dim_impl(s, quiver, order, true)
}

/// Histogram `dimension -> number of cells`.
pub fn dimension_histogram(
    cells: &[AcceptableCollection],
    quiver: &Quiver,
    order: PathOrder,
    nilpotent: bool,
) -> BTreeMap<usize, usize> {
    let dims = par::map(cells, |s| cell_dim_impl(s, quiver, order, nilpotent));
    let mut h = BTreeMap::new();
    for d in dims {
        *h.entry(d).or_insert(0) += 1;
    }
    h
}

/// Step rank `m_{i_b} + sum_{a<b} #arrows(i_a -> i_b) - #{a<b : i_a = i_b}`
/// of the tower of projective bundles, multiplied over `b`; zero when any
/// step rank is nonpositive.
pub fn tower_rank_product(quiver: &Quiver, ordering: &[usize]) -> u64 {
    let mut prod: u64 = 1;
    for (b, &ib) in ordering.iter().enumerate() {
        let mut r = quiver.framing[ib] as i64;
        for &ia in &ordering[..b] {
            r += quiver.arrow_count(ia, ib) as i64;
            if ia == ib {
                r -= 1;
            }
        }
        if r <= 0 {
            return 0;
        }
        prod *= r as u64;
    }
    prod
}

/// Euler characteristic of the nilpotent stable framed moduli: the number
/// of cells.
pub fn grassmannian_euler(quiver: &Quiver, n: &[usize]) -> usize {
    enumerate_acceptable(quiver, n, PathOrder::default()).len()
}

/// Upper bound `sum m_i n_i + sum_e n_t n_h - sum n_i^2` for cell dimensions.
pub fn ambient_dimension(quiver: &Quiver, n: &[usize]) -> i64 {
    let mut d: i64 = 0;
    for (i, &ni) in n.iter().enumerate() {
        d += quiver.framing[i] as i64 * ni as i64 - (ni * ni) as i64;
    }
    for &(t, h) in &quiver.arrows {
        d += (n[t] * n[h]) as i64;
    }
    d
}

/// All distinct orderings `i_1..i_n` with head counts `n`.
pub fn orderings(n: &[usize]) -> Vec<Vec<usize>> {
    fn rec(rem: &mut [usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem.iter().all(|&r| r == 0) {
            out.push(cur.clone());
            return;
        }
        for i in 0..rem.len() {
            if rem[i] > 0 {
                rem[i] -= 1;
                cur.push(i);
                rec(rem, cur, out);
                cur.pop();
                rem[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut n.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Distinct sets of paths across a list of collections, for comparing
/// different orders.
pub fn collection_sets(cells: &[AcceptableCollection]) -> BTreeSet<BTreeSet<FramedPath>> {
    cells.iter().map(|c| c.paths.iter().cloned().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_examples() {
        let o1 = FramedPath::origin(0, 1);
        let o2 = FramedPath::origin(0, 2);
        let eo1 = o1.extend(0);
        let ord = default_path_order();
        assert!(ord.less(&o1, &o2) && ord.less(&o2, &eo1));
        assert!(PathOrder::ReversedSlot.less(&o2, &o1));
    }

    #[test]
    fn grassmannian_count() {
        let q = Quiver::one_vertex(3, 0);
        let cells = enumerate_acceptable(&q, &[2], PathOrder::LengthLex);
        assert_eq!(cells.len(), 3);
        assert!(cells.iter().all(|c| c.is_acceptable(&q, PathOrder::LengthLex)));
        assert_eq!(enumerate_acceptable(&q, &[0], PathOrder::LengthLex).len(), 1);
    }

    #[test]
    fn jordan_cells() {
        let q = Quiver::one_vertex(1, 1);
        let one = enumerate_acceptable(&q, &[1], PathOrder::LengthLex);
        assert_eq!(one.len(), 1);
        assert_eq!(cell_dimension(&one[0], &q, PathOrder::LengthLex), 1);
        assert_eq!(nilpotent_cell_dimension(&one[0], &q, PathOrder::LengthLex), 0);
        let two = enumerate_acceptable(&q, &[2], PathOrder::LengthLex);
        assert_eq!(two.len(), 1);
        assert_eq!(cell_dimension(&two[0], &q, PathOrder::LengthLex), 2);
        let three = enumerate_acceptable(&q, &[3], PathOrder::LengthLex);
        assert_eq!(three[0].paths.iter().map(|p| p.len()).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn grassmannian_cells_are_schubert_cells() {
        // Poincare polynomial of Gr(n, m) is the Gaussian binomial
        fn gaussian(m: usize, n: usize) -> Vec<usize> {
            let mut rows = vec![vec![vec![1usize]; 1]; m + 1];
            for mm in 1..=m {
                let mut row = vec![vec![1usize]];
                for k in 1..=mm {
                    let a = if k < mm { rows[mm - 1][k].clone() } else { vec![0] };
                    let b = &rows[mm - 1][k - 1];
                    // [mm, k] = [mm-1, k] t^k + [mm-1, k-1]
                    let mut c = vec![0usize; (a.len() + k).max(b.len())];
                    for (i, x) in a.iter().enumerate() {
                        c[i + k] += x;
                    }
                    for (i, x) in b.iter().enumerate() {
                        c[i] += x;
                    }
                    while c.len() > 1 && c[c.len() - 1] == 0 {
                        c.pop();
                    }
                    row.push(c);
                }
                rows[mm] = row;
            }
            rows[m][n].clone()
        }
        for m in 1..=5u32 {
            let q = Quiver::one_vertex(m, 0);
            for n in 0..=m as usize {
                for order in [PathOrder::LengthLex, PathOrder::ReversedSlot] {
                    let cells = enumerate_acceptable(&q, &[n], order);
                    let h = dimension_histogram(&cells, &q, order, false);
                    let top = *h.keys().next_back().unwrap();
                    let poly: Vec<usize> = (0..=top).map(|k| h.get(&k).copied().unwrap_or(0)).collect();
                    assert_eq!(poly, gaussian(m as usize, n), "m={m} n={n}");
                    assert_eq!(h, dimension_histogram(&cells, &q, order, true));
                }
            }
        }
    }

    #[test]
    fn single_top_cell_of_ambient_dimension() {
        let quivers = [
            (Quiver::one_vertex(1, 1), vec![3]),
            (Quiver::one_vertex(2, 1), vec![2]),
            (Quiver::new(vec!["a".into(), "b".into()], vec![(0, 1)], vec![1, 1]).unwrap(), vec![1, 2]),
            (Quiver::new(vec!["a".into(), "b".into()], vec![(0, 1), (1, 0)], vec![1, 0]).unwrap(), vec![2, 1]),
        ];
        for (q, n) in quivers {
            let cells = enumerate_acceptable(&q, &n, PathOrder::LengthLex);
            let h = dimension_histogram(&cells, &q, PathOrder::LengthLex, false);
            let (&top, &k) = h.iter().next_back().unwrap();
            assert_eq!((top as i64, k), (ambient_dimension(&q, &n), 1), "{:?} {n:?}", q.arrows);
        }
    }

    #[test]
    fn tower_examples() {
        assert_eq!(tower_rank_product(&Quiver::one_vertex(3, 0), &[0, 0]), 6);
        assert_eq!(tower_rank_product(&Quiver::one_vertex(1, 1), &[0, 0]), 1);
        assert_eq!(tower_rank_product(&Quiver::one_vertex(0, 0), &[0]), 0);
    }

    #[test]
    fn orderings_of_dimension_vector() {
        assert_eq!(orderings(&[2, 1]), vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(orderings(&[0]), vec![Vec::<usize>::new()]);
    }
}

//! Cartan data, the zeta factors of the shuffle product, quivers with
//! potential and their graded versions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_ring::{Factor, LaurentPoly, RationalExpr, Scalar};
use crate::shuffle_mod::{EllWeight, XPoint};

/// A symmetrized Cartan matrix `(d_ij)` on an ordered vertex set. The vertex
/// order is the total order used by the zeta factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanDatum {
    names: Vec<String>,
    d: Vec<Vec<i64>>,
}

fn gcd(a: i64, b: i64) -> i64 {
    num_integer::Integer::gcd(&a, &b)
}

/// Sign of the determinant of an integer matrix, by exact Bareiss elimination.
fn det_sign(m: &[Vec<i64>]) -> i32 {
    use num_bigint::BigInt;
    use num_traits::{Signed, Zero};
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut prev = BigInt::from(1);
    let mut sign = 1;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return 0;
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return 1;
    }
    if a[n - 1][n - 1].is_negative() {
        -sign
    } else {
        sign
    }
}

impl CartanDatum {
    pub fn new(names: Vec<String>, d: Vec<Vec<i64>>) -> Result<Self> {
        let n = names.len();
        if d.len() != n || d.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDatum(format!("d must be a {n}x{n} matrix")));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != n {
            return Err(Error::InvalidDatum("vertex names must be distinct".into()));
        }
        let mut g = 0;
        for i in 0..n {
            if d[i][i] <= 0 {
                return Err(Error::InvalidDatum(format!("d_{{{0}{0}}} must be positive", names[i])));
            }
            g = gcd(g, d[i][i]);
            for j in 0..n {
                if d[i][j] != d[j][i] {
                    return Err(Error::InvalidDatum("d must be symmetric".into()));
                }
                if i != j {
                    if d[i][j] > 0 {
                        return Err(Error::InvalidDatum("off-diagonal entries must be <= 0".into()));
                    }
                    if (2 * d[i][j]) % d[i][i] != 0 {
                        return Err(Error::InvalidDatum(format!(
                            "c_{{{}{}}} = 2 d_ij / d_ii is not an integer",
                            names[i], names[j]
                        )));
                    }
                }
            }
        }
        if n > 0 && g != 2 {
            return Err(Error::InvalidDatum(format!("gcd of the diagonal is {g}, expected 2")));
        }
        Ok(CartanDatum { names, d })
    }

    /// Type `A_1`, i.e. `sl_2`.
    pub fn sl2() -> Self {
        Self::new(vec!["1".into()], vec![vec![2]]).unwrap()
    }

    /// Type `A_r` with vertices `1..=r` in path order.
    pub fn type_a(r: usize) -> Self {
        let mut d = vec![vec![0; r]; r];
        for i in 0..r {
            d[i][i] = 2;
            if i + 1 < r {
                d[i][i + 1] = -1;
                d[i + 1][i] = -1;
            }
        }
        Self::new((1..=r).map(|i| i.to_string()).collect(), d).unwrap()
    }

    /// Type `B_2` with the short root second (`c_12 = -1`, `c_21 = -2`).
    pub fn type_b2() -> Self {
        Self::new(vec!["1".into(), "2".into()], vec![vec![4, -2], vec![-2, 2]]).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// A vertex given by name, or by index when no name matches.
    pub fn resolve_vertex(&self, v: &serde_json::Value) -> Result<usize> {
        let name = vertex_name(v)?;
        if let Some(i) = self.index_of(&name) {
            return Ok(i);
        }
        match v.as_u64() {
            Some(i) if (i as usize) < self.rank() => Ok(i as usize),
            _ => Err(Error::Parse(format!("unknown vertex {v}"))),
        }
    }

    pub fn d(&self, i: usize, j: usize) -> i64 {
        self.d[i][j]
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.d
    }

    /// `c_ij = 2 d_ij / d_ii`.
    pub fn c(&self, i: usize, j: usize) -> i64 {
        2 * self.d[i][j] / self.d[i][i]
    }

    /// Positive definiteness of `(d_ij)` by leading principal minors.
    pub fn is_finite_type(&self) -> bool {
        (1..=self.rank()).all(|k| {
            let minor: Vec<Vec<i64>> = self.d[..k].iter().map(|r| r[..k].to_vec()).collect();
            det_sign(&minor) > 0
        })
    }

    pub fn is_simply_laced(&self) -> bool {
        (0..self.rank()).all(|i| self.d[i][i] == 2)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.names,
            "d": self.d,
            "finite_type": self.is_finite_type(),
            "simply_laced": self.is_simply_laced(),
            "c": (0..self.rank()).map(|i| (0..self.rank()).map(|j| self.c(i, j)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// `zeta_ij(x)` as a rational expression in one formal variable `x`:
/// `q^{-d_ij} - x` for `i < j`, `(q^{-d_ij} - x)/(1 - x)` for `i = j`,
/// `1 - q^{-d_ij} x^{-1}` for `i > j`.
pub fn zeta(datum: &CartanDatum, i: usize, j: usize) -> RationalExpr {
    let dims = [1];
    let x = LaurentPoly::var(&dims, 0);
    let c = LaurentPoly::constant(&dims, Scalar::q_pow(-datum.d(i, j)));
    match i.cmp(&j) {
        std::cmp::Ordering::Less => RationalExpr::new(c.sub(&x)),
        // (q^-d - x)/(1 - x) = (x - q^-d)/(x - 1)
        std::cmp::Ordering::Equal => {
            RationalExpr { numer: x.sub(&c), denom: vec![(Factor::Linear { var: 0, shift: 0 }, 1)] }
        }
        std::cmp::Ordering::Greater => {
            let xinv = LaurentPoly::monomial(&dims, vec![-1], Scalar::q_pow(-datum.d(i, j)));
            RationalExpr::new(LaurentPoly::one(&dims).sub(&xinv))
        }
    }
}

/// `zeta_ij(z_b / z_a)` over flat variables `b`, `a`, written as
/// `(z_b - q^{-d_ij} z_a) * unit` with `unit = -1/z_a`, `1/(z_b - z_a)` or
/// `1/z_b` for `i < j`, `i = j`, `i > j`. Returns the numerator Laurent
/// polynomial and the optional denominator factor `z_b - z_a`.
pub fn zeta_ratio(
    datum: &CartanDatum,
    i: usize,
    j: usize,
    dims: &[usize],
    b: usize,
    a: usize,
) -> (LaurentPoly, Option<Factor>) {
    let lin = Factor::Difference { b, a, r: -datum.d(i, j) }.to_poly(dims);
    let n: usize = dims.iter().sum();
    match i.cmp(&j) {
        std::cmp::Ordering::Less => {
            let mut e = vec![0; n];
            e[a] = -1;
            (lin.mul_monomial(&e, &Scalar::from_int(-1)), None)
        }
        std::cmp::Ordering::Equal => (lin, Some(Factor::Difference { b, a, r: 0 })),
        std::cmp::Ordering::Greater => {
            let mut e = vec![0; n];
            e[b] = -1;
            (lin.mul_monomial(&e, &Scalar::one()), None)
        }
    }
}

/// A directed multigraph with framing; arrow ids are list positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: Vec<String>,
    /// `(tail, head)` pairs.
    pub arrows: Vec<(usize, usize)>,
    pub framing: Vec<u32>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<(usize, usize)>, framing: Vec<u32>) -> Result<Self> {
        let n = vertices.len();
        if framing.len() != n {
            return Err(Error::InvalidQuiver(format!("framing has {} entries for {n} vertices", framing.len())));
        }
        if let Some(&(t, h)) = arrows.iter().find(|&&(t, h)| t >= n || h >= n) {
            return Err(Error::InvalidQuiver(format!("arrow ({t}, {h}) has an endpoint outside 0..{n}")));
        }
        Ok(Quiver { vertices, arrows, framing })
    }

    /// One vertex with framing `m` and `loops` loops.
    pub fn one_vertex(m: u32, loops: usize) -> Self {
        Quiver { vertices: vec!["1".into()], arrows: vec![(0, 0); loops], framing: vec![m] }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn tail(&self, e: usize) -> usize {
        self.arrows[e].0
    }

    pub fn head(&self, e: usize) -> usize {
        self.arrows[e].1
    }

    /// Number of arrows `i -> j`.
    pub fn arrow_count(&self, i: usize, j: usize) -> usize {
        self.arrows.iter().filter(|&&(t, h)| t == i && h == j).count()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|n| n == name)
    }
}

/// JSON input shared by Cartan data and quivers:
/// `{"vertices": [...], "d": [[...]], "arrows": [[tail, head], ...], "framing": {...}}`.
/// Arrow endpoints may be vertex names or indices.
#[derive(Clone, Debug, Serialize, Deserialize, Default)]
pub struct DatumFile {
    pub vertices: Vec<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrows: Option<Vec<[serde_json::Value; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub framing: Option<BTreeMap<String, u32>>,
}

fn vertex_name(v: &serde_json::Value) -> Result<String> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        _ => Err(Error::Parse(format!("bad vertex name {v}"))),
    }
}

impl DatumFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn names(&self) -> Result<Vec<String>> {
        self.vertices.iter().map(vertex_name).collect()
    }

    pub fn cartan(&self) -> Result<CartanDatum> {
        let d = self.d.clone().ok_or_else(|| Error::Parse("missing field \"d\"".into()))?;
        CartanDatum::new(self.names()?, d)
    }

    pub fn quiver(&self) -> Result<Quiver> {
        let names = self.names()?;
        let find = |v: &serde_json::Value| -> Result<usize> {
            let s = vertex_name(v)?;
            if let Some(i) = names.iter().position(|n| *n == s) {
                return Ok(i);
            }
            match v {
                serde_json::Value::Number(n) => n
                    .as_u64()
                    .map(|k| k as usize)
                    .filter(|&k| k < names.len())
                    .ok_or_else(|| Error::InvalidQuiver(format!("unknown vertex {v}"))),
                _ => Err(Error::InvalidQuiver(format!("unknown vertex {v}"))),
            }
        };
        let mut arrows = Vec::new();
        for [t, h] in self.arrows.iter().flatten() {
            arrows.push((find(t)?, find(h)?));
        }
        let mut framing = vec![0; names.len()];
        for (k, &m) in self.framing.iter().flatten() {
            let i = names
                .iter()
                .position(|n| n == k)
                .ok_or_else(|| Error::InvalidQuiver(format!("framing at unknown vertex {k}")))?;
            framing[i] = m;
        }
        Quiver::new(names, arrows, framing)
    }
}

/// A linear combination of cycles, each a sequence of arrow ids in the order
/// they are traversed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Potential {
    pub terms: Vec<(Scalar, Vec<usize>)>,
}

/// The rotation of a cycle with lexicographically smallest arrow sequence.
pub fn canonical_rotation(cycle: &[usize]) -> Vec<usize> {
    (0..cycle.len().max(1))
        .map(|k| cycle[k.min(cycle.len())..].iter().chain(&cycle[..k.min(cycle.len())]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

impl Potential {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push_cycle(&mut self, cycle: Vec<usize>) {
        let c = canonical_rotation(&cycle);
        if let Some(t) = self.terms.iter_mut().find(|(_, cy)| *cy == c) {
            t.0 += &Scalar::one();
        } else {
            self.terms.push((Scalar::one(), c));
        }
    }

    /// Checks that every cycle is closed in `quiver`.
    pub fn validate(&self, quiver: &Quiver) -> Result<()> {
        for (_, cy) in &self.terms {
            for k in 0..cy.len() {
                let e = cy[k];
                let f = cy[(k + 1) % cy.len()];
                if e >= quiver.arrows.len() || f >= quiver.arrows.len() || quiver.head(e) != quiver.tail(f) {
                    return Err(Error::InvalidQuiver(format!("cycle {cy:?} is not closed")));
                }
            }
        }
        Ok(())
    }
}

/// The quiver with one arrow `i -> j` for every ordered pair (loops
/// included), arrow id `i * |I| + j`, and its potential
/// `sum_{i != j} (i -> j)(loop at i)^{-c_ij}(j -> i)`.
pub fn build_potential(datum: &CartanDatum) -> (Quiver, Potential) {
    let n = datum.rank();
    let mut arrows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            arrows.push((i, j));
        }
    }
    let quiver = Quiver { vertices: datum.names().to_vec(), arrows, framing: vec![0; n] };
    let id = |t: usize, h: usize| t * n + h;
    let mut w = Potential::default();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            // traversal order: j -> i, loops at i, i -> j
            let mut cycle = vec![id(j, i)];
            cycle.extend(std::iter::repeat_n(id(i, i), (-datum.c(i, j)) as usize));
            cycle.push(id(i, j));
            w.push_cycle(cycle);
        }
    }
    (quiver, w)
}

/// A quiver on finitely many vertices `(i, s)` with arrows
/// `(i, s) -> (j, s - d_ij)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedQuiver {
    pub quiver: Quiver,
    /// `(color, s)` label of each vertex, sorted.
    pub labels: Vec<(usize, i64)>,
    /// Dimension vector (zero unless built from an evaluation point).
    pub dims: Vec<usize>,
}

impl GradedQuiver {
    pub fn vertex(&self, i: usize, s: i64) -> Option<usize> {
        self.labels.binary_search(&(i, s)).ok()
    }
}

/// Graded quiver on `support` with framing `m_{i,s}` (absent keys mean 0).
pub fn build_graded_quiver(
    datum: &CartanDatum,
    support: &BTreeSet<(usize, i64)>,
    framing: &BTreeMap<(usize, i64), u32>,
) -> GradedQuiver {
    let labels: Vec<(usize, i64)> = support.iter().copied().collect();
    let mut arrows = Vec::new();
    for (v, &(i, s)) in labels.iter().enumerate() {
        for j in 0..datum.rank() {
            if let Ok(w) = labels.binary_search(&(j, s - datum.d(i, j))) {
                arrows.push((v, w));
            }
        }
    }
    let vertices = labels.iter().map(|&(i, s)| format!("{}@{}", datum.names()[i], s)).collect();
    let fr = labels.iter().map(|k| framing.get(k).copied().unwrap_or(0)).collect();
    GradedQuiver { quiver: Quiver { vertices, arrows, framing: fr }, dims: vec![0; labels.len()], labels }
}

/// The graded quiver attached to an evaluation point: one vertex per
/// distinct `(i, s)` with `x_{ia} = q^s`, dimension = multiplicity, framing
/// `m_{i,s}`.
pub fn quiver_from_x(datum: &CartanDatum, x: &XPoint, m: &EllWeight) -> GradedQuiver {
    let mut mult: BTreeMap<(usize, i64), usize> = BTreeMap::new();
    for (i, ss) in x.entries.iter().enumerate() {
        for &s in ss {
            *mult.entry((i, s)).or_insert(0) += 1;
        }
    }
    let support: BTreeSet<(usize, i64)> = mult.keys().copied().collect();
    let mut gq = build_graded_quiver(datum, &support, &m.m);
    gq.dims = gq.labels.iter().map(|k| mult[k]).collect();
    gq
}

/// The instantiated cycles
/// `(j,s) -> (i,s-d_ij) -> ... loops ... -> (i,s+d_ij) -> (j,s)` for `i != j`.
pub fn graded_potential(gq: &GradedQuiver, datum: &CartanDatum) -> Potential {
    let arrow = |from: (usize, i64), to: (usize, i64)| -> Option<usize> {
        let t = gq.vertex(from.0, from.1)?;
        let h = gq.vertex(to.0, to.1)?;
        gq.quiver.arrows.iter().position(|&a| a == (t, h))
    };
    let mut w = Potential::default();
    for &(j, s) in &gq.labels {
        for i in 0..datum.rank() {
            if i == j {
                continue;
            }
            let dij = datum.d(i, j);
            let dii = datum.d(i, i);
            let mut cycle = Vec::new();
            let mut cur = (i, s - dij);
            let Some(first) = arrow((j, s), cur) else { continue };
            cycle.push(first);
            let mut ok = true;
            for _ in 0..(-datum.c(i, j)) {
                let next = (i, cur.1 - dii);
                match arrow(cur, next) {
                    Some(e) => cycle.push(e),
                    None => {
                        ok = false;
                        break;
                    }
                }
                cur = next;
            }
            if !ok {
                continue;
            }
            debug_assert_eq!(cur, (i, s + dij));
            match arrow(cur, (j, s)) {
                Some(e) => cycle.push(e),
                None => continue,
            }
            w.push_cycle(cycle);
        }
    }
    w
}

pub type Matrix = Vec<Vec<Scalar>>;

fn mat_mul(a: &Matrix, b: &Matrix, inner: usize) -> Matrix {
    let rows = a.len();
    let cols = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![Scalar::zero(); cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] += &(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    out
}

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect()).collect()
}

/// Checks whether every cyclic derivative of `potential` vanishes on `rep`.
/// `rep[e]` is the matrix of arrow `e`, of shape `dim(head) x dim(tail)`,
/// and `dims` is the dimension vector.
pub fn critical_check(quiver: &Quiver, dims: &[usize], potential: &Potential, rep: &[Matrix]) -> Result<bool> {
    potential.validate(quiver)?;
    if rep.len() != quiver.arrows.len() || dims.len() != quiver.num_vertices() {
        return Err(Error::ShapeMismatch(format!(
            "{} matrices for {} arrows, {} dimensions for {} vertices",
            rep.len(),
            quiver.arrows.len(),
            dims.len(),
            quiver.num_vertices()
        )));
    }
    for (e, m) in rep.iter().enumerate() {
        let (t, h) = quiver.arrows[e];
        if m.len() != dims[h] || m.iter().any(|r| r.len() != dims[t]) {
            return Err(Error::ShapeMismatch(format!("arrow {e} needs a {}x{} matrix", dims[h], dims[t])));
        }
    }
    // derivative with respect to each arrow, as a dim(tail) x dim(head) matrix
    let mut derivs: Vec<Matrix> =
        quiver.arrows.iter().map(|&(t, h)| vec![vec![Scalar::zero(); dims[h]]; dims[t]]).collect();
    for (coef, cy) in &potential.terms {
        let k = cy.len();
        for p in 0..k {
            let e = cy[p];
            // path e_{p+1}, ..., e_{p-1} (cyclically) from head(e) back to tail(e)
            let start = quiver.head(e);
            let mut acc = identity(dims[start]);
            let mut cur_dim = dims[start];
            for off in 1..k {
                let f = cy[(p + off) % k];
                acc = mat_mul(&rep[f], &acc, cur_dim);
                cur_dim = dims[quiver.head(f)];
            }
            for (r, row) in acc.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    derivs[e][r][c] += &(coef * v);
                }
            }
        }
    }
    Ok(derivs.iter().all(|m| m.iter().all(|r| r.iter().all(|c| c.is_zero()))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datum_validation() {
        assert!(CartanDatum::type_a(3).is_finite_type());
        assert!(CartanDatum::type_b2().is_finite_type());
        assert!(!CartanDatum::type_b2().is_simply_laced());
        let affine = CartanDatum::new(vec!["0".into(), "1".into()], vec![vec![2, -2], vec![-2, 2]]).unwrap();
        assert!(!affine.is_finite_type());
        assert!(CartanDatum::new(vec!["1".into()], vec![vec![4]]).is_err());
        assert!(CartanDatum::new(vec!["1".into(), "2".into()], vec![vec![2, 1], vec![1, 2]]).is_err());
        assert!(CartanDatum::new(vec!["1".into(), "2".into()], vec![vec![4, -1], vec![-1, 2]]).is_err());
    }

    #[test]
    fn potential_shapes() {
        let (q, w) = build_potential(&CartanDatum::type_a(2));
        assert_eq!(w.terms.len(), 2);
        assert!(w.terms.iter().all(|(_, c)| c.len() == 3));
        w.validate(&q).unwrap();
        let (_, w1) = build_potential(&CartanDatum::sl2());
        assert!(w1.is_zero());
        let (q2, wb) = build_potential(&CartanDatum::type_b2());
        wb.validate(&q2).unwrap();
        let mut lens: Vec<usize> = wb.terms.iter().map(|(_, c)| c.len()).collect();
        lens.sort();
        assert_eq!(lens, vec![3, 4]);
    }

    #[test]
    fn graded_arrows() {
        let sl2 = CartanDatum::sl2();
        let gq = build_graded_quiver(&sl2, &[(0, 0), (0, 2)].into_iter().collect(), &BTreeMap::new());
        assert_eq!(gq.quiver.arrows, vec![(1, 0)]);
        let a2 = CartanDatum::type_a(2);
        let gq = build_graded_quiver(&a2, &[(0, 0), (1, 1)].into_iter().collect(), &BTreeMap::new());
        assert_eq!(gq.quiver.arrows, vec![(0, 1)]);
    }

    #[test]
    fn rotation() {
        assert_eq!(canonical_rotation(&[3, 1, 2]), vec![1, 2, 3]);
        assert_eq!(canonical_rotation(&[]), Vec::<usize>::new());
    }
}

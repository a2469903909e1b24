//! Exact linear algebra over `Q(q)`.
//!
//! Rank and row bases use a fraction-free incremental echelon form over
//! `Z[q]`: each incoming row is scaled to clear denominators and reduced by
//! cross-multiplication, then divided by the gcd of its entries.

use super::scalar::Scalar;
use super::upoly::UPoly;

/// Clears denominators of a row of scalars.
fn to_integral(row: &[Scalar]) -> Vec<UPoly> {
    let mut l = UPoly::one();
    let mut int_l = num_bigint::BigInt::from(1);
    for c in row {
        let d = c.denom();
        if d.is_one() {
            continue;
        }
        let g = l.gcd_primitive(d);
        l = l.mul(&d.primitive_part().div_exact(&g).expect("gcd divides"));
        int_l = num_integer::Integer::lcm(&int_l, &d.content());
    }
    let l = l.primitive_part().scale(&int_l);
    row.iter()
        .map(|c| if c.is_zero() { UPoly::zero() } else { c.numer().mul(&l.div_exact(c.denom()).expect("lcm")) })
        .collect()
}

fn normalize_row(row: &mut [UPoly]) {
    let mut g = UPoly::zero();
    for c in row.iter() {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.primitive_part() } else { g.gcd_primitive(c) };
        if g.is_one() {
            break;
        }
    }
    // g is primitive, so the integer content survives the division below
    let mut ic = num_bigint::BigInt::from(0);
    for c in row.iter() {
        ic = num_integer::Integer::gcd(&ic, &c.content());
    }
    if !g.is_one() && !g.is_zero() {
        for c in row.iter_mut() {
            *c = c.div_exact(&g).expect("row gcd divides");
        }
    }
    if ic > num_bigint::BigInt::from(1) {
        for c in row.iter_mut() {
            *c = c.div_scalar_exact(&ic);
        }
    }
}

/// Fraction-free echelon form built one row at a time.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    /// (pivot column, row), sorted by pivot column.
    rows: Vec<(usize, Vec<UPoly>)>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.rows.iter().map(|(c, _)| *c).collect()
    }

    /// Reduces `row` against the current rows; returns the reduced row.
    fn reduce(&self, row: &[Scalar]) -> Vec<UPoly> {
        assert_eq!(row.len(), self.ncols, "row length");
        let mut v = to_integral(row);
        for (c, p) in &self.rows {
            if v[*c].is_zero() {
                continue;
            }
            let a = p[*c].clone();
            let b = v[*c].clone();
            // v <- a v - b p; p vanishes left of its pivot but v need not
            for k in 0..self.ncols {
                let lhs = if v[k].is_zero() { UPoly::zero() } else { a.mul(&v[k]) };
                let rhs = if p[k].is_zero() { UPoly::zero() } else { b.mul(&p[k]) };
                v[k] = lhs.sub(&rhs);
            }
            normalize_row(&mut v);
        }
        v
    }

    /// True when `row` lies in the span of the inserted rows.
    pub fn contains(&self, row: &[Scalar]) -> bool {
        self.reduce(row).iter().all(|c| c.is_zero())
    }

    /// Inserts `row`; returns whether it increased the rank.
    pub fn insert(&mut self, row: &[Scalar]) -> bool {
        let v = self.reduce(row);
        match v.iter().position(|c| !c.is_zero()) {
            None => false,
            Some(c) => {
                let at = self.rows.partition_point(|(pc, _)| *pc < c);
                self.rows.insert(at, (c, v));
                true
            }
        }
    }
}

/// Rank of a matrix given by rows.
pub fn rank(rows: &[Vec<Scalar>], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    for r in rows {
        e.insert(r);
        if e.is_full() {
            break;
        }
    }
    e.rank()
}

/// Indices of a maximal linearly independent subset of rows, chosen greedily
/// in the given order.
pub fn row_basis(rows: &[Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut e = Echelon::new(ncols);
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if e.is_full() {
            break;
        }
        if e.insert(r) {
            out.push(i);
        }
    }
    out
}

/// A basis of `{x : M x = 0}` via reduced row echelon form over `Q(q)`.
pub fn nullspace(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in &mut m[r][c..ncols] {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (pivot, row) = if i < r {
                    let (lo, hi) = m.split_at_mut(r);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = m.split_at_mut(i);
                    (&lo[r], &mut hi[0])
                };
                for (x, p) in row[c..ncols].iter_mut().zip(&pivot[c..ncols]) {
                    if !p.is_zero() {
                        *x -= &(&f * p);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![Scalar::zero(); ncols];
        x[free] = Scalar::one();
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = -&m[i][free];
        }
        basis.push(x);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn earlier_entries_are_rescaled() {
        let row = |e: &[(usize, i64)]| {
            let mut r = vec![Scalar::zero(); 4];
            for &(c, v) in e {
                r[c] = s(v);
            }
            r
        };
        let mut e = Echelon::new(4);
        assert!(e.insert(&row(&[(2, -1), (3, 1)])));
        assert!(e.insert(&row(&[(1, -1), (2, 1)])));
        assert!(!e.insert(&row(&[(1, 1), (2, -1)])));
        assert!(!e.insert(&row(&[(1, 2), (3, -2)])));
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn integer_rank() {
        let rows = vec![vec![s(1), s(2), s(3)], vec![s(2), s(4), s(6)], vec![s(0), s(1), s(1)]];
        assert_eq!(rank(&rows, 3), 2);
        assert_eq!(row_basis(&rows, 3), vec![0, 2]);
    }

    #[test]
    fn rank_over_function_field() {
        // [[1, q], [q, q^2]] is singular; [[1, q], [q, 1]] is not
        let q = Scalar::q_pow(1);
        let q2 = Scalar::q_pow(2);
        assert_eq!(rank(&[vec![s(1), q.clone()], vec![q.clone(), q2]], 2), 1);
        assert_eq!(rank(&[vec![s(1), q.clone()], vec![q, s(1)]], 2), 2);
        let inv = Scalar::q_pow(-1);
        let row = vec![inv.clone(), s(1)];
        assert_eq!(rank(&[row.clone(), vec![s(1), Scalar::q_pow(1)]], 2), 1);
    }

    #[test]
    fn nullspace_annihilates() {
        let q = Scalar::q_pow(1);
        let rows = vec![vec![s(1), q.clone(), s(0)], vec![s(0), s(1), &q + &s(1)]];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        for r in &rows {
            let dot = r.iter().zip(&ns[0]).fold(Scalar::zero(), |acc, (a, b)| &acc + &(a * b));
            assert!(dot.is_zero());
        }
    }
}

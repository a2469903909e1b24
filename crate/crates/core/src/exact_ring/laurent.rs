//! Multivariate Laurent polynomials with coefficients in `Q(q)`.
//!
//! Variables are colored: a dimension vector `dims` lists how many variables
//! each color has, and variables are stored flat in color-major order.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// The variable `z_{color, slot}`; slots are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarIndex {
    pub color: usize,
    pub slot: usize,
}

/// Offsets of each color block in the flat variable list.
pub fn color_offsets(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len());
    let mut acc = 0;
    for &d in dims {
        out.push(acc);
        acc += d;
    }
    out
}

/// Color of each flat variable.
pub fn var_colors(dims: &[usize]) -> Vec<usize> {
    dims.iter().enumerate().flat_map(|(c, &d)| std::iter::repeat_n(c, d)).collect()
}

pub type Exponent = Vec<i32>;

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    dims: Vec<usize>,
    terms: BTreeMap<Exponent, Scalar>,
}

impl LaurentPoly {
    pub fn zero(dims: &[usize]) -> Self {
        LaurentPoly { dims: dims.to_vec(), terms: BTreeMap::new() }
    }

    pub fn constant(dims: &[usize], c: Scalar) -> Self {
        let n = dims.iter().sum();
        Self::monomial(dims, vec![0; n], c)
    }

    pub fn one(dims: &[usize]) -> Self {
        Self::constant(dims, Scalar::one())
    }

    /// Plain polynomial ring in `n` variables of a single color.
    pub fn zero_flat(n: usize) -> Self {
        Self::zero(&[n])
    }

    pub fn monomial(dims: &[usize], exp: Exponent, c: Scalar) -> Self {
        let mut p = Self::zero(dims);
        assert_eq!(exp.len(), p.nvars(), "exponent length");
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// The variable at flat index `v`.
    pub fn var(dims: &[usize], v: usize) -> Self {
        let n: usize = dims.iter().sum();
        let mut e = vec![0; n];
        e[v] = 1;
        Self::monomial(dims, e, Scalar::one())
    }

    pub fn flat_index(&self, v: VarIndex) -> Result<usize> {
        if v.color >= self.dims.len() || v.slot == 0 || v.slot > self.dims[v.color] {
            return Err(Error::UnknownVariable(format!("z_{{{},{}}}", v.color, v.slot)));
        }
        Ok(color_offsets(&self.dims)[v.color] + v.slot - 1)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn nvars(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[i32]) -> Scalar {
        self.terms.get(exp).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Adds `c * z^exp` in place.
    pub fn add_term(&mut self, exp: Exponent, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(exp.len(), self.nvars());
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.dims, other.dims, "Laurent polynomials over different variable sets");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { dims: self.dims.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return Self::zero(&self.dims);
        }
        LaurentPoly { dims: self.dims.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut out = Self::zero(&self.dims);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(&self.dims);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Multiplies by `c * z^shift`.
    pub fn mul_monomial(&self, shift: &[i32], c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.dims);
        }
        LaurentPoly {
            dims: self.dims.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), x * c)).collect(),
        }
    }

    /// Substitutes `z_v -> q^r * z_w^sign` with `sign = ±1`; `z_v` no longer
    /// occurs in the result.
    pub fn substitute_var(&self, v: usize, w: usize, r: i64, sign: i32) -> Self {
        assert!(sign == 1 || sign == -1);
        let mut out = Self::zero(&self.dims);
        for (e, c) in &self.terms {
            let k = e[v];
            let mut e2 = e.clone();
            e2[v] = 0;
            e2[w] += sign * k;
            out.add_term(e2, &(c * &Scalar::q_pow(r * k as i64)));
        }
        out
    }

    /// Substitutes `z_v -> q^s`.
    pub fn substitute_const(&self, v: usize, s: i64) -> Self {
        let mut out = Self::zero(&self.dims);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = std::mem::replace(&mut e2[v], 0);
            out.add_term(e2, &(c * &Scalar::q_pow(s * k as i64)));
        }
        out
    }

    /// Rescales `z_v -> q^{s_v} z_v` for every variable.
    pub fn rescale(&self, s: &[i64]) -> Self {
        assert_eq!(s.len(), self.nvars());
        LaurentPoly {
            dims: self.dims.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let w: i64 = e.iter().zip(s).map(|(&k, &sv)| k as i64 * sv).sum();
                    (e.clone(), c * &Scalar::q_pow(w))
                })
                .collect(),
        }
    }

    /// Renames variable `i` to `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.nvars());
        let mut out = Self::zero(&self.dims);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; e.len()];
            for (i, &k) in e.iter().enumerate() {
                e2[perm[i]] = k;
            }
            out.terms.insert(e2, c.clone());
        }
        out
    }

    /// Re-reads the same flat exponent vectors under a new color layout with
    /// the same total number of variables.
    pub fn relabel_dims(&self, dims: &[usize]) -> Self {
        assert_eq!(dims.iter().sum::<usize>(), self.nvars());
        LaurentPoly { dims: dims.to_vec(), terms: self.terms.clone() }
    }

    /// Places the variables of `self` into a larger space: flat variable `i`
    /// becomes flat variable `map[i]` of the target.
    pub fn embed(&self, target_dims: &[usize], map: &[usize]) -> Self {
        let n: usize = target_dims.iter().sum();
        let mut out = Self::zero(target_dims);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; n];
            for (i, &k) in e.iter().enumerate() {
                e2[map[i]] += k;
            }
            out.add_term(e2, c);
        }
        out
    }

    /// True when invariant under permuting variables of equal color.
    pub fn is_color_symmetric(&self) -> bool {
        let offs = color_offsets(&self.dims);
        for (c, &d) in self.dims.iter().enumerate() {
            for j in 1..d {
                // adjacent transpositions generate the symmetric group
                let mut perm: Vec<usize> = (0..self.nvars()).collect();
                perm.swap(offs[c] + j - 1, offs[c] + j);
                if &self.permute(&perm) != self {
                    return false;
                }
            }
        }
        true
    }

    /// Per-variable minimum exponent over all terms (zeros for the zero polynomial).
    pub fn min_exponents(&self) -> Vec<i32> {
        let mut out: Option<Vec<i32>> = None;
        for e in self.terms.keys() {
            out = Some(match out {
                None => e.clone(),
                Some(m) => m.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        out.unwrap_or_else(|| vec![0; self.nvars()])
    }

    pub fn max_exponents(&self) -> Vec<i32> {
        let mut out: Option<Vec<i32>> = None;
        for e in self.terms.keys() {
            out = Some(match out {
                None => e.clone(),
                Some(m) => m.iter().zip(e).map(|(a, b)| *a.max(b)).collect(),
            });
        }
        out.unwrap_or_else(|| vec![0; self.nvars()])
    }

    pub fn to_json(&self) -> LaurentJson {
        LaurentJson {
            dims: self.dims.clone(),
            terms: self.terms.iter().map(|(e, c)| TermJson { exp: e.clone(), coeff: c.clone() }).collect(),
        }
    }

    pub fn from_json(j: &LaurentJson) -> Result<Self> {
        let mut p = Self::zero(&j.dims);
        for t in &j.terms {
            if t.exp.len() != p.nvars() {
                return Err(Error::Parse(format!(
                    "exponent {:?} has length {}, expected {}",
                    t.exp,
                    t.exp.len(),
                    p.nvars()
                )));
            }
            p.add_term(t.exp.clone(), &t.coeff);
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Exponent,
    pub coeff: Scalar,
}

/// Wire form of a [`LaurentPoly`]; terms sorted by exponent vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaurentJson {
    pub dims: Vec<usize>,
    pub terms: Vec<TermJson>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = LaurentJson::deserialize(de)?;
        LaurentPoly::from_json(&j).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let colors = var_colors(&self.dims);
        let offs = color_offsets(&self.dims);
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(v, &k)| {
                    let name = if self.dims.len() == 1 {
                        format!("z{}", v + 1)
                    } else {
                        format!("z{}_{}", colors[v] + 1, v - offs[colors[v]] + 1)
                    };
                    if k == 1 {
                        name
                    } else {
                        format!("{name}^{k}")
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "({c})")?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "({c})*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_ops() {
        let x = LaurentPoly::var(&[2], 0);
        let y = LaurentPoly::var(&[2], 1);
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(sq.coeff(&[1, 1]), Scalar::from_int(2));
        assert!(sq.sub(&sq).is_zero());
        assert!(sq.is_color_symmetric());
        assert!(!x.is_color_symmetric());
        assert!(x.relabel_dims(&[1, 1]).is_color_symmetric());
    }

    #[test]
    fn substitutions() {
        // z1^2 z2^-1 with z1 -> q^3 z2
        let p = LaurentPoly::monomial(&[2], vec![2, -1], Scalar::one());
        let r = p.substitute_var(0, 1, 3, 1);
        assert_eq!(r, LaurentPoly::monomial(&[2], vec![0, 1], Scalar::q_pow(6)));
        let c = p.substitute_const(1, 2);
        assert_eq!(c, LaurentPoly::monomial(&[2], vec![2, 0], Scalar::q_pow(-2)));
    }

    #[test]
    fn json_round_trip() {
        let p = LaurentPoly::monomial(&[1, 1], vec![-1, 2], Scalar::q_pow(-1)).add(&LaurentPoly::one(&[1, 1]));
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.starts_with(r#"{"dims":[1,1],"terms":[{"exp":[-1,2]"#));
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}

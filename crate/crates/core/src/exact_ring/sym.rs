//! Symmetrization over groups of variables and exact division by linear
//! difference factors.

use std::collections::BTreeMap;

use super::laurent::{color_offsets, LaurentPoly};
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymMode {
    /// Sum over all permutations.
    Sum,
    /// Sum divided by the product of group factorials.
    Average,
}

/// All permutations of `0..n` with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, i32)>) {
        let n = used.len();
        if prefix.len() == n {
            let mut sign = 1;
            for i in 0..n {
                for j in i + 1..n {
                    if prefix[i] > prefix[j] {
                        sign = -sign;
                    }
                }
            }
            out.push((prefix.clone(), sign));
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Permutations of the flat variables that preserve each group, as maps
/// `old index -> new index`, with signs.
pub fn group_permutations(nvars: usize, groups: &[Vec<usize>]) -> Vec<(Vec<usize>, i32)> {
    let mut acc: Vec<(Vec<usize>, i32)> = vec![((0..nvars).collect(), 1)];
    for g in groups {
        let local = permutations(g.len());
        let mut next = Vec::with_capacity(acc.len() * local.len());
        for (base, s) in &acc {
            for (p, t) in &local {
                let mut m = base.clone();
                for (k, &v) in g.iter().enumerate() {
                    m[v] = g[p[k]];
                }
                next.push((m, s * t));
            }
        }
        acc = next;
    }
    acc
}

/// The color blocks of a dimension vector as groups of flat indices.
pub fn color_groups(dims: &[usize]) -> Vec<Vec<usize>> {
    let offs = color_offsets(dims);
    dims.iter().zip(&offs).map(|(&d, &o)| (o..o + d).collect()).collect()
}

fn check_partition(nvars: usize, groups: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; nvars];
    for g in groups {
        for &v in g {
            if v >= nvars {
                return Err(Error::UnknownVariable(format!("z{v}")));
            }
            if seen[v] {
                return Err(Error::NotAPartition(format!("z{v} appears twice")));
            }
            seen[v] = true;
        }
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::NotAPartition(format!("z{v} is in no group")));
    }
    Ok(())
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Symmetrizes `poly` over permutations within each group.
pub fn sym(poly: &LaurentPoly, groups: &[Vec<usize>], mode: SymMode) -> Result<LaurentPoly> {
    check_partition(poly.nvars(), groups)?;
    let mut out = LaurentPoly::zero(poly.dims());
    for (perm, _) in group_permutations(poly.nvars(), groups) {
        out = out.add(&poly.permute(&perm));
    }
    Ok(match mode {
        SymMode::Sum => out,
        SymMode::Average => {
            let n: i64 = groups.iter().map(|g| factorial(g.len())).product();
            out.scale(&Scalar::ratio(1, n))
        }
    })
}

/// Antisymmetrizes `poly` over permutations within each group.
pub fn alt(poly: &LaurentPoly, groups: &[Vec<usize>]) -> Result<LaurentPoly> {
    check_partition(poly.nvars(), groups)?;
    let mut out = LaurentPoly::zero(poly.dims());
    for (perm, sign) in group_permutations(poly.nvars(), groups) {
        let p = poly.permute(&perm);
        out = if sign > 0 { out.add(&p) } else { out.sub(&p) };
    }
    Ok(out)
}

/// Exact quotient of `p` by `z_b - q^r z_a`, or `None` if it does not divide.
pub fn div_linear(p: &LaurentPoly, b: usize, a: usize, r: i64) -> Option<LaurentPoly> {
    assert_ne!(a, b);
    let dims = p.dims().to_vec();
    if p.is_zero() {
        return Some(p.clone());
    }
    // coefficients of powers of z_b, highest first
    let mut by_power: BTreeMap<i32, LaurentPoly> = BTreeMap::new();
    for (e, c) in p.terms() {
        let mut e2 = e.clone();
        let k = std::mem::replace(&mut e2[b], 0);
        by_power.entry(k).or_insert_with(|| LaurentPoly::zero(&dims)).add_term(e2, c);
    }
    let lo = *by_power.keys().next().unwrap();
    let hi = *by_power.keys().next_back().unwrap();
    // z_b - c z_a with c z_a as a Laurent polynomial
    let mut shift = vec![0; p.nvars()];
    shift[a] = 1;
    let cza = Scalar::q_pow(r);
    let mut quotient = LaurentPoly::zero(&dims);
    let mut carry = LaurentPoly::zero(&dims);
    // synthetic division on the polynomial p * z_b^{-lo} of degree hi - lo
    for k in (lo..=hi).rev() {
        let coef = by_power.remove(&k).unwrap_or_else(|| LaurentPoly::zero(&dims)).add(&carry);
        if k == lo {
            if !coef.is_zero() {
                return None;
            }
            break;
        }
        // quotient term coef * z_b^{k-1}
        let mut zb = vec![0; p.nvars()];
        zb[b] = k - 1;
        quotient = quotient.add(&coef.mul_monomial(&zb, &Scalar::one()));
        carry = coef.mul_monomial(&shift, &cza);
    }
    Some(quotient)
}

/// Computes `Sym[numer / prod_{same color a<b} (z_b - z_a)]` as
/// `Alt[numer] / prod(z_b - z_a)`, checking that every difference factor
/// divides exactly.
pub fn sym_over_vandermonde(numer: &LaurentPoly) -> Result<LaurentPoly> {
    let groups = color_groups(numer.dims());
    let mut p = alt(numer, &groups)?;
    for g in &groups {
        for (i, &a) in g.iter().enumerate() {
            for &b in &g[i + 1..] {
                p = div_linear(&p, b, a, 0).ok_or(Error::PoleNotCancelled { a, b })?;
            }
        }
    }
    Ok(p)
}

/// The same-color Vandermonde product `prod_{same color a<b} (z_b - z_a)`.
pub fn vandermonde(dims: &[usize]) -> LaurentPoly {
    let mut p = LaurentPoly::one(dims);
    for g in color_groups(dims) {
        for (i, &a) in g.iter().enumerate() {
            for &b in &g[i + 1..] {
                p = p.mul(&LaurentPoly::var(dims, b).sub(&LaurentPoly::var(dims, a)));
            }
        }
    }
    p
}

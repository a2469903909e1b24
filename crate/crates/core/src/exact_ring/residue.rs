//! Rational expressions with factored denominators and their iterated
//! residues at centers `q^s`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::laurent::LaurentPoly;
use super::scalar::Scalar;
use super::series::{factor_shape, BoxSeries};
use super::upoly::UPoly;
use crate::error::{Error, Result};

/// A linear denominator factor over flat variable indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    /// `z_var - q^shift`
    Linear { var: usize, shift: i64 },
    /// `z_b - q^r z_a`
    Difference { b: usize, a: usize, r: i64 },
}

impl Factor {
    /// The factor as a Laurent polynomial.
    pub fn to_poly(&self, dims: &[usize]) -> LaurentPoly {
        match *self {
            Factor::Linear { var, shift } => {
                LaurentPoly::var(dims, var).sub(&LaurentPoly::constant(dims, Scalar::q_pow(shift)))
            }
            Factor::Difference { b, a, r } => {
                LaurentPoly::var(dims, b).sub(&LaurentPoly::var(dims, a).scale(&Scalar::q_pow(r)))
            }
        }
    }

    /// Applies a variable renaming.
    pub fn map_vars(&self, mut f: impl FnMut(usize) -> usize) -> Factor {
        match *self {
            Factor::Linear { var, shift } => Factor::Linear { var: f(var), shift },
            Factor::Difference { b, a, r } => Factor::Difference { b: f(b), a: f(a), r },
        }
    }
}

/// `unit * numer / prod(factor^mult)` with the denominator kept factored.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalExpr {
    pub numer: LaurentPoly,
    pub denom: Vec<(Factor, u32)>,
}

impl RationalExpr {
    pub fn new(numer: LaurentPoly) -> Self {
        RationalExpr { numer, denom: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        self.numer.dims()
    }

    /// Builds `numer / prod(factor^e)` for signed exponents `e`. Exponents
    /// of the same factor are combined first; positive net exponents go to
    /// the denominator and negative ones are multiplied into the numerator.
    /// Differences `z_b - q^r z_a` with `b < a` are rewritten as
    /// `-q^r (z_a - q^-r z_b)` so that opposite orientations combine.
    pub fn from_signed(numer: LaurentPoly, factors: &[(Factor, i32)]) -> Self {
        let dims = numer.dims().to_vec();
        let mut net: BTreeMap<Factor, i32> = BTreeMap::new();
        let mut scalar = Scalar::one();
        for &(f, e) in factors {
            if e == 0 {
                continue;
            }
            let f = match f {
                Factor::Difference { b, a, r } if b < a => {
                    // z_b - q^r z_a = -q^r (z_a - q^-r z_b); the factor sits in
                    // the denominator for e > 0
                    let c = -&Scalar::q_pow(r);
                    scalar = &scalar * &c.pow(-(e as i64)).expect("nonzero");
                    Factor::Difference { b: a, a: b, r: -r }
                }
                f => f,
            };
            *net.entry(f).or_insert(0) += e;
        }
        let mut num = numer.scale(&scalar);
        let mut denom = Vec::new();
        for (f, e) in net {
            if e > 0 {
                denom.push((f, e as u32));
            } else if e < 0 {
                num = num.mul(&f.to_poly(&dims).pow((-e) as u32));
            }
        }
        RationalExpr { numer: num, denom }
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        RationalExpr { numer: self.numer.mul(p), denom: self.denom.clone() }
    }
}

/// Precomputed data for residue functionals `F -> Res(F * K)`.
///
/// `K` is a numerator polynomial times a product of linear factors raised to
/// signed powers. Variables at positions `0..n` (in extraction order,
/// position 0 first) are expanded around `q^{s_a}`.
///
/// Writing `F = sum_j f_j eps^j` (Taylor coefficients at the centers), the
/// residue is `sum_j f_j w_j` over the finite down-set `J` of multi-indices
/// with `j_0 + ... + j_b <= D_b` for every `b`. The weights `w_j` are kept
/// over a common denominator.
#[derive(Clone, Debug)]
pub struct ResidueKernel {
    nvars: usize,
    pos_of_var: Vec<Option<usize>>,
    centers: Vec<i64>,
    /// `None` when the functional is identically zero.
    target: Option<Vec<usize>>,
    /// `cap[a] = min_{b >= a} D_b`
    cap: Vec<usize>,
    strides: Vec<usize>,
    g_num: Vec<UPoly>,
    g_den: UPoly,
}

impl ResidueKernel {
    /// `factors` use ambient flat variable indices with signed exponents
    /// (positive means denominator). `centers` lists `(variable, s)` in
    /// extraction order.
    pub fn new(
        nvars: usize,
        factors: &[(Factor, i32)],
        numer: Option<&LaurentPoly>,
        centers: &[(usize, i64)],
    ) -> Result<Self> {
        let n = centers.len();
        let mut pos_of_var = vec![None; nvars];
        for (p, &(v, _)) in centers.iter().enumerate() {
            if v >= nvars {
                return Err(Error::UnknownVariable(format!("z{v}")));
            }
            if pos_of_var[v].replace(p).is_some() {
                return Err(Error::UnresolvablePole(format!("variable z{v} has two centers")));
            }
        }
        let cs: Vec<i64> = centers.iter().map(|&(_, s)| s).collect();
        let mut shapes = Vec::with_capacity(factors.len());
        let mut pole = vec![0i64; n];
        let mut coef = Scalar::one();
        for &(f, mult) in factors {
            if mult == 0 {
                continue;
            }
            let mut missing = false;
            let local = f.map_vars(|v| match pos_of_var.get(v).copied().flatten() {
                Some(p) => p,
                None => {
                    missing = true;
                    usize::MAX
                }
            });
            if missing {
                return Err(Error::UnresolvablePole(format!("{f:?} involves a variable without center")));
            }
            let sh = factor_shape(&local, &cs)?;
            for (b, &k) in sh.mono.iter().enumerate() {
                pole[b] += k as i64 * mult as i64;
            }
            coef = &coef * &sh.coef.pow(mult as i64)?;
            shapes.push((sh, mult));
        }
        let mut kernel = ResidueKernel {
            nvars,
            pos_of_var,
            centers: cs,
            target: None,
            cap: vec![],
            strides: vec![],
            g_num: vec![],
            g_den: UPoly::one(),
        };
        // coefficient of eps_0^-1 ... eps_{n-1}^-1 is that of t_b^{-(b+1)}
        let target: Option<Vec<usize>> = (0..n).map(|b| usize::try_from(pole[b] - (b as i64 + 1)).ok()).collect();
        let Some(target) = target else {
            return Ok(kernel);
        };
        if numer.is_some_and(|p| p.is_zero()) {
            return Ok(kernel);
        }
        let mut g = BoxSeries::one(&target);
        for (sh, mult) in &shapes {
            if sh.unit_tail.is_empty() {
                continue;
            }
            for _ in 0..mult.unsigned_abs() {
                if *mult > 0 {
                    g.div_unit(&sh.unit_tail);
                } else {
                    g.mul_unit(&sh.unit_tail);
                }
            }
        }
        let mut cap = target.clone();
        for b in (0..n.saturating_sub(1)).rev() {
            cap[b] = cap[b].min(cap[b + 1]);
        }
        kernel.cap = cap;
        if let Some(p) = numer {
            let mut nt = BoxSeries::zero(&target);
            for (e, c) in p.terms() {
                let local = kernel.localize(e)?;
                kernel.taylor_terms(&local, &[], &mut |j, k, qe| {
                    let t = kernel.shift_of(j);
                    nt.add_at(&t, &c.mul_int_qpow(k, qe));
                });
            }
            g = g.mul(&nt);
        }
        let inv = coef.inv()?;
        let size: usize = target.iter().map(|&d| d + 1).product();
        let mut entries = Vec::with_capacity(size);
        let mut lcm = UPoly::one();
        let mut e = vec![0usize; n];
        for _ in 0..size {
            let c = &g.get(&e) * &inv;
            let d = c.denom();
            if !d.is_one() {
                let gcd = lcm.gcd_primitive(d);
                lcm = lcm.mul(&d.div_exact(&gcd).expect("gcd divides"));
            }
            entries.push(c);
            for b in (0..n).rev() {
                if e[b] < target[b] {
                    e[b] += 1;
                    break;
                }
                e[b] = 0;
            }
        }
        // common denominator: lcm of primitive parts times lcm of integer contents
        let mut int_lcm = BigInt::one();
        for c in &entries {
            int_lcm = num_integer::Integer::lcm(&int_lcm, &c.denom().content());
        }
        let den = lcm.primitive_part().scale(&int_lcm);
        kernel.g_num = entries
            .iter()
            .map(|c| {
                if c.is_zero() {
                    UPoly::zero()
                } else {
                    c.numer().mul(&den.div_exact(c.denom()).expect("common denominator"))
                }
            })
            .collect();
        let mut strides = vec![1; n];
        let mut acc = 1;
        for b in (0..n).rev() {
            strides[b] = acc;
            acc *= target[b] + 1;
        }
        kernel.target = Some(target);
        kernel.strides = strides;
        kernel.g_den = den;
        Ok(kernel)
    }

    pub fn is_zero(&self) -> bool {
        self.target.is_none()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[i64] {
        &self.centers
    }

    /// Per position, one more than the largest `j_a` in the support `J`:
    /// every functional `F -> Res((z-c)^i F K)` factors through the quotient
    /// by `(z_a - q^{s_a})^{P_a}`. `None` for the zero functional.
    pub fn pole_orders(&self) -> Option<Vec<usize>> {
        self.target.as_ref().map(|_| self.cap.iter().map(|&d| d + 1).collect())
    }

    /// Position of a flat variable, if it has a center.
    pub fn position(&self, var: usize) -> Option<usize> {
        self.pos_of_var[var]
    }

    /// The down-set `J` of Taylor multi-indices (in positions) the
    /// functional depends on, in lexicographic order.
    pub fn support(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if self.target.is_none() {
            return out;
        }
        let n = self.centers.len();
        fn rec(k: &ResidueKernel, pos: usize, s: usize, j: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if pos == j.len() {
                out.push(j.clone());
                return;
            }
            // cap is nondecreasing, so s <= cap[pos]
            for v in 0..=k.cap[pos] - s {
                j[pos] = v;
                rec(k, pos + 1, s + v, j, out);
            }
            j[pos] = 0;
        }
        rec(self, 0, 0, &mut vec![0; n], &mut out);
        out
    }

    /// `w_j`, the residue of `(z - c)^j K`; zero outside the support.
    pub fn weight(&self, j: &[usize]) -> Scalar {
        match self.index_of(j) {
            Some(idx) => Scalar::from_parts(self.g_num[idx].clone(), self.g_den.clone()),
            None => Scalar::zero(),
        }
    }

    /// Sum of weights over a list of multi-indices, each shifted by `offset`.
    pub fn weight_sum<'a>(&self, offset: &[usize], js: impl IntoIterator<Item = &'a Vec<usize>>) -> Scalar {
        let mut acc = UPoly::zero();
        let mut buf = vec![0; offset.len()];
        for j in js {
            for b in 0..offset.len() {
                buf[b] = j[b] + offset[b];
            }
            if let Some(idx) = self.index_of(&buf) {
                acc = acc.add(&self.g_num[idx]);
            }
        }
        Scalar::from_parts(acc, self.g_den.clone())
    }

    fn index_of(&self, j: &[usize]) -> Option<usize> {
        let target = self.target.as_ref()?;
        let mut idx = 0;
        let mut s = 0;
        for b in 0..j.len() {
            s += j[b];
            if s > self.cap[b] {
                return None;
            }
            idx += (target[b] - s) * self.strides[b];
        }
        Some(idx)
    }

    fn shift_of(&self, j: &[usize]) -> Vec<usize> {
        let mut s = 0;
        j.iter()
            .map(|&x| {
                s += x;
                s
            })
            .collect()
    }

    fn localize(&self, k: &[i32]) -> Result<Vec<i64>> {
        let mut local = vec![0i64; self.centers.len()];
        for (v, &kv) in k.iter().enumerate() {
            match self.pos_of_var.get(v).copied().flatten() {
                Some(p) => local[p] = kv as i64,
                None if kv != 0 => return Err(Error::UnknownVariable(format!("z{v} has no residue center"))),
                None => {}
            }
        }
        Ok(local)
    }

    /// Visits the Taylor coefficients `binom(k, j) q^{s (k - j)}` of `z^k`
    /// for all `j` with `j + offset` in the support.
    fn taylor_terms(&self, k: &[i64], offset: &[usize], visit: &mut impl FnMut(&[usize], &BigInt, i64)) {
        let n = k.len();
        let mut j = vec![0usize; n];
        #[allow(clippy::too_many_arguments)]
        fn rec(
            kern: &ResidueKernel,
            k: &[i64],
            offset: &[usize],
            pos: usize,
            shift: usize,
            coef: &BigInt,
            qexp: i64,
            j: &mut Vec<usize>,
            visit: &mut impl FnMut(&[usize], &BigInt, i64),
        ) {
            if pos == k.len() {
                visit(j, coef, qexp);
                return;
            }
            let off = offset.get(pos).copied().unwrap_or(0);
            let Some(mut max_j) = kern.cap[pos].checked_sub(shift + off) else { return };
            let ka = k[pos];
            if ka >= 0 {
                max_j = max_j.min(ka as usize);
            }
            let sa = kern.centers[pos];
            let mut binom = BigInt::one();
            for ja in 0..=max_j {
                if ja > 0 {
                    binom = binom * BigInt::from(ka - ja as i64 + 1) / BigInt::from(ja as i64);
                }
                if binom.is_zero() {
                    break;
                }
                j[pos] = ja;
                rec(
                    kern,
                    k,
                    offset,
                    pos + 1,
                    shift + off + ja,
                    &(coef * &binom),
                    qexp + sa * (ka - ja as i64),
                    j,
                    visit,
                );
            }
            j[pos] = 0;
        }
        rec(self, k, offset, 0, 0, &BigInt::one(), 0, &mut j, visit);
    }

    /// `Res((z - c)^offset * z^k * K)` for an ambient exponent vector `k`.
    pub fn residue_of_monomial_at(&self, k: &[i32], offset: &[usize]) -> Result<Scalar> {
        if self.target.is_none() {
            return Ok(Scalar::zero());
        }
        let local = self.localize(k)?;
        let mut acc: HashMap<i64, BigInt> = HashMap::new();
        let mut buf = vec![0usize; local.len()];
        self.taylor_terms(&local, offset, &mut |j, coef, qexp| {
            for b in 0..j.len() {
                buf[b] = j[b] + offset.get(b).copied().unwrap_or(0);
            }
            let g = &self.g_num[self.index_of(&buf).expect("in support")];
            for (i, c) in g.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    *acc.entry(qexp + i as i64).or_insert_with(BigInt::zero) += coef * c;
                }
            }
        });
        Ok(Scalar::from_laurent_coeffs(acc, &self.g_den))
    }

    /// `Res(z^k * K)` for an ambient exponent vector `k`.
    pub fn residue_of_monomial(&self, k: &[i32]) -> Result<Scalar> {
        self.residue_of_monomial_at(k, &[])
    }

    /// `Res((z - c)^offset * F * K)`, linear in `F`.
    pub fn residue_at(&self, f: &LaurentPoly, offset: &[usize]) -> Result<Scalar> {
        if self.is_zero() {
            return Ok(Scalar::zero());
        }
        let mut total = Scalar::zero();
        for (e, c) in f.terms() {
            total += &(c * &self.residue_of_monomial_at(e, offset)?);
        }
        Ok(total)
    }

    /// `Res(F * K)`, linear in `F`.
    pub fn residue(&self, f: &LaurentPoly) -> Result<Scalar> {
        self.residue_at(f, &[])
    }
}

/// Iterated residue of `expr`: the coefficient of `eps^{-1}` with the first
/// listed variable extracted first.
pub fn iterated_residue(expr: &RationalExpr, centers: &[(usize, i64)]) -> Result<Scalar> {
    let factors: Vec<(Factor, i32)> = expr.denom.iter().map(|&(f, m)| (f, m as i32)).collect();
    let kernel = ResidueKernel::new(expr.numer.nvars(), &factors, None, centers)?;
    kernel.residue(&expr.numer)
}

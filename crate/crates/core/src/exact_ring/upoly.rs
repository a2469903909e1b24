//! Dense univariate polynomials in `q` with arbitrary-precision integer
//! coefficients, stored lowest degree first.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// An element of `Z[q]`. The coefficient vector never has a trailing zero,
/// so the zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly {
    coeffs: Vec<BigInt>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * q^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.push(c);
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::from_coeffs(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn neg(&self) -> Self {
        UPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k);
            let b = other.coeffs.get(k);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Divides every coefficient by `c`, which must divide all of them.
    pub fn div_scalar_exact(&self, c: &BigInt) -> Self {
        UPoly { coeffs: self.coeffs.iter().map(|a| a / c).collect() }
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        UPoly { coeffs }
    }

    /// Pseudo-remainder of `self` by `d`: the remainder of
    /// `lc(d)^(deg self - deg d + 1) * self` upon division by `d`.
    fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("pseudo_rem by zero");
        let lc = d.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let rl = r.leading().unwrap().clone();
            // r <- lc * r - rl * q^(rd-dd) * d
            r = r.scale(&lc).sub(&d.scale(&rl).shift(rd - dd));
        }
        r
    }

    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let c = self.content();
        let mut p = self.div_scalar_exact(&c);
        if p.leading().unwrap().is_negative() {
            p = p.neg();
        }
        p
    }

    /// Primitive gcd with positive leading coefficient (primitive PRS).
    pub fn gcd_primitive(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive_part();
        }
        if other.is_zero() {
            return self.primitive_part();
        }
        let (mut a, mut b) = if self.coeffs.len() >= other.coeffs.len() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        while !b.is_zero() {
            if b.is_constant() {
                return Self::one();
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// Exact quotient `self / d`. Returns `None` when `d` does not divide
    /// `self` in `Z[q]`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let sd = self.degree().unwrap();
        if sd < dd {
            return None;
        }
        let lc = d.leading().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let top = &r[k + dd];
            if top.is_zero() {
                continue;
            }
            let (quot, rem) = top.div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &quot * dc;
            }
            q[k] = quot;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_coeffs(q))
    }

    /// Powers of `q` dividing the polynomial.
    pub fn low_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }
}

impl PartialOrd for UPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| {
            for (a, b) in self.coeffs.iter().rev().zip(other.coeffs.iter().rev()) {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (k, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{abs}*q")?,
                (_, true) => write!(f, "q^{k}")?,
                (_, false) => write!(f, "{abs}*q^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> UPoly {
        UPoly::from_i64s(cs)
    }

    #[test]
    fn gcd_of_products() {
        // (q-1)(q+2) and (q-1)(2q+3)
        let a = p(&[-1, 1]).mul(&p(&[2, 1]));
        let b = p(&[-1, 1]).mul(&p(&[3, 2]));
        assert_eq!(a.gcd_primitive(&b), p(&[-1, 1]));
        assert_eq!(p(&[2, 4]).gcd_primitive(&p(&[6])), UPoly::one());
    }

    #[test]
    fn exact_division() {
        let a = p(&[-1, 0, 1]);
        assert_eq!(a.div_exact(&p(&[1, 1])), Some(p(&[-1, 1])));
        assert_eq!(a.div_exact(&p(&[2, 1])), None);
        assert_eq!(p(&[2, 4]).div_exact(&p(&[2])), Some(p(&[1, 2])));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, 0, -2]).to_string(), "-2*q^2 + 1");
        assert_eq!(p(&[0, 1]).to_string(), "q");
    }
}

//! Truncated multivariate power series used to expand residue integrands.
//!
//! Near centers `c_a = q^{s_a}` write `z_a = c_a + eps_a` and
//! `eps_a = t_a t_{a+1} ... t_{n-1}`. The iterated order
//! `eps_0 << eps_1 << ... ` becomes ordinary power-series order in the `t`
//! variables, because `eps_a / eps_b = t_a ... t_{b-1}` for `a < b`. Every
//! denominator factor is then a scalar, times a `t`-monomial, times a unit
//! power series.

use super::residue::Factor;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Dense power series in `t_0..t_{n-1}` keeping exponents `0..=bound[b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxSeries {
    bound: Vec<usize>,
    strides: Vec<usize>,
    data: Vec<Scalar>,
}

impl BoxSeries {
    pub fn zero(bound: &[usize]) -> Self {
        let mut strides = vec![1; bound.len()];
        let mut size = 1usize;
        for b in (0..bound.len()).rev() {
            strides[b] = size;
            size *= bound[b] + 1;
        }
        BoxSeries { bound: bound.to_vec(), strides, data: vec![Scalar::zero(); size] }
    }

    pub fn one(bound: &[usize]) -> Self {
        let mut s = Self::zero(bound);
        s.data[0] = Scalar::one();
        s
    }

    pub fn bound(&self) -> &[usize] {
        &self.bound
    }

    fn index(&self, e: &[usize]) -> Option<usize> {
        let mut i = 0;
        for (b, &k) in e.iter().enumerate() {
            if k > self.bound[b] {
                return None;
            }
            i += k * self.strides[b];
        }
        Some(i)
    }

    fn unindex(&self, mut i: usize) -> Vec<usize> {
        let mut e = vec![0; self.bound.len()];
        for (x, &s) in e.iter_mut().zip(&self.strides) {
            *x = i / s;
            i %= s;
        }
        e
    }

    pub fn get(&self, e: &[usize]) -> Scalar {
        self.index(e).map(|i| self.data[i].clone()).unwrap_or_else(Scalar::zero)
    }

    pub fn add_at(&mut self, e: &[usize], c: &Scalar) {
        if let Some(i) = self.index(e) {
            self.data[i] += c;
        }
    }

    /// Nonzero entries as (exponent, coefficient).
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &Scalar)> + '_ {
        self.data.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (self.unindex(i), c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.bound, other.bound);
        let mut out = Self::zero(&self.bound);
        let rhs: Vec<(Vec<usize>, &Scalar)> = other.entries().collect();
        for (e1, c1) in self.entries() {
            for (e2, c2) in &rhs {
                let e: Vec<usize> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                if let Some(i) = out.index(&e) {
                    out.data[i] += &(c1 * c2);
                }
            }
        }
        out
    }

    /// Divides in place by the unit `1 + sum_i c_i t^{mu_i}` (all `mu_i`
    /// nonzero), solving `u * out = self` coefficient by coefficient.
    pub fn div_unit(&mut self, tail: &[(Vec<usize>, Scalar)]) {
        let n = self.bound.len();
        let mut e = vec![0usize; n];
        for i in 0..self.data.len() {
            let mut acc = std::mem::take(&mut self.data[i]);
            for (mu, c) in tail {
                if mu.iter().zip(&e).all(|(m, k)| m <= k) {
                    let j: usize = (0..n).map(|b| (e[b] - mu[b]) * self.strides[b]).sum();
                    if !self.data[j].is_zero() {
                        acc -= &(c * &self.data[j]);
                    }
                }
            }
            self.data[i] = acc;
            // advance the multi-index in row-major order
            for b in (0..n).rev() {
                if e[b] < self.bound[b] {
                    e[b] += 1;
                    break;
                }
                e[b] = 0;
            }
        }
    }

    /// Multiplies in place by the unit `1 + sum_i c_i t^{mu_i}`.
    pub fn mul_unit(&mut self, tail: &[(Vec<usize>, Scalar)]) {
        let n = self.bound.len();
        // descending order keeps the sources untouched while updating
        for i in (0..self.data.len()).rev() {
            let e = self.unindex(i);
            let mut acc = std::mem::take(&mut self.data[i]);
            for (mu, c) in tail {
                if mu.iter().zip(&e).all(|(m, k)| m <= k) {
                    let j: usize = (0..n).map(|b| (e[b] - mu[b]) * self.strides[b]).sum();
                    if !self.data[j].is_zero() {
                        acc += &(c * &self.data[j]);
                    }
                }
            }
            self.data[i] = acc;
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(&self.bound);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }
}

/// Expansion of a factor (or its inverse) at the centers:
/// `coef * t^mono * series`.
#[derive(Clone, Debug, PartialEq)]
pub struct IteratedSeries {
    /// Center exponent `s_a` of each position (`z_a = q^{s_a} + eps_a`).
    pub centers: Vec<i64>,
    /// Truncation order per `t` variable.
    pub order: Vec<usize>,
    pub coef: Scalar,
    pub mono: Vec<i64>,
    pub series: BoxSeries,
}

/// The `t`-exponent of `eps_a` (ones at positions `a..n`).
fn eps_mono(n: usize, a: usize) -> Vec<usize> {
    (0..n).map(|b| usize::from(b >= a)).collect()
}

/// The `t`-exponent of `eps_a / eps_b` for `a < b`.
fn ratio_mono(n: usize, a: usize, b: usize) -> Vec<usize> {
    (0..n).map(|k| usize::from(k >= a && k < b)).collect()
}

/// A factor at the centers: scalar, `t`-monomial, and the non-constant part
/// of its unit series as `(t-exponent, coefficient)` pairs.
pub(crate) struct FactorShape {
    pub coef: Scalar,
    pub mono: Vec<usize>,
    pub unit_tail: Vec<(Vec<usize>, Scalar)>,
}

/// Decomposes a factor whose variables are positions `0..n` with the given
/// center exponents.
pub(crate) fn factor_shape(f: &Factor, centers: &[i64]) -> Result<FactorShape> {
    let n = centers.len();
    match *f {
        Factor::Linear { var: a, shift: s } => {
            if a >= n {
                return Err(Error::UnresolvablePole(format!("variable {a} has no center")));
            }
            if centers[a] == s {
                Ok(FactorShape { coef: Scalar::one(), mono: eps_mono(n, a), unit_tail: vec![] })
            } else {
                let coef = &Scalar::q_pow(centers[a]) - &Scalar::q_pow(s);
                let inv = coef.inv()?;
                Ok(FactorShape { coef, mono: vec![0; n], unit_tail: vec![(eps_mono(n, a), inv)] })
            }
        }
        Factor::Difference { b, a, r } => {
            if a >= n || b >= n {
                return Err(Error::UnresolvablePole(format!("factor {f:?} has a variable without center")));
            }
            if a == b {
                if r == 0 {
                    return Err(Error::UnresolvablePole(format!("factor {f:?} is identically zero")));
                }
                // (1 - q^r) z_a
                let coef = &(&Scalar::one() - &Scalar::q_pow(r)) * &Scalar::q_pow(centers[a]);
                let tail = vec![(eps_mono(n, a), Scalar::q_pow(-centers[a]))];
                return Ok(FactorShape { coef, mono: vec![0; n], unit_tail: tail });
            }
            let qr = Scalar::q_pow(r);
            if centers[b] != r + centers[a] {
                // c_b - q^r c_a + eps_b - q^r eps_a
                let coef = &Scalar::q_pow(centers[b]) - &Scalar::q_pow(r + centers[a]);
                let inv = coef.inv()?;
                let tail = vec![(eps_mono(n, b), inv.clone()), (eps_mono(n, a), -&(&qr * &inv))];
                Ok(FactorShape { coef, mono: vec![0; n], unit_tail: tail })
            } else if a < b {
                // eps_b (1 - q^r eps_a/eps_b)
                Ok(FactorShape {
                    coef: Scalar::one(),
                    mono: eps_mono(n, b),
                    unit_tail: vec![(ratio_mono(n, a, b), -&qr)],
                })
            } else {
                // -q^r eps_a (1 - q^-r eps_b/eps_a)
                Ok(FactorShape {
                    coef: -&qr,
                    mono: eps_mono(n, a),
                    unit_tail: vec![(ratio_mono(n, b, a), -&Scalar::q_pow(-r))],
                })
            }
        }
    }
}

/// Truncated inverse series of `factor` at `z_a = q^{centers[a]} + eps_a`,
/// keeping `t`-exponents up to `order[b]`.
pub fn expand_factor(factor: &Factor, centers: &[i64], order: &[i64]) -> Result<IteratedSeries> {
    if let Some(&o) = order.iter().find(|&&o| o < 0) {
        return Err(Error::NegativeOrder(o));
    }
    if order.len() != centers.len() {
        return Err(Error::ShapeMismatch(format!("{} truncation orders for {} centers", order.len(), centers.len())));
    }
    let bound: Vec<usize> = order.iter().map(|&o| o as usize).collect();
    let shape = factor_shape(factor, centers)?;
    let mut series = BoxSeries::one(&bound);
    series.div_unit(&shape.unit_tail);
    Ok(IteratedSeries {
        centers: centers.to_vec(),
        order: bound,
        coef: shape.coef.inv()?,
        mono: shape.mono.iter().map(|&k| -(k as i64)).collect(),
        series,
    })
}

impl IteratedSeries {
    /// Coefficient of `t^e` in the expansion.
    pub fn coefficient(&self, e: &[i64]) -> Scalar {
        let shifted: Option<Vec<usize>> =
            e.iter().zip(&self.mono).map(|(&k, &m)| usize::try_from(k - m).ok()).collect();
        match shifted {
            Some(s) => &self.coef * &self.series.get(&s),
            None => Scalar::zero(),
        }
    }

    /// Coefficient of `eps^j` where `j` is an exponent vector in the `eps`
    /// variables.
    pub fn eps_coefficient(&self, j: &[i64]) -> Scalar {
        let mut acc = 0;
        let t: Vec<i64> = j
            .iter()
            .map(|&k| {
                acc += k;
                acc
            })
            .collect();
        self.coefficient(&t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_inverse() {
        // 1/(1 - t) up to t^4
        let tail = vec![(vec![1], Scalar::from_int(-1))];
        let mut s = BoxSeries::one(&[4]);
        s.add_at(&[1], &Scalar::from_int(-1));
        let mut inv = BoxSeries::one(&[4]);
        inv.div_unit(&tail);
        for k in 0..=4 {
            assert!(inv.get(&[k]).is_one());
        }
        assert!(s.mul(&inv).entries().all(|(e, c)| e == vec![0] && c.is_one()));
        inv.mul_unit(&tail);
        assert!(inv.entries().all(|(e, c)| e == vec![0] && c.is_one()));
    }

    #[test]
    fn nonvanishing_linear_factor() {
        // 1/(z - q^2) at z = 1 + eps: 1/(1-q^2) * sum (-eps/(1-q^2))^k
        let f = Factor::Linear { var: 0, shift: 2 };
        let s = expand_factor(&f, &[0], &[3]).unwrap();
        let a = &Scalar::one() - &Scalar::q_pow(2);
        assert_eq!(s.coefficient(&[0]), a.inv().unwrap());
        assert_eq!(s.coefficient(&[1]), -&a.pow(-2).unwrap());
        assert_eq!(s.coefficient(&[2]), a.pow(-3).unwrap());
    }

    #[test]
    fn coinciding_difference_factor() {
        // 1/(z1 - z0) = eps1^-1 (1 + eps0/eps1 + ...)
        let f = Factor::Difference { b: 1, a: 0, r: 0 };
        let s = expand_factor(&f, &[0, 0], &[3, 3]).unwrap();
        assert_eq!(s.mono, vec![0, -1]);
        // eps0^1 eps1^-2 is t0^1 t1^(1-2)
        assert!(s.eps_coefficient(&[1, -2]).is_one());
        assert!(s.eps_coefficient(&[0, -1]).is_one());
        assert!(s.eps_coefficient(&[1, -1]).is_zero());
    }

    #[test]
    fn negative_order_rejected() {
        let f = Factor::Linear { var: 0, shift: 0 };
        assert_eq!(expand_factor(&f, &[0], &[-1]), Err(Error::NegativeOrder(-1)));
    }
}

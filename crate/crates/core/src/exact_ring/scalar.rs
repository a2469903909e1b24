//! Elements of the field `Q(q)` kept in a canonical reduced form.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::upoly::UPoly;
use crate::error::{Error, Result};

/// A rational function `num / den` in `q`.
///
/// Invariants: `num` and `den` are coprime in `Q[q]`, their integer contents
/// are coprime, and `den` has positive leading coefficient. Zero is `0 / 1`.
/// Two scalars are equal iff their stored fields are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: UPoly,
    den: UPoly,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: UPoly::zero(), den: UPoly::one() }
    }

    pub fn one() -> Self {
        Scalar { num: UPoly::one(), den: UPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_bigint(BigInt::from(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar { num: UPoly::constant(n), den: UPoly::one() }
    }

    /// The rational number `n / d`.
    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::from_parts(UPoly::from_i64s(&[n]), UPoly::from_i64s(&[d]))
    }

    /// `q^k` for any integer `k`.
    pub fn q_pow(k: i64) -> Self {
        let k_abs = k.unsigned_abs() as usize;
        let m = UPoly::monomial(BigInt::one(), k_abs);
        if k >= 0 {
            Scalar { num: m, den: UPoly::one() }
        } else {
            Scalar { num: UPoly::one(), den: m }
        }
    }

    pub fn from_poly(p: UPoly) -> Self {
        Scalar { num: p, den: UPoly::one() }
    }

    /// Builds `num / den` and reduces it. Panics on a zero denominator.
    pub fn from_parts(num: UPoly, den: UPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator in Scalar");
        let mut s = Scalar { num, den };
        s.normalize();
        s
    }

    pub fn numer(&self) -> &UPoly {
        &self.num
    }

    pub fn denom(&self) -> &UPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value does not depend on `q`.
    pub fn is_rational(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = UPoly::one();
            return;
        }
        let den_low = self.den.low_order();
        if den_low + 1 == self.den.coeffs().len() {
            // monomial denominator: only powers of q can cancel
            let k = den_low.min(self.num.low_order());
            if k > 0 {
                self.num = UPoly::from_coeffs(self.num.coeffs()[k..].to_vec());
                self.den = UPoly::from_coeffs(self.den.coeffs()[k..].to_vec());
            }
        } else if !self.den.is_constant() {
            let g = self.num.gcd_primitive(&self.den);
            if !g.is_one() {
                self.num = self.num.div_exact(&g).expect("gcd divides numerator");
                self.den = self.den.div_exact(&g).expect("gcd divides denominator");
            }
        }
        let c = self.num.content().gcd(&self.den.content());
        if !c.is_one() {
            self.num = self.num.div_scalar_exact(&c);
            self.den = self.den.div_scalar_exact(&c);
        }
        if self.den.leading().unwrap().is_negative() {
            self.num = self.num.neg();
            self.den = self.den.neg();
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_parts(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = Scalar::one();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        Ok(out)
    }

    /// Generalized binomial coefficient `C(n, k)` for any integer `n`.
    pub fn binomial(n: i64, k: u32) -> Self {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for j in 0..k as i64 {
            num *= BigInt::from(n - j);
            den *= BigInt::from(j + 1);
        }
        Self::from_parts(UPoly::constant(num), UPoly::constant(den))
    }

    pub fn to_json(&self) -> ScalarJson {
        ScalarJson {
            num: self.num.coeffs().iter().map(|c| ScalarJson::int_value(&c.to_string())).collect(),
            den: self.den.coeffs().iter().map(|c| ScalarJson::int_value(&c.to_string())).collect(),
        }
    }

    /// Builds `(sum_k c_k q^k) / den` from a sparse map with possibly negative
    /// exponents.
    pub fn from_laurent_coeffs<I>(terms: I, den: &UPoly) -> Self
    where
        I: IntoIterator<Item = (i64, BigInt)>,
    {
        let terms: Vec<(i64, BigInt)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let Some(lo) = terms.iter().map(|(e, _)| *e).min() else {
            return Scalar::zero();
        };
        let hi = terms.iter().map(|(e, _)| *e).max().unwrap();
        let mut cs = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            cs[(e - lo) as usize] += c;
        }
        let num = UPoly::from_coeffs(cs);
        if lo >= 0 {
            Self::from_parts(num.shift(lo as usize), den.clone())
        } else {
            Self::from_parts(num, den.shift((-lo) as usize))
        }
    }

    /// Multiplies by `c * q^e`.
    pub fn mul_int_qpow(&self, c: &BigInt, e: i64) -> Self {
        if c.is_zero() || self.is_zero() {
            return Scalar::zero();
        }
        let num = self.num.scale(c);
        if e >= 0 {
            Self::from_parts(num.shift(e as usize), self.den.clone())
        } else {
            Self::from_parts(num, self.den.shift((-e) as usize))
        }
    }

    pub fn from_json(j: &ScalarJson) -> Result<Self> {
        let parse = |v: &[serde_json::Value]| -> Result<UPoly> {
            let mut cs = Vec::with_capacity(v.len());
            for c in v {
                let b = match c {
                    serde_json::Value::Number(n) => n.to_string().parse::<BigInt>(),
                    serde_json::Value::String(s) => s.parse::<BigInt>(),
                    _ => return Err(Error::Parse(format!("bad coefficient {c}"))),
                }
                .map_err(|e| Error::Parse(format!("bad coefficient {c}: {e}")))?;
                cs.push(b);
            }
            Ok(UPoly::from_coeffs(cs))
        };
        let num = parse(&j.num)?;
        let den = if j.den.is_empty() { UPoly::one() } else { parse(&j.den)? };
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Self::from_parts(num, den))
    }
}

/// Wire form of a [`Scalar`]: coefficient lists in ascending powers of `q`.
/// Coefficients are written as JSON integers when they fit in an `i64`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScalarJson {
    pub num: Vec<serde_json::Value>,
    #[serde(default)]
    pub den: Vec<serde_json::Value>,
}

impl ScalarJson {
    fn int_value(s: &str) -> serde_json::Value {
        match s.parse::<i64>() {
            Ok(v) => serde_json::Value::from(v),
            Err(_) => serde_json::Value::String(s.to_string()),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let j = ScalarJson {
            num: self.num.coeffs().iter().map(|c| ScalarJson::int_value(&c.to_string())).collect(),
            den: self.den.coeffs().iter().map(|c| ScalarJson::int_value(&c.to_string())).collect(),
        };
        j.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = ScalarJson::deserialize(de)?;
        Scalar::from_json(&j).map_err(serde::de::Error::custom)
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return Scalar::from_parts(self.num.add(&rhs.num), self.den.clone());
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        Scalar::from_parts(num, self.den.mul(&rhs.den))
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar { num: self.num.mul(&rhs.num), den: UPoly::one() };
        }
        Scalar::from_parts(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv().expect("division by zero Scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else if self.num.coeffs().iter().filter(|c| !c.is_zero()).count() <= 1 {
            write!(f, "{}/({})", self.num, self.den)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let a = Scalar::from_parts(UPoly::from_i64s(&[-2, 2]), UPoly::from_i64s(&[-4, 0, 4]));
        // (2q-2)/(4q^2-4) = 1/(2q+2)
        assert_eq!(a, Scalar::from_parts(UPoly::from_i64s(&[1]), UPoly::from_i64s(&[2, 2])));
        let b = Scalar::from_parts(UPoly::from_i64s(&[3]), UPoly::from_i64s(&[-6]));
        assert_eq!(b, Scalar::ratio(-1, 2));
        assert_eq!(b.denom(), &UPoly::from_i64s(&[2]));
    }

    #[test]
    fn q_powers() {
        let a = Scalar::q_pow(-2);
        assert_eq!(&a * &Scalar::q_pow(3), Scalar::q_pow(1));
        assert_eq!(a.pow(-1).unwrap(), Scalar::q_pow(2));
        assert_eq!((&Scalar::q_pow(2) - &Scalar::one()).to_string(), "q^2 - 1");
    }

    #[test]
    fn binomials() {
        assert_eq!(Scalar::binomial(5, 2), Scalar::from_int(10));
        assert_eq!(Scalar::binomial(-1, 3), Scalar::from_int(-1));
        assert_eq!(Scalar::binomial(-2, 2), Scalar::from_int(3));
        assert_eq!(Scalar::binomial(2, 3), Scalar::zero());
    }

    #[test]
    fn json_round_trip() {
        let a = Scalar::from_parts(UPoly::from_i64s(&[1, 0, -1]), UPoly::from_i64s(&[0, 0, 3]));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"num":[1,0,-1],"den":[0,0,3]}"#);
        let back: Scalar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}

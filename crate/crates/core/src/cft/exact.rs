use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A number `q * sqrt(r)` with `q` rational and `r` a square-free positive
/// integer. Zero is stored with `r = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactValue {
    coefficient: BigRational,
    radicand: BigInt,
}

impl ExactValue {
    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn rational(q: BigRational) -> Self {
        Self {
            coefficient: q,
            radicand: BigInt::one(),
        }
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::rational(BigRational::new(numer.into(), denom.into()))
    }

    /// `q * sqrt(r)` for any positive integer `r`, reduced to square-free form.
    pub fn with_sqrt(q: BigRational, r: BigInt) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::Exact(format!("radicand must be positive, got {r}")));
        }
        let (square, free) = split_square(&r);
        Ok(Self::normalized(
            q * BigRational::from_integer(square),
            free,
        ))
    }

    /// `1 / sqrt(x)` for positive rational `x`.
    pub fn inverse_sqrt(x: &BigRational) -> Result<Self> {
        if !x.is_positive() {
            return Err(Error::Exact(format!(
                "cannot take the inverse square root of {x}"
            )));
        }
        // 1/sqrt(a/b) = sqrt(a b) / a
        let (a, b) = (x.numer().clone(), x.denom().clone());
        Self::with_sqrt(BigRational::new(BigInt::one(), a.clone()), a * b)
    }

    fn normalized(coefficient: BigRational, radicand: BigInt) -> Self {
        if coefficient.is_zero() {
            Self::zero()
        } else {
            Self {
                coefficient,
                radicand,
            }
        }
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.coefficient
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let q = self.coefficient.numer().to_f64().unwrap_or(f64::NAN)
            / self.coefficient.denom().to_f64().unwrap_or(f64::NAN);
        q * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// Sum of two values; fails unless they share a radicand or one is zero.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.radicand != other.radicand {
            return Err(Error::Exact(format!(
                "cannot add {self} and {other} exactly"
            )));
        }
        Ok(Self::normalized(
            &self.coefficient + &other.coefficient,
            self.radicand.clone(),
        ))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::normalized(&self.coefficient * q, self.radicand.clone())
    }
}

impl Mul for &ExactValue {
    type Output = ExactValue;

    fn mul(self, rhs: &ExactValue) -> ExactValue {
        let (square, free) = split_square(&(&self.radicand * &rhs.radicand));
        ExactValue::normalized(
            &self.coefficient * &rhs.coefficient * BigRational::from_integer(square),
            free,
        )
    }
}

impl Neg for ExactValue {
    type Output = ExactValue;

    fn neg(self) -> ExactValue {
        ExactValue::normalized(-self.coefficient, self.radicand)
    }
}

impl Add for &ExactValue {
    type Output = Result<ExactValue>;

    fn add(self, rhs: &ExactValue) -> Result<ExactValue> {
        self.checked_add(rhs)
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand.is_one() {
            write!(f, "{}", self.coefficient)
        } else {
            write!(f, "{}*sqrt({})", self.coefficient, self.radicand)
        }
    }
}

/// Writes `n = s^2 t` with `t` square-free; returns `(s, t)`.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut count = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            count += 1;
        }
        square *= p.pow(count / 2);
        if count % 2 == 1 {
            free *= &p;
        }
        p += 1;
    }
    (square, free * rest)
}

#[derive(Serialize, Deserialize)]
struct ExactRepr {
    numerator: String,
    denominator: String,
    radicand: String,
}

impl Serialize for ExactValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExactRepr {
            numerator: self.coefficient.numer().to_string(),
            denominator: self.coefficient.denom().to_string(),
            radicand: self.radicand.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ExactRepr::deserialize(d)?;
        let parse = |s: &str| s.parse::<BigInt>().map_err(D::Error::custom);
        let denom = parse(&repr.denominator)?;
        if denom.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        let q = BigRational::new(parse(&repr.numerator)?, denom);
        ExactValue::with_sqrt(q, parse(&repr.radicand)?).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn square_free_reduction() {
        let v = ExactValue::with_sqrt(q(1, 3), BigInt::from(18)).unwrap();
        assert_eq!(v.coefficient(), &q(1, 1));
        assert_eq!(v.radicand(), &BigInt::from(2));
    }

    #[test]
    fn inverse_sqrt_of_two() {
        let v = ExactValue::inverse_sqrt(&q(2, 1)).unwrap();
        assert_eq!(v.coefficient(), &q(1, 2));
        assert_eq!(v.radicand(), &BigInt::from(2));
        assert!((v.to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn products_and_sums() {
        let r2 = ExactValue::with_sqrt(q(1, 1), BigInt::from(2)).unwrap();
        assert_eq!(&r2 * &r2, ExactValue::from_ratio(2, 1));
        assert!(r2.checked_add(&ExactValue::from_ratio(1, 1)).is_err());
        assert_eq!((&r2 + &r2.clone().neg()).unwrap(), ExactValue::zero());
    }

    #[test]
    fn json_round_trip() {
        let v = ExactValue::with_sqrt(q(-3, 7), BigInt::from(6)).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"numerator":"-3","denominator":"7","radicand":"6"}"#);
        assert_eq!(serde_json::from_str::<ExactValue>(&s).unwrap(), v);
    }
}

//! Exact arithmetic in the Eisenstein integers `Z[ω]`, `ω = (1 + √3 i) / 2`.
//!
//! Elements are stored in the basis `(1, ω)`. Since `ω` is a primitive sixth
//! root of unity it satisfies `ω² = ω − 1`, which is all multiplication needs.
//! Its conjugate is `ω̄ = 1 − ω`.
//!
//! Every entry of the adjacency, Laplacian and incidence matrices built by this
//! crate lives in this ring, so determinants can be computed without rounding.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivisionError {
    #[error("division by zero in Z[ω]")]
    DivisionByZero,
    #[error("{dividend} is not divisible by {divisor} in Z[ω]")]
    NotDivisible {
        dividend: Box<EisensteinInt>,
        divisor: Box<EisensteinInt>,
    },
}

/// `a + b·ω` with arbitrary-precision coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct EisensteinInt {
    pub a: BigInt,
    pub b: BigInt,
}

impl EisensteinInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        EisensteinInt {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    /// `ω = (1 + √3 i) / 2`.
    pub fn omega() -> Self {
        Self::new(0, 1)
    }

    /// `ω̄ = 1 − ω = (1 − √3 i) / 2`.
    pub fn omega_bar() -> Self {
        Self::new(1, -1)
    }

    pub fn from_int(a: impl Into<BigInt>) -> Self {
        Self::new(a, 0)
    }

    /// `ω^k` for any integer `k`, reduced mod 6.
    pub fn omega_pow(k: i64) -> Self {
        match k.rem_euclid(6) {
            0 => Self::new(1, 0),
            1 => Self::new(0, 1),
            2 => Self::new(-1, 1),
            3 => Self::new(-1, 0),
            4 => Self::new(0, -1),
            _ => Self::new(1, -1),
        }
    }

    /// The six units `±1, ±ω, ±ω²`, in the order `ω⁰, ω¹, …, ω⁵`.
    pub fn units() -> [Self; 6] {
        [0, 1, 2, 3, 4, 5].map(Self::omega_pow)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// True when the element is a rational integer (no `ω` component).
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Complex conjugate: `conj(a + bω) = (a + b) − bω`.
    pub fn conj(&self) -> Self {
        EisensteinInt {
            a: &self.a + &self.b,
            b: -&self.b,
        }
    }

    /// Squared complex modulus `a² + ab + b²`.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a + &self.a * &self.b + &self.b * &self.b
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Returns `k` with `self = ω^k` when `self` is a unit.
    pub fn unit_exponent(&self) -> Option<u8> {
        (0..6u8).find(|&k| *self == Self::omega_pow(k as i64))
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// Exact quotient `self / divisor`. Fails loudly when the division is not
    /// exact in `Z[ω]`.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self, DivisionError> {
        if divisor.is_zero() {
            return Err(DivisionError::DivisionByZero);
        }
        let n = divisor.norm();
        let num = self * &divisor.conj();
        let (qa, ra) = num.a.div_rem(&n);
        let (qb, rb) = num.b.div_rem(&n);
        if !ra.is_zero() || !rb.is_zero() {
            return Err(DivisionError::NotDivisible {
                dividend: Box::new(self.clone()),
                divisor: Box::new(divisor.clone()),
            });
        }
        Ok(EisensteinInt { a: qa, b: qb })
    }

    /// Floating-point rendering `a + b(1/2 + (√3/2) i)`.
    ///
    /// Only for display. Coefficients beyond 2^53 in magnitude lose precision.
    pub fn to_complex(&self) -> Complex64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        Complex64::new(a + 0.5 * b, b * (3.0f64.sqrt() / 2.0))
    }

    /// `x±yi` with six decimal places.
    pub fn complex_string(&self) -> String {
        let z = self.to_complex();
        // avoid printing "-0.000000"
        let re = if z.re == 0.0 { 0.0 } else { z.re };
        let im = if z.im == 0.0 { 0.0 } else { z.im };
        if im < 0.0 {
            format!("{:.6}-{:.6}i", re, -im)
        } else {
            format!("{:.6}+{:.6}i", re, im)
        }
    }
}

impl fmt::Display for EisensteinInt {
    /// Renders as `a+bω`, e.g. `1-1ω`, `-3+0ω`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_negative() {
            write!(f, "{}-{}ω", self.a, -&self.b)
        } else {
            write!(f, "{}+{}ω", self.a, self.b)
        }
    }
}

impl fmt::Debug for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

impl From<i64> for EisensteinInt {
    fn from(a: i64) -> Self {
        Self::from_int(a)
    }
}

impl From<(i64, i64)> for EisensteinInt {
    fn from((a, b): (i64, i64)) -> Self {
        Self::new(a, b)
    }
}

impl Add<&EisensteinInt> for &EisensteinInt {
    type Output = EisensteinInt;
    fn add(self, rhs: &EisensteinInt) -> EisensteinInt {
        EisensteinInt {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }
}

impl Sub<&EisensteinInt> for &EisensteinInt {
    type Output = EisensteinInt;
    fn sub(self, rhs: &EisensteinInt) -> EisensteinInt {
        EisensteinInt {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        }
    }
}

impl Mul<&EisensteinInt> for &EisensteinInt {
    type Output = EisensteinInt;
    /// `(a + bω)(c + dω) = (ac − bd) + (ad + bc + bd)ω` using `ω² = ω − 1`.
    fn mul(self, rhs: &EisensteinInt) -> EisensteinInt {
        let bd = &self.b * &rhs.b;
        EisensteinInt {
            a: &self.a * &rhs.a - &bd,
            b: &self.a * &rhs.b + &self.b * &rhs.a + bd,
        }
    }
}

impl Neg for &EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<EisensteinInt> for EisensteinInt {
            type Output = EisensteinInt;
            fn $method(self, rhs: EisensteinInt) -> EisensteinInt {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&EisensteinInt> for EisensteinInt {
            type Output = EisensteinInt;
            fn $method(self, rhs: &EisensteinInt) -> EisensteinInt {
                (&self).$method(rhs)
            }
        }
        impl $tr<EisensteinInt> for &EisensteinInt {
            type Output = EisensteinInt;
            fn $method(self, rhs: EisensteinInt) -> EisensteinInt {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl AddAssign<&EisensteinInt> for EisensteinInt {
    fn add_assign(&mut self, rhs: &EisensteinInt) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl SubAssign<&EisensteinInt> for EisensteinInt {
    fn sub_assign(&mut self, rhs: &EisensteinInt) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl MulAssign<&EisensteinInt> for EisensteinInt {
    fn mul_assign(&mut self, rhs: &EisensteinInt) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for EisensteinInt {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl std::iter::Product for EisensteinInt {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |acc, x| &acc * &x)
    }
}

/// JSON integer when the value fits in `i64`, decimal string otherwise.
pub fn bigint_to_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(x.to_string()),
    }
}

fn serialize_bigint<S: SerializeSeq>(seq: &mut S, x: &BigInt) -> Result<(), S::Error> {
    match x.to_i64() {
        Some(v) => seq.serialize_element(&v),
        None => seq.serialize_element(&x.to_string()),
    }
}

/// Serialized as the two-element array `[a, b]`.
impl Serialize for EisensteinInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        serialize_bigint(&mut seq, &self.a)?;
        serialize_bigint(&mut seq, &self.b)?;
        seq.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    fn into_bigint<E: de::Error>(self) -> Result<BigInt, E> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(v)),
            JsonInt::Big(s) => s.parse().map_err(E::custom),
        }
    }
}

impl<'de> Deserialize<'de> for EisensteinInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PairVisitor;
        impl<'de> Visitor<'de> for PairVisitor {
            type Value = EisensteinInt;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a two-element integer array [a, b]")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<EisensteinInt, A::Error> {
                let a: JsonInt = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let b: JsonInt = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(EisensteinInt {
                    a: a.into_bigint()?,
                    b: b.into_bigint()?,
                })
            }
        }
        deserializer.deserialize_seq(PairVisitor)
    }
}

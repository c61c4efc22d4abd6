//! Exact rational scalars.
//!
//! Every coordinate, threshold and distance in this crate is a [`Scalar`]: an
//! arbitrary-precision rational number in canonical form. Values whose
//! numerator and denominator fit in machine words are stored inline and only
//! promoted to big integers when an operation overflows, so the common case
//! (decimal inputs with a handful of digits) never allocates.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number.
///
/// The representation is canonical (reduced fraction, positive denominator),
/// so structural equality coincides with numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    // `num != i64::MIN` so that negation never overflows; `den > 0`.
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

/// Error returned when a string is not a decimal or `p/q` rational.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseScalarError(pub String);

fn small_from_i128(num: i128, den: i128) -> Option<Repr> {
    if num > i64::MAX as i128 || num <= i64::MIN as i128 || den > i64::MAX as i128 {
        return None;
    }
    Some(Repr::Small {
        num: num as i64,
        den: den as i64,
    })
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Repr::Small { num: 0, den: 1 })
    }

    pub fn one() -> Self {
        Scalar(Repr::Small { num: 1, den: 1 })
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_i128_ratio(n as i128, 1)
    }

    /// Builds `num / den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Self::from_i128_ratio(num as i128, den as i128)
    }

    fn from_i128_ratio(mut num: i128, mut den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        if den < 0 {
            // |values| here are at most 2^127 - 1, so negation is safe
            // unless a caller passed i128::MIN, which never happens internally.
            num = -num;
            den = -den;
        }
        if den != 1 {
            let g = num.gcd(&den);
            if g > 1 {
                num /= g;
                den /= g;
            }
        }
        match small_from_i128(num, den) {
            Some(r) => Scalar(r),
            None => Self::from_big(BigRational::new(BigInt::from(num), BigInt::from(den))),
        }
    }

    /// Wraps a big rational, demoting it to the inline form when it fits.
    pub fn from_big(r: BigRational) -> Self {
        // BigRational::new already reduced; from_integer etc. are reduced too.
        let (n, d) = (r.numer(), r.denom());
        if let (Some(n), Some(d)) = (n.to_i64(), d.to_i64()) {
            if n != i64::MIN {
                return Scalar(Repr::Small { num: n, den: d });
            }
        }
        Scalar(Repr::Big(Box::new(r)))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => {
                BigRational::new_raw(BigInt::from(*num), BigInt::from(*den))
            }
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> Ordering {
        match &self.0 {
            Repr::Small { num, .. } => num.cmp(&0),
            Repr::Big(b) => match b.numer().sign() {
                Sign::Minus => Ordering::Less,
                Sign::NoSign => Ordering::Equal,
                Sign::Plus => Ordering::Greater,
            },
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// `|self - other|`.
    pub fn dist(&self, other: &Scalar) -> Scalar {
        (self - other).abs()
    }

    pub fn half(&self) -> Scalar {
        self / &Scalar::from_integer(2)
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        if rhs.is_zero() {
            None
        } else {
            Some(self / rhs)
        }
    }

    /// Inline `(num, den)` if the value is stored without big integers.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match self.0 {
            Repr::Small { num, den } => Some((num, den)),
            Repr::Big(_) => None,
        }
    }

    /// Lossy conversion, for diagnostics and timing output only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => *num as f64 / *den as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn binop(
        &self,
        rhs: &Scalar,
        small: impl Fn(i64, i64, i64, i64) -> Option<Scalar>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Scalar {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0)
        {
            if let Some(r) = small(*a, *b, *c, *d) {
                return r;
            }
        }
        Scalar::from_big(big(self.to_big(), rhs.to_big()))
    }
}

fn add_small(a: i64, b: i64, c: i64, d: i64) -> Option<Scalar> {
    if b == 1 && d == 1 {
        let s = a as i128 + c as i128;
        return small_from_i128(s, 1).map(Scalar);
    }
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    if b == d {
        return Some(Scalar::from_i128_ratio(a + c, b));
    }
    Some(Scalar::from_i128_ratio(a * d + c * b, b * d))
}

fn mul_small(a: i64, b: i64, c: i64, d: i64) -> Option<Scalar> {
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    Some(Scalar::from_i128_ratio(a * c, b * d))
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        self.binop(rhs, add_small, |x, y| x + y)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self.binop(rhs, |a, b, c, d| add_small(a, b, -c, d), |x, y| x - y)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self.binop(rhs, mul_small, |x, y| x * y)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        self.binop(
            rhs,
            |a, b, c, d| mul_small(a, b, d, c),
            |x, y| x / y,
        )
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Small { num, den } => Scalar(Repr::Small {
                num: -num,
                den: *den,
            }),
            Repr::Big(b) => Scalar::from_big(-(**b).clone()),
        }
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
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                if b == d {
                    a.cmp(c)
                } else {
                    (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
                }
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_big(r)
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Accepts `-12`, `0.5`, `.5`, `1e-9`, `2.5E3`, `3/4` and the Unicode
    /// minus sign.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseScalarError(s.to_string());
        let t = s.trim().replace('\u{2212}', "-");
        if t.is_empty() {
            return Err(err());
        }
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            return Ok(Scalar::from_big(BigRational::new(p, q)));
        }
        let (mantissa, exp) = match t.find(['e', 'E']) {
            Some(k) => {
                let e: i64 = t[k + 1..].parse().map_err(|_| err())?;
                (&t[..k], e)
            }
            None => (t.as_str(), 0),
        };
        let (neg, body) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut num: BigInt = digits.parse().map_err(|_| err())?;
        if neg {
            num = -num;
        }
        let scale = exp - frac_part.len() as i64;
        if scale.unsigned_abs() > 10_000 {
            return Err(err());
        }
        let ten = BigInt::from(10);
        let r = if scale >= 0 {
            BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(Scalar::from_big(r))
    }
}

impl fmt::Display for Scalar {
    /// Exact output: a terminating decimal when the denominator divides a power
    /// of ten, `p/q` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numer();
        let den = self.denom();
        if den.is_one() {
            return write!(f, "{num}");
        }
        let mut d = den.clone();
        let (mut twos, mut fives) = (0usize, 0usize);
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        while d.is_even() {
            d /= &two;
            twos += 1;
        }
        while (&d % &five).is_zero() {
            d /= &five;
            fives += 1;
        }
        if !d.is_one() {
            return write!(f, "{num}/{den}");
        }
        let k = twos.max(fives);
        let scaled = &num * (num_traits::pow(BigInt::from(10), k) / &den);
        let neg = scaled.is_negative();
        let mut digits = scaled.abs().to_string();
        if digits.len() <= k {
            digits = format!("{}{}", "0".repeat(k + 1 - digits.len()), digits);
        }
        let (ip, fp) = digits.split_at(digits.len() - k);
        write!(f, "{}{}.{}", if neg { "-" } else { "" }, ip, fp)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for parsing a literal in tests and examples. Panics on bad input.
pub fn sc(s: &str) -> Scalar {
    s.parse().unwrap_or_else(|e| panic!("{e}"))
}

//! Exact scalars, affine functions of the mixing parameter `y`, and
//! rational intervals.
//!
//! Everything downstream is computed over [`Rational`] (an arbitrary
//! precision fraction kept in lowest terms). Nothing in this crate rounds.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn big(value: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(value.clone()))
}

/// `p/q`, or `p` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Decimal approximation for display only. Never feed this back into a
/// computation.
pub fn approx(value: &Rational) -> f64 {
    let n = value.numer().to_f64().unwrap_or(f64::NAN);
    let d = value.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // huge operands: scale down by the common bit length first
        let shift = value.denom().bits().saturating_sub(60);
        let n = (value.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (value.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    }
}

/// Parses `p/q`, `p`, or a finite decimal such as `0.15`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let err = || Error::Parse(text.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let digits = format!(
            "{}{}",
            if whole_digits.is_empty() {
                "0"
            } else {
                whole_digits
            },
            frac
        );
        let mut numer: BigInt = digits.parse().map_err(|_| err())?;
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(numer, denom));
    }
    let p: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rational::from_integer(p))
}

/// Serde adapter storing a [`Rational`] as the string `"p/q"`.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &Rational,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }
}

pub mod serde_rational_opt {
    use super::*;

    pub fn serialize<S: Serializer>(
        value: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_some(&format_rational(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse_rational(&t).map_err(D::Error::custom))
            .transpose()
    }
}

/// Least common multiple of a list of positive integers; `1` for the empty
/// list.
pub fn lcm_list(values: &[i64]) -> Result<BigUint> {
    let mut acc = BigUint::one();
    for &v in values {
        if v < 1 {
            return Err(Error::NonPositive(v));
        }
        acc = acc.lcm(&BigUint::from(v as u64));
    }
    Ok(acc)
}

/// `intercept + slope * y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineInY {
    pub intercept: Rational,
    pub slope: Rational,
}

impl AffineInY {
    pub fn new(intercept: Rational, slope: Rational) -> Self {
        Self { intercept, slope }
    }

    pub fn constant(value: Rational) -> Self {
        Self::new(value, Rational::zero())
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    /// The function `y`.
    pub fn identity() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn eval(&self, y: &Rational) -> Rational {
        &self.intercept + &self.slope * y
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(&self.intercept * factor, &self.slope * factor)
    }

    /// The unique zero, if the slope is non-zero.
    pub fn root(&self) -> Option<Rational> {
        if self.slope.is_zero() {
            None
        } else {
            Some(-&self.intercept / &self.slope)
        }
    }
}

impl Add for &AffineInY {
    type Output = AffineInY;
    fn add(self, rhs: &AffineInY) -> AffineInY {
        AffineInY::new(&self.intercept + &rhs.intercept, &self.slope + &rhs.slope)
    }
}

impl Add for AffineInY {
    type Output = AffineInY;
    fn add(self, rhs: AffineInY) -> AffineInY {
        &self + &rhs
    }
}

impl Sub for &AffineInY {
    type Output = AffineInY;
    fn sub(self, rhs: &AffineInY) -> AffineInY {
        AffineInY::new(&self.intercept - &rhs.intercept, &self.slope - &rhs.slope)
    }
}

impl Sub for AffineInY {
    type Output = AffineInY;
    fn sub(self, rhs: AffineInY) -> AffineInY {
        &self - &rhs
    }
}

impl Neg for AffineInY {
    type Output = AffineInY;
    fn neg(self) -> AffineInY {
        AffineInY::new(-self.intercept, -self.slope)
    }
}

impl Mul<&Rational> for &AffineInY {
    type Output = AffineInY;
    fn mul(self, rhs: &Rational) -> AffineInY {
        self.scale(rhs)
    }
}

impl fmt::Display for AffineInY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + ({})*y",
            format_rational(&self.intercept),
            format_rational(&self.slope)
        )
    }
}

/// One end of a [`RationalInterval`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Unbounded,
    Closed(Rational),
    Open(Rational),
}

impl Endpoint {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Endpoint::Unbounded => None,
            Endpoint::Closed(v) | Endpoint::Open(v) => Some(v),
        }
    }

    pub fn is_open(&self) -> bool {
        !matches!(self, Endpoint::Closed(_))
    }
}

#[derive(Clone, Copy)]
enum Side {
    Lower,
    Upper,
}

/// Tighter of two endpoints on the same side.
fn tighter(a: &Endpoint, b: &Endpoint, side: Side) -> Endpoint {
    match (a.value(), b.value()) {
        (None, _) => b.clone(),
        (_, None) => a.clone(),
        (Some(x), Some(y)) => match (x.cmp(y), side) {
            (Ordering::Equal, _) => {
                if a.is_open() {
                    a.clone()
                } else {
                    b.clone()
                }
            }
            (Ordering::Greater, Side::Lower) | (Ordering::Less, Side::Upper) => a.clone(),
            _ => b.clone(),
        },
    }
}

/// An interval of the rational line with independently open or closed ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalInterval {
    pub lower: Endpoint,
    pub upper: Endpoint,
}

impl RationalInterval {
    pub fn new(lower: Endpoint, upper: Endpoint) -> Self {
        Self { lower, upper }
    }

    pub fn unbounded() -> Self {
        Self::new(Endpoint::Unbounded, Endpoint::Unbounded)
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Self::new(Endpoint::Closed(lo), Endpoint::Closed(hi))
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Self::new(Endpoint::Open(lo), Endpoint::Open(hi))
    }

    /// `[0, 1]`, the domain of the mixing parameter.
    pub fn unit() -> Self {
        Self::closed(Rational::zero(), Rational::one())
    }

    /// Canonical empty interval `(0, 0)`.
    pub fn empty() -> Self {
        Self::open(Rational::zero(), Rational::zero())
    }

    /// `(value, +inf)`
    pub fn above(value: Rational) -> Self {
        Self::new(Endpoint::Open(value), Endpoint::Unbounded)
    }

    /// `(-inf, value)`
    pub fn below(value: Rational) -> Self {
        Self::new(Endpoint::Unbounded, Endpoint::Open(value))
    }

    pub fn is_empty(&self) -> bool {
        match (self.lower.value(), self.upper.value()) {
            (Some(lo), Some(hi)) => match lo.cmp(hi) {
                Ordering::Greater => true,
                Ordering::Equal => self.lower.is_open() || self.upper.is_open(),
                Ordering::Less => false,
            },
            _ => false,
        }
    }

    pub fn contains(&self, y: &Rational) -> bool {
        let lower_ok = match &self.lower {
            Endpoint::Unbounded => true,
            Endpoint::Closed(v) => y >= v,
            Endpoint::Open(v) => y > v,
        };
        let upper_ok = match &self.upper {
            Endpoint::Unbounded => true,
            Endpoint::Closed(v) => y <= v,
            Endpoint::Open(v) => y < v,
        };
        lower_ok && upper_ok
    }

    /// `y` lies in the interior (strictly between the endpoint values).
    pub fn contains_strictly(&self, y: &Rational) -> bool {
        let lower_ok = self.lower.value().is_none_or(|v| y > v);
        let upper_ok = self.upper.value().is_none_or(|v| y < v);
        lower_ok && upper_ok
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let out = Self::new(
            tighter(&self.lower, &other.lower, Side::Lower),
            tighter(&self.upper, &other.upper, Side::Upper),
        );
        if out.is_empty() {
            Self::empty()
        } else {
            out
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.is_empty() || self.intersect(other) == *self
    }

    /// Midpoint of a bounded non-empty interval.
    pub fn midpoint(&self) -> Option<Rational> {
        if self.is_empty() {
            return None;
        }
        let lo = self.lower.value()?;
        let hi = self.upper.value()?;
        Some((lo + hi) / int(2))
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "(empty)");
        }
        let (lb, lo) = match &self.lower {
            Endpoint::Unbounded => ('(', "-inf".to_string()),
            Endpoint::Open(v) => ('(', format_rational(v)),
            Endpoint::Closed(v) => ('[', format_rational(v)),
        };
        let (rb, hi) = match &self.upper {
            Endpoint::Unbounded => (')', "inf".to_string()),
            Endpoint::Open(v) => (')', format_rational(v)),
            Endpoint::Closed(v) => (']', format_rational(v)),
        };
        write!(f, "{lb}{lo}, {hi}{rb}")
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: String,
    hi: String,
    lo_open: bool,
    hi_open: bool,
}

impl Serialize for RationalInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let end = |e: &Endpoint, inf: &str| match e.value() {
            Some(v) => format_rational(v),
            None => inf.to_string(),
        };
        IntervalRepr {
            lo: end(&self.lower, "-inf"),
            hi: end(&self.upper, "inf"),
            lo_open: self.lower.is_open(),
            hi_open: self.upper.is_open(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = IntervalRepr::deserialize(d)?;
        let end = |text: &str, open: bool, inf: &str| -> std::result::Result<Endpoint, D::Error> {
            if text == inf {
                return Ok(Endpoint::Unbounded);
            }
            let v = parse_rational(text).map_err(D::Error::custom)?;
            Ok(if open {
                Endpoint::Open(v)
            } else {
                Endpoint::Closed(v)
            })
        };
        Ok(RationalInterval::new(
            end(&repr.lo, repr.lo_open, "-inf")?,
            end(&repr.hi, repr.hi_open, "inf")?,
        ))
    }
}

/// The part of `domain` where `f(y) > 0`, as an exact interval. The boundary
/// root is always excluded.
pub fn affine_positivity_interval(f: &AffineInY, domain: &RationalInterval) -> RationalInterval {
    let positive = match f.slope.cmp(&Rational::zero()) {
        Ordering::Equal => {
            if f.intercept.is_positive() {
                RationalInterval::unbounded()
            } else {
                RationalInterval::empty()
            }
        }
        Ordering::Greater => RationalInterval::above(f.root().expect("non-zero slope")),
        Ordering::Less => RationalInterval::below(f.root().expect("non-zero slope")),
    };
    domain.intersect(&positive)
}

/// Intersection of all intervals; the whole line for an empty input.
pub fn intersect_all<'a, I>(intervals: I) -> RationalInterval
where
    I: IntoIterator<Item = &'a RationalInterval>,
{
    intervals
        .into_iter()
        .fold(RationalInterval::unbounded(), |acc, iv| acc.intersect(iv))
}

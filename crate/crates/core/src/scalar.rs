//! Numeric abstraction shared by every algorithm in the crate.
//!
//! Graph costs, LP coefficients and ratio values are all written against
//! [`Scalar`], so the same code runs on `f64` for speed and on exact
//! rationals where comparisons must be exact (tight examples, golden LPs).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio, Rational64};
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Absolute slack for comparisons. Zero for exact types.
    fn epsilon() -> Self;

    fn is_exact() -> bool;

    /// Parses a plain decimal (`7`, `3.25`) or, for exact types, a
    /// fraction `p/q`. Decimals are converted without rounding where the
    /// type allows it.
    fn parse_decimal(s: &str) -> Option<Self>;

    /// Shortest text that parses back to the same value.
    fn to_decimal_string(&self) -> String;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits every scalar type")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= Self::epsilon()
    }

    /// `self < other` by more than the comparison slack.
    fn definitely_lt(&self, other: &Self) -> bool {
        self.clone() + Self::epsilon() < *other
    }

    fn is_positive_beyond_eps(&self) -> bool {
        *self > Self::epsilon()
    }
}

macro_rules! float_scalar {
    ($t:ty, $eps:expr) => {
        impl Scalar for $t {
            fn epsilon() -> Self {
                $eps
            }
            fn is_exact() -> bool {
                false
            }
            fn parse_decimal(s: &str) -> Option<Self> {
                let s = s.trim();
                if s.contains('/') {
                    let (p, q) = s.split_once('/')?;
                    let p: $t = p.trim().parse().ok()?;
                    let q: $t = q.trim().parse().ok()?;
                    return (q != 0.0).then(|| p / q);
                }
                s.parse().ok().filter(|v: &$t| v.is_finite())
            }
            fn to_decimal_string(&self) -> String {
                format!("{}", self)
            }
            fn from_ratio(numer: i64, denom: i64) -> Self {
                numer as $t / denom as $t
            }
        }
    };
}

float_scalar!(f64, 1e-9);
float_scalar!(f32, 1e-5);

/// Splits `[-]digits[.digits]` into an exact big rational.
fn parse_exact_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{}{}", int_part, frac_part);
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Some(if neg { -value } else { value })
}

/// Terminating decimal when the reduced denominator is of the form
/// 2^a 5^b, otherwise `p/q`.
fn format_exact(value: &BigRational) -> String {
    let numer = value.numer().clone();
    let denom = value.denom().clone();
    if denom.is_one() {
        return numer.to_string();
    }
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut rest, mut twos, mut fives) = (denom.clone(), 0usize, 0usize);
    while (&rest % &two).is_zero() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{}/{}", numer, denom);
    }
    let places = twos.max(fives);
    let scaled = numer * num_traits::pow(BigInt::from(10), places) / denom;
    let neg = scaled.is_negative();
    let mut digits = scaled.abs().to_string();
    if digits.len() <= places {
        digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
    }
    let split = digits.len() - places;
    format!("{}{}.{}", if neg { "-" } else { "" }, &digits[..split], &digits[split..])
}

impl Scalar for Rational64 {
    fn epsilon() -> Self {
        Ratio::zero()
    }
    fn is_exact() -> bool {
        true
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        let big = parse_exact_decimal(s)?;
        let numer = big.numer().to_i64()?;
        let denom = big.denom().to_i64()?;
        Some(Ratio::new(numer, denom))
    }
    fn to_decimal_string(&self) -> String {
        format_exact(&BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom())))
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }
}

impl Scalar for BigRational {
    fn epsilon() -> Self {
        BigRational::zero()
    }
    fn is_exact() -> bool {
        true
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        parse_exact_decimal(s)
    }
    fn to_decimal_string(&self) -> String {
        format_exact(self)
    }
    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }
}

/// Wrapper giving a total order for heap keys.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Ordered<S>(pub S);

impl<S: Scalar> Eq for Ordered<S> {}

impl<S: Scalar> PartialOrd for Ordered<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Ordered<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

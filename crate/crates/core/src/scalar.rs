//! The working field: exact rationals or binary64 floats behind one trait.

use std::fmt::{Debug, Display};

use dashu_int::IBig;
use num_traits::{Num, Signed, ToPrimitive};

use crate::Rational;

/// Relative pivot threshold used by float-mode elimination.
pub const FLOAT_PIVOT_EPS: f64 = 1e-12;

/// A field element the whole crate is generic over.
///
/// Two implementations exist: [`f64`] for calculus-type checks (Jacobians,
/// ODEs) and [`Rational`] for identity-type checks, where every residual is
/// expected to vanish identically.
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// `true` for exact arithmetic.
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;

    /// `num / den`; panics on a zero denominator.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Exact conversion for rationals (every finite double is a dyadic
    /// rational), plain copy for floats. `None` for NaN/inf.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Zero to working precision relative to `scale`.
    ///
    /// Exact mode ignores `scale` and tests for zero.
    fn is_negligible(&self, scale: &Self) -> bool;

    fn is_finite(&self) -> bool;

    /// Lossless text form: `"num/den"` for rationals, shortest round-trip
    /// decimal for floats.
    fn to_canonical_string(&self) -> String;

    /// Parses the canonical form. Both backends accept `"a/b"`, integers and
    /// decimals (`"0.25"`, `"1e-3"`); rationals convert decimals exactly.
    fn parse_canonical(s: &str) -> Option<Self>;

    /// The exact value, for backends that have one.
    fn as_rational(&self) -> Option<Rational> {
        None
    }

    /// Inverse of [`Scalar::as_rational`]; `None` for inexact backends.
    fn from_rational(_q: Rational) -> Option<Self> {
        None
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn max_abs<'a, I>(it: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
    {
        it.into_iter().fold(Self::zero(), |m, x| {
            let a = x.abs();
            if a > m {
                a
            } else {
                m
            }
        })
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, scale: &Self) -> bool {
        self.abs() <= FLOAT_PIVOT_EPS * scale.abs().max(f64::MIN_POSITIVE)
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn to_canonical_string(&self) -> String {
        format!("{self:?}")
    }

    fn parse_canonical(s: &str) -> Option<Self> {
        let s = s.trim();
        let v = match s.split_once('/') {
            Some((n, d)) => {
                let d: f64 = d.trim().parse().ok()?;
                if d == 0.0 {
                    return None;
                }
                n.trim().parse::<f64>().ok()? / d
            }
            None => s.parse().ok()?,
        };
        v.is_finite().then_some(v)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn from_rational(q: Rational) -> Option<Self> {
        Some(q)
    }

    fn from_i64(n: i64) -> Self {
        Rational::from(IBig::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational::from_parts_signed(IBig::from(num), IBig::from(den))
    }

    fn from_f64(x: f64) -> Option<Self> {
        Rational::try_from(x).ok()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn to_canonical_string(&self) -> String {
        format!("{}/{}", self.numerator(), self.denominator())
    }

    fn parse_canonical(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return None;
            }
            return Some(Rational::from_parts_signed(n, d));
        }
        if let Some(n) = parse_int(s) {
            return Some(Rational::from(n));
        }
        parse_decimal(s)
    }
}

/// Optionally signed decimal integer.
fn parse_int(s: &str) -> Option<IBig> {
    let s = s.trim();
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n = IBig::from_str_radix(digits, 10).ok()?;
    Some(if s.starts_with('-') { -n } else { n })
}

/// Exact parse of `[-]digits[.digits][e[-]digits]`.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = parse_int(&format!("0{int}{frac}"))?;
    let shift = exp - frac.len() as i32;
    let pow10 = IBig::from(10u8).pow(shift.unsigned_abs() as usize);
    let value = if shift >= 0 {
        Rational::from(digits * pow10)
    } else {
        Rational::from_parts_signed(digits, pow10)
    };
    Some(if neg { -value } else { value })
}

/// Raises `x` to a non-negative integer power.
pub fn powi<T: Scalar>(x: &T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, _| acc * x.clone())
}

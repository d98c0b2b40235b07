//! Ordered-field abstraction shared by every solver in the crate.
//!
//! Two instantiations exist: [`f64`] for continuous pairs and float mode, and
//! [`crate::exact::ExactReal`] for finite pairs, where every spherical function
//! value lies in a real cyclotomic field and all comparisons are decided
//! exactly.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
pub use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Absolute threshold below which a float is treated as zero.
pub const FLOAT_ZERO_TOL: f64 = 1e-12;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    /// True when arithmetic never rounds.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;

    /// `cos(2πm/n)`, exact where the scalar type allows.
    fn cos_2pi_frac(m: i64, n: u64) -> Self;

    /// Lift a float; exact types refuse, since continuous pairs are not
    /// representable exactly.
    fn from_f64(x: f64) -> Option<Self>;

    /// Sign of the value. Floats within `tol` of zero compare equal; exact
    /// scalars ignore `tol`.
    fn sign_tol(&self, tol: f64) -> Ordering;

    fn sign(&self) -> Ordering {
        self.sign_tol(FLOAT_ZERO_TOL)
    }

    fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn abs(&self) -> Self {
        if self.sign_tol(0.0) == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Compare `self` against `other` with the scalar's tolerance.
    fn cmp_tol(&self, other: &Self, tol: f64) -> Ordering {
        (self.clone() - other).sign_tol(tol)
    }

    /// `self -= a * b`; exact types override to avoid temporaries.
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        let prod = a.clone() * b;
        *self = std::mem::replace(self, Self::zero()) - &prod;
    }

    /// Canonical text form: `p/q` for rationals, shortest round-trip decimal
    /// for floats.
    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn cos_2pi_frac(m: i64, n: u64) -> Self {
        let n = n as i64;
        let r = m.rem_euclid(n);
        let r = r.min(n - r);
        match (4 * r).cmp(&n) {
            // exact quarter turn
            Ordering::Equal => 0.0,
            _ => (2.0 * std::f64::consts::PI * r as f64 / n as f64).cos(),
        }
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn sign_tol(&self, tol: f64) -> Ordering {
        if *self > tol {
            Ordering::Greater
        } else if *self < -tol {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
}

/// Parse `p/q`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Ok(i) = text.parse::<BigInt>() {
        return Some(BigRational::from_integer(i));
    }
    // Decimal literals are read exactly, digit by digit.
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (mantissa, exponent) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let scale = exponent - frac_part.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(digits);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -value } else { value })
}

/// `p/q` text for an exact rational (integers print without a denominator).
pub fn rational_text(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        let r = |p: i64, q: i64| BigRational::new(p.into(), q.into());
        assert_eq!(parse_rational("1/8"), Some(r(1, 8)));
        assert_eq!(parse_rational(" -3 "), Some(r(-3, 1)));
        assert_eq!(parse_rational("0.125"), Some(r(1, 8)));
        assert_eq!(parse_rational("1.5e-1"), Some(r(3, 20)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn float_sign_respects_tolerance() {
        assert_eq!(1e-13_f64.sign(), Ordering::Equal);
        assert_eq!((-1e-3_f64).sign(), Ordering::Less);
        assert_eq!(rational_text(&BigRational::new(4.into(), 2.into())), "2");
    }
}

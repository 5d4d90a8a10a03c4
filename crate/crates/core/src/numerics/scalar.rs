//! The scalar abstraction: exact rationals and `f64` behind one interface.
//!
//! Verifiers run in exact rational arithmetic by default, solvers in
//! floating point; both are instantiations of the same generic code over
//! [`Scalar`]. Conversions between the carriers are explicit:
//! [`exact_rational`] embeds a float exactly as a dyadic rational, while
//! [`nearby_rational`] rounds to the closest rational with a bounded
//! denominator via continued fractions.

use std::fmt::{Debug, Display};
use std::mem;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::linalg::Vector;
use crate::error::{Error, Result};

/// Exact rational numbers with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

/// Denominator bound used when snapping solver floats to rationals.
pub const DEFAULT_SNAP_DENOMINATOR: u64 = 1_000_000_000;

/// Arithmetic carrier for instances, points, and verifiers.
///
/// Implemented by [`Rational`] (exact) and `f64` (fast). Generic code may
/// only branch on the concrete carrier through [`Scalar::EXACT`], which is
/// what switches strict feasibility checks to tolerance-based ones.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic in this carrier is exact.
    const EXACT: bool;

    /// Embed a machine integer.
    fn from_int(v: i64) -> Self;

    /// Embed the fraction `p/q`.
    ///
    /// # Panics
    /// Panics when `q == 0`.
    fn from_ratio(p: i64, q: i64) -> Self;

    /// Absolute value.
    fn abs(&self) -> Self;

    /// Best-effort conversion to `f64`, used for reports and solver seeds.
    fn to_f64(&self) -> f64;

    /// Parse a number string: a decimal literal, optionally with an
    /// exponent (`-0.25`, `1e-3`), or a fraction `p/q`.
    fn parse(text: &str) -> Result<Self>;

    /// Render the scalar so that `parse(render(x))` returns `x` exactly.
    fn render(&self) -> String;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        p as f64 / q as f64
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid number {text:?}"));
        let value = match text.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p.trim().parse().map_err(|_| bad())?;
                let q: f64 = q.trim().parse().map_err(|_| bad())?;
                if q == 0.0 {
                    return Err(bad());
                }
                p / q
            }
            None => text.trim().parse().map_err(|_| bad())?,
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(bad())
        }
    }

    fn render(&self) -> String {
        // `{}` on f64 is the shortest representation that round-trips.
        format!("{self}")
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rational::from(BigInt::from(v))
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse(text: &str) -> Result<Self> {
        match text.split_once('/') {
            Some((p, q)) => {
                let p = parse_bigint(p.trim(), text)?;
                let q = parse_bigint(q.trim(), text)?;
                if q.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {text:?}")));
                }
                Ok(Rational::new(p, q))
            }
            None => parse_decimal_rational(text),
        }
    }

    fn render(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

fn parse_bigint(digits: &str, whole: &str) -> Result<BigInt> {
    digits
        .parse()
        .map_err(|_| Error::Parse(format!("invalid number {whole:?}")))
}

/// Parse a decimal literal with optional sign, fraction part, and exponent
/// into an exact rational (`"1.25e-2"` becomes `1/80`).
fn parse_decimal_rational(text: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("invalid number {text:?}"));
    let t = text.trim();
    let (mantissa, exponent) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (sign, unsigned) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match unsigned.split_once('.') {
        Some((i, f)) => (i, f),
        None => (unsigned, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .map_err(|_| bad())?;
    let digits = digits * sign;
    let shift = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let scaled = if shift >= 0 {
        Rational::from(digits * ten.pow(u32::try_from(shift).map_err(|_| bad())?))
    } else {
        Rational::new(digits, ten.pow(u32::try_from(-shift).map_err(|_| bad())?))
    };
    Ok(scaled)
}

/// Embed a finite `f64` exactly as a (dyadic) rational.
pub fn exact_rational(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite float {x}")))
}

/// Round a finite `f64` to the nearest rational whose denominator does not
/// exceed `max_denominator`, via continued-fraction convergents (with the
/// final semiconvergent refinement). Exact inputs within the bound are
/// returned unchanged.
pub fn nearby_rational(x: f64, max_denominator: u64) -> Result<Rational> {
    if max_denominator == 0 {
        return Err(Error::InvalidParams(
            "denominator bound must be positive".into(),
        ));
    }
    let target = exact_rational(x)?;
    let bound = BigInt::from(max_denominator);
    if *target.denom() <= bound {
        return Ok(target);
    }

    // Convergents h_k = a_k h_{k-1} + h_{k-2} of the continued fraction of
    // the target, computed in exact arithmetic.
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p_curr, mut q_curr) = (target.floor().to_integer(), BigInt::one());
    let mut rest = target.clone() - Rational::from(p_curr.clone());
    loop {
        if rest.is_zero() {
            // Exact representation reached within the bound.
            return Ok(Rational::new(p_curr, q_curr));
        }
        rest = rest.recip();
        let a = rest.floor().to_integer();
        rest -= Rational::from(a.clone());
        let p_next = &a * &p_curr + &p_prev;
        let q_next = &a * &q_curr + &q_prev;
        if q_next > bound {
            // Best semiconvergent within the bound, if any, then compare
            // against the last full convergent.
            let t = (&bound - &q_prev) / &q_curr;
            let convergent = Rational::new(p_curr.clone(), q_curr.clone());
            if t.is_zero() {
                return Ok(convergent);
            }
            let semi = Rational::new(&t * &p_curr + &p_prev, &t * &q_curr + &q_prev);
            let err_semi = Signed::abs(&(semi.clone() - target.clone()));
            let err_conv = Signed::abs(&(convergent.clone() - target));
            return Ok(if err_semi < err_conv { semi } else { convergent });
        }
        p_prev = mem::replace(&mut p_curr, p_next);
        q_prev = mem::replace(&mut q_curr, q_next);
    }
}

/// Snap every coordinate of a float point exactly (dyadic rationals).
pub fn snap_point_exact(v: &[f64]) -> Result<Vector<Rational>> {
    v.iter()
        .map(|&x| exact_rational(x))
        .collect::<Result<Vec<_>>>()
        .map(Vector::new)
}

/// Snap every coordinate of a float point to denominators bounded by
/// `max_denominator`.
pub fn snap_point_nearby(v: &[f64], max_denominator: u64) -> Result<Vector<Rational>> {
    v.iter()
        .map(|&x| nearby_rational(x, max_denominator))
        .collect::<Result<Vec<_>>>()
        .map(Vector::new)
}

//! Scalar rings the calculator works over.
//!
//! Three rings cover every operation: `i64` for integer-valued tables and
//! coefficients, [`Rat`] (reduced `i64` fractions) wherever exactness is
//! required, and [`Complex64`] for gauge phases and complex Toeplitz symbols.
//! Desk-scale inputs keep all exact arithmetic far away from `i64` overflow.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rat = num_rational::Ratio<i64>;

pub use num_complex::Complex64;

/// Build a rational from a numerator/denominator pair.
///
/// Panics if `den == 0`; use [`parse_rat`] for fallible construction.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

/// Common interface of the scalar rings.
pub trait Scalar:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    /// Ring identifier used in JSON payloads.
    const RING_TAG: &'static str;

    fn from_i64(v: i64) -> Self;

    /// Complex conjugate; identity on the real rings.
    fn conj(&self) -> Self;

    fn to_complex(&self) -> Complex64;

    /// Canonical string form used in JSON payloads.
    fn format_value(&self) -> String;

    /// Inverse of [`Scalar::format_value`]; accepts minor lenient variants.
    fn parse_value(text: &str) -> Result<Self>;
}

/// Scalars with exact ordering, i.e. embeddable in the rationals.
pub trait ExactScalar: Scalar {
    fn to_rat(&self) -> Rat;

    fn abs_rat(&self) -> Rat {
        self.to_rat().abs()
    }
}

impl Scalar for i64 {
    const RING_TAG: &'static str = "int";

    fn from_i64(v: i64) -> Self {
        v
    }

    fn conj(&self) -> Self {
        *self
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self as f64, 0.0)
    }

    fn format_value(&self) -> String {
        self.to_string()
    }

    fn parse_value(text: &str) -> Result<Self> {
        text.trim()
            .parse::<i64>()
            .map_err(|e| Error::schema(format!("bad integer value {text:?}: {e}")))
    }
}

impl ExactScalar for i64 {
    fn to_rat(&self) -> Rat {
        Rat::from_integer(*self)
    }
}

impl Scalar for Rat {
    const RING_TAG: &'static str = "rat";

    fn from_i64(v: i64) -> Self {
        Rat::from_integer(v)
    }

    fn conj(&self) -> Self {
        *self
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(*self), 0.0)
    }

    fn format_value(&self) -> String {
        format_rat(*self)
    }

    fn parse_value(text: &str) -> Result<Self> {
        parse_rat(text)
    }
}

impl ExactScalar for Rat {
    fn to_rat(&self) -> Rat {
        *self
    }
}

impl Scalar for Complex64 {
    const RING_TAG: &'static str = "cfloat";

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn format_value(&self) -> String {
        format_complex(*self)
    }

    fn parse_value(text: &str) -> Result<Self> {
        parse_complex(text)
    }
}

/// Reduced p/q form; the denominator is omitted when it is 1.
pub fn format_rat(value: Rat) -> String {
    if value.denom() == &1 {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parse "p" or "p/q" (q nonzero) into a reduced rational.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        None => (text, "1"),
        Some((n, d)) => (n, d),
    };
    let num = num
        .trim()
        .parse::<i64>()
        .map_err(|e| Error::schema(format!("bad rational numerator {text:?}: {e}")))?;
    let den = den
        .trim()
        .parse::<i64>()
        .map_err(|e| Error::schema(format!("bad rational denominator {text:?}: {e}")))?;
    if den == 0 {
        return Err(Error::schema(format!("zero denominator in {text:?}")));
    }
    Ok(Rat::new(num, den))
}

/// f64 value of a rational; desk-scale values stay well inside f64 range.
pub fn rat_to_f64(value: Rat) -> f64 {
    *value.numer() as f64 / *value.denom() as f64
}

/// Shortest round-tripping decimal form, "re" or "re+imi" / "re-imi".
pub fn format_complex(value: Complex64) -> String {
    if value.im == 0.0 {
        format!("{}", value.re)
    } else if value.im < 0.0 {
        format!("{}{}i", value.re, value.im)
    } else {
        format!("{}+{}i", value.re, value.im)
    }
}

/// Parse the forms produced by [`format_complex`], plus bare "bi".
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let text = text.trim();
    let bad = || Error::schema(format!("bad complex value {text:?}"));
    if let Some(body) = text.strip_suffix(['i', 'I']) {
        // Split before the sign of the imaginary part, skipping exponent signs.
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx];
            if (c == b'+' || c == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                split = Some(idx);
                break;
            }
        }
        match split {
            Some(idx) => {
                let re = body[..idx].trim().parse::<f64>().map_err(|_| bad())?;
                let im_text = body[idx..].trim();
                let im = match im_text {
                    "+" => 1.0,
                    "-" => -1.0,
                    _ => im_text.parse::<f64>().map_err(|_| bad())?,
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im = match body.trim() {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    other => other.parse::<f64>().map_err(|_| bad())?,
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re = text.parse::<f64>().map_err(|_| bad())?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// `base^exp` with overflow detection.
pub fn checked_pow_i64(base: i64, exp: u32) -> Result<i64> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::parameter(format!("{base}^{exp} overflows the exact integer range")))
}

/// `s^exp` as a `usize` table size, capped to keep tables desk-sized.
pub fn table_size(s: u32, level: u32) -> Result<usize> {
    const CAP: u64 = 1 << 24;
    let mut size: u64 = 1;
    for _ in 0..level {
        size = size.saturating_mul(u64::from(s));
        if size > CAP {
            return Err(Error::parameter(format!(
                "table of size {s}^{level} exceeds the supported cap of 2^24 entries"
            )));
        }
    }
    Ok(size as usize)
}

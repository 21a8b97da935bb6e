//! Finite-precision s-adic integers.
//!
//! An element of `Z_s` is held as its digit vector `x = sum_j x_j s^j` with
//! `0 <= x_j < s`, least significant digit first, truncated to a fixed
//! precision `N`. All arithmetic is digitwise with carries, so nothing ever
//! leaves the exact integer range regardless of `s^N`.
//!
//! The norm is `|x|_s = s^(-n)` where `n` is the index of the first nonzero
//! digit. A digit vector that is zero to precision `N` only certifies
//! `|x|_s <= s^(-N)`; that state is kept distinct from the true zero, which
//! only the integer `0` can certify.

use crate::error::{Error, Result};
use crate::scalar::{checked_pow_i64, Rat};

/// s-adic integer at fixed precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SAdic {
    base: u32,
    digits: Vec<u32>,
}

/// Norm of an s-adic quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SNorm {
    /// The true zero; only an exact integer input can produce it.
    Zero,
    /// All digits vanish at the working precision: `|x|_s <= s^(-precision)`.
    BelowPrecision { precision: usize },
    /// Exactly `s^(-n)` for the stored rational value.
    Exact(Rat),
}

impl SNorm {
    /// Order appropriate for ultrametric comparisons of values produced at a
    /// common base and precision: `Zero <= BelowPrecision <= Exact`, and any
    /// exact norm from such a computation strictly dominates the
    /// below-precision bound.
    pub fn le(&self, other: &SNorm) -> bool {
        match (self, other) {
            (SNorm::Zero, _) => true,
            (_, SNorm::Zero) => false,
            (SNorm::BelowPrecision { .. }, _) => true,
            (_, SNorm::BelowPrecision { .. }) => false,
            (SNorm::Exact(a), SNorm::Exact(b)) => a <= b,
        }
    }

    pub fn max(self, other: SNorm) -> SNorm {
        if self.le(&other) {
            other
        } else {
            self
        }
    }
}

fn check_base(s: u32) -> Result<()> {
    if s < 2 {
        return Err(Error::parameter(format!("base must be at least 2, got {s}")));
    }
    Ok(())
}

impl SAdic {
    /// Validate and wrap a raw digit vector.
    pub fn new(base: u32, digits: Vec<u32>) -> Result<SAdic> {
        check_base(base)?;
        if digits.is_empty() {
            return Err(Error::parameter("precision must be at least 1".to_string()));
        }
        if let Some(bad) = digits.iter().find(|d| **d >= base) {
            return Err(Error::parameter(format!(
                "digit {bad} out of range for base {base}"
            )));
        }
        Ok(SAdic { base, digits })
    }

    /// Reduction of an integer modulo `s^precision`, as digits.
    pub fn from_integer(v: i64, s: u32, precision: usize) -> Result<SAdic> {
        check_base(s)?;
        if precision == 0 {
            return Err(Error::parameter("precision must be at least 1".to_string()));
        }
        let s64 = i64::from(s);
        let mut rest = v;
        let mut digits = Vec::with_capacity(precision);
        for _ in 0..precision {
            digits.push(rest.rem_euclid(s64) as u32);
            rest = rest.div_euclid(s64);
        }
        Ok(SAdic { base: s, digits })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Residue modulo `s^level`, for `level <= precision`.
    pub fn residue(&self, level: u32) -> Result<u64> {
        let level = level as usize;
        if level > self.digits.len() {
            return Err(Error::parameter(format!(
                "residue at level {level} needs precision >= {level}, have {}",
                self.digits.len()
            )));
        }
        let mut r: u64 = 0;
        for &d in self.digits[..level].iter().rev() {
            r = r * u64::from(self.base) + u64::from(d);
        }
        Ok(r)
    }

    fn check_compatible(&self, other: &SAdic) -> Result<()> {
        if self.base != other.base {
            return Err(Error::parameter(format!(
                "base mismatch: {} vs {}",
                self.base, other.base
            )));
        }
        if self.digits.len() != other.digits.len() {
            return Err(Error::parameter(format!(
                "precision mismatch: {} vs {}",
                self.digits.len(),
                other.digits.len()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SAdic) -> Result<SAdic> {
        self.check_compatible(other)?;
        let s = u64::from(self.base);
        let mut carry = 0u64;
        let mut digits = Vec::with_capacity(self.digits.len());
        for (a, b) in self.digits.iter().zip(&other.digits) {
            let acc = u64::from(*a) + u64::from(*b) + carry;
            digits.push((acc % s) as u32);
            carry = acc / s;
        }
        Ok(SAdic { base: self.base, digits })
    }

    pub fn neg(&self) -> SAdic {
        if self.digits.iter().all(|d| *d == 0) {
            return self.clone();
        }
        // Base complement plus one.
        let s = u64::from(self.base);
        let mut carry = 1u64;
        let mut digits = Vec::with_capacity(self.digits.len());
        for d in &self.digits {
            let acc = u64::from(self.base - 1 - *d) + carry;
            digits.push((acc % s) as u32);
            carry = acc / s;
        }
        SAdic { base: self.base, digits }
    }

    pub fn sub(&self, other: &SAdic) -> Result<SAdic> {
        self.add(&other.neg())
    }

    /// Schoolbook product modulo `s^precision`.
    pub fn mul(&self, other: &SAdic) -> Result<SAdic> {
        self.check_compatible(other)?;
        let s = u128::from(self.base);
        let n = self.digits.len();
        let mut carry: u128 = 0;
        let mut digits = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = carry;
            for i in 0..=k {
                acc += u128::from(self.digits[i]) * u128::from(other.digits[k - i]);
            }
            digits.push((acc % s) as u32);
            carry = acc / s;
        }
        Ok(SAdic { base: self.base, digits })
    }

    /// Index of the first nonzero digit, if any.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.digits.iter().position(|d| *d != 0)
    }

    /// A unit of `Z_s` has a nonzero constant digit.
    pub fn is_unit(&self) -> bool {
        self.digits[0] != 0
    }

    pub fn norm(&self) -> Result<SNorm> {
        match self.first_nonzero() {
            None => Ok(SNorm::BelowPrecision {
                precision: self.digits.len(),
            }),
            Some(n) => {
                let denom = checked_pow_i64(i64::from(self.base), n as u32)?;
                Ok(SNorm::Exact(Rat::new(1, denom)))
            }
        }
    }

    /// Ultrametric distance `|a - b|_s` at the common precision.
    pub fn distance(&self, other: &SAdic) -> Result<SNorm> {
        self.sub(other)?.norm()
    }
}

impl std::fmt::Display for SAdic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let digits: Vec<String> = self.digits.iter().map(u32::to_string).collect();
        write!(f, "[{}] (s={})", digits.join(","), self.base)
    }
}

/// Valuation decomposition `l = s^m * l'` of a nonzero integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Valuation {
    pub s: u32,
    /// The exponent `m`.
    pub exponent: u32,
    /// The prime-to-s part `l'`.
    pub unit_part: i64,
}

impl Valuation {
    pub fn of(l: i64, s: u32) -> Result<Valuation> {
        check_base(s)?;
        if l == 0 {
            return Err(Error::domain(
                "the integer 0 has no valuation decomposition".to_string(),
            ));
        }
        let s64 = i64::from(s);
        let mut exponent = 0u32;
        let mut unit_part = l;
        while unit_part % s64 == 0 {
            unit_part /= s64;
            exponent += 1;
        }
        Ok(Valuation { s, exponent, unit_part })
    }

    /// Reassemble `s^m * l'`.
    pub fn value(&self) -> Result<i64> {
        let pow = checked_pow_i64(i64::from(self.s), self.exponent)?;
        self.unit_part
            .checked_mul(pow)
            .ok_or_else(|| Error::parameter("valuation value overflows".to_string()))
    }

    pub fn norm(&self) -> Result<Rat> {
        let denom = checked_pow_i64(i64::from(self.s), self.exponent)?;
        Ok(Rat::new(1, denom))
    }

    pub fn is_unit(&self) -> bool {
        self.exponent == 0
    }
}

/// Norm of an integer seen inside `Z_s`; the zero integer has true norm 0.
pub fn integer_norm(l: i64, s: u32) -> Result<SNorm> {
    check_base(s)?;
    if l == 0 {
        return Ok(SNorm::Zero);
    }
    Ok(SNorm::Exact(Valuation::of(l, s)?.norm()?))
}

/// Whether the integer is a unit of `Z_s`, i.e. not divisible by `s`.
pub fn integer_is_unit(l: i64, s: u32) -> Result<bool> {
    check_base(s)?;
    if l == 0 {
        return Ok(false);
    }
    Ok(l % i64::from(s) != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    #[test]
    fn digit_expansions() {
        assert_eq!(
            SAdic::from_integer(12, 3, 3).unwrap().digits(),
            &[0, 1, 1]
        );
        assert_eq!(
            SAdic::from_integer(-1, 2, 4).unwrap().digits(),
            &[1, 1, 1, 1]
        );
        assert_eq!(SAdic::from_integer(0, 5, 2).unwrap().digits(), &[0, 0]);
        assert_eq!(
            SAdic::from_integer(-6, 5, 3).unwrap().digits(),
            // -6 = 4 + 3*5 + 4*25 mod 125
            &[4, 3, 4]
        );
    }

    #[test]
    fn parameter_errors() {
        assert!(SAdic::from_integer(1, 1, 4).is_err());
        assert!(SAdic::from_integer(1, 2, 0).is_err());
        assert!(SAdic::new(3, vec![0, 3]).is_err());
        let a = SAdic::from_integer(1, 2, 4).unwrap();
        let b = SAdic::from_integer(1, 3, 4).unwrap();
        let c = SAdic::from_integer(1, 2, 5).unwrap();
        assert!(a.add(&b).is_err());
        assert!(a.mul(&c).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let four = SAdic::from_integer(4, 3, 2).unwrap();
        assert_eq!(four.add(&four).unwrap().digits(), &[2, 2]);
        let three = SAdic::from_integer(3, 5, 2).unwrap();
        let fourb = SAdic::from_integer(4, 5, 2).unwrap();
        assert_eq!(three.mul(&fourb).unwrap().digits(), &[2, 2]);
    }

    #[test]
    fn norms_and_valuations() {
        let v = Valuation::of(12, 3).unwrap();
        assert_eq!((v.exponent, v.unit_part), (1, 4));
        assert_eq!(v.norm().unwrap(), rat(1, 3));
        assert!(!v.is_unit());
        assert_eq!(v.value().unwrap(), 12);

        let v = Valuation::of(-4, 2).unwrap();
        assert_eq!((v.exponent, v.unit_part), (2, -1));
        assert_eq!(v.norm().unwrap(), rat(1, 4));

        let v = Valuation::of(7, 2).unwrap();
        assert!(v.is_unit());
        assert_eq!(v.norm().unwrap(), rat(1, 1));

        assert!(Valuation::of(0, 2).is_err());
        assert_eq!(integer_norm(0, 3).unwrap(), SNorm::Zero);
        assert_eq!(integer_norm(18, 3).unwrap(), SNorm::Exact(rat(1, 9)));
        assert!(integer_is_unit(7, 2).unwrap());
        assert!(!integer_is_unit(12, 3).unwrap());
        assert!(!integer_is_unit(0, 3).unwrap());
    }

    #[test]
    fn distance_and_precision_flag() {
        let one = SAdic::from_integer(1, 2, 4).unwrap();
        let three = SAdic::from_integer(3, 2, 4).unwrap();
        assert_eq!(one.distance(&three).unwrap(), SNorm::Exact(rat(1, 2)));
        assert_eq!(
            one.distance(&one).unwrap(),
            SNorm::BelowPrecision { precision: 4 }
        );
        // The flag is below every exact norm from the same precision.
        assert!(SNorm::BelowPrecision { precision: 4 }.le(&SNorm::Exact(rat(1, 8))));
        assert!(SNorm::Zero.le(&SNorm::BelowPrecision { precision: 4 }));
        assert!(!SNorm::Exact(rat(1, 8)).le(&SNorm::Zero));
    }

    #[test]
    fn units_have_unit_digit() {
        for v in [1i64, 3, 7, -5] {
            assert!(SAdic::from_integer(v, 2, 6).unwrap().is_unit());
        }
        for v in [0i64, 2, -4, 8] {
            assert!(!SAdic::from_integer(v, 2, 6).unwrap().is_unit());
        }
    }

    #[test]
    fn valuation_matches_digit_norm_on_a_sweep() {
        // Exhaustive at small range; the seeded suite widens this to 10^6.
        for s in [2u32, 3, 5] {
            for l in -2000i64..=2000 {
                if l == 0 {
                    continue;
                }
                let digits = SAdic::from_integer(l, s, 21).unwrap();
                let expected = Valuation::of(l, s).unwrap().norm().unwrap();
                assert_eq!(digits.norm().unwrap(), SNorm::Exact(expected), "l={l} s={s}");
                assert_eq!(
                    digits.is_unit(),
                    integer_is_unit(l, s).unwrap(),
                    "l={l} s={s}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn ring_homomorphism(u in -1000i64..=1000, v in -1000i64..=1000, si in 0usize..3) {
            let s = [2u32, 3, 5][si];
            let n = 8;
            let ua = SAdic::from_integer(u, s, n).unwrap();
            let va = SAdic::from_integer(v, s, n).unwrap();
            prop_assert_eq!(ua.add(&va).unwrap(), SAdic::from_integer(u + v, s, n).unwrap());
            prop_assert_eq!(ua.mul(&va).unwrap(), SAdic::from_integer(u * v, s, n).unwrap());
            prop_assert_eq!(ua.sub(&va).unwrap(), SAdic::from_integer(u - v, s, n).unwrap());
        }

        #[test]
        fn ultrametric_inequality(a in -5000i64..=5000, b in -5000i64..=5000, c in -5000i64..=5000, si in 0usize..3) {
            let s = [2u32, 3, 5][si];
            let n = 6;
            let xa = SAdic::from_integer(a, s, n).unwrap();
            let xb = SAdic::from_integer(b, s, n).unwrap();
            let xc = SAdic::from_integer(c, s, n).unwrap();
            let dac = xa.distance(&xc).unwrap();
            let dab = xa.distance(&xb).unwrap();
            let dbc = xb.distance(&xc).unwrap();
            prop_assert!(dac.le(&dab.max(dbc)));
        }

        #[test]
        fn valuation_consistency_wide(l in prop::sample::select(vec![-1_000_000i64, -999_983, -65536, -37, 37, 59049, 999_983, 1_000_000]), si in 0usize..3) {
            let s = [2u32, 3, 5][si];
            let digits = SAdic::from_integer(l, s, 21).unwrap();
            let expected = Valuation::of(l, s).unwrap().norm().unwrap();
            prop_assert_eq!(digits.norm().unwrap(), SNorm::Exact(expected));
        }
    }
}

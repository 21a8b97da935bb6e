//! Locally constant functions on `Z_s`.
//!
//! A level-`n` cylinder function is constant on the cylinders
//! `{z : z = r mod s^n}`, so it is a table of `s^n` values indexed by the
//! residue `r`. The endomorphism `alpha` sends `f` to the function that is
//! `f(z/s)` on `s Z_s` and `0` elsewhere; it raises the level by one.
//!
//! For a unit cylinder everything in it is a unit (level >= 1), so a function
//! supported on the units `Z_s^x` is a table vanishing at the residues
//! divisible by `s`. On such functions the exact Lipschitz seminorm
//! `L(f) = sup |f(a)-f(b)| / |a-b|_s` is a finite combinatorial maximum,
//! computed here by grouping unit residues by common prefix instead of
//! scanning all pairs.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::sadic::SAdic;
use crate::scalar::{checked_pow_i64, table_size, ExactScalar, Rat, Scalar};

/// Where a function is declared to live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// All of `Z_s`.
    Full,
    /// Supported on the units `Z_s^x`.
    Units,
}

/// Level-`n` cylinder function with values in the scalar ring `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylFn<S> {
    s: u32,
    level: u32,
    domain: Domain,
    values: Vec<S>,
}

/// Exact Lipschitz data of a unit-supported function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LipschitzData {
    /// The seminorm `L(f)`.
    pub seminorm: Rat,
    /// `sup |f|` over the units.
    pub sup: Rat,
    /// The norm `sup |f| + L(f)`.
    pub lip_norm: Rat,
    /// A pair of unit residues attaining the seminorm, when any pair exists.
    pub witness: Option<(u64, u64)>,
}

impl<S: Scalar> CylFn<S> {
    /// Validate and wrap a value table.
    pub fn new(s: u32, level: u32, domain: Domain, values: Vec<S>) -> Result<CylFn<S>> {
        if s < 2 {
            return Err(Error::parameter(format!("base must be at least 2, got {s}")));
        }
        let size = table_size(s, level)?;
        if values.len() != size {
            return Err(Error::parameter(format!(
                "level {level} over base {s} needs {size} values, got {}",
                values.len()
            )));
        }
        let f = CylFn { s, level, domain, values };
        if domain == Domain::Units {
            f.check_unit_support()?;
        }
        Ok(f)
    }

    fn check_unit_support(&self) -> Result<()> {
        if self.level == 0 {
            if !self.values[0].is_zero() {
                return Err(Error::domain(
                    "a level-0 unit-supported function must be zero".to_string(),
                ));
            }
            return Ok(());
        }
        for (r, v) in self.values.iter().enumerate() {
            if r % self.s as usize == 0 && !v.is_zero() {
                return Err(Error::domain(format!(
                    "unit-supported function has nonzero value at residue {r}"
                )));
            }
        }
        Ok(())
    }

    /// The constant function, at level 0 on the full domain.
    pub fn constant(s: u32, value: S) -> Result<CylFn<S>> {
        CylFn::new(s, 0, Domain::Full, vec![value])
    }

    pub fn zero(s: u32, level: u32, domain: Domain) -> Result<CylFn<S>> {
        let size = table_size(s, level)?;
        CylFn::new(s, level, domain, vec![S::zero(); size])
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn value_at_residue(&self, r: usize) -> &S {
        &self.values[r]
    }

    fn modulus(&self) -> i64 {
        self.values.len() as i64
    }

    /// Evaluate at an integer point of `Z_s`.
    pub fn eval(&self, z: i64) -> S {
        let r = z.rem_euclid(self.modulus()) as usize;
        self.values[r].clone()
    }

    /// Evaluate at `s^pow * w` without forming the (possibly huge) integer.
    pub fn eval_scaled(&self, pow: u32, w: i64) -> S {
        let m = self.modulus();
        if pow >= self.level {
            // s^pow = 0 mod s^level.
            return self.values[0].clone();
        }
        let mut p: i64 = 1;
        for _ in 0..pow {
            p = (p * i64::from(self.s)) % m;
        }
        let r = (p * w.rem_euclid(m)).rem_euclid(m) as usize;
        self.values[r].clone()
    }

    /// Evaluate at a digit vector; its precision must reach the table level.
    pub fn eval_sadic(&self, z: &SAdic) -> Result<S> {
        if z.base() != self.s {
            return Err(Error::parameter(format!(
                "base mismatch: function over {}, point over {}",
                self.s,
                z.base()
            )));
        }
        let r = z.residue(self.level)?;
        Ok(self.values[r as usize].clone())
    }

    /// Re-express at a higher level; the function is unchanged.
    pub fn refine(&self, level: u32) -> Result<CylFn<S>> {
        if level < self.level {
            return Err(Error::parameter(format!(
                "cannot refine from level {} down to {level}",
                self.level
            )));
        }
        let size = table_size(self.s, level)?;
        let m = self.values.len();
        let values = (0..size).map(|r| self.values[r % m].clone()).collect();
        CylFn::new(self.s, level, self.domain, values)
    }

    /// The endomorphism `alpha(f)(z) = f(z/s)` on `s Z_s`, `0` off it.
    pub fn alpha(&self) -> Result<CylFn<S>> {
        let s = self.s as usize;
        let size = table_size(self.s, self.level + 1)?;
        let m = self.values.len();
        let values = (0..size)
            .map(|r| {
                if r % s == 0 {
                    self.values[(r / s) % m].clone()
                } else {
                    S::zero()
                }
            })
            .collect();
        CylFn::new(self.s, self.level + 1, Domain::Full, values)
    }

    fn promote_pair(&self, other: &CylFn<S>) -> Result<(CylFn<S>, CylFn<S>)> {
        if self.s != other.s {
            return Err(Error::parameter(format!(
                "base mismatch: {} vs {}",
                self.s, other.s
            )));
        }
        let level = self.level.max(other.level);
        Ok((self.refine(level)?, other.refine(level)?))
    }

    pub fn add(&self, other: &CylFn<S>) -> Result<CylFn<S>> {
        let (a, b) = self.promote_pair(other)?;
        let values = a
            .values
            .into_iter()
            .zip(b.values)
            .map(|(x, y)| x + y)
            .collect();
        let domain = if self.domain == Domain::Units && other.domain == Domain::Units {
            Domain::Units
        } else {
            Domain::Full
        };
        CylFn::new(self.s, a.level, domain, values)
    }

    pub fn mul(&self, other: &CylFn<S>) -> Result<CylFn<S>> {
        let (a, b) = self.promote_pair(other)?;
        let values = a
            .values
            .into_iter()
            .zip(b.values)
            .map(|(x, y)| x * y)
            .collect();
        let domain = if self.domain == Domain::Units || other.domain == Domain::Units {
            Domain::Units
        } else {
            Domain::Full
        };
        CylFn::new(self.s, a.level, domain, values)
    }

    pub fn scale(&self, factor: &S) -> CylFn<S> {
        let values = self
            .values
            .iter()
            .map(|v| v.clone() * factor.clone())
            .collect();
        CylFn {
            s: self.s,
            level: self.level,
            domain: self.domain,
            values,
        }
    }

    pub fn neg(&self) -> CylFn<S> {
        self.scale(&(-S::one()))
    }

    pub fn sub(&self, other: &CylFn<S>) -> Result<CylFn<S>> {
        self.add(&other.neg())
    }

    /// Equality as functions on `Z_s`, regardless of level or domain tag.
    pub fn equiv(&self, other: &CylFn<S>) -> bool {
        if self.s != other.s {
            return false;
        }
        match self.promote_pair(other) {
            Ok((a, b)) => a.values == b.values,
            Err(_) => false,
        }
    }

    pub fn map_values<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Result<CylFn<T>> {
        CylFn::new(
            self.s,
            self.level,
            self.domain,
            self.values.iter().map(f).collect(),
        )
    }

    /// Zero out the non-unit residues and retag as a unit-supported function.
    pub fn restrict_to_units(&self) -> Result<CylFn<S>> {
        let f = if self.level == 0 { self.refine(1)? } else { self.clone() };
        let s = self.s as usize;
        let values = f
            .values
            .iter()
            .enumerate()
            .map(|(r, v)| if r % s == 0 { S::zero() } else { v.clone() })
            .collect();
        CylFn::new(f.s, f.level, Domain::Units, values)
    }
}

impl<S: ExactScalar> CylFn<S> {
    /// Exact Lipschitz data over the units.
    ///
    /// Unit residues are grouped by their residue class modulo `s^k`; inside
    /// a class, two residues realize `|a-b|_s = s^(-k)` exactly when their
    /// digit `k` differs, so per class only the per-digit extrema matter.
    /// This is the production path; the all-pairs oracle in
    /// [`crate::verify::oracle`] recomputes the same data by brute force.
    pub fn lipschitz(&self) -> Result<LipschitzData> {
        if self.domain != Domain::Units {
            return Err(Error::domain(
                "Lipschitz data is defined for unit-supported functions".to_string(),
            ));
        }
        let zero = Rat::from_integer(0);
        if self.level == 0 {
            return Ok(LipschitzData {
                seminorm: zero,
                sup: zero,
                lip_norm: zero,
                witness: None,
            });
        }
        let s = self.s as usize;
        let size = self.values.len();
        let unit_residues: Vec<usize> = (0..size).filter(|r| r % s != 0).collect();
        let sup = unit_residues
            .iter()
            .map(|r| self.values[*r].abs_rat())
            .max()
            .unwrap_or(zero);

        // (max, argmax, min, argmin) of the table over one residue class.
        type Extrema = (Rat, usize, Rat, usize);
        let mut seminorm = zero;
        let mut witness: Option<(u64, u64)> = None;
        let mut sk: usize = 1;
        for _k in 0..self.level {
            // Per class c mod s^k and digit d at position k: extrema of f.
            let mut extrema: std::collections::BTreeMap<(usize, usize), Extrema> =
                std::collections::BTreeMap::new();
            for &r in &unit_residues {
                let c = r % sk;
                let d = (r / sk) % s;
                let v = self.values[r].to_rat();
                extrema
                    .entry((c, d))
                    .and_modify(|(max, amax, min, amin)| {
                        if v > *max {
                            *max = v;
                            *amax = r;
                        }
                        if v < *min {
                            *min = v;
                            *amin = r;
                        }
                    })
                    .or_insert((v, r, v, r));
            }
            let scale = Rat::from_integer(sk as i64);
            let mut per_class: std::collections::BTreeMap<usize, Vec<(usize, Extrema)>> =
                std::collections::BTreeMap::new();
            for ((c, d), e) in extrema {
                per_class.entry(c).or_default().push((d, e));
            }
            for (_c, digits) in per_class {
                for (da, (max_a, amax, _, _)) in &digits {
                    for (db, (_, _, min_b, amin)) in &digits {
                        if da == db {
                            continue;
                        }
                        let candidate = (*max_a - *min_b) * scale;
                        if candidate > seminorm {
                            seminorm = candidate;
                            witness = Some((*amax as u64, *amin as u64));
                        }
                    }
                }
            }
            sk *= s;
        }
        // A nonzero table always admits at least one admissible pair when two
        // unit residues exist; otherwise the seminorm is an empty max.
        if witness.is_none() && unit_residues.len() >= 2 {
            witness = Some((unit_residues[0] as u64, unit_residues[1] as u64));
        }
        Ok(LipschitzData {
            seminorm,
            sup,
            lip_norm: sup + seminorm,
            witness,
        })
    }
}

/// Indicator of the cylinder `{z = x mod s^level}`.
pub fn indicator(s: u32, level: u32, x: u64) -> Result<CylFn<i64>> {
    let size = table_size(s, level)?;
    if x as usize >= size {
        return Err(Error::parameter(format!(
            "residue {x} out of range for level {level} over base {s}"
        )));
    }
    let mut values = vec![0i64; size];
    values[x as usize] = 1;
    CylFn::new(s, level, Domain::Full, values)
}

/// `|a - b|_s` for integer points, as an exact rational (`a != b`).
pub fn integer_distance(a: i64, b: i64, s: u32) -> Result<Rat> {
    if a == b {
        return Err(Error::domain(
            "integer distance of equal points is the true zero".to_string(),
        ));
    }
    let v = crate::sadic::Valuation::of(a - b, s)?;
    let denom = checked_pow_i64(i64::from(s), v.exponent)?;
    Ok(Rat::new(1, denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn f(s: u32, level: u32, vals: Vec<i64>) -> CylFn<i64> {
        CylFn::new(s, level, Domain::Full, vals).unwrap()
    }

    #[test]
    fn construction_and_errors() {
        assert!(CylFn::new(1, 0, Domain::Full, vec![1i64]).is_err());
        assert!(CylFn::new(2, 2, Domain::Full, vec![1i64; 3]).is_err());
        assert!(CylFn::new(2, 1, Domain::Units, vec![1i64, 0]).is_err());
        assert!(CylFn::new(2, 0, Domain::Units, vec![3i64]).is_err());
        assert!(CylFn::new(2, 0, Domain::Units, vec![0i64]).is_ok());
        assert!(indicator(2, 2, 4).is_err());
    }

    #[test]
    fn evaluation() {
        let ind = indicator(2, 2, 3).unwrap();
        assert_eq!(ind.eval(7), 1);
        assert_eq!(ind.eval(5), 0);
        assert_eq!(ind.eval(-1), 1); // -1 = 3 mod 4
        let z = SAdic::from_integer(7, 2, 5).unwrap();
        assert_eq!(ind.eval_sadic(&z).unwrap(), 1);
        let short = SAdic::from_integer(7, 2, 1).unwrap();
        assert!(ind.eval_sadic(&short).is_err());
        let other_base = SAdic::from_integer(7, 3, 5).unwrap();
        assert!(ind.eval_sadic(&other_base).is_err());
    }

    #[test]
    fn eval_scaled_matches_direct() {
        let g = f(3, 3, (0..27).collect());
        for pow in 0..6u32 {
            for w in -30i64..=30 {
                let direct = g.eval(3i64.pow(pow) * w);
                assert_eq!(g.eval_scaled(pow, w), direct, "pow={pow} w={w}");
            }
        }
    }

    #[test]
    fn refinement() {
        let ind = indicator(2, 1, 1).unwrap();
        let fine = ind.refine(3).unwrap();
        assert_eq!(fine.values(), &[0, 1, 0, 1, 0, 1, 0, 1]);
        assert!(fine.equiv(&ind));
        assert!(ind.refine(0).is_err());
    }

    #[test]
    fn alpha_on_indicators() {
        // alpha shifts a cylinder at x to the cylinder at s*x, one level up.
        let a = indicator(2, 1, 1).unwrap().alpha().unwrap();
        assert!(a.equiv(&indicator(2, 2, 2).unwrap()));
        let b = indicator(3, 2, 5).unwrap().alpha().unwrap();
        assert!(b.equiv(&indicator(3, 3, 15).unwrap()));
        // alpha of the constant 1 is the indicator of s Z_s.
        let one = CylFn::constant(2, 1i64).unwrap();
        let a1 = one.alpha().unwrap();
        assert_eq!(a1.values(), &[1, 0]);
    }

    #[test]
    fn ring_operations_promote_levels() {
        let a = indicator(2, 1, 1).unwrap();
        let b = indicator(2, 2, 3).unwrap();
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.level(), 2);
        assert_eq!(sum.values(), &[0, 1, 0, 2]);
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod.values(), &[0, 0, 0, 1]);
        let other = indicator(3, 1, 1).unwrap();
        assert!(a.add(&other).is_err());
        assert_eq!(a.scale(&-2).values(), &[0, -2]);
    }

    #[test]
    fn unit_domain_propagation() {
        let u = indicator(2, 2, 3).unwrap().restrict_to_units().unwrap();
        assert_eq!(u.domain(), Domain::Units);
        let full = indicator(2, 2, 2).unwrap();
        assert_eq!(u.mul(&full).unwrap().domain(), Domain::Units);
        assert_eq!(u.add(&full).unwrap().domain(), Domain::Full);
        assert_eq!(u.add(&u).unwrap().domain(), Domain::Units);
    }

    #[test]
    fn lipschitz_examples() {
        let f23 = indicator(2, 2, 3).unwrap().restrict_to_units().unwrap();
        let data = f23.lipschitz().unwrap();
        assert_eq!(data.seminorm, rat(2, 1));
        assert_eq!(data.sup, rat(1, 1));
        assert_eq!(data.lip_norm, rat(3, 1));
        let (a, b) = data.witness.unwrap();
        assert_eq!(
            (f23.eval(a as i64) - f23.eval(b as i64)).abs(),
            1,
            "witness values must differ"
        );
        assert_eq!(integer_distance(a as i64, b as i64, 2).unwrap(), rat(1, 2));

        let g = indicator(3, 1, 2).unwrap().restrict_to_units().unwrap();
        let data = g.lipschitz().unwrap();
        assert_eq!(data.seminorm, rat(1, 1));
        assert_eq!(data.lip_norm, rat(2, 1));

        // Base 2, level 1: the units form a single residue, no pairs.
        let lone = CylFn::new(2, 1, Domain::Units, vec![0i64, 5]).unwrap();
        let data = lone.lipschitz().unwrap();
        assert_eq!(data.seminorm, rat(0, 1));
        assert_eq!(data.sup, rat(5, 1));

        let full = indicator(2, 2, 2).unwrap();
        assert!(full.lipschitz().is_err());
    }

    #[test]
    fn lipschitz_matches_oracle_on_small_functions() {
        use crate::verify::oracle;
        for s in [2u32, 3] {
            let size = table_size(s, 3).unwrap();
            for trial in 0..40usize {
                let values: Vec<i64> = (0..size)
                    .map(|r| {
                        if r % s as usize == 0 {
                            0
                        } else {
                            ((r * 31 + trial * 17) % 9) as i64 - 4
                        }
                    })
                    .collect();
                let g = CylFn::new(s, 3, Domain::Units, values).unwrap();
                let fast = g.lipschitz().unwrap();
                let slow = oracle::lipschitz_all_pairs(&g).unwrap();
                assert_eq!(fast.seminorm, slow.seminorm, "s={s} trial={trial}");
                assert_eq!(fast.sup, slow.sup);
            }
        }
    }

    proptest! {
        #[test]
        fn alpha_is_multiplicative(vals_a in prop::collection::vec(-4i64..=4, 9), vals_b in prop::collection::vec(-4i64..=4, 9)) {
            let a = f(3, 2, vals_a);
            let b = f(3, 2, vals_b);
            let lhs = a.mul(&b).unwrap().alpha().unwrap();
            let rhs = a.alpha().unwrap().mul(&b.alpha().unwrap()).unwrap();
            prop_assert!(lhs.equiv(&rhs));
            let sums = a.add(&b).unwrap().alpha().unwrap();
            prop_assert!(sums.equiv(&a.alpha().unwrap().add(&b.alpha().unwrap()).unwrap()));
        }

        #[test]
        fn refine_commutes_with_alpha_and_ops(vals in prop::collection::vec(-4i64..=4, 4), extra in 0u32..3) {
            let a = f(2, 2, vals);
            let lhs = a.alpha().unwrap().refine(a.level() + 1 + extra).unwrap();
            let rhs = a.refine(a.level() + extra).unwrap().alpha().unwrap();
            prop_assert_eq!(lhs.values(), rhs.values());
        }

        #[test]
        fn eval_is_refinement_invariant(vals in prop::collection::vec(-4i64..=4, 8), z in -64i64..=64, extra in 0u32..3) {
            let a = f(2, 3, vals);
            prop_assert_eq!(a.refine(3 + extra).unwrap().eval(z), a.eval(z));
        }
    }
}

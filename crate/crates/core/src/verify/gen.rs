//! Seeded input generators for the verification suites.
//!
//! Every generator draws from the caller's stream in a fixed documented
//! order, so a `(seed, suite)` pair replays the exact same inputs.

use std::collections::BTreeMap;

use rand::Rng;

use crate::cylinder::{CylFn, Domain};
use crate::error::Result;
use crate::khomology::{in_t, HomT};
use crate::operators::ToeplitzSymbol;
use crate::scalar::{rat, table_size, Rat};
use crate::spectral::{MultFamily, PolyElement};

/// Integer table with entries in `[-bound, bound]`; unit-domain tables get
/// zeros on the multiples of `s`.
pub fn int_cylfn(
    rng: &mut impl Rng,
    s: u32,
    level: u32,
    domain: Domain,
    bound: i64,
) -> Result<CylFn<i64>> {
    let size = table_size(s, level)?;
    let values = (0..size)
        .map(|r| {
            if domain == Domain::Units && r % s as usize == 0 {
                0
            } else {
                rng.random_range(-bound..=bound)
            }
        })
        .collect();
    CylFn::new(s, level, domain, values)
}

/// Rational table with numerators in `[-6, 6]` and denominators in `[1, 4]`.
pub fn rat_cylfn(rng: &mut impl Rng, s: u32, level: u32, domain: Domain) -> Result<CylFn<Rat>> {
    let size = table_size(s, level)?;
    let values = (0..size)
        .map(|r| {
            if domain == Domain::Units && r % s as usize == 0 {
                Rat::from_integer(0)
            } else {
                rat(rng.random_range(-6..=6), rng.random_range(1..=4))
            }
        })
        .collect();
    CylFn::new(s, level, domain, values)
}

/// Unit-supported integer function with `f(1) = 0`, level in `[1, max_level]`.
pub fn admissible_cylfn(
    rng: &mut impl Rng,
    s: u32,
    max_level: u32,
    bound: i64,
) -> Result<CylFn<i64>> {
    let level = rng.random_range(1..=max_level);
    let size = table_size(s, level)?;
    let mut values: Vec<i64> = (0..size)
        .map(|r| {
            if r % s as usize == 0 {
                0
            } else {
                rng.random_range(-bound..=bound)
            }
        })
        .collect();
    values[1] = 0;
    CylFn::new(s, level, Domain::Units, values)
}

/// A uniform point of `T` in `[lo, hi]`.
pub fn t_point(rng: &mut impl Rng, s: u32, lo: u64, hi: u64) -> u64 {
    loop {
        let y = rng.random_range(lo..=hi);
        if in_t(y, s) {
            return y;
        }
    }
}

/// Functional with 1 to `max_terms` support points in `T ∩ [lo, hi]` and
/// coefficients in `[-3, 3] \ {0}`.
pub fn homt(rng: &mut impl Rng, s: u32, lo: u64, hi: u64, max_terms: usize) -> Result<HomT> {
    const COEFFS: [i64; 6] = [-3, -2, -1, 1, 2, 3];
    let wanted = rng.random_range(1..=max_terms);
    let mut coeffs = BTreeMap::new();
    for _ in 0..wanted {
        let y = t_point(rng, s, lo, hi);
        let c = COEFFS[rng.random_range(0..COEFFS.len())];
        coeffs.entry(y).or_insert(c);
    }
    HomT::new(s, coeffs)
}

/// Rational symbol with up to `max_terms` frequencies in `[-max_m, max_m]`.
pub fn toeplitz_rat(rng: &mut impl Rng, max_m: i64, max_terms: usize) -> ToeplitzSymbol<Rat> {
    let wanted = rng.random_range(0..=max_terms);
    let mut coeffs = BTreeMap::new();
    for _ in 0..wanted {
        let m = rng.random_range(-max_m..=max_m);
        coeffs.insert(m, rat(rng.random_range(-6..=6), rng.random_range(1..=4)));
    }
    ToeplitzSymbol::new(coeffs)
}

/// Family of 1 to 3 unit-supported rational functions indexed by
/// `l ∈ [0, max_l]`, each of level in `[1, max_level]`.
pub fn mult_family(
    rng: &mut impl Rng,
    s: u32,
    max_l: u32,
    max_level: u32,
) -> Result<MultFamily> {
    let wanted = rng.random_range(1..=3);
    let mut terms = BTreeMap::new();
    for _ in 0..wanted {
        let l = rng.random_range(0..=max_l);
        let level = rng.random_range(1..=max_level);
        terms.insert(l, rat_cylfn(rng, s, level, Domain::Units)?);
    }
    MultFamily::new(s, terms)
}

/// Polynomial element rescaled (exactly) into the closed ball
/// `norm_1(a) <= cap`.
pub fn poly_element(rng: &mut impl Rng, s: u32, cap: i64) -> Result<PolyElement> {
    let toeplitz = toeplitz_rat(rng, 3, 3);
    let mut ideal = BTreeMap::new();
    for _ in 0..rng.random_range(0..=2) {
        let n = rng.random_range(-2i64..=2);
        ideal.insert(n, mult_family(rng, s, 2, 2)?);
    }
    let raw = PolyElement::new(s, toeplitz, ideal)?;

    let cap = Rat::from_integer(cap);
    let norm1 = raw.frechet_norm(1)?;
    if norm1 <= cap {
        return Ok(raw);
    }
    let factor = cap / norm1;
    let toeplitz = ToeplitzSymbol::new(
        raw.toeplitz()
            .coeffs()
            .iter()
            .map(|(m, v)| (*m, *v * factor))
            .collect(),
    );
    let ideal = raw
        .ideal()
        .iter()
        .map(|(n, family)| {
            let terms = family
                .terms()
                .iter()
                .map(|(l, f)| (*l, f.scale(&factor)))
                .collect();
            MultFamily::new(s, terms).map(|scaled| (*n, scaled))
        })
        .collect::<Result<BTreeMap<i64, MultFamily>>>()?;
    PolyElement::new(s, toeplitz, ideal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::rng_for;
    use crate::verify::SuiteKind;

    #[test]
    fn generators_replay_under_the_same_seed() {
        let mut one = rng_for(42, SuiteKind::Khom);
        let mut two = rng_for(42, SuiteKind::Khom);
        for _ in 0..20 {
            assert_eq!(
                admissible_cylfn(&mut one, 3, 4, 4).unwrap(),
                admissible_cylfn(&mut two, 3, 4, 4).unwrap()
            );
            assert_eq!(
                homt(&mut one, 2, 2, 100, 4).unwrap(),
                homt(&mut two, 2, 2, 100, 4).unwrap()
            );
        }
        let mut other_suite = rng_for(42, SuiteKind::Spectral);
        let differs = (0..20).any(|_| {
            homt(&mut one, 2, 2, 100, 4).unwrap() != homt(&mut other_suite, 2, 2, 100, 4).unwrap()
        });
        assert!(differs, "suite index must decorrelate the streams");
    }

    #[test]
    fn admissible_functions_are_admissible() {
        let mut rng = rng_for(7, SuiteKind::Khom);
        for s in [2u32, 3, 5] {
            for _ in 0..50 {
                let f = admissible_cylfn(&mut rng, s, 4, 4).unwrap();
                assert_eq!(f.domain(), Domain::Units);
                assert_eq!(f.eval(1), 0);
            }
        }
    }

    #[test]
    fn homt_respects_t_and_coefficient_range() {
        let mut rng = rng_for(9, SuiteKind::Fredholm);
        for s in [2u32, 3, 5] {
            for _ in 0..50 {
                let phi = homt(&mut rng, s, 2, 100, 4).unwrap();
                assert!(!phi.is_empty());
                for (y, c) in phi.coeffs() {
                    assert!(in_t(*y, s));
                    assert!((-3..=3).contains(c) && *c != 0);
                }
            }
        }
    }

    #[test]
    fn poly_elements_land_in_the_norm_ball() {
        let mut rng = rng_for(3, SuiteKind::Spectral);
        for _ in 0..30 {
            let a = poly_element(&mut rng, 2, 100).unwrap();
            assert!(a.frechet_norm(1).unwrap() <= Rat::from_integer(100));
        }
    }
}

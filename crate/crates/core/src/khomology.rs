//! Combinatorics of the index set `T` and the dual generator calculus.
//!
//! `T = {x >= 2 : s does not divide x}` indexes a free basis of the group of
//! integer unit-supported cylinder functions modulo constants: `x` has level
//! `n(x)` with `s^(n(x)-1) <= x < s^n(x)` and "parent" `gamma(x) = x mod
//! s^(n(x)-1)`, and the basis element is the unit cylinder indicator
//! `1_(x) = 1_(n(x), x)`. Every admissible function expands uniquely over
//! this basis; the expansion coefficients are recovered either by evaluation
//! differences along `gamma` or by recursively rewriting cylinder indicators
//! one level down. Both paths are implemented and must agree.

use std::collections::BTreeMap;

use crate::cylinder::{CylFn, Domain};
use crate::error::{Error, Result};
use crate::scalar::table_size;

/// A validated member of `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TIndex(u64);

impl TIndex {
    pub fn new(y: u64, s: u32) -> Result<TIndex> {
        if !in_t(y, s) {
            return Err(Error::domain(format!(
                "{y} is not in T for s = {s} (need y >= 2 and s not dividing y)"
            )));
        }
        Ok(TIndex(y))
    }

    pub fn value(&self) -> u64 {
        self.0
    }
}

/// Membership in `T`.
pub fn in_t(x: u64, s: u32) -> bool {
    x >= 2 && !x.is_multiple_of(u64::from(s))
}

fn check_base(s: u32) -> Result<()> {
    if s < 2 {
        return Err(Error::parameter(format!("base must be at least 2, got {s}")));
    }
    Ok(())
}

/// The level `n(x)` with `s^(n(x)-1) <= x < s^n(x)` and `gamma(x)`, for `x >= 2`.
pub fn level_and_gamma(x: u64, s: u32) -> Result<(u32, u64)> {
    check_base(s)?;
    if x < 2 {
        return Err(Error::domain(format!("level/gamma need x >= 2, got {x}")));
    }
    let s = u64::from(s);
    let mut n = 1u32;
    let mut pow = s; // s^n
    while x >= pow {
        pow = pow.checked_mul(s).ok_or_else(|| {
            Error::parameter(format!("level of {x} over base {s} overflows"))
        })?;
        n += 1;
    }
    Ok((n, x % (pow / s)))
}

/// The iterated-`gamma` orbit of `z`, keeping only members of `T`.
///
/// `gamma` strictly decreases, and once an iterate drops below 2 (to 0 or 1)
/// the orbit is over. Iterates divisible by `s` stay divisible, so a `z`
/// outside `T` contributes an empty orbit.
pub fn gamma_orbit(z: u64, s: u32) -> Result<Vec<TIndex>> {
    check_base(s)?;
    if z < 2 {
        return Err(Error::domain(format!("gamma orbit needs z >= 2, got {z}")));
    }
    let mut orbit = Vec::new();
    let mut x = z;
    while x >= 2 {
        if in_t(x, s) {
            orbit.push(TIndex(x));
        }
        let (_, g) = level_and_gamma(x, s)?;
        debug_assert!(g < x);
        x = g;
    }
    Ok(orbit)
}

/// The basis generator `1_(x) = 1_(n(x), x)` as a unit-supported function.
pub fn generator(x: u64, s: u32) -> Result<CylFn<i64>> {
    let x = TIndex::new(x, s)?.value();
    let (n, _) = level_and_gamma(x, s)?;
    let size = table_size(s, n)?;
    let mut values = vec![0i64; size];
    values[x as usize] = 1;
    CylFn::new(s, n, Domain::Units, values)
}

/// Check that `f` is admissible for expansion: integer-valued, supported on
/// the units, and vanishing at the point 1.
fn check_admissible(f: &CylFn<i64>) -> Result<()> {
    let s = f.s() as usize;
    if f.level() == 0 {
        if f.values()[0] != 0 {
            return Err(Error::domain(
                "a level-0 admissible function must be zero".to_string(),
            ));
        }
        return Ok(());
    }
    for (r, v) in f.values().iter().enumerate() {
        if r % s == 0 && *v != 0 {
            return Err(Error::domain(format!(
                "function is not supported on the units: nonzero at residue {r}"
            )));
        }
    }
    if f.eval(1) != 0 {
        return Err(Error::domain(
            "admissible functions must vanish at 1".to_string(),
        ));
    }
    Ok(())
}

/// Point evaluation `delta_z(f) = f(z)`.
pub fn delta(f: &CylFn<i64>, z: u64) -> Result<i64> {
    let z = i64::try_from(z).map_err(|_| Error::parameter(format!("point {z} too large")))?;
    Ok(f.eval(z))
}

/// The dual functional `e_(z)(f) = f(z) - f(gamma(z))`, for `z >= 2`.
pub fn e_hom(f: &CylFn<i64>, z: u64) -> Result<i64> {
    let (_, g) = level_and_gamma(z, f.s())?;
    Ok(delta(f, z)? - delta(f, g)?)
}

/// Expansion coefficients of `f` over the generators, by evaluation
/// differences: the coefficient at `x` is `f(x) - f(gamma(x))`, and every
/// `x >= s^level(f)` evaluates to zero because `x` and `gamma(x)` share the
/// residue that determines `f`.
pub fn expand(f: &CylFn<i64>) -> Result<BTreeMap<u64, i64>> {
    check_admissible(f)?;
    let s = f.s();
    let bound = f.values().len() as u64;
    let mut coeffs = BTreeMap::new();
    for x in 2..bound {
        if !in_t(x, s) {
            continue;
        }
        let c = e_hom(f, x)?;
        if c != 0 {
            coeffs.insert(x, c);
        }
    }
    Ok(coeffs)
}

/// Expansion coefficients by recursive rewriting of cylinder indicators.
///
/// Starting from the level-`n` table, an indicator `1_(k, r)` whose residue
/// already satisfies `r >= s^(k-1)` is the basis element `1_(r)`; otherwise
/// `1_(k, r) = 1_(k-1, r) - sum_{l=1}^{s-1} 1_(r + l s^(k-1))`, pushing work
/// one level down and emitting basis terms.
pub fn expand_recursive(f: &CylFn<i64>) -> Result<BTreeMap<u64, i64>> {
    check_admissible(f)?;
    let s = u64::from(f.s());
    let n = f.level();
    let mut coeffs: BTreeMap<u64, i64> = BTreeMap::new();
    let mut work: Vec<BTreeMap<u64, i64>> = vec![BTreeMap::new(); n as usize + 1];
    for (r, v) in f.values().iter().enumerate() {
        if *v != 0 {
            work[n as usize].insert(r as u64, *v);
        }
    }
    let add = |coeffs: &mut BTreeMap<u64, i64>, x: u64, c: i64| {
        let e = coeffs.entry(x).or_insert(0);
        *e += c;
        if *e == 0 {
            coeffs.remove(&x);
        }
    };
    for k in (1..=n).rev() {
        let layer = std::mem::take(&mut work[k as usize]);
        let half = s.pow(k - 1); // s^(k-1)
        for (r, c) in layer {
            if c == 0 {
                continue;
            }
            if r >= half {
                // Basis element: n(r) = k. Admissible inputs never leave a
                // residual coefficient on the excluded residue 1.
                assert!(r >= 2, "residual indicator at residue {r}");
                add(&mut coeffs, r, c);
            } else {
                let e = work[k as usize - 1].entry(r).or_insert(0);
                *e += c;
                if *e == 0 {
                    work[k as usize - 1].remove(&r);
                }
                for l in 1..s {
                    add(&mut coeffs, r + l * half, -c);
                }
            }
        }
    }
    assert!(work[0].is_empty(), "admissible inputs exhaust at level 1");
    Ok(coeffs)
}

/// Rebuild the function from expansion coefficients, at the common
/// refinement level of its generators.
pub fn reconstruct(coeffs: &BTreeMap<u64, i64>, s: u32) -> Result<CylFn<i64>> {
    check_base(s)?;
    let mut level = 0u32;
    for x in coeffs.keys() {
        TIndex::new(*x, s)?;
        level = level.max(level_and_gamma(*x, s)?.0);
    }
    let mut acc = CylFn::zero(s, level, Domain::Units)?;
    for (x, c) in coeffs {
        if *c == 0 {
            return Err(Error::parameter(format!(
                "zero coefficient stored at {x}"
            )));
        }
        acc = acc.add(&generator(*x, s)?.scale(c).refine(level)?)?;
    }
    Ok(acc)
}

/// A finitely supported homomorphism `Phi = sum_y phi_y e_(y)` on the span
/// of the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomT {
    s: u32,
    coeffs: BTreeMap<u64, i64>,
}

impl HomT {
    pub fn new(s: u32, coeffs: BTreeMap<u64, i64>) -> Result<HomT> {
        check_base(s)?;
        for (y, phi) in &coeffs {
            TIndex::new(*y, s)?;
            if *phi == 0 {
                return Err(Error::parameter(format!(
                    "zero coefficient stored at {y}"
                )));
            }
        }
        Ok(HomT { s, coeffs })
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, i64> {
        &self.coeffs
    }

    pub fn get(&self, y: u64) -> i64 {
        self.coeffs.get(&y).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total variation `sum_y |phi_y|`, the per-`l` size of the module basis.
    pub fn total_multiplicity(&self) -> u64 {
        self.coeffs.values().map(|c| c.unsigned_abs()).sum()
    }

    /// The pairing `Phi(f) = sum_y phi_y e_(y)(f)`.
    pub fn pair(&self, f: &CylFn<i64>) -> Result<i64> {
        if f.s() != self.s {
            return Err(Error::parameter(format!(
                "base mismatch: homomorphism over {}, function over {}",
                self.s,
                f.s()
            )));
        }
        check_admissible(f)?;
        let mut acc = 0i64;
        for (y, phi) in &self.coeffs {
            acc += phi * e_hom(f, *y)?;
        }
        Ok(acc)
    }
}

/// `delta_z` written in the dual basis: coefficient 1 on every `T`-member of
/// the `gamma` orbit of `z`. For `z` outside `T` the orbit is empty and
/// `delta_z` pairs to zero with every admissible function.
pub fn delta_decompose(z: u64, s: u32) -> Result<HomT> {
    let orbit = gamma_orbit(z, s)?;
    let coeffs = orbit.into_iter().map(|t| (t.value(), 1i64)).collect();
    HomT::new(s, coeffs)
}

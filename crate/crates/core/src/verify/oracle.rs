//! Brute-force oracles that recompute production results the slow way.

use num_traits::Signed;

use crate::cylinder::{CylFn, Domain, LipschitzData};
use crate::error::{Error, Result};
use crate::scalar::{ExactScalar, Rat};

/// Lipschitz data by scanning every unit residue pair at the working level.
///
/// The production algorithm enumerates per-class, per-digit extrema; this
/// oracle inspects all `O(size^2)` pairs directly.
pub fn lipschitz_all_pairs<S: ExactScalar>(f: &CylFn<S>) -> Result<LipschitzData> {
    if f.domain() != Domain::Units {
        return Err(Error::domain(
            "Lipschitz data is defined for unit-supported functions".to_string(),
        ));
    }
    let s = u64::from(f.s());
    let size = f.values().len() as u64;
    let units: Vec<u64> = (0..size).filter(|r| r % s != 0).collect();

    let zero = Rat::from_integer(0);
    let mut sup = zero;
    let mut seminorm = zero;
    let mut witness = None;
    for &a in &units {
        let magnitude = f.value_at_residue(a as usize).abs_rat();
        if magnitude > sup {
            sup = magnitude;
        }
    }
    for (i, &a) in units.iter().enumerate() {
        for &b in &units[i + 1..] {
            // 1/|a - b|_s = s^k where s^k exactly divides b - a.
            let mut diff = b - a;
            let mut inv_dist: i64 = 1;
            while diff % s == 0 {
                diff /= s;
                inv_dist *= s as i64;
            }
            let gap = (f.value_at_residue(a as usize).to_rat()
                - f.value_at_residue(b as usize).to_rat())
            .abs();
            let candidate = gap * Rat::from_integer(inv_dist);
            if candidate > seminorm {
                seminorm = candidate;
                witness = Some((a, b));
            }
        }
    }
    Ok(LipschitzData {
        seminorm,
        sup,
        lip_norm: sup + seminorm,
        witness,
    })
}

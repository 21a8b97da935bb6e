//! The spectral triple layer: eigenvalue data `Lambda(y, l) = c1 l + c2 s^n(y)`,
//! the Dirac-type operator it defines on the graded module, exact commutator
//! norms with their Lipschitz bounds, Fréchet norms of polynomial algebra
//! elements, and resolvent-compactness counting.
//!
//! Norms of label-diagonal or shifted-diagonal operators are exact rational
//! maxima of entry magnitudes; only the mixed Toeplitz cross-check falls back
//! to a float singular-value estimate, and that estimate can only undershoot,
//! which keeps every `<=` check sound.

use std::collections::BTreeMap;

use crate::cylinder::{CylFn, Domain};
use crate::error::{Error, Result};
use crate::fredholm::{
    represent, represent_family, Element, IndexReport, ModuleTruncation, Parity, RepOp,
};
use crate::khomology::{level_and_gamma, HomT};
use crate::operators::ToeplitzSymbol;
use crate::scalar::{checked_pow_i64, rat, Complex64, ExactScalar, Rat, Scalar};
use crate::sparse::{block_off_diag, SparseMat};

/// The two positive constants defining the eigenvalue function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LambdaParams {
    c1: Rat,
    c2: Rat,
}

impl LambdaParams {
    pub fn new(c1: Rat, c2: Rat) -> Result<LambdaParams> {
        if c1 <= Rat::from_integer(0) || c2 <= Rat::from_integer(0) {
            return Err(Error::parameter(format!(
                "eigenvalue constants must be positive, got c1={c1}, c2={c2}"
            )));
        }
        Ok(LambdaParams { c1, c2 })
    }

    pub fn c1(&self) -> Rat {
        self.c1
    }

    pub fn c2(&self) -> Rat {
        self.c2
    }
}

fn point_as_i64(y: u64) -> Result<i64> {
    i64::try_from(y)
        .map_err(|_| Error::parameter(format!("support point {y} exceeds the evaluation range")))
}

/// `Lambda(y, l) = c1 l + c2 s^n(y)`, exact.
pub fn lambda_val(y: u64, l: u32, s: u32, params: &LambdaParams) -> Result<Rat> {
    let (n, _) = level_and_gamma(y, s)?;
    let tower = checked_pow_i64(i64::from(s), n)?;
    Ok(params.c1 * Rat::from_integer(i64::from(l)) + params.c2 * Rat::from_integer(tower))
}

/// The diagonal block `D` (odd summand to even summand, label-preserving)
/// and the self-adjoint block operator on the full graded space.
pub fn build_d(
    mt: &ModuleTruncation,
    params: &LambdaParams,
) -> Result<(RepOp<Rat>, SparseMat<Rat>)> {
    let mut entries = Vec::with_capacity(mt.dim());
    for label in mt.labels() {
        entries.push(lambda_val(label.y, label.l, mt.s(), params)?);
    }
    let d = RepOp::diagonal(mt.dim(), |idx| entries[idx]);
    let full = block_off_diag(d.mat(), d.mat());
    Ok((d, full))
}

/// `|| [D, rho(V^m)] || = c1 m`, cross-checked against the assembled
/// truncated commutator, which is a weighted injection with entries
/// `Lambda(y, l+m) - Lambda(y, l) = c1 m` on its safe columns.
pub fn comm_norm_shift(
    m: u32,
    params: &LambdaParams,
    phi: &HomT,
    l_max: u32,
) -> Result<Rat> {
    if phi.is_empty() {
        return Ok(Rat::from_integer(0));
    }
    if l_max < m {
        return Err(Error::parameter(format!(
            "l_max = {l_max} cannot witness a power V^{m}"
        )));
    }
    let exact = params.c1 * Rat::from_integer(i64::from(m));
    let mt = ModuleTruncation::build(phi, l_max)?;
    let (d, _) = build_d(&mt, params)?;
    let v = represent::<Rat>(&mt, Parity::Odd, &Element::ShiftPow(m))?;
    // Both parities represent V^m by the same label shift.
    let upper = d.mul(&v)?.sub(&v.mul(&d)?)?;
    let assembled = upper.mat().injection_norm()?;
    if m > 0 && assembled != exact {
        return Err(Error::domain(format!(
            "assembled commutator norm {assembled} disagrees with the exact value {exact}"
        )));
    }
    Ok(exact)
}

/// An `l`-indexed family of unit-supported cylinder functions, the data of
/// a diagonal multiplication term `sum_l m_{F(l,.)} mu_{chi_l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultFamily {
    s: u32,
    terms: BTreeMap<u32, CylFn<Rat>>,
}

impl MultFamily {
    pub fn new(s: u32, terms: BTreeMap<u32, CylFn<Rat>>) -> Result<MultFamily> {
        if s < 2 {
            return Err(Error::parameter(format!("base must be at least 2, got {s}")));
        }
        for f in terms.values() {
            if f.s() != s {
                return Err(Error::parameter(format!(
                    "family base mismatch: {} vs {s}",
                    f.s()
                )));
            }
            if f.domain() != Domain::Units {
                return Err(Error::domain(
                    "family entries must be unit-supported".to_string(),
                ));
            }
        }
        let terms = terms.into_iter().filter(|(_, f)| !f.is_zero()).collect();
        Ok(MultFamily { s, terms })
    }

    pub fn single(f: CylFn<Rat>, l: u32) -> Result<MultFamily> {
        let s = f.s();
        MultFamily::new(s, BTreeMap::from([(l, f)]))
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn terms(&self) -> &BTreeMap<u32, CylFn<Rat>> {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_l(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }
}

/// Exact norm of `[D, rho(M_F)]` together with the Lipschitz bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommMultReport {
    pub exact: Rat,
    pub bound: Rat,
    /// `(y, l)` attaining the exact norm.
    pub exact_witness: Option<(u64, u32)>,
    /// `(y, l)` attaining the bound.
    pub bound_witness: Option<(u64, u32)>,
    /// Every label with `n(y)` above the level of `F(l,.)` produced a zero
    /// difference, which is what makes the supremum a finite maximum.
    pub vanishing_ok: bool,
}

impl CommMultReport {
    pub fn ok(&self) -> bool {
        self.exact <= self.bound && self.vanishing_ok
    }
}

/// Exact `|| [D, rho(M_F)] ||` over the module of `phi`, with the bound
/// `max Lambda(y,l) ||F(l,.)||_L s^{-(n(y)-1)}` over the same labels.
pub fn comm_norm_mult(
    family: &MultFamily,
    params: &LambdaParams,
    phi: &HomT,
) -> Result<CommMultReport> {
    if family.s() != phi.s() {
        return Err(Error::parameter(format!(
            "base mismatch: family has s={}, functional has s={}",
            family.s(),
            phi.s()
        )));
    }
    let s = phi.s();
    let mut report = CommMultReport {
        exact: Rat::from_integer(0),
        bound: Rat::from_integer(0),
        exact_witness: None,
        bound_witness: None,
        vanishing_ok: true,
    };
    for y in phi.support() {
        let yi = point_as_i64(y)?;
        let (n, gamma) = level_and_gamma(y, s)?;
        let gap = rat(1, checked_pow_i64(i64::from(s), n - 1)?);
        for (&l, f) in family.terms() {
            let lam = lambda_val(y, l, s, params)?;
            let diff = (f.eval(yi) - f.eval(gamma as i64)).abs_rat();
            if n > f.level() && diff != Rat::from_integer(0) {
                report.vanishing_ok = false;
            }
            let exact_here = lam * diff;
            if report.exact_witness.is_none() || exact_here > report.exact {
                report.exact = exact_here;
                report.exact_witness = Some((y, l));
            }
            let bound_here = lam * f.lipschitz()?.lip_norm * gap;
            if report.bound_witness.is_none() || bound_here > report.bound {
                report.bound = bound_here;
                report.bound_witness = Some((y, l));
            }
        }
    }
    Ok(report)
}

/// A finite polynomial element
/// `a = sum_m phi_m V^[m] + sum_n V^[n] (sum_l m_{F_n(l,.)} mu_{chi_l})`,
/// where `V^[n]` is `V^n` for `n >= 0` and `(V*)^{-n}` for `n < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyElement {
    s: u32,
    toeplitz: ToeplitzSymbol<Rat>,
    ideal: BTreeMap<i64, MultFamily>,
}

impl PolyElement {
    pub fn new(
        s: u32,
        toeplitz: ToeplitzSymbol<Rat>,
        ideal: BTreeMap<i64, MultFamily>,
    ) -> Result<PolyElement> {
        if s < 2 {
            return Err(Error::parameter(format!("base must be at least 2, got {s}")));
        }
        for fam in ideal.values() {
            if fam.s() != s {
                return Err(Error::parameter(format!(
                    "ideal family base mismatch: {} vs {s}",
                    fam.s()
                )));
            }
        }
        let ideal = ideal.into_iter().filter(|(_, fam)| !fam.is_empty()).collect();
        Ok(PolyElement { s, toeplitz, ideal })
    }

    pub fn zero(s: u32) -> Result<PolyElement> {
        PolyElement::new(s, ToeplitzSymbol::new(BTreeMap::new()), BTreeMap::new())
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn toeplitz(&self) -> &ToeplitzSymbol<Rat> {
        &self.toeplitz
    }

    pub fn ideal(&self) -> &BTreeMap<i64, MultFamily> {
        &self.ideal
    }

    pub fn is_zero(&self) -> bool {
        self.toeplitz.coeffs().is_empty() && self.ideal.is_empty()
    }

    fn shift_element(n: i64) -> Element<Rat> {
        if n >= 0 {
            Element::ShiftPow(n as u32)
        } else {
            Element::ShiftAdjPow((-n) as u32)
        }
    }

    /// Represent on one parity summand of the module.
    pub fn represent(&self, mt: &ModuleTruncation, parity: Parity) -> Result<RepOp<Rat>> {
        if mt.s() != self.s {
            return Err(Error::parameter(format!(
                "base mismatch: element has s={}, module has s={}",
                self.s,
                mt.s()
            )));
        }
        let mut acc = RepOp::zero_all_safe(mt.dim());
        for (&m, &coeff) in self.toeplitz.coeffs() {
            let power = represent(mt, parity, &Self::shift_element(m))?;
            acc = acc.add(&power.scale(&coeff))?;
        }
        for (&n, fam) in &self.ideal {
            let diag = represent_family(mt, parity, fam.terms())?;
            let power = represent(mt, parity, &Self::shift_element(n))?;
            acc = acc.add(&power.mul(&diag)?)?;
        }
        Ok(acc)
    }

    /// The Fréchet norm
    /// `||a||_N = sum (1+l+|n|)^N ||F_n(l,.)||_L + sum (1+|m|)^N |phi_m|`.
    pub fn frechet_norm(&self, n_weight: u32) -> Result<Rat> {
        let mut total = self.toeplitz.weighted_norm(n_weight);
        for (&n, fam) in &self.ideal {
            for (&l, f) in fam.terms() {
                let weight =
                    Rat::from_integer(1 + i64::from(l) + n.abs()).pow(n_weight as i32);
                total += weight * f.lipschitz()?.lip_norm;
            }
        }
        Ok(total)
    }
}

/// Exact norm of `[D, rho(V^[n] M_F)]` for one ideal term: the commutator is
/// a weighted injection per block, and its entries
/// `Lambda(y, l+n) F(l, w1) - Lambda(y, l) F(l, w2)` range over both
/// orderings of the base-point pair, so the maximum over labels is the true
/// operator norm (columns outside the family's l-support vanish).
pub fn comm_norm_term(
    n: i64,
    family: &MultFamily,
    params: &LambdaParams,
    phi: &HomT,
) -> Result<Rat> {
    if family.s() != phi.s() {
        return Err(Error::parameter(format!(
            "base mismatch: family has s={}, functional has s={}",
            family.s(),
            phi.s()
        )));
    }
    let s = phi.s();
    let mut best = Rat::from_integer(0);
    for y in phi.support() {
        let yi = point_as_i64(y)?;
        let (_, gamma) = level_and_gamma(y, s)?;
        for (&l, f) in family.terms() {
            let target = i64::from(l) + n;
            if target < 0 {
                continue;
            }
            let lam_src = lambda_val(y, l, s, params)?;
            let lam_dst = lambda_val(y, target as u32, s, params)?;
            let fy = f.eval(yi);
            let fg = f.eval(gamma as i64);
            let e1 = (lam_dst * fy - lam_src * fg).abs_rat();
            let e2 = (lam_dst * fg - lam_src * fy).abs_rat();
            best = best.max(e1).max(e2);
        }
    }
    Ok(best)
}

/// The explicit constant `C = max(s * max(c1, c2), c1)`: every ideal term
/// obeys `s(c1 l + c2) + c1 |n| <= C (1 + l + |n|)` and every shift term
/// obeys `c1 |m| <= C (1 + |m|)`, so the triangle inequality over terms
/// gives `|| [D, rho(a)] || <= C ||a||_1`.
pub fn bound_constant(s: u32, params: &LambdaParams) -> Rat {
    let m = params.c1.max(params.c2);
    (Rat::from_integer(i64::from(s)) * m).max(params.c1)
}

/// Outcome of the smoothness bound check for one polynomial element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommBoundReport {
    /// Triangle-inequality assembly of exact per-term commutator norms.
    pub lhs: Rat,
    pub c: Rat,
    pub norm1: Rat,
    /// `c * norm1`.
    pub rhs: Rat,
    pub ok: bool,
    /// Per-term exact norms, in deterministic term order.
    pub terms: Vec<(String, Rat)>,
}

/// Check `|| [D, rho(a)] || <= C ||a||_1` by exact per-term norms.
pub fn comm_bound_check(
    a: &PolyElement,
    params: &LambdaParams,
    phi: &HomT,
) -> Result<CommBoundReport> {
    if a.s() != phi.s() {
        return Err(Error::parameter(format!(
            "base mismatch: element has s={}, functional has s={}",
            a.s(),
            phi.s()
        )));
    }
    let mut lhs = Rat::from_integer(0);
    let mut terms = Vec::new();
    for (&m, &coeff) in a.toeplitz().coeffs() {
        let norm = if phi.is_empty() {
            Rat::from_integer(0)
        } else {
            coeff.abs_rat() * params.c1 * Rat::from_integer(m.abs())
        };
        lhs += norm;
        let label = if m >= 0 {
            format!("V^{m}")
        } else {
            format!("V*^{}", -m)
        };
        terms.push((label, norm));
    }
    for (&n, fam) in a.ideal() {
        let norm = comm_norm_term(n, fam, params, phi)?;
        lhs += norm;
        terms.push((format!("V^[{n}] M_F"), norm));
    }
    let c = bound_constant(a.s(), params);
    let norm1 = a.frechet_norm(1)?;
    let rhs = c * norm1;
    Ok(CommBoundReport {
        lhs,
        c,
        norm1,
        rhs,
        ok: lhs <= rhs,
        terms,
    })
}

/// Float cross-check data for the Toeplitz commutator bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCommReport {
    /// Exact triangle bound `sum |phi_m| c1 |m|` on the true norm.
    pub triangle: Rat,
    /// The budget `c1 ||phi||_1`.
    pub budget: Rat,
    pub ok: bool,
    /// Power-iteration estimates of the truncated commutator per `l_max`.
    pub estimates: Vec<(u32, f64)>,
    /// Estimates never decrease along the given `l_max` ladder (within 1e-9).
    pub monotone: bool,
    /// Every estimate stays below the exact triangle bound (within 1e-9);
    /// truncation compresses, so this must hold.
    pub sound: bool,
}

/// Verify `|| [D, rho(T(phi_sym))] || <= c1 ||phi_sym||_1` exactly, with an
/// optional float estimate ladder over increasing truncations.
pub fn toeplitz_comm_check(
    symbol: &ToeplitzSymbol<Rat>,
    params: &LambdaParams,
    phi: &HomT,
    l_maxes: &[u32],
) -> Result<ToeplitzCommReport> {
    let triangle: Rat = if phi.is_empty() {
        Rat::from_integer(0)
    } else {
        symbol
            .coeffs()
            .iter()
            .map(|(m, v)| v.abs_rat() * params.c1 * Rat::from_integer(m.abs()))
            .sum()
    };
    let budget = params.c1 * symbol.weighted_norm(1);
    let tol = 1e-9;

    let mut estimates = Vec::new();
    for &l_max in l_maxes {
        let mt = ModuleTruncation::build(phi, l_max)?;
        let (d, _) = build_d(&mt, params)?;
        let dc = d.map(Scalar::to_complex);
        let mut blocks = Vec::new();
        for parity in [Parity::Odd, Parity::Even] {
            let mut acc = RepOp::<Complex64>::zero_all_safe(mt.dim());
            for (&m, coeff) in symbol.coeffs() {
                let power = represent::<Complex64>(
                    &mt,
                    parity,
                    &PolyElement::shift_element_complex(m),
                )?;
                acc = acc.add(&power.scale(&coeff.to_complex()))?;
            }
            blocks.push(acc);
        }
        let upper = dc.mul(&blocks[0])?.sub(&blocks[1].mul(&dc)?)?;
        let lower = dc.mul(&blocks[1])?.sub(&blocks[0].mul(&dc)?)?;
        let est = upper
            .mat()
            .estimate_norm(400, 1e-13)
            .max(lower.mat().estimate_norm(400, 1e-13));
        estimates.push((l_max, est));
    }
    let monotone = estimates
        .windows(2)
        .all(|w| w[1].1 >= w[0].1 - tol);
    let triangle_f = crate::scalar::rat_to_f64(triangle);
    let sound = estimates.iter().all(|(_, e)| *e <= triangle_f + tol);
    Ok(ToeplitzCommReport {
        ok: triangle <= budget,
        triangle,
        budget,
        estimates,
        monotone,
        sound,
    })
}

impl PolyElement {
    fn shift_element_complex(n: i64) -> Element<Complex64> {
        if n >= 0 {
            Element::ShiftPow(n as u32)
        } else {
            Element::ShiftAdjPow((-n) as u32)
        }
    }
}

/// Number of labels per parity with `Lambda(y, l) <= R`; always finite,
/// monotone in `R`, and unbounded as `R` grows whenever `phi` is nonzero.
pub fn resolvent_count(phi: &HomT, params: &LambdaParams, r: Rat) -> Result<u64> {
    let s = phi.s();
    let mut count: u64 = 0;
    for (&y, &c) in phi.coeffs() {
        let (n, _) = level_and_gamma(y, s)?;
        let base = params.c2 * Rat::from_integer(checked_pow_i64(i64::from(s), n)?);
        let room = r - base;
        if room < Rat::from_integer(0) {
            continue;
        }
        let levels = (room / params.c1).floor().to_integer() as u64 + 1;
        count += c.unsigned_abs() * levels;
    }
    Ok(count)
}

/// Index of `rho_ev(P_X) D rho_odd(P_X)`: the positive factor
/// `Lambda(y, 0)` scales the matched coordinates without changing kernel or
/// cokernel, so the value agrees with the flat index pairing.
pub fn triple_index(phi: &HomT, params: &LambdaParams, x: &CylFn<i64>) -> Result<IndexReport> {
    let flat = crate::fredholm::index_pairing(phi, x)?;
    let mt = ModuleTruncation::build(phi, 0)?;
    let mut kernel = 0usize;
    let mut cokernel = 0usize;
    let mut odd_rank = 0usize;
    let mut ev_rank = 0usize;
    let mut kernel_labels = Vec::new();
    let mut cokernel_labels = Vec::new();
    for label in mt.labels() {
        let lam = lambda_val(label.y, label.l, mt.s(), params)?;
        debug_assert!(lam > Rat::from_integer(0));
        let odd_hit = x.eval(label.base(Parity::Odd) as i64) == 1;
        let ev_hit = x.eval(label.base(Parity::Even) as i64) == 1;
        if odd_hit {
            odd_rank += 1;
        }
        if ev_hit {
            ev_rank += 1;
        }
        let image_vanishes = !(odd_hit && ev_hit) || lam == Rat::from_integer(0);
        if odd_hit && image_vanishes {
            kernel += 1;
            kernel_labels.push(label.clone());
        }
        if ev_hit && image_vanishes {
            cokernel += 1;
            cokernel_labels.push(label.clone());
        }
    }
    let report = IndexReport {
        odd_rank,
        ev_rank,
        kernel_dim: kernel,
        cokernel_dim: cokernel,
        kernel_labels,
        cokernel_labels,
        index: kernel as i64 - cokernel as i64,
    };
    debug_assert_eq!(report.index, flat.index);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::khomology::generator;

    fn params(c1: Rat, c2: Rat) -> LambdaParams {
        LambdaParams::new(c1, c2).unwrap()
    }

    fn unit_params() -> LambdaParams {
        params(rat(1, 1), rat(1, 1))
    }

    fn hom(s: u32, pairs: &[(u64, i64)]) -> HomT {
        HomT::new(s, pairs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn lambda_values() {
        assert_eq!(lambda_val(3, 0, 2, &unit_params()).unwrap(), rat(4, 1));
        assert_eq!(
            lambda_val(5, 2, 3, &params(rat(1, 2), rat(2, 1))).unwrap(),
            rat(19, 1)
        );
        for (y, l) in [(3u64, 0u32), (5, 3), (9, 7)] {
            let a = lambda_val(y, l + 1, 2, &unit_params()).unwrap();
            let b = lambda_val(y, l, 2, &unit_params()).unwrap();
            assert_eq!(a - b, rat(1, 1));
        }
        assert!(LambdaParams::new(rat(0, 1), rat(1, 1)).is_err());
        assert!(LambdaParams::new(rat(1, 1), rat(-1, 2)).is_err());
    }

    #[test]
    fn dirac_operator_shape() {
        let phi = hom(2, &[(3, 2), (5, -1)]);
        let mt = ModuleTruncation::build(&phi, 2).unwrap();
        let (d, full) = build_d(&mt, &unit_params()).unwrap();
        assert_eq!(full.adjoint(), full);

        let n = mt.dim();
        let gamma = crate::sparse::block_diag(
            &SparseMat::<Rat>::identity(n),
            &SparseMat::<Rat>::identity(n).scale(&rat(-1, 1)),
        );
        assert_eq!(
            gamma.mul(&full),
            full.mul(&gamma).scale(&rat(-1, 1))
        );

        let squared = full.mul(&full);
        let mut min_eig: Option<Rat> = None;
        for (idx, label) in mt.labels().iter().enumerate() {
            let lam = lambda_val(label.y, label.l, 2, &unit_params()).unwrap();
            assert_eq!(squared.entry(idx, idx), lam * lam);
            assert_eq!(squared.entry(n + idx, n + idx), lam * lam);
            min_eig = Some(min_eig.map_or(lam * lam, |m: Rat| m.min(lam * lam)));
        }
        assert_eq!(squared.nnz(), 2 * n);
        assert!(min_eig.unwrap() > rat(0, 1));
        assert_eq!(d.mat().nnz(), n);
    }

    #[test]
    fn shift_commutator_norm() {
        let phi = hom(2, &[(3, 1), (5, -2)]);
        assert_eq!(
            comm_norm_shift(1, &unit_params(), &phi, 4).unwrap(),
            rat(1, 1)
        );
        assert_eq!(
            comm_norm_shift(0, &unit_params(), &phi, 4).unwrap(),
            rat(0, 1)
        );
        assert_eq!(
            comm_norm_shift(3, &params(rat(2, 1), rat(1, 1)), &phi, 5).unwrap(),
            rat(6, 1)
        );
        assert_eq!(
            comm_norm_shift(2, &unit_params(), &hom(2, &[]), 4).unwrap(),
            rat(0, 1)
        );
        assert!(comm_norm_shift(5, &unit_params(), &phi, 4).is_err());
    }

    #[test]
    fn mult_commutator_norm_worked_example() {
        let phi = hom(2, &[(3, 1)]);
        let family = MultFamily::single(generator(3, 2).unwrap().map_values(|v| rat(*v, 1)).unwrap(), 0)
            .unwrap();
        let report = comm_norm_mult(&family, &unit_params(), &phi).unwrap();
        assert_eq!(report.exact, rat(4, 1));
        assert_eq!(report.bound, rat(6, 1));
        assert!(report.ok());
        assert_eq!(report.exact_witness, Some((3, 0)));
        assert_eq!(report.bound_witness, Some((3, 0)));
    }

    #[test]
    fn mult_commutator_vanishes_for_unit_constants() {
        // Constant 1 on the units at level 1: same value at y and gamma(y).
        let table = CylFn::new(2, 1, Domain::Units, vec![rat(0, 1), rat(1, 1)]).unwrap();
        let family = MultFamily::single(table, 0).unwrap();
        let phi = hom(2, &[(3, 1), (5, -1), (9, 2)]);
        let report = comm_norm_mult(&family, &unit_params(), &phi).unwrap();
        assert_eq!(report.exact, rat(0, 1));
        assert!(report.ok());
    }

    #[test]
    fn mult_commutator_exact_stays_below_bound() {
        let phi = hom(3, &[(2, 1), (5, -1), (10, 2)]);
        let f = generator(5, 3).unwrap().map_values(|v| rat(*v, 1)).unwrap();
        let g = generator(10, 3).unwrap().map_values(|v| rat(3 * v, 2)).unwrap();
        let family =
            MultFamily::new(3, BTreeMap::from([(0u32, f), (2u32, g)])).unwrap();
        let report = comm_norm_mult(&family, &params(rat(1, 3), rat(5, 2)), &phi).unwrap();
        assert!(report.ok(), "{report:?}");
        assert!(report.exact <= report.bound);
        assert!(report.vanishing_ok);
    }

    #[test]
    fn commutator_norm_term_matches_assembled_matrix() {
        let phi = hom(2, &[(3, 1), (5, -2), (9, 1)]);
        let p = params(rat(2, 3), rat(1, 2));
        let f = generator(3, 2).unwrap().map_values(|v| rat(*v, 1)).unwrap();
        let g = generator(9, 2).unwrap().map_values(|v| rat(-2 * v, 1)).unwrap();
        let family = MultFamily::new(2, BTreeMap::from([(0u32, f), (1u32, g)])).unwrap();
        for n in [-2i64, -1, 0, 1, 2] {
            let closed = comm_norm_term(n, &family, &p, &phi).unwrap();
            // Assemble on a window comfortably past level + |n|.
            let mt = ModuleTruncation::build(&phi, 8).unwrap();
            let (d, _) = build_d(&mt, &p).unwrap();
            let elem = PolyElement::new(
                2,
                ToeplitzSymbol::new(BTreeMap::new()),
                BTreeMap::from([(n, family.clone())]),
            )
            .unwrap();
            let odd = elem.represent(&mt, Parity::Odd).unwrap();
            let ev = elem.represent(&mt, Parity::Even).unwrap();
            let upper = d.mul(&odd).unwrap().sub(&ev.mul(&d).unwrap()).unwrap();
            let lower = d.mul(&ev).unwrap().sub(&odd.mul(&d).unwrap()).unwrap();
            let assembled = upper
                .mat()
                .injection_norm()
                .unwrap()
                .max(lower.mat().injection_norm().unwrap());
            assert_eq!(closed, assembled, "n = {n}");
        }
    }

    #[test]
    fn frechet_norm_examples() {
        let gen3 = generator(3, 2).unwrap().map_values(|v| rat(*v, 1)).unwrap();
        let a = PolyElement::new(
            2,
            ToeplitzSymbol::new(BTreeMap::new()),
            BTreeMap::from([(0i64, MultFamily::single(gen3, 0).unwrap())]),
        )
        .unwrap();
        assert_eq!(a.frechet_norm(1).unwrap(), rat(3, 1));

        let v = PolyElement::new(
            2,
            ToeplitzSymbol::new(BTreeMap::from([(1i64, rat(1, 1))])),
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(v.frechet_norm(1).unwrap(), rat(2, 1));

        let n0 = a.frechet_norm(0).unwrap();
        let n1 = a.frechet_norm(1).unwrap();
        let n2 = a.frechet_norm(2).unwrap();
        assert!(n0 <= n1 && n1 <= n2);
    }

    #[test]
    fn comm_bound_examples() {
        let phi = hom(2, &[(3, 1)]);
        let p = unit_params();

        let v = PolyElement::new(
            2,
            ToeplitzSymbol::new(BTreeMap::from([(1i64, rat(1, 1))])),
            BTreeMap::new(),
        )
        .unwrap();
        let report = comm_bound_check(&v, &p, &phi).unwrap();
        assert_eq!(report.lhs, rat(1, 1));
        assert_eq!(report.rhs, rat(4, 1)); // C = 2, ||a||_1 = 2
        assert!(report.ok);

        let gen3 = generator(3, 2).unwrap().map_values(|v| rat(*v, 1)).unwrap();
        let a = PolyElement::new(
            2,
            ToeplitzSymbol::new(BTreeMap::new()),
            BTreeMap::from([(0i64, MultFamily::single(gen3, 0).unwrap())]),
        )
        .unwrap();
        let report = comm_bound_check(&a, &p, &phi).unwrap();
        assert_eq!(report.lhs, rat(4, 1));
        assert_eq!(report.c, rat(2, 1));
        assert_eq!(report.rhs, rat(6, 1));
        assert!(report.ok);

        let zero = PolyElement::zero(2).unwrap();
        let report = comm_bound_check(&zero, &p, &phi).unwrap();
        assert_eq!(report.lhs, rat(0, 1));
        assert_eq!(report.rhs, rat(0, 1));
        assert!(report.ok);
    }

    #[test]
    fn toeplitz_commutator_check() {
        let phi = hom(2, &[(3, 1), (5, -1)]);
        let sym = ToeplitzSymbol::new(BTreeMap::from([
            (1i64, rat(1, 1)),
            (-2, rat(1, 3)),
            (0, rat(7, 2)),
        ]));
        let report =
            toeplitz_comm_check(&sym, &unit_params(), &phi, &[2, 4, 8]).unwrap();
        assert!(report.ok);
        assert_eq!(report.triangle, rat(5, 3));
        // c1 * ((1+1)*1 + (1+2)*(1/3) + (1+0)*(7/2)) = 13/2.
        assert_eq!(report.budget, rat(13, 2));
        assert!(report.monotone, "{report:?}");
        assert!(report.sound, "{report:?}");
        assert!(report.estimates.last().unwrap().1 <= 5.0 / 3.0 + 1e-9);
    }

    #[test]
    fn resolvent_counting() {
        let phi = hom(2, &[(3, 1)]);
        let p = unit_params();
        assert_eq!(resolvent_count(&phi, &p, rat(5, 1)).unwrap(), 2);
        assert_eq!(resolvent_count(&phi, &p, rat(3, 1)).unwrap(), 0);
        let mut last = 0;
        for r in 0..40 {
            let c = resolvent_count(&phi, &p, rat(r, 1)).unwrap();
            assert!(c >= last);
            last = c;
        }
        assert!(resolvent_count(&phi, &p, rat(2000, 1)).unwrap() >= 1000);

        let multi = hom(3, &[(2, 2), (5, -1)]);
        let c = resolvent_count(&multi, &params(rat(1, 2), rat(1, 1)), rat(10, 1)).unwrap();
        // y=2: n=1, Lambda = l/2 + 3 <= 10 gives 15 levels, two copies;
        // y=5: n=2, Lambda = l/2 + 9 <= 10 gives 3 levels.
        assert_eq!(c, 2 * 15 + 3);
    }

    #[test]
    fn triple_index_agrees_with_flat_pairing() {
        let phi = hom(2, &[(3, 2), (5, -1), (9, 3)]);
        let p = params(rat(3, 2), rat(1, 7));
        for x in [3u64, 5, 7, 9, 11, 13] {
            let xfn = generator(x, 2).unwrap();
            let triple = triple_index(&phi, &p, &xfn).unwrap();
            let flat = crate::fredholm::index_pairing(&phi, &xfn).unwrap();
            assert_eq!(triple.index, flat.index, "x = {x}");
            assert_eq!(triple.kernel_dim, flat.kernel_dim);
            assert_eq!(triple.cokernel_dim, flat.cokernel_dim);
        }
        let t3 = triple_index(&phi, &p, &generator(3, 2).unwrap()).unwrap();
        assert_eq!(t3.index, 2);
        let t5 = triple_index(&phi, &p, &generator(5, 2).unwrap()).unwrap();
        assert_eq!(t5.index, -1);
    }
}

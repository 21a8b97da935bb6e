//! The even Fredholm module attached to a finitely supported functional on T.
//!
//! For `Phi = sum_y phi_y e_(y)` the module carries one basis label
//! `(sign, y, j, l)` per parity, with `sign = +` exactly when `phi_y > 0`,
//! `j` running over `|phi_y|` copies and `l >= 0` truncated at `L_max`.
//! Both parities share the label list; they differ only in where functions
//! are evaluated:
//!
//! | parity | sign + | sign - |
//! |--------|--------|--------|
//! | odd    | y      | gamma(y) |
//! | even   | gamma(y) | y      |
//!
//! `rho(M_f)` is diagonal with value `f(s^l w)` at a label with base point
//! `w`; `rho(V)` shifts `l` by one. `F` swaps parities through the
//! label-preserving isometry `G`, so commutators with `F` reduce to
//! `rho_odd(a) - rho_ev(a)` and the index pairing against a projection
//! `m_{1_X} mu_{chi_0}` is a finite count of `l = 0` labels.

use std::collections::{BTreeMap, BTreeSet};

use crate::cylinder::{indicator, CylFn, Domain};
use crate::error::{Error, Result};
use crate::khomology::{generator, level_and_gamma, HomT};
use crate::operators::ChiSeq;
use crate::scalar::{checked_pow_i64, Complex64, ExactScalar, Scalar};
use crate::sparse::{block_diag, block_off_diag, SparseMat};

/// Parity of a module summand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

/// Sign class of a label; fixed by the sign of the coefficient at `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// One graded basis label, shared by both parities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Label {
    pub sign: Sign,
    pub y: u64,
    pub j: u32,
    pub l: u32,
    odd_base: u64,
    even_base: u64,
}

impl Label {
    /// Base point `w`; the label's evaluation point is `s^l w`.
    pub fn base(&self, parity: Parity) -> u64 {
        match parity {
            Parity::Even => self.even_base,
            Parity::Odd => self.odd_base,
        }
    }
}

/// Finite truncation of the module basis, `l <= l_max`.
#[derive(Debug, Clone)]
pub struct ModuleTruncation {
    phi: HomT,
    l_max: u32,
    labels: Vec<Label>,
}

impl ModuleTruncation {
    /// Enumerates labels deterministically: sign `+` before `-`, then `y`
    /// ascending, then `j`, then `l` (innermost, stride 1).
    pub fn build(phi: &HomT, l_max: u32) -> Result<ModuleTruncation> {
        let s = phi.s();
        let per_l = phi.total_multiplicity();
        let dim = per_l
            .checked_mul(u64::from(l_max) + 1)
            .filter(|d| *d <= 1 << 24)
            .ok_or_else(|| Error::parameter("module truncation too large".to_string()))?;
        let mut labels = Vec::with_capacity(dim as usize);
        for sign in [Sign::Plus, Sign::Minus] {
            for (&y, &c) in phi.coeffs() {
                let keep = match sign {
                    Sign::Plus => c > 0,
                    Sign::Minus => c < 0,
                };
                if !keep {
                    continue;
                }
                if y > i64::MAX as u64 {
                    return Err(Error::parameter(format!(
                        "support point {y} exceeds the evaluation range"
                    )));
                }
                let (_, gamma) = level_and_gamma(y, s)?;
                let (odd_base, even_base) = match sign {
                    Sign::Plus => (y, gamma),
                    Sign::Minus => (gamma, y),
                };
                for j in 1..=c.unsigned_abs() {
                    for l in 0..=l_max {
                        labels.push(Label {
                            sign,
                            y,
                            j: j as u32,
                            l,
                            odd_base,
                            even_base,
                        });
                    }
                }
            }
        }
        debug_assert_eq!(labels.len() as u64, dim);
        Ok(ModuleTruncation {
            phi: phi.clone(),
            l_max,
            labels,
        })
    }

    pub fn phi(&self) -> &HomT {
        &self.phi
    }

    pub fn s(&self) -> u32 {
        self.phi.s()
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    /// Dimension of each parity summand.
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }
}

/// A represented operator on one parity summand, with safe-column tracking
/// matching the window-truncation discipline.
#[derive(Debug, Clone, PartialEq)]
pub struct RepOp<S> {
    mat: SparseMat<S>,
    safe: BTreeSet<usize>,
}

impl<S: Scalar> RepOp<S> {
    /// The zero operator; truncation is trivially faithful everywhere.
    pub fn zero_all_safe(dim: usize) -> RepOp<S> {
        RepOp {
            mat: SparseMat::new(dim, dim),
            safe: (0..dim).collect(),
        }
    }

    pub fn identity(dim: usize) -> RepOp<S> {
        RepOp {
            mat: SparseMat::identity(dim),
            safe: (0..dim).collect(),
        }
    }

    pub fn diagonal(dim: usize, d: impl Fn(usize) -> S) -> RepOp<S> {
        let mut mat = SparseMat::new(dim, dim);
        for i in 0..dim {
            mat.set(i, i, d(i));
        }
        RepOp {
            mat,
            safe: (0..dim).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.ncols()
    }

    pub fn mat(&self) -> &SparseMat<S> {
        &self.mat
    }

    pub fn safe_cols(&self) -> &BTreeSet<usize> {
        &self.safe
    }

    pub fn entry(&self, row: usize, col: usize) -> S {
        self.mat.entry(row, col)
    }

    fn check_dim(&self, other: &RepOp<S>) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::parameter(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// Product with the safety rule: a column stays safe when the inner
    /// factor is safe on it and its image lies in the outer safe set.
    pub fn mul(&self, other: &RepOp<S>) -> Result<RepOp<S>> {
        self.check_dim(other)?;
        let mut safe = BTreeSet::new();
        for &c in &other.safe {
            if other.mat.col(c).keys().all(|r| self.safe.contains(r)) {
                safe.insert(c);
            }
        }
        Ok(RepOp {
            mat: self.mat.mul(&other.mat),
            safe,
        })
    }

    pub fn add(&self, other: &RepOp<S>) -> Result<RepOp<S>> {
        self.check_dim(other)?;
        Ok(RepOp {
            mat: self.mat.add(&other.mat),
            safe: self.safe.intersection(&other.safe).copied().collect(),
        })
    }

    pub fn sub(&self, other: &RepOp<S>) -> Result<RepOp<S>> {
        self.add(&other.scale(&(-S::one())))
    }

    pub fn scale(&self, factor: &S) -> RepOp<S> {
        RepOp {
            mat: self.mat.scale(factor),
            safe: self.safe.clone(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> RepOp<T> {
        RepOp {
            mat: self.mat.map(&f),
            safe: self.safe.clone(),
        }
    }

    pub fn to_complex(&self) -> RepOp<Complex64> {
        self.map(Scalar::to_complex)
    }

    pub fn mismatching_columns(&self, other: &RepOp<S>, cols: &BTreeSet<usize>) -> Vec<usize> {
        cols.iter()
            .copied()
            .filter(|c| self.mat.col(*c) != other.mat.col(*c))
            .collect()
    }
}

/// Algebra elements with a direct module representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Element<S> {
    /// `V^m`.
    ShiftPow(u32),
    /// `(V*)^m`.
    ShiftAdjPow(u32),
    /// `M_f` for a cylinder function on the whole space.
    Mult(CylFn<S>),
    /// `m_lambda` for a unit-supported function.
    MLambda(CylFn<S>),
    /// `mu_chi`.
    MuChi(ChiSeq<S>),
    /// `m_{1_(x)} mu_{chi_p}`.
    IdealGen { x: u64, p: u32 },
}

fn base_as_i64(base: u64) -> i64 {
    i64::try_from(base).expect("base points stay at desk scale")
}

/// Represent an element on one parity summand.
pub fn represent<S: Scalar>(
    mt: &ModuleTruncation,
    parity: Parity,
    elem: &Element<S>,
) -> Result<RepOp<S>> {
    let dim = mt.dim();
    match elem {
        Element::ShiftPow(m) => {
            let mut op = RepOp {
                mat: SparseMat::new(dim, dim),
                safe: BTreeSet::new(),
            };
            for (idx, label) in mt.labels().iter().enumerate() {
                if label.l + m <= mt.l_max() {
                    // l is the innermost enumeration coordinate, stride 1.
                    op.mat.set(idx + *m as usize, idx, S::one());
                    op.safe.insert(idx);
                }
            }
            Ok(op)
        }
        Element::ShiftAdjPow(m) => {
            let mut op = RepOp {
                mat: SparseMat::new(dim, dim),
                safe: (0..dim).collect(),
            };
            for (idx, label) in mt.labels().iter().enumerate() {
                if label.l >= *m {
                    op.mat.set(idx - *m as usize, idx, S::one());
                }
            }
            Ok(op)
        }
        Element::Mult(f) => {
            if f.s() != mt.s() {
                return Err(Error::parameter(format!(
                    "base mismatch: function has s={}, module has s={}",
                    f.s(),
                    mt.s()
                )));
            }
            Ok(RepOp::diagonal(dim, |idx| {
                let label = &mt.labels()[idx];
                f.eval_scaled(label.l, base_as_i64(label.base(parity)))
            }))
        }
        Element::MLambda(lambda) => {
            if lambda.s() != mt.s() {
                return Err(Error::parameter(format!(
                    "base mismatch: function has s={}, module has s={}",
                    lambda.s(),
                    mt.s()
                )));
            }
            if lambda.domain() != Domain::Units {
                return Err(Error::domain(
                    "m_lambda takes a unit-supported function".to_string(),
                ));
            }
            Ok(RepOp::diagonal(dim, |idx| {
                let label = &mt.labels()[idx];
                // Base 0 is the killed point mass; unit support makes the
                // evaluation return 0 there on its own.
                lambda.eval(base_as_i64(label.base(parity)))
            }))
        }
        Element::MuChi(chi) => Ok(RepOp::diagonal(dim, |idx| {
            let label = &mt.labels()[idx];
            if label.base(parity) == 0 {
                S::zero()
            } else {
                chi.get(label.l)
            }
        })),
        Element::IdealGen { x, p } => {
            let gen = generator(*x, mt.s())?.map_values(|v| S::from_i64(*v))?;
            let m = represent(mt, parity, &Element::MLambda(gen))?;
            let mu = represent(mt, parity, &Element::MuChi(ChiSeq::delta(*p)))?;
            m.mul(&mu)
        }
    }
}

/// Represent `sum_l m_{F(l,.)} mu_{chi_l}` for an l-indexed family of
/// unit-supported functions.
pub fn represent_family<S: Scalar>(
    mt: &ModuleTruncation,
    parity: Parity,
    family: &BTreeMap<u32, CylFn<S>>,
) -> Result<RepOp<S>> {
    for f in family.values() {
        if f.s() != mt.s() {
            return Err(Error::parameter(format!(
                "base mismatch: function has s={}, module has s={}",
                f.s(),
                mt.s()
            )));
        }
        if f.domain() != Domain::Units {
            return Err(Error::domain(
                "families consist of unit-supported functions".to_string(),
            ));
        }
    }
    Ok(RepOp::diagonal(mt.dim(), |idx| {
        let label = &mt.labels()[idx];
        match family.get(&label.l) {
            Some(f) => f.eval(base_as_i64(label.base(parity))),
            None => S::zero(),
        }
    }))
}

/// The parity swap `G`, the operator `F = [[0, G], [G*, 0]]`, and the
/// grading `Gamma` (+1 on the even block, -1 on the odd block).
pub fn build_f_gamma<S: Scalar>(
    mt: &ModuleTruncation,
) -> (SparseMat<S>, SparseMat<S>, SparseMat<S>) {
    let n = mt.dim();
    let g = SparseMat::identity(n);
    let f = block_off_diag(&g, &g.adjoint());
    let gamma = block_diag(&SparseMat::identity(n), &SparseMat::identity(n).scale(&-S::one()));
    (g, f, gamma)
}

/// Block-diagonal representation on the full graded space, even block first.
pub fn full_representation<S: Scalar>(
    mt: &ModuleTruncation,
    elem: &Element<S>,
) -> Result<RepOp<S>> {
    let ev = represent(mt, Parity::Even, elem)?;
    let odd = represent(mt, Parity::Odd, elem)?;
    let n = mt.dim();
    let mut safe: BTreeSet<usize> = ev.safe_cols().iter().copied().collect();
    safe.extend(odd.safe_cols().iter().map(|c| c + n));
    Ok(RepOp {
        mat: block_diag(ev.mat(), odd.mat()),
        safe,
    })
}

/// The upper block of `[F, rho(a)]`, namely `rho_odd(a) - rho_ev(a)`,
/// mapping the odd summand into the even one.
pub fn commutator_f<S: Scalar>(mt: &ModuleTruncation, elem: &Element<S>) -> Result<RepOp<S>> {
    let odd = represent(mt, Parity::Odd, elem)?;
    let ev = represent(mt, Parity::Even, elem)?;
    odd.sub(&ev)
}

/// `[F, rho(a)]` on the full graded space: off-diagonal blocks `B` and `-B`.
pub fn commutator_f_full<S: Scalar>(
    mt: &ModuleTruncation,
    elem: &Element<S>,
) -> Result<RepOp<S>> {
    let upper = commutator_f(mt, elem)?;
    let n = mt.dim();
    let mut safe: BTreeSet<usize> = upper.safe_cols().iter().copied().collect();
    safe.extend(upper.safe_cols().iter().map(|c| c + n));
    Ok(RepOp {
        mat: block_off_diag(&upper.mat().scale(&-S::one()), upper.mat()),
        safe,
    })
}

/// Rank of `[F, rho(a)]` over the rationals, per parity block.
pub fn commutator_rank<S: ExactScalar>(mt: &ModuleTruncation, elem: &Element<S>) -> Result<usize> {
    let upper = commutator_f(mt, elem)?;
    Ok(upper.mat().map(|v| v.to_rat()).rank_exact())
}

/// The multiplication form of `m_{1_(x)} mu_{chi_p}`: the indicator of the
/// cylinder `s^p x` at level `p + n(x)`.
pub fn ideal_generator_function(x: u64, p: u32, s: u32) -> Result<CylFn<i64>> {
    let (n, _) = level_and_gamma(x, s)?;
    let _ = generator(x, s)?; // validates x in T
    let scale = checked_pow_i64(i64::from(s), p)?;
    let shifted = (x as i64)
        .checked_mul(scale)
        .ok_or_else(|| Error::parameter("cylinder point overflows".to_string()))?;
    indicator(s, p + n, shifted as u64)
}

/// Isometry check `rho(V)* rho(V) = I` on safe columns of one parity.
pub fn verify_module_isometry<S: ExactScalar>(
    mt: &ModuleTruncation,
    parity: Parity,
) -> Result<(usize, Vec<usize>)> {
    let v = represent::<S>(mt, parity, &Element::ShiftPow(1))?;
    let vstar = represent::<S>(mt, parity, &Element::ShiftAdjPow(1))?;
    let prod = vstar.mul(&v)?;
    let id = RepOp::identity(mt.dim());
    let mismatches = prod.mismatching_columns(&id, prod.safe_cols());
    Ok((prod.safe_cols().len(), mismatches))
}

/// Covariance check on one parity with the boundary columns split out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovarianceReport {
    /// Columns compared against the covariance identity.
    pub checked: usize,
    pub mismatches: Vec<usize>,
    /// Labels with base point 0 at `l = 0`: there `rho(V) rho(M_f) rho(V*)`
    /// kills the vector while `rho(M_{alpha f})` scales it by `f(0)`, so the
    /// identity can only hold when `f(0) = 0`.
    pub boundary: Vec<usize>,
    /// True when every boundary column shows exactly that behavior.
    pub boundary_explained: bool,
}

impl CovarianceReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty() && self.boundary_explained
    }
}

/// Check `rho(V) rho(M_f) rho(V*) = rho(M_{alpha f})` on one parity.
pub fn verify_module_covariance<S: ExactScalar>(
    mt: &ModuleTruncation,
    parity: Parity,
    f: &CylFn<S>,
) -> Result<CovarianceReport> {
    let v = represent(mt, parity, &Element::ShiftPow(1))?;
    let vstar = represent(mt, parity, &Element::ShiftAdjPow(1))?;
    let mf = represent(mt, parity, &Element::Mult(f.clone()))?;
    let lhs = v.mul(&mf)?.mul(&vstar)?;
    let rhs = represent(mt, parity, &Element::Mult(f.alpha()?))?;

    let boundary: BTreeSet<usize> = mt
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, label)| label.l == 0 && label.base(parity) == 0)
        .map(|(idx, _)| idx)
        .collect();
    let checked: BTreeSet<usize> = lhs.safe_cols().difference(&boundary).copied().collect();
    let mismatches = lhs.mismatching_columns(&rhs, &checked);

    let f0 = f.eval(0);
    let boundary_explained = boundary.iter().all(|&idx| {
        lhs.mat().col(idx).is_empty() && rhs.entry(idx, idx) == f0
    });

    Ok(CovarianceReport {
        checked: checked.len(),
        mismatches,
        boundary: boundary.into_iter().collect(),
        boundary_explained,
    })
}

/// Exact index data for a pairing computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexReport {
    /// Rank of `rho_odd(P)` (the domain of `B_X`).
    pub odd_rank: usize,
    /// Rank of `rho_ev(P)` (the codomain).
    pub ev_rank: usize,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub kernel_labels: Vec<Label>,
    pub cokernel_labels: Vec<Label>,
    pub index: i64,
}

fn validate_k0_function(x: &CylFn<i64>) -> Result<()> {
    if x.domain() != Domain::Units {
        return Err(Error::domain(
            "K0 generator functions are unit-supported".to_string(),
        ));
    }
    if x.values().iter().any(|v| *v != 0 && *v != 1) {
        return Err(Error::domain(
            "K0 generator functions take values 0 and 1".to_string(),
        ));
    }
    if x.eval(1) != 0 {
        return Err(Error::domain(
            "K0 generator functions vanish at 1".to_string(),
        ));
    }
    Ok(())
}

/// Index of `B_X = rho_ev(P_X) G rho_odd(P_X)` for `P_X = m_{1_X} mu_{chi_0}`.
///
/// The ranges live entirely in the `l = 0` slice, so kernel and cokernel are
/// exact coordinate counts with no truncation involved.
pub fn index_pairing(phi: &HomT, x: &CylFn<i64>) -> Result<IndexReport> {
    if x.s() != phi.s() {
        return Err(Error::parameter(format!(
            "base mismatch: function has s={}, functional has s={}",
            x.s(),
            phi.s()
        )));
    }
    validate_k0_function(x)?;
    let mt = ModuleTruncation::build(phi, 0)?;
    let mut report = IndexReport {
        odd_rank: 0,
        ev_rank: 0,
        kernel_dim: 0,
        cokernel_dim: 0,
        kernel_labels: Vec::new(),
        cokernel_labels: Vec::new(),
        index: 0,
    };
    for label in mt.labels() {
        let odd_hit = x.eval(base_as_i64(label.base(Parity::Odd))) == 1;
        let ev_hit = x.eval(base_as_i64(label.base(Parity::Even))) == 1;
        if odd_hit {
            report.odd_rank += 1;
        }
        if ev_hit {
            report.ev_rank += 1;
        }
        if odd_hit && !ev_hit {
            report.kernel_dim += 1;
            report.kernel_labels.push(label.clone());
        }
        if ev_hit && !odd_hit {
            report.cokernel_dim += 1;
            report.cokernel_labels.push(label.clone());
        }
    }
    report.index = report.kernel_dim as i64 - report.cokernel_dim as i64;
    debug_assert_eq!(
        report.index,
        report.odd_rank as i64 - report.ev_rank as i64
    );
    Ok(report)
}

/// Index of `G` itself, the pairing against the identity class: `G` is an
/// isomorphism, so kernel and cokernel are zero.
pub fn pairing_identity(phi: &HomT) -> Result<i64> {
    let mt = ModuleTruncation::build(phi, 0)?;
    let (g, _, _) = build_f_gamma::<crate::scalar::Rat>(&mt);
    let rank = g.rank_exact();
    let kernel = mt.dim() - rank;
    let cokernel = mt.dim() - rank;
    Ok(kernel as i64 - cokernel as i64)
}

/// K0 classes the one-dimensional character module can pair with.
#[derive(Debug, Clone, PartialEq)]
pub enum K0Class {
    Identity,
    IMinusVVstar,
    /// The projection `m_{1_X} mu_{chi_0}` for a 0/1 unit-supported `X`
    /// with `X(1) = 0`.
    Generator(CylFn<i64>),
}

/// Pairing with the one-dimensional module on which `V` acts as 1 and
/// `M_f` as `f(0)`: the identity pairs to 1, the ideal to 0.
pub fn eta_pairing(class: &K0Class) -> Result<i64> {
    match class {
        K0Class::Identity => Ok(1),
        K0Class::IMinusVVstar => {
            let v: i64 = 1;
            Ok(1 - v * v)
        }
        K0Class::Generator(x) => {
            validate_k0_function(x)?;
            // m_{1_X} mu_{chi_0} acts as multiplication by the unit-supported
            // table itself, whose value at 0 is 0.
            Ok(x.eval(0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::khomology::HomT;
    use crate::scalar::{rat, Rat};

    fn hom(s: u32, pairs: &[(u64, i64)]) -> HomT {
        HomT::new(s, pairs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn basis_enumeration_is_deterministic() {
        let phi = hom(2, &[(3, 2), (5, -1)]);
        let mt = ModuleTruncation::build(&phi, 1).unwrap();
        assert_eq!(mt.dim(), 6);
        let expected: Vec<(Sign, u64, u32, u32)> = vec![
            (Sign::Plus, 3, 1, 0),
            (Sign::Plus, 3, 1, 1),
            (Sign::Plus, 3, 2, 0),
            (Sign::Plus, 3, 2, 1),
            (Sign::Minus, 5, 1, 0),
            (Sign::Minus, 5, 1, 1),
        ];
        let got: Vec<(Sign, u64, u32, u32)> = mt
            .labels()
            .iter()
            .map(|lab| (lab.sign, lab.y, lab.j, lab.l))
            .collect();
        assert_eq!(got, expected);
        assert_eq!(mt.labels()[0].base(Parity::Odd), 3);
        assert_eq!(mt.labels()[0].base(Parity::Even), 1);
        assert_eq!(mt.labels()[4].base(Parity::Odd), 1);
        assert_eq!(mt.labels()[4].base(Parity::Even), 5);

        assert_eq!(
            ModuleTruncation::build(&hom(2, &[]), 3).unwrap().dim(),
            0
        );
        assert_eq!(
            ModuleTruncation::build(&hom(2, &[(3, 1)]), 0).unwrap().dim(),
            1
        );
    }

    #[test]
    fn mult_representation_evaluation_rules() {
        let phi = hom(2, &[(3, 2), (5, -1)]);
        let mt = ModuleTruncation::build(&phi, 1).unwrap();
        let f = indicator(2, 2, 3).unwrap();
        let odd = represent(&mt, Parity::Odd, &Element::Mult(f.clone())).unwrap();
        let ev = represent(&mt, Parity::Even, &Element::Mult(f)).unwrap();
        // Label 0 is (+, 3, 1, 0): odd evaluates at 3, even at gamma(3) = 1.
        assert_eq!(odd.entry(0, 0), 1);
        assert_eq!(ev.entry(0, 0), 0);
        // Label 4 is (-, 5, 1, 0): odd at gamma(5) = 1, even at 5 = 1 mod 4.
        assert_eq!(odd.entry(4, 4), 0);
        assert_eq!(ev.entry(4, 4), 0);
        // l = 1 labels evaluate at 2*base: 6 = 2 mod 4 and 2.
        assert_eq!(odd.entry(1, 1), 0);
        assert_eq!(ev.entry(1, 1), 0);
    }

    #[test]
    fn shift_representation_and_isometry() {
        let phi = hom(2, &[(3, 1), (5, -2)]);
        let mt = ModuleTruncation::build(&phi, 2).unwrap();
        let v = represent::<Rat>(&mt, Parity::Odd, &Element::ShiftPow(1)).unwrap();
        // Columns with l = l_max are unsafe and empty.
        assert_eq!(v.safe_cols().len(), 2 * mt.dim() / 3);
        assert_eq!(v.entry(1, 0), rat(1, 1));
        assert!(v.mat().col(2).is_empty());

        let (checked, mismatches) = verify_module_isometry::<Rat>(&mt, Parity::Odd).unwrap();
        assert_eq!(checked, v.safe_cols().len());
        assert!(mismatches.is_empty());
    }

    #[test]
    fn f_gamma_axioms() {
        let phi = hom(2, &[(3, 2), (5, -1)]);
        let mt = ModuleTruncation::build(&phi, 1).unwrap();
        let n = mt.dim();
        let (g, f, gamma) = build_f_gamma::<Rat>(&mt);
        let gsg = g.adjoint().mul(&g);
        assert_eq!(gsg, SparseMat::identity(n));
        assert_eq!(f.adjoint(), f);
        assert_eq!(f.mul(&f), SparseMat::identity(2 * n));
        assert_eq!(gamma.mul(&gamma), SparseMat::identity(2 * n));
        let gf = gamma.mul(&f);
        let fg = f.mul(&gamma).scale(&rat(-1, 1));
        assert_eq!(gf, fg);

        for elem in [
            Element::Mult(indicator(2, 2, 3).unwrap().map_values(|v| rat(*v, 1)).unwrap()),
            Element::ShiftPow(1),
            Element::IdealGen { x: 3, p: 0 },
        ] {
            let rho = full_representation(&mt, &elem).unwrap();
            assert_eq!(gamma.mul(rho.mat()), rho.mat().mul(&gamma));
        }
    }

    #[test]
    fn commutator_with_shift_vanishes() {
        let phi = hom(3, &[(2, 1), (5, -2)]);
        let mt = ModuleTruncation::build(&phi, 3).unwrap();
        let comm = commutator_f::<Rat>(&mt, &Element::ShiftPow(1)).unwrap();
        assert!(comm.mat().is_zero());
        let comm2 = commutator_f::<Rat>(&mt, &Element::ShiftPow(2)).unwrap();
        assert!(comm2.mat().is_zero());
    }

    #[test]
    fn commutator_of_ideal_generator_matches_displayed_form() {
        let phi = hom(2, &[(3, 2)]);
        let mt = ModuleTruncation::build(&phi, 1).unwrap();
        let comm = commutator_f::<i64>(&mt, &Element::IdealGen { x: 3, p: 0 }).unwrap();
        // Entries +1 exactly at the (+, 3, j, 0) labels.
        for (idx, label) in mt.labels().iter().enumerate() {
            let expected = if label.y == 3 && label.l == 0 { 1 } else { 0 };
            assert_eq!(comm.entry(idx, idx), expected);
        }
        assert_eq!(
            commutator_rank::<i64>(&mt, &Element::IdealGen { x: 3, p: 0 }).unwrap(),
            2
        );

        // Mixed signs: -1 on the minus labels of x.
        let phi = hom(2, &[(3, 2), (5, -1)]);
        let mt = ModuleTruncation::build(&phi, 2).unwrap();
        let comm = commutator_f::<i64>(&mt, &Element::IdealGen { x: 5, p: 1 }).unwrap();
        for (idx, label) in mt.labels().iter().enumerate() {
            let expected = match (label.sign, label.y, label.l) {
                (Sign::Minus, 5, 1) => -1,
                _ => 0,
            };
            assert_eq!(comm.entry(idx, idx), expected, "label {label:?}");
        }

        // x outside the support and every gamma orbit: rank 0.
        let comm = commutator_f::<i64>(&mt, &Element::IdealGen { x: 7, p: 0 }).unwrap();
        assert!(comm.mat().is_zero());
    }

    #[test]
    fn commutator_rank_stabilizes_in_l_max() {
        let phi = hom(2, &[(3, 2), (5, -1)]);
        let elem = Element::IdealGen { x: 3, p: 1 };
        let ranks: Vec<usize> = [0u32, 1, 2, 4, 6]
            .iter()
            .map(|&lm| {
                let mt = ModuleTruncation::build(&phi, lm).unwrap();
                commutator_rank::<i64>(&mt, &elem).unwrap()
            })
            .collect();
        assert_eq!(ranks, vec![0, 2, 2, 2, 2]);
    }

    #[test]
    fn ideal_generator_equals_its_mult_form() {
        for (s, x, p) in [(2u32, 3u64, 0u32), (2, 3, 2), (2, 5, 1), (3, 2, 1), (3, 10, 0)] {
            let phi = match s {
                2 => hom(2, &[(3, 2), (5, -1), (7, 1)]),
                _ => hom(3, &[(2, 1), (5, -2), (10, 1)]),
            };
            let mt = ModuleTruncation::build(&phi, 3).unwrap();
            let g = ideal_generator_function(x, p, s).unwrap();
            for parity in [Parity::Even, Parity::Odd] {
                let direct = represent(&mt, parity, &Element::IdealGen { x, p }).unwrap();
                let mult = represent(&mt, parity, &Element::Mult(g.clone())).unwrap();
                assert_eq!(direct.mat(), mult.mat(), "s={s} x={x} p={p}");
            }
        }
    }

    #[test]
    fn covariance_boundary_is_isolated_and_explained() {
        // s = 3 has the one-level tower 2 -> 0, so gamma hits the zero point.
        let phi = hom(3, &[(2, 1), (5, -1)]);
        let mt = ModuleTruncation::build(&phi, 2).unwrap();
        let one = CylFn::constant(3, Rat::from_integer(1)).unwrap();
        let report = verify_module_covariance(&mt, Parity::Even, &one).unwrap();
        assert!(report.ok(), "{report:?}");
        // gamma(2) = 0 sits in the even base of the (+, 2) labels only.
        assert_eq!(report.boundary.len(), 1);
        let report_odd = verify_module_covariance(&mt, Parity::Odd, &one).unwrap();
        assert!(report_odd.ok());
        assert!(report_odd.boundary.is_empty());

        // With a negative coefficient the zero base moves to the odd side.
        let phi_neg = hom(3, &[(2, -1)]);
        let mt_neg = ModuleTruncation::build(&phi_neg, 1).unwrap();
        let report_neg = verify_module_covariance(&mt_neg, Parity::Odd, &one).unwrap();
        assert!(report_neg.ok());
        assert_eq!(report_neg.boundary.len(), 1);
        assert!(
            verify_module_covariance(&mt_neg, Parity::Even, &one)
                .unwrap()
                .boundary
                .is_empty()
        );

        // A function vanishing at 0 has nothing to exempt in substance.
        let f = indicator(3, 1, 2).unwrap().map_values(|v| rat(*v, 1)).unwrap();
        let report = verify_module_covariance(&mt, Parity::Even, &f).unwrap();
        assert!(report.ok());

        // s = 2 has no boundary labels at all.
        let phi2 = hom(2, &[(3, 2), (5, -1)]);
        let mt2 = ModuleTruncation::build(&phi2, 2).unwrap();
        let f2 = CylFn::constant(2, Rat::from_integer(1)).unwrap();
        let report = verify_module_covariance(&mt2, Parity::Even, &f2).unwrap();
        assert!(report.ok());
        assert!(report.boundary.is_empty());
        assert_eq!(report.checked, mt2.dim());
    }

    #[test]
    fn index_pairing_worked_examples() {
        let phi = hom(2, &[(3, 2), (5, -1)]);

        let r3 = index_pairing(&phi, &generator(3, 2).unwrap()).unwrap();
        assert_eq!(r3.index, 2);
        assert_eq!((r3.kernel_dim, r3.cokernel_dim), (2, 0));
        assert_eq!((r3.odd_rank, r3.ev_rank), (2, 0));

        let r5 = index_pairing(&phi, &generator(5, 2).unwrap()).unwrap();
        assert_eq!(r5.index, -1);
        assert_eq!((r5.kernel_dim, r5.cokernel_dim), (0, 1));

        let r7 = index_pairing(&phi, &generator(7, 2).unwrap()).unwrap();
        assert_eq!(r7.index, 0);
        assert_eq!((r7.odd_rank, r7.ev_rank), (0, 0));

        assert_eq!(pairing_identity(&phi).unwrap(), 0);
        assert_eq!(pairing_identity(&hom(2, &[])).unwrap(), 0);
    }

    #[test]
    fn index_agrees_with_functional_pairing() {
        let phi = hom(2, &[(3, 2), (5, -1), (9, 3), (11, -2)]);
        for x in [3u64, 5, 7, 9, 11, 13, 15, 19, 21] {
            let xfn = generator(x, 2).unwrap();
            let report = index_pairing(&phi, &xfn).unwrap();
            assert_eq!(report.index, phi.pair(&xfn).unwrap(), "x = {x}");
        }
    }

    #[test]
    fn index_additive_on_disjoint_unions() {
        let phi = hom(2, &[(3, 2), (5, -1), (7, 1)]);
        // 1_(3) and 1_(5) have disjoint cylinders (3 mod 4 vs 5 mod 8).
        let x = generator(3, 2)
            .unwrap()
            .add(&generator(5, 2).unwrap())
            .unwrap();
        assert!(x.values().iter().all(|v| *v == 0 || *v == 1));
        let report = index_pairing(&phi, &x).unwrap();
        assert_eq!(report.index, 2 - 1);
        assert_eq!(report.index, phi.pair(&x).unwrap());
    }

    #[test]
    fn index_rejects_bad_arguments() {
        let phi = hom(2, &[(3, 1)]);
        let full = indicator(2, 2, 3).unwrap();
        assert!(index_pairing(&phi, &full).is_err());
        let two = generator(3, 2).unwrap().scale(&2);
        assert!(index_pairing(&phi, &two).is_err());
        let wrong_base = generator(2, 3).unwrap();
        assert!(index_pairing(&phi, &wrong_base).is_err());
    }

    #[test]
    fn eta_pairing_values() {
        assert_eq!(eta_pairing(&K0Class::Identity).unwrap(), 1);
        assert_eq!(eta_pairing(&K0Class::IMinusVVstar).unwrap(), 0);
        assert_eq!(
            eta_pairing(&K0Class::Generator(generator(3, 2).unwrap())).unwrap(),
            0
        );
        assert_eq!(
            eta_pairing(&K0Class::Generator(generator(10, 3).unwrap())).unwrap(),
            0
        );
        assert!(eta_pairing(&K0Class::Generator(indicator(2, 2, 3).unwrap())).is_err());
    }
}

//! Truncated operators on `l^2(Z)` over the window `{E_l : |l| <= M}`.
//!
//! The defining actions on basis vectors are
//! `V E_l = E_{s l}`, `V* E_l = E_{l/s}` when `s | l` (else 0),
//! `M_f E_l = f(l) E_l`, and for nonzero `l = s^m l'`:
//! `m_lambda E_l = lambda(l') E_l`, `mu_chi E_l = chi(m) E_l`, and the gauge
//! generator `P E_l = m E_l`; all of the diagonal families kill `E_0`.
//!
//! Truncation to the window is tracked per column: a column is *safe* when
//! applying the truncated operator to it reproduces the action of the
//! untruncated operator. Products intersect safety with reachability, so a
//! relation check on safe columns can never mistake a truncation artifact
//! for a genuine mismatch.

use std::collections::{BTreeMap, BTreeSet};

use crate::cylinder::{CylFn, Domain};
use crate::error::{Error, Result};
use crate::sadic::Valuation;
use crate::scalar::{rat_to_f64, Complex64, ExactScalar, Rat, Scalar};
use crate::sparse::SparseMat;

/// Symmetric index window `{-m, ..., m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    m: i64,
}

impl Window {
    pub fn new(m: i64) -> Result<Window> {
        if m < 1 {
            return Err(Error::parameter(format!(
                "window radius must be at least 1, got {m}"
            )));
        }
        Ok(Window { m })
    }

    pub fn radius(&self) -> i64 {
        self.m
    }

    pub fn dim(&self) -> usize {
        (2 * self.m + 1) as usize
    }

    pub fn contains(&self, l: i64) -> bool {
        l.abs() <= self.m
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        -self.m..=self.m
    }

    fn idx(&self, l: i64) -> usize {
        debug_assert!(self.contains(l));
        (l + self.m) as usize
    }

    fn label(&self, idx: usize) -> i64 {
        idx as i64 - self.m
    }
}

/// A window-truncated operator with explicit safe-column tracking.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncOp<S> {
    window: Window,
    mat: SparseMat<S>,
    safe: BTreeSet<i64>,
}

impl<S: Scalar> TruncOp<S> {
    fn empty(window: Window) -> TruncOp<S> {
        TruncOp {
            window,
            mat: SparseMat::new(window.dim(), window.dim()),
            safe: BTreeSet::new(),
        }
    }

    fn all_safe(window: Window) -> BTreeSet<i64> {
        window.iter().collect()
    }

    /// Diagonal operator `E_l -> d(l) E_l`; truncation is faithful everywhere.
    pub fn diagonal(window: Window, d: impl Fn(i64) -> S) -> TruncOp<S> {
        let mut op = TruncOp::empty(window);
        for l in window.iter() {
            op.mat.set(window.idx(l), window.idx(l), d(l));
        }
        op.safe = Self::all_safe(window);
        op
    }

    pub fn identity(window: Window) -> TruncOp<S> {
        TruncOp::diagonal(window, |_| S::one())
    }

    /// Rebuild an operator from label-space triplets and an explicit safe set.
    pub fn from_parts(
        window: Window,
        entries: impl IntoIterator<Item = (i64, i64, S)>,
        safe: impl IntoIterator<Item = i64>,
    ) -> Result<TruncOp<S>> {
        let mut op = TruncOp::empty(window);
        for (row, col, value) in entries {
            if !window.contains(row) || !window.contains(col) {
                return Err(Error::parameter(format!(
                    "entry ({row}, {col}) lies outside the window of radius {}",
                    window.radius()
                )));
            }
            op.mat.set(window.idx(row), window.idx(col), value);
        }
        for l in safe {
            if !window.contains(l) {
                return Err(Error::parameter(format!(
                    "safe column {l} lies outside the window of radius {}",
                    window.radius()
                )));
            }
            op.safe.insert(l);
        }
        Ok(op)
    }

    /// Nonzero entries as `(row, col, value)` label triplets in column-major
    /// order.
    pub fn entries(&self) -> Vec<(i64, i64, S)> {
        self.mat
            .iter()
            .map(|(i, j, v)| (self.window.label(i), self.window.label(j), v.clone()))
            .collect()
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn mat(&self) -> &SparseMat<S> {
        &self.mat
    }

    pub fn entry(&self, row: i64, col: i64) -> S {
        self.mat.entry(self.window.idx(row), self.window.idx(col))
    }

    pub fn is_safe(&self, col: i64) -> bool {
        self.safe.contains(&col)
    }

    pub fn safe_cols(&self) -> &BTreeSet<i64> {
        &self.safe
    }

    /// Nonzero action on a basis column, as `(row, value)` pairs.
    pub fn column(&self, col: i64) -> Vec<(i64, S)> {
        self.mat
            .col(self.window.idx(col))
            .iter()
            .map(|(idx, v)| (self.window.label(*idx), v.clone()))
            .collect()
    }

    fn check_window(&self, other: &TruncOp<S>) -> Result<()> {
        if self.window != other.window {
            return Err(Error::parameter(format!(
                "window mismatch: {} vs {}",
                self.window.m, other.window.m
            )));
        }
        Ok(())
    }

    /// Operator product; a column stays safe when the inner factor is safe on
    /// it and lands entirely inside the outer factor's safe set.
    pub fn mul(&self, other: &TruncOp<S>) -> Result<TruncOp<S>> {
        self.check_window(other)?;
        let mut out = TruncOp::empty(self.window);
        out.mat = self.mat.mul(&other.mat);
        for &l in &other.safe {
            let reaches_safe = other
                .mat
                .col(self.window.idx(l))
                .keys()
                .all(|idx| self.safe.contains(&self.window.label(*idx)));
            if reaches_safe {
                out.safe.insert(l);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &TruncOp<S>) -> Result<TruncOp<S>> {
        self.check_window(other)?;
        Ok(TruncOp {
            window: self.window,
            mat: self.mat.add(&other.mat),
            safe: self.safe.intersection(&other.safe).copied().collect(),
        })
    }

    pub fn sub(&self, other: &TruncOp<S>) -> Result<TruncOp<S>> {
        self.add(&other.scale(&(-S::one())))
    }

    pub fn scale(&self, factor: &S) -> TruncOp<S> {
        TruncOp {
            window: self.window,
            mat: self.mat.scale(factor),
            safe: self.safe.clone(),
        }
    }

    /// Adjoint of the truncated matrix. Faithfulness of columns cannot be
    /// inferred from the original safe set, so the result declares none and
    /// is meant for entrywise comparisons.
    pub fn adjoint_entrywise(&self) -> TruncOp<S> {
        TruncOp {
            window: self.window,
            mat: self.mat.adjoint(),
            safe: BTreeSet::new(),
        }
    }

    pub fn pow(&self, exp: u32) -> Result<TruncOp<S>> {
        let mut acc = TruncOp::identity(self.window);
        for _ in 0..exp {
            acc = self.mul(&acc)?;
        }
        Ok(acc)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TruncOp<T> {
        TruncOp {
            window: self.window,
            mat: self.mat.map(&f),
            safe: self.safe.clone(),
        }
    }

    pub fn to_complex(&self) -> TruncOp<Complex64> {
        self.map(Scalar::to_complex)
    }

    /// Columns from `cols` on which the two operators differ exactly.
    pub fn mismatching_columns(&self, other: &TruncOp<S>, cols: &BTreeSet<i64>) -> Vec<i64> {
        cols.iter()
            .copied()
            .filter(|l| {
                self.mat.col(self.window.idx(*l)) != other.mat.col(self.window.idx(*l))
            })
            .collect()
    }
}

impl TruncOp<Complex64> {
    /// Largest entrywise modulus of the difference, over given columns.
    pub fn column_distance(&self, other: &TruncOp<Complex64>, cols: &BTreeSet<i64>) -> f64 {
        let mut dist: f64 = 0.0;
        for &l in cols {
            let j = self.window.idx(l);
            for (i, v) in self.mat.col(j) {
                dist = dist.max((*v - other.mat.entry(*i, j)).norm());
            }
            for (i, v) in other.mat.col(j) {
                dist = dist.max((*v - self.mat.entry(*i, j)).norm());
            }
        }
        dist
    }
}

/// The isometry `V E_l = E_{s l}`; columns beyond `|l| <= M/s` escape the
/// window and are unsafe.
pub fn shift<S: Scalar>(s: u32, window: Window) -> TruncOp<S> {
    let mut op = TruncOp::empty(window);
    let s64 = i64::from(s);
    for l in window.iter() {
        match l.checked_mul(s64) {
            Some(target) if window.contains(target) => {
                op.mat.set(window.idx(target), window.idx(l), S::one());
                op.safe.insert(l);
            }
            _ => {}
        }
    }
    op
}

/// The adjoint `V* E_l = E_{l/s}` when `s | l`, else 0; it contracts, so
/// every column is safe.
pub fn shift_adjoint<S: Scalar>(s: u32, window: Window) -> TruncOp<S> {
    let mut op = TruncOp::empty(window);
    let s64 = i64::from(s);
    for l in window.iter() {
        if l % s64 == 0 {
            op.mat.set(window.idx(l / s64), window.idx(l), S::one());
        }
        op.safe.insert(l);
    }
    op
}

/// Multiplication `M_f E_l = f(l) E_l`.
pub fn mult_op<S: Scalar>(f: &CylFn<S>, window: Window) -> TruncOp<S> {
    TruncOp::diagonal(window, |l| f.eval(l))
}

/// `m_lambda E_{s^m l'} = lambda(l') E_{s^m l'}`, zero on `E_0`.
pub fn m_lambda_op<S: Scalar>(lambda: &CylFn<S>, window: Window) -> Result<TruncOp<S>> {
    if lambda.domain() != Domain::Units {
        return Err(Error::domain(
            "m_lambda takes a unit-supported function".to_string(),
        ));
    }
    let s = lambda.s();
    Ok(TruncOp::diagonal(window, |l| {
        if l == 0 {
            S::zero()
        } else {
            let v = Valuation::of(l, s).expect("nonzero");
            lambda.eval(v.unit_part)
        }
    }))
}

/// Finitely supported sequence on the valuation coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSeq<S> {
    terms: BTreeMap<u32, S>,
}

impl<S: Scalar> ChiSeq<S> {
    pub fn new(terms: BTreeMap<u32, S>) -> ChiSeq<S> {
        let terms = terms.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        ChiSeq { terms }
    }

    /// The sequence `chi_p` concentrated at valuation `p`.
    pub fn delta(p: u32) -> ChiSeq<S> {
        ChiSeq {
            terms: BTreeMap::from([(p, S::one())]),
        }
    }

    pub fn get(&self, m: u32) -> S {
        self.terms.get(&m).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> &BTreeMap<u32, S> {
        &self.terms
    }
}

/// `mu_chi E_{s^m l'} = chi(m) E_{s^m l'}`, zero on `E_0`.
pub fn mu_chi_op<S: Scalar>(chi: &ChiSeq<S>, s: u32, window: Window) -> Result<TruncOp<S>> {
    if s < 2 {
        return Err(Error::parameter(format!("base must be at least 2, got {s}")));
    }
    Ok(TruncOp::diagonal(window, |l| {
        if l == 0 {
            S::zero()
        } else {
            chi.get(Valuation::of(l, s).expect("nonzero").exponent)
        }
    }))
}

/// Finitely supported Toeplitz symbol `phi: Z -> S`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSymbol<S> {
    coeffs: BTreeMap<i64, S>,
}

impl<S: Scalar> ToeplitzSymbol<S> {
    pub fn new(coeffs: BTreeMap<i64, S>) -> ToeplitzSymbol<S> {
        let coeffs = coeffs.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        ToeplitzSymbol { coeffs }
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, S> {
        &self.coeffs
    }

    pub fn get(&self, m: i64) -> S {
        self.coeffs.get(&m).cloned().unwrap_or_else(S::zero)
    }

    /// Conjugate-reflected symbol, the symbol of the adjoint.
    pub fn bar(&self) -> ToeplitzSymbol<S> {
        ToeplitzSymbol {
            coeffs: self.coeffs.iter().map(|(m, v)| (-m, v.conj())).collect(),
        }
    }
}

impl<S: ExactScalar> ToeplitzSymbol<S> {
    /// The weighted norm `sum_m (1 + |m|)^n |phi_m|`.
    pub fn weighted_norm(&self, n: u32) -> Rat {
        self.coeffs
            .iter()
            .map(|(m, v)| {
                Rat::from_integer(1 + m.abs()).pow(n as i32) * v.abs_rat()
            })
            .sum()
    }
}

/// The truncated Toeplitz form
/// `T(phi) = sum_{m >= 0} phi_m V^m + sum_{m < 0} phi_m (V*)^(-m)`.
pub fn toeplitz_op<S: Scalar>(
    symbol: &ToeplitzSymbol<S>,
    s: u32,
    window: Window,
) -> Result<TruncOp<S>> {
    let v = shift::<S>(s, window);
    let vstar = shift_adjoint::<S>(s, window);
    // The zero operator is faithful on every column.
    let mut acc = TruncOp::empty(window);
    acc.safe = window.iter().collect();
    for (m, coeff) in symbol.coeffs() {
        let power = if *m >= 0 {
            v.pow(*m as u32)?
        } else {
            vstar.pow((-*m) as u32)?
        };
        acc = acc.add(&power.scale(coeff))?;
    }
    Ok(acc)
}

/// The gauge generator `P E_{s^m l'} = m E_{s^m l'}`, `P E_0 = 0`.
pub fn gauge_generator(s: u32, window: Window) -> Result<TruncOp<Rat>> {
    if s < 2 {
        return Err(Error::parameter(format!("base must be at least 2, got {s}")));
    }
    Ok(TruncOp::diagonal(window, |l| {
        if l == 0 {
            Rat::from_integer(0)
        } else {
            Rat::from_integer(i64::from(Valuation::of(l, s).expect("nonzero").exponent))
        }
    }))
}

/// Conjugation by the gauge unitary `e^(2 pi i theta P)`.
pub fn gauge_conjugate(
    theta: Rat,
    a: &TruncOp<Complex64>,
    s: u32,
) -> Result<TruncOp<Complex64>> {
    let window = a.window();
    let phase = |l: i64| -> Complex64 {
        if l == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            let m = Valuation::of(l, s).expect("nonzero").exponent;
            let angle = 2.0 * std::f64::consts::PI * rat_to_f64(theta) * f64::from(m);
            Complex64::from_polar(1.0, angle)
        }
    };
    let mut out = TruncOp {
        window,
        mat: SparseMat::new(window.dim(), window.dim()),
        safe: a.safe_cols().clone(),
    };
    for col in window.iter() {
        for (row, v) in a.column(col) {
            out.mat.set(
                window.idx(row),
                window.idx(col),
                v * phase(row) * phase(col).conj(),
            );
        }
    }
    Ok(out)
}

/// Outcome of checking the defining relations on a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaceyReport {
    /// Columns on which `V*V = I` was checked (the safe set of the product).
    pub isometry_cols: usize,
    pub isometry_mismatches: Vec<i64>,
    /// Columns on which `V M_f V* = M_{alpha f}` was checked.
    pub covariance_cols: usize,
    pub covariance_mismatches: Vec<i64>,
    /// Columns on which `I - V V* = mu_{chi_0}` was checked (all of them).
    pub chi_zero_cols: usize,
    pub chi_zero_mismatches: Vec<i64>,
}

impl StaceyReport {
    pub fn ok(&self) -> bool {
        self.isometry_mismatches.is_empty()
            && self.covariance_mismatches.is_empty()
            && self.chi_zero_mismatches.is_empty()
    }
}

/// Verify `V*V = I`, `V M_f V* = M_{alpha f}`, and `I - V V* = mu_{chi_0}`
/// on their safe columns of the window.
pub fn verify_stacey<S: ExactScalar>(f: &CylFn<S>, window: Window) -> Result<StaceyReport> {
    let s = f.s();
    let v = shift::<S>(s, window);
    let vstar = shift_adjoint::<S>(s, window);

    let vstar_v = vstar.mul(&v)?;
    let identity = TruncOp::identity(window);
    let isometry_mismatches = vstar_v.mismatching_columns(&identity, vstar_v.safe_cols());

    let lhs = v.mul(&mult_op(f, window))?.mul(&vstar)?;
    let rhs = mult_op(&f.alpha()?, window);
    let covariance_mismatches = lhs.mismatching_columns(&rhs, lhs.safe_cols());
    let covariance_cols = lhs.safe_cols().len();

    let vvstar = v.mul(&vstar)?;
    let chi_lhs = identity.sub(&vvstar)?;
    let chi_rhs = mu_chi_op(&ChiSeq::delta(0), s, window)?;
    let chi_cols: BTreeSet<i64> = window.iter().collect();
    let chi_zero_mismatches = chi_lhs.mismatching_columns(&chi_rhs, &chi_cols);

    Ok(StaceyReport {
        isometry_cols: vstar_v.safe_cols().len(),
        isometry_mismatches,
        covariance_cols,
        covariance_mismatches,
        chi_zero_cols: chi_cols.len(),
        chi_zero_mismatches,
    })
}

/// The projection `m_{1_X} mu_{chi_0}` attached to a 0/1 unit-supported `X`.
pub fn k0_projection(x: &CylFn<i64>, window: Window) -> Result<TruncOp<Rat>> {
    if x.values().iter().any(|v| *v != 0 && *v != 1) {
        return Err(Error::domain(
            "K0 projections need a 0/1-valued function".to_string(),
        ));
    }
    if x.domain() != Domain::Units {
        return Err(Error::domain(
            "K0 projections need a unit-supported function".to_string(),
        ));
    }
    if x.eval(1) != 0 {
        return Err(Error::domain(
            "K0 projections need a function vanishing at 1".to_string(),
        ));
    }
    let x_rat = x.map_values(|v| Rat::from_integer(*v))?;
    let m = m_lambda_op(&x_rat, window)?;
    let mu = mu_chi_op(&ChiSeq::delta(0), x.s(), window)?;
    m.mul(&mu)
}

//! Column-major sparse matrices over the scalar rings.
//!
//! This is the shared kernel under both the windowed `l^2(Z)` operators and
//! the graded-module operators. Zero entries are never stored, so structural
//! equality of two matrices is exact equality of the operators they encode.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{Complex64, ExactScalar, Rat, Scalar};

/// Sparse `nrows x ncols` matrix; `cols[j]` maps row index to a nonzero value.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMat<S> {
    nrows: usize,
    ncols: usize,
    cols: Vec<BTreeMap<usize, S>>,
}

impl<S: Scalar> SparseMat<S> {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseMat {
            nrows,
            ncols,
            cols: vec![BTreeMap::new(); ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMat::new(n, n);
        for j in 0..n {
            m.cols[j].insert(j, S::one());
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    /// Overwrite the `(row, col)` entry; writing an exact zero clears it.
    pub fn set(&mut self, row: usize, col: usize, value: S) {
        assert!(row < self.nrows && col < self.ncols, "entry out of shape");
        if value.is_zero() {
            self.cols[col].remove(&row);
        } else {
            self.cols[col].insert(row, value);
        }
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: S) {
        if value.is_zero() {
            return;
        }
        let current = self.entry(row, col);
        self.set(row, col, current + value);
    }

    pub fn entry(&self, row: usize, col: usize) -> S {
        self.cols
            .get(col)
            .and_then(|c| c.get(&row))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    pub fn col(&self, col: usize) -> &BTreeMap<usize, S> {
        &self.cols[col]
    }

    /// Entries in deterministic `(col, row)` order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(i, v)| (*i, j, v)))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparseMat<T> {
        let mut out = SparseMat::new(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            out.set(i, j, f(v));
        }
        out
    }

    pub fn to_complex(&self) -> SparseMat<Complex64> {
        self.map(Scalar::to_complex)
    }

    pub fn scale(&self, factor: &S) -> SparseMat<S> {
        self.map(|v| v.clone() * factor.clone())
    }

    pub fn add(&self, other: &SparseMat<S>) -> SparseMat<S> {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (i, j, v) in other.iter() {
            out.add_to(i, j, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparseMat<S>) -> SparseMat<S> {
        self.add(&other.scale(&(-S::one())))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMat<S>) -> SparseMat<S> {
        assert_eq!(self.ncols, other.nrows, "inner dimensions must agree");
        let mut out = SparseMat::new(self.nrows, other.ncols);
        for j in 0..other.ncols {
            for (k, bv) in other.col(j) {
                for (i, av) in self.col(*k) {
                    out.add_to(*i, j, av.clone() * bv.clone());
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> SparseMat<S> {
        let mut out = SparseMat::new(self.ncols, self.nrows);
        for (i, j, v) in self.iter() {
            out.set(j, i, v.conj());
        }
        out
    }

    /// Apply to a dense vector.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.ncols);
        let mut out = vec![S::zero(); self.nrows];
        for (i, j, a) in self.iter() {
            if !v[j].is_zero() {
                out[i] = out[i].clone() + a.clone() * v[j].clone();
            }
        }
        out
    }

    /// True when every column has at most one entry and no two columns share
    /// a row. Such a matrix is a weighted partial injection of basis vectors,
    /// so its operator norm is the maximum entry magnitude.
    pub fn is_weighted_injection(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        for col in &self.cols {
            if col.len() > 1 {
                return false;
            }
            if let Some((row, _)) = col.iter().next() {
                if !seen.insert(*row) {
                    return false;
                }
            }
        }
        true
    }
}

impl<S: ExactScalar> SparseMat<S> {
    /// Largest entry magnitude, as an exact rational.
    pub fn max_abs(&self) -> Rat {
        self.iter()
            .map(|(_, _, v)| v.abs_rat())
            .max()
            .unwrap_or_else(|| Rat::from_integer(0))
    }

    /// Exact operator norm for weighted partial injections.
    pub fn injection_norm(&self) -> Result<Rat> {
        if self.is_weighted_injection() {
            Ok(self.max_abs())
        } else {
            Err(Error::unsupported(
                "exact operator norm is only available for weighted injections".to_string(),
            ))
        }
    }
}

impl SparseMat<Rat> {
    /// Exact rank by fraction-free Gaussian elimination on a dense copy.
    /// Intended for the small matrices that appear in index computations.
    pub fn rank_exact(&self) -> usize {
        let mut dense: Vec<Vec<Rat>> = vec![vec![Rat::from_integer(0); self.ncols]; self.nrows];
        for (i, j, v) in self.iter() {
            dense[i][j] = *v;
        }
        let mut rank = 0;
        let mut row = 0;
        for col in 0..self.ncols {
            let pivot = (row..self.nrows).find(|&r| dense[r][col] != Rat::from_integer(0));
            let Some(p) = pivot else { continue };
            dense.swap(row, p);
            let inv = Rat::from_integer(1) / dense[row][col];
            let mut pivot_row = std::mem::take(&mut dense[row]);
            for entry in pivot_row[col..].iter_mut() {
                *entry *= inv;
            }
            for (r, target) in dense.iter_mut().enumerate() {
                if r != row && target[col] != Rat::from_integer(0) {
                    let factor = target[col];
                    for (t, p) in target[col..].iter_mut().zip(&pivot_row[col..]) {
                        *t -= *p * factor;
                    }
                }
            }
            dense[row] = pivot_row;
            rank += 1;
            row += 1;
            if row == self.nrows {
                break;
            }
        }
        rank
    }
}

impl SparseMat<Complex64> {
    /// Largest entry modulus.
    pub fn max_modulus(&self) -> f64 {
        self.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance to `other`.
    pub fn max_entry_distance(&self, other: &SparseMat<Complex64>) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut dist: f64 = 0.0;
        for (i, j, v) in self.iter() {
            dist = dist.max((*v - other.entry(i, j)).norm());
        }
        for (i, j, v) in other.iter() {
            dist = dist.max((*v - self.entry(i, j)).norm());
        }
        dist
    }

    /// Deterministic power-iteration estimate of the largest singular value.
    ///
    /// The start vector is fixed, so the estimate is reproducible; it can
    /// only undershoot the true norm, which keeps "estimate <= bound" checks
    /// sound.
    pub fn estimate_norm(&self, max_iters: usize, tol: f64) -> f64 {
        if self.is_zero() || self.ncols == 0 || self.nrows == 0 {
            return 0.0;
        }
        let adj = self.adjoint();
        let mut v = vec![Complex64::new(1.0, 0.0); self.ncols];
        normalize(&mut v);
        if vec_norm(&self.apply(&v)) == 0.0 {
            // The uniform start lies in the kernel; restart from the first
            // basis vector with a nonzero column.
            let j = (0..self.ncols).find(|j| !self.col(*j).is_empty()).unwrap();
            v = vec![Complex64::new(0.0, 0.0); self.ncols];
            v[j] = Complex64::new(1.0, 0.0);
        }
        let mut sigma = 0.0;
        for _ in 0..max_iters {
            let w = self.apply(&v);
            let next_sigma = vec_norm(&w);
            if next_sigma == 0.0 {
                return 0.0;
            }
            let mut u = adj.apply(&w);
            let un = vec_norm(&u);
            if un == 0.0 {
                return next_sigma;
            }
            for x in &mut u {
                *x /= un;
            }
            v = u;
            if (next_sigma - sigma).abs() <= tol * next_sigma.max(1.0) {
                return next_sigma;
            }
            sigma = next_sigma;
        }
        sigma
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let n = vec_norm(v);
    if n > 0.0 {
        for x in v {
            *x /= n;
        }
    }
}

/// `diag(a, b)` on the direct sum.
pub fn block_diag<S: Scalar>(a: &SparseMat<S>, b: &SparseMat<S>) -> SparseMat<S> {
    let mut out = SparseMat::new(a.nrows + b.nrows, a.ncols + b.ncols);
    for (i, j, v) in a.iter() {
        out.set(i, j, v.clone());
    }
    for (i, j, v) in b.iter() {
        out.set(a.nrows + i, a.ncols + j, v.clone());
    }
    out
}

/// Off-diagonal block matrix `[[0, upper], [lower, 0]]` on the direct sum,
/// with `upper` mapping the second summand into the first.
pub fn block_off_diag<S: Scalar>(upper: &SparseMat<S>, lower: &SparseMat<S>) -> SparseMat<S> {
    assert_eq!(upper.nrows, lower.ncols);
    assert_eq!(upper.ncols, lower.nrows);
    let (n_first, n_second) = (upper.nrows, upper.ncols);
    let mut out = SparseMat::new(n_first + n_second, n_first + n_second);
    for (i, j, v) in upper.iter() {
        out.set(i, n_first + j, v.clone());
    }
    for (i, j, v) in lower.iter() {
        out.set(n_first + i, j, v.clone());
    }
    out
}

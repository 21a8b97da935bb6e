//! Exact calculator for the Hensel-Steinitz algebra `HS(s) = C(Z_s) x_alpha N`.
//!
//! The crate works at "desk scale": every quantity that can be exact is exact
//! (integers and rationals), floating point appears only where complex scalars
//! are intrinsic (gauge phases, Toeplitz symbols with complex coefficients) or
//! as an optional numerical cross-check. Modules:
//!
//! * [`sadic`] - s-adic integers as finite digit vectors, norms and valuations.
//! * [`cylinder`] - locally constant functions on `Z_s`, the endomorphism
//!   `alpha`, and exact Lipschitz data on the units.
//! * [`khomology`] - the combinatorics of the index set `T`, generator
//!   expansions, point evaluations, and the pairing with `K_0` data.
//! * [`operators`] - truncated operators on `l^2(Z)` with safe-column
//!   tracking: shifts, multiplications, gauge action, Toeplitz forms.
//! * [`fredholm`] - the graded Fredholm module attached to a finitely
//!   supported homomorphism, commutators with `F`, and index pairings.
//! * [`spectral`] - the Dirac operator `D`, exact commutator norms, Frechet
//!   norms, and resolvent counting.
//! * [`json`] - serialization codecs for the value types above.
//! * [`report`] / [`verify`] - deterministic, seedable verification suites
//!   and their machine-readable reports.

pub mod cylinder;
pub mod error;
pub mod fredholm;
pub mod json;
pub mod khomology;
pub mod operators;
pub mod report;
pub mod sadic;
pub mod scalar;
pub mod sparse;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Complex64, Rat};

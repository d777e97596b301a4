//! Finite-truncation toolkit for a fermionic model whose one-particle
//! Hamiltonian is the real, non-symmetric tridiagonal operator
//! `Ĥ = Ŝ₀ + γ(Ŝ₊ − Ŝ₋)` built from an su(1,1) triple.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`]: the coupling `γ` and the derived constants `Λ`, `α`, `η`.
//! * [`algebra`]: truncated generators, the `T̂` ladder triple, closed-form
//!   biorthogonal eigenvectors and an accurate spectrum for the truncation.
//! * [`metric`]: the positive metric `D̂² = exp(2α(Ŝ₊+Ŝ₋))` and the
//!   conjugation identities it satisfies.
//! * [`fock`]: creation/annihilation operators on a finite-mode Fock space,
//!   pseudo-fermions and the physical inner product on wedge products.
//! * [`thermo`]: grand-canonical sums and their Euler–Maclaurin approximation.
//! * [`figure`]: curve families, the numerical-range boundary and output.
//! * [`checks`]: the numerical acceptance checks shared by tests and the CLI.
// NaN-rejecting guards use negated comparisons; frozen oracle digits keep full precision
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod algebra;
pub mod checks;
pub mod error;
pub mod figure;
pub mod fock;
pub mod metric;
pub mod params;
pub mod thermo;

pub use error::{Error, Result};
pub use params::{make_params, ModelParams};

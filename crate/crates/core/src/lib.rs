//! Exact computer algebra for finite-dimensional Batalin–Vilkovisky geometry.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: supercommutative polynomials with exact ħ-series coefficients,
//!   graded derivatives, the variational differential and Cartan calculus.
//! * [`linalg`]: exact rational matrices (fraction-free determinants, kernels).
//! * [`bv`]: odd symplectic spaces, antibracket, BV Laplacian, master equations,
//!   the observable differential and expectation values.
//! * [`pushforward`]: Berezin and Gaussian fiber integration, BV pushforwards,
//!   effective actions, and the chain-map / exactness harnesses.
//! * [`relaxed`]: relaxed BV data, boundary one-forms and preBV-BFV checks.
//! * [`gravity`]: the Palatini–Cartan fiber computations in the standard frame.
//! * [`cli`]: report builders behind the `bvkit` binary.

pub mod algebra;
pub mod bv;
pub mod cli;
pub mod error;
pub mod gravity;
pub mod linalg;
pub mod pushforward;
pub mod models;
pub mod random;
pub mod suites;
pub mod relaxed;

pub use error::{Error, Result};

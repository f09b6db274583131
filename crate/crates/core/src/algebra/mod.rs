//! Exact supercommutative algebra over graded generators.

pub mod derivation;
pub mod generator;
pub mod json;
pub mod poly;
pub mod scalar;

pub use derivation::{contract, lie_derivative, variational_differential, Derivation};
pub use generator::{GenId, Generator, GeneratorTable, TableBuilder};
pub use poly::{Monomial, SuperPoly, DEFAULT_HBAR_ORDER, EXACT};
pub use scalar::{Scalar, Series};

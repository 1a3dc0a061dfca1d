//! Exact Gaussian-rational arithmetic and sparse polynomials in the polarized
//! variables `(z, chi, w, tau)`.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so polynomials can be shared freely between threads.

mod grat;
mod matrix;
mod poly;
mod text;

pub use grat::{format_rational, parse_rational, rational_string, GRat, UnimodularGRat};
pub use matrix::{dot_conj, norm_sqr, GMatrix};
pub use poly::{CompiledPoly, Exponents, HermPoly, Var};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable blocks differ: n={0} vs n={1}")]
    ArityMismatch(usize, usize),
    #[error("substituted polynomial depends on {0}")]
    SelfSubstitution(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0} does not have modulus one")]
    NotUnimodular(String),
}

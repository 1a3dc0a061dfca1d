//! Exact classification of transversal holomorphic maps between the
//! pseudoellipsoid models `P^n_p = { Im w = sum_j |z_j|^(2 p_j) }`.
//!
//! The crate decides when maps `P^n_p -> P^N_q` exist (for `N - n < n`),
//! enumerates and constructs them in an exact "q-power" representation,
//! verifies membership with a polarized polynomial identity, works with the
//! stability group of the target, and computes multiplicity invariants.
//!
//! Module map:
//! - [`exactpoly`]: Gaussian rationals, matrices and sparse polynomials.
//! - [`model`]: exponent signatures and defining functions.
//! - [`existence`]: divisibility matching, admissible patterns, certificates.
//! - [`maps`]: classified maps and their numeric evaluation.
//! - [`autgroup`]: the stability group, normal forms and orbit tests.
//! - [`verify`]: polarized residuals and numeric cross-checks.
//! - [`ideals`]: essential type and multiplicity.
//! - [`randgen`]: random exact test data.
//! - [`wire`]: JSON representations in user coordinate order.

pub mod autgroup;
pub mod exactpoly;
pub mod existence;
pub mod ideals;
pub mod maps;
pub mod model;
pub mod randgen;
pub mod verify;
pub mod wire;

pub use exactpoly::{GMatrix, GRat, HermPoly, PolyError, UnimodularGRat, Var};

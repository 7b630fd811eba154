//! Exact computation of motivic cohomology tables and algebraic K-groups of
//! surfaces over finite fields.
//!
//! The pipeline runs from point counts (or an explicit lattice model of
//! Frobenius) to Weil polynomials, Galois coinvariants, the motivic
//! cohomology table `H^i_M(X, Z(n))`, and finally the K-groups read off the
//! degenerate Atiyah-Hirzebruch spectral sequence. All arithmetic is exact;
//! every numeric claim has an independent brute-force cross-check in
//! [`oracle`].

#![allow(clippy::needless_range_loop)]

pub mod abgroup;
pub mod catalog;
pub mod error;
pub mod exactalg;
pub mod ffcount;
pub mod format;
pub mod ktheory;
pub mod motivic;
pub mod oracle;
pub mod weil;

pub use abgroup::{FiniteAbelianGroup, GroupExpr, Symbol};
pub use error::{Error, Result};
pub use exactalg::{IntMatrix, IntPolynomial, SmithDecomposition};
pub use weil::{PointCounts, WeilPolynomial};

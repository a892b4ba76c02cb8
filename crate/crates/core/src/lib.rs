//! Machine verification that the permutation module of PSU₃(q) on the
//! Hermitian unital is very simple over GF(2), for q = 4 and 8.
//!
//! The pipeline builds GF(q) ⊂ GF(q²), enumerates the unital, generates
//! SU₃(q) by matrices, converts them to permutations, runs Schreier–Sims,
//! tests the zero-sum module with the MeatAxe, and assembles a certificate
//! that separates computed facts from cited classification results.

pub mod certify;
pub mod cli;
pub mod error;
pub mod field;
pub mod hermitian;
pub mod linalg;
pub mod matgroup;
pub mod meataxe;
pub mod perm;
pub mod traces;

pub use error::{Error, Result};
pub use field::{FieldElem, FieldSpec, Tower};
pub use linalg::{Field, Gf2, Matrix, Subspace};

/// Bit-packed matrices over GF(2).
pub type Gf2Matrix = Matrix<Gf2>;
/// Matrices over a Conway field GF(2^k).
pub type ExtMatrix = Matrix<FieldSpec>;

//! Exact tooling for maximally recoverable (MR) tensor-product codes on grid-like
//! topologies `T(m×n; a, b, 0)`.
//!
//! The crate covers finite-field arithmetic ([`galois`]), dense linear algebra
//! ([`gfmatrix`]), erasure-pattern combinatorics ([`patterns`]), tensor-product codes with
//! their pseudo-parity check matrices ([`codes`]), MR certification, constructive search and
//! Sidon-set attacks ([`mr`]), and closed-form field-size bounds ([`bounds`]).

pub mod bounds;
pub mod codes;
pub mod error;
pub mod galois;
pub mod gfmatrix;
pub mod mr;
pub mod patterns;

pub use codes::{GridWord, TensorCode};
pub use error::{Error, Result};
pub use galois::{Field, FieldElement, FieldOp, FieldSpec};
pub use gfmatrix::GfMatrix;
pub use patterns::{ErasurePattern, PatternType, Topology};

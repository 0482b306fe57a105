//! Abelian Reshetikhin–Turaev and U(1) Chern–Simons invariants of 3-manifolds
//! presented by integral surgery.
//!
//! - [`numeric`]: exact rationals, roots of unity and the approximate-complex oracle type.
//! - [`intlinalg`]: Smith form, regular blocks, signatures and cokernels of linking matrices.
//! - [`quadmod`]: finite quadratic modules and their Gauss sums.
//! - [`surgery`]: surgery presentations, the pointed RT state sum and Kirby moves.
//! - [`compare`]: the Chern–Simons torsion formula, reciprocity checks and the phase table.
//! - [`extended`]: torus state spaces, modular data, boundary vectors, Maslov indices.

pub mod compare;
pub mod corpus;
pub mod error;
pub mod extended;
pub mod intlinalg;
pub mod numeric;
pub mod quadmod;
pub mod surgery;

pub use error::{Error, Result};

//! Exact computations on the CKP Fock space.
//!
//! The crate implements the fermionic Fock space of the neutral field χ(z), its
//! untwisted and twisted Heisenberg actions, four grading operators, highest
//! weight vector solvers, dressed symplectic-fermion modes, the partition
//! families indexing the decompositions, truncated q-series with a registry of
//! character identities, and the Hirota operator with its symmetry checks.
//! All arithmetic is exact.

pub mod dressed;
pub mod error;
pub mod field;
pub mod fock;
pub mod half;
pub mod heisenberg;
pub mod hirota;
pub mod hwv;
pub mod identities;
pub mod partitions;
pub mod series;

pub type Rational = num_rational::BigRational;

pub use error::{CkpError, Result};
pub use fock::{FockMonomial, FockVector, HalfOdd, TensorVector};

//! Exact computation of the f-invariant for actions of finitely
//! generated free groups on zero-dimensional compact groups.
//!
//! The crate is organised bottom-up:
//!
//! - [`free_group`]: reduced words and Cayley-tree geometry.
//! - [`exact_entropy`]: entropies as exact combinations of prime logarithms,
//!   finite measured partitions.
//! - [`fp_linear`]: linear algebra over `Z/pZ`.
//! - [`finite_group`]: small finite groups, automorphisms, subgroups.
//! - [`algebraic_shift`]: convolution operators on `(Z/pZ)^Γ`, their kernels
//!   and cylinder measures.
//! - [`f_invariant`]: the entropy functionals `F`, `f`, `F*`, `f*` and their
//!   relative versions over a common process interface.
//! - [`skew_product`]: cocycles, skew-product actions and the partition
//!   identities behind the addition formula.

pub mod algebraic_shift;
pub mod error;
pub mod exact_entropy;
pub mod f_invariant;
pub mod finite_group;
pub mod fp_linear;
pub mod free_group;
pub mod skew_product;

pub use error::{Error, Result};
pub use exact_entropy::{EntropyValue, FinitePartition, Measure};
pub use free_group::{FreeWord, WordSet};

//! Weak KAM toolkit for contact Hamilton–Jacobi equations on the flat torus.
//!
//! The crate computes the implicit Lax–Oleinik semigroups `T⁻`/`T⁺` of a
//! contact Hamiltonian `H(x, u, p)` that is increasing in `u`, the implicit
//! action functions, the backward and maximal forward weak KAM solutions, their
//! coincidence (Aubry) sets, a sup-of-actions reconstruction of forward
//! solutions, and the long-time behaviour of `T⁺_t φ`. Results for the
//! decreasing equation `H̄(x, u, Du) = 0` follow through the duality
//! `H(x, u, p) = H̄(x, −u, −p)`.

// `!(a > b)` is used on purpose so NaN fails the guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod flow;
pub mod grid;
pub mod io;
pub mod model;
pub mod oracle;
pub mod semigroup;
pub mod weakkam;

pub use error::{Error, Result};

//! Canonical NPT states and the numerical tools around them.
//!
//! * [`qmat`]: dense complex matrices, bipartite states, partial transpose,
//!   Hermitian eigensolver and Schmidt decomposition.
//! * [`canonical`]: the two-parameter ρ_bc family, its ε-parametrized
//!   boundary states, Werner states, the swap operator and region geometry.
//! * [`reduction`]: the local-operations pipeline that maps any NPT state to
//!   a ρ_bc with negative partial transpose.
//! * [`distill`]: Schmidt-rank-two minimization (see-saw), n-copy tests and
//!   ε-thresholds.
//! * [`posmaps`]: Choi matrices, k-positivity and 2-positivity tests.
//! * [`sepcert`]: explicit separable ensembles for the PPT corner states.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod canonical;
pub mod distill;
pub mod error;
pub mod json;
pub mod posmaps;
pub mod qmat;
pub mod reduction;
pub mod sepcert;

pub use error::{Error, Result};

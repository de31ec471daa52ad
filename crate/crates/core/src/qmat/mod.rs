//! Dense complex linear algebra and bipartite operations.
//!
//! Matrices are row-major [`ComplexMatrix`] values. Bipartite operators use
//! the index convention `i * d_b + j` for |i⟩_A ⊗ |j⟩_B, and the partial
//! transpose always acts on the B factor.

mod eig;
mod matrix;
mod policy;
mod random;
mod schmidt;
mod state;

pub use eig::{fix_phase, herm_eig, herm_eig_with, min_eigenpair, min_eigenvalue, HermEig};
pub use matrix::{inner, kron_vec, norm, tensor, ComplexMatrix, C64};
pub use policy::NumericPolicy;
pub use random::{gaussian_c64, gaussian_vector, haar_frame, haar_unitary, random_density};
pub use schmidt::{schmidt, schmidt_rank, SchmidtDecomposition};
pub use state::{max_entangled, BipartiteState, PureState, Subsystem};

pub(crate) use matrix::{ONE, ZERO};
pub(crate) use schmidt::{singular_split, thin_svd};

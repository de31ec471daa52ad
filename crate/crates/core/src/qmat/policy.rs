/// Numeric tolerances shared by constructors and checks.
///
/// The defaults are the module-level values; callers that need looser or
/// tighter checks pass their own policy to the `*_with` constructors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Hermiticity and trace checks when building states.
    pub construction_tol: f64,
    /// Algebraic identities (round trips, reconstructions).
    pub identity_tol: f64,
    /// Residual tolerance for eigenpairs, relative to the matrix norm.
    pub eig_tol: f64,
    /// Maximum number of entries (rows * cols) a tensor product may allocate.
    pub max_entries: usize,
}

impl NumericPolicy {
    pub const DEFAULT: NumericPolicy =
        NumericPolicy { construction_tol: 1e-12, identity_tol: 1e-10, eig_tol: 1e-9, max_entries: 1 << 20 };
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::DEFAULT
    }
}

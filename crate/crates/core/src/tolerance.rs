//! Numerical tolerances shared by validation and invariant checks.

/// All thresholds in one place. [`TOLERANCES`] holds the defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `max |X_ij − conj(X_ji)| ≤ hermiticity · (1 + max |X_ij|)`.
    pub hermiticity: f64,
    /// `|Tr ρ − 1|` for density matrices.
    pub trace: f64,
    /// Smallest admissible eigenvalue of a density matrix is `−positivity`.
    pub positivity: f64,
    /// `|‖ψ‖² − 1|` for state vectors.
    pub normalization: f64,
    /// Relative residual of an eigendecomposition reassembly.
    pub reconstruction: f64,
    /// Eigenvalues below `rank · λ_max` count as zero.
    pub rank: f64,
    /// Fisher-information terms with `λ_i + λ_j` at or below this are skipped.
    pub qfi_denominator: f64,
    /// Largest diagonal element accepted as "zero diagonal".
    pub zero_diagonal: f64,
    /// Max-entry residual when a decomposition is reassembled into its state.
    pub decomposition: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    hermiticity: 1e-12,
    trace: 1e-10,
    positivity: 1e-10,
    normalization: 1e-12,
    reconstruction: 1e-10,
    rank: 1e-9,
    qfi_denominator: 1e-12,
    zero_diagonal: 1e-10,
    decomposition: 1e-9,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOLERANCES
    }
}

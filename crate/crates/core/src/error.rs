use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum WalkError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is singular; cannot form the inverse")]
    Singular,

    #[error("zero eigenvalue at index {index}; quasi-energy is undefined")]
    ZeroEigenvalue { index: usize },

    #[error(
        "eigensolver did not converge after {iterations} QR sweeps \
         ({converged} of {dim} eigenvalues deflated)"
    )]
    NonConvergence {
        iterations: usize,
        converged: usize,
        dim: usize,
        /// Eigenvalues deflated before the iteration cap was hit.
        partial: Vec<Complex64>,
    },

    #[error("eigenpair {index} has residual {residual:e}, above the bound {bound:e}")]
    ResidualContract { index: usize, residual: f64, bound: f64 },

    #[error("case {0} has no phase map: its spectrum carries no real quasi-energies")]
    UnsupportedCase(char),

    #[error("realization {index} (seed {seed:#018x}) failed: {source}")]
    Realization {
        index: usize,
        seed: u64,
        #[source]
        source: Box<WalkError>,
    },
}

pub type Result<T> = std::result::Result<T, WalkError>;

//! Non-Hermitian split-step quantum walks on a ring: operator construction,
//! a dense complex eigensolver, symmetry checks, Bloch dispersion and
//! disorder ensembles.

pub mod disorder;
pub mod dispersion;
pub mod eigen;
pub mod error;
pub mod linalg;
pub mod spectrum;
pub mod symmetry;
pub mod walk;

pub use error::{Result, WalkError};
pub use linalg::{CMatrix, CVector, C64};
pub use spectrum::{eigendecompose, Spectrum};
pub use symmetry::{build_symmetry, SymmetryAction, SymmetryKind};
pub use walk::{compose_walk, CoinField, LatticeSpec, WalkKind, WalkOperator};

//! Supersymmetric index of chiral-symmetric quantum walks.
//!
//! A chiral pair `(U, Γ)` is a unitary `U` and a unitary involution `Γ`
//! with `ΓUΓ = U*`. This crate computes its index four independent ways,
//! the discriminant and its spectral mapping onto `σ(U)`, the birth and
//! inherited eigenspace census, and builds the standard example systems.

pub mod checks;
pub mod chiral;
pub mod matcore;
pub mod models;
pub mod random;
pub mod spectral;

pub use checks::Check;
pub use chiral::{make_pair, ChiralError, ChiralPair};
pub use matcore::{MatrixError, SquareMatrix, Tolerance, C64};
pub use models::{FourDimVariant, Graph, ModelError, SplitStepParams};
pub use spectral::{verify_spectral_mapping, Analysis, CensusCounts, IndexReport, SpectralError};

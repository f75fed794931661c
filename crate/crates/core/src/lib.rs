//! Spectral asymptotics for the Laplacian on bounded domains: exact
//! counting functions and heat traces of model spectra, the termwise
//! transform between heat-trace and counting-function expansions, and
//! large-index eigenvalue asymptotics, all with certified truncation
//! handling.
//!
//! The crate is deterministic by construction. No randomness, no time,
//! no pointer-order iteration feeds any numeric path, and the parallel
//! reductions in [`kahan`] use a fixed chunk decomposition so results
//! are bit-identical across thread counts.

pub mod asymptotics;
pub mod error;
pub mod gamma;
pub mod io;
pub mod kahan;
pub mod shapes;
pub mod spectrum;
pub mod transform;

pub use asymptotics::{ball_expansion, eigenvalue_solve, expansion_coefficients, SpectrumAsymptotics};
pub use error::{Result, SpectralError};
pub use shapes::BoundaryKind;
pub use spectrum::{SmoothedCount, SmoothingConfig, Spectrum, WeylMajorant};
pub use transform::{
    density_series, evaluate_counting_series, inverse_check_2d_leading, transform_coefficients,
    CountingSeries, DeltaTerm, HeatKernelCoefficients, PowerTerm, SeriesEvaluation,
};

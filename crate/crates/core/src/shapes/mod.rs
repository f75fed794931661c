//! Model geometries with exactly known spectra or heat coefficients.
//!
//! These serve two roles: reference inputs for the transform and
//! asymptotics machinery, and independent oracles for its tests.

pub mod ball;
pub mod bessel;
pub mod boxes;
pub mod disk;
pub mod planar;

/// Boundary condition on the model geometries that support both.
///
/// Robin conditions share their leading asymptotics with Neumann, so
/// the two are not distinguished here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    NeumannOrRobin,
}

pub use ball::{ball3d_counting_series, ball3d_spectrum, ball_heat_coefficients, Ball3DShape};
pub use boxes::{box_heat_coefficients, box_spectrum, BoxShape};
pub use disk::{disk_spectrum, DiskShape};
pub use planar::{
    blob_region, disk_region, gauss_bonnet_defect, planar_heat_coefficients, PlanarRegion,
};

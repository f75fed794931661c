//! Shape selection: flag parsing, config-file merging, and dispatch to
//! the core shape models.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use weylkit_core::shapes::{
    blob_region, planar_heat_coefficients, Ball3DShape, BoxShape, DiskShape, PlanarRegion,
};
use weylkit_core::{HeatKernelCoefficients, Result, SpectralError, Spectrum, WeylMajorant};

use crate::config::FileConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    /// Axis-aligned box with Dirichlet walls (any dimension, via --L)
    Box,
    /// Round 3-ball, Dirichlet (via --R)
    Ball3d,
    /// Round disk, Dirichlet (via --R)
    Disk,
    /// Smooth wavy test region with holes (via --holes)
    Blob,
}

#[derive(Debug, Clone, Args, Default)]
pub struct ShapeArgs {
    /// Named model shape
    #[arg(long, value_enum)]
    pub shape: Option<ShapeKind>,

    /// Planar region boundary file (JSON object with "outer" and
    /// "holes" vertex lists) instead of a named shape
    #[arg(long, value_name = "PATH", conflicts_with = "shape")]
    pub shape_file: Option<PathBuf>,

    /// Dimension; optional for box (inferred from --L), fixed for the
    /// other shapes and cross-checked if given
    #[arg(long = "D", value_name = "DIM")]
    pub dimension: Option<u32>,

    /// Box side lengths, comma separated
    #[arg(long = "L", value_name = "L1,L2,...", value_delimiter = ',')]
    pub sides: Option<Vec<f64>>,

    /// Radius for ball3d and disk
    #[arg(long = "R", value_name = "RADIUS")]
    pub radius: Option<f64>,

    /// Number of holes for the blob shape (0..=3)
    #[arg(long)]
    pub holes: Option<usize>,

    /// Boundary sampling density for the blob shape
    #[arg(long, value_name = "N")]
    pub points_per_curve: Option<usize>,
}

impl ShapeArgs {
    /// Fills unset flags from a config file (flags win) and resolves
    /// to a concrete shape.
    pub fn resolve(&self, file: &FileConfig) -> Result<ShapeInstance> {
        let kind = self.shape.or(file.shape);
        let shape_file = self.shape_file.clone().or_else(|| file.shape_file.clone());
        let sides = self.sides.clone().or_else(|| file.sides.clone());
        let dimension = self.dimension.or(file.dimension);
        let radius = self.radius.or(file.radius);
        let holes = self.holes.or(file.holes);
        let points = self.points_per_curve.or(file.points_per_curve).unwrap_or(4096);

        let instance = match (kind, shape_file) {
            (Some(_), Some(_)) => {
                return Err(SpectralError::InvalidInput(
                    "--shape and --shape-file are mutually exclusive".into(),
                ))
            }
            (None, None) => {
                return Err(SpectralError::InvalidInput(
                    "no shape given: pass --shape or --shape-file".into(),
                ))
            }
            (None, Some(path)) => {
                ShapeInstance::Region(PlanarRegion::read_json(&path)?, path.display().to_string())
            }
            (Some(ShapeKind::Box), None) => {
                let sides = sides.ok_or_else(|| {
                    SpectralError::InvalidInput("--shape box needs --L side lengths".into())
                })?;
                ShapeInstance::Box(BoxShape::new(sides)?)
            }
            (Some(ShapeKind::Ball3d), None) => {
                ShapeInstance::Ball(Ball3DShape::new(radius.unwrap_or(1.0))?)
            }
            (Some(ShapeKind::Disk), None) => {
                ShapeInstance::Disk(DiskShape::new(radius.unwrap_or(1.0))?)
            }
            (Some(ShapeKind::Blob), None) => {
                let holes = holes.unwrap_or(1);
                ShapeInstance::Blob(blob_region(holes, points)?, holes, points)
            }
        };
        if let Some(d) = dimension {
            if d != instance.dimension() {
                return Err(SpectralError::InvalidInput(format!(
                    "--D {d} contradicts the shape's dimension {}",
                    instance.dimension()
                )));
            }
        }
        Ok(instance)
    }
}

/// A resolved shape, plus the parameters that identify it in the
/// canonical run config.
#[derive(Debug, Clone)]
pub enum ShapeInstance {
    Box(BoxShape),
    Ball(Ball3DShape),
    Disk(DiskShape),
    Blob(PlanarRegion, usize, usize),
    Region(PlanarRegion, String),
}

/// Serializable identity of the resolved shape for config hashing.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShapeSpec {
    Box { sides: Vec<f64> },
    Ball3d { radius: f64 },
    Disk { radius: f64 },
    Blob { holes: usize, points_per_curve: usize },
    Region { path: String },
}

impl ShapeInstance {
    pub fn spec(&self) -> ShapeSpec {
        match self {
            Self::Box(b) => ShapeSpec::Box {
                sides: b.sides().to_vec(),
            },
            Self::Ball(b) => ShapeSpec::Ball3d { radius: b.radius() },
            Self::Disk(d) => ShapeSpec::Disk { radius: d.radius() },
            Self::Blob(_, holes, points) => ShapeSpec::Blob {
                holes: *holes,
                points_per_curve: *points,
            },
            Self::Region(_, path) => ShapeSpec::Region { path: path.clone() },
        }
    }

    pub fn dimension(&self) -> u32 {
        match self {
            Self::Box(b) => b.dimension(),
            Self::Ball(_) => 3,
            Self::Disk(_) | Self::Blob(..) | Self::Region(..) => 2,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Self::Box(b) => b.tag(),
            Self::Ball(b) => b.tag(),
            Self::Disk(d) => d.tag(),
            Self::Blob(region, holes, _) => {
                format!("blob holes={holes} chi={}", region.euler_characteristic())
            }
            Self::Region(_, path) => format!("region file={path}"),
        }
    }

    /// Exact eigenvalue enumeration; polyline regions have no solver.
    pub fn spectrum(&self, lambda_max: f64) -> Result<Spectrum> {
        match self {
            Self::Box(b) => b.spectrum(lambda_max),
            Self::Ball(b) => b.spectrum(lambda_max),
            Self::Disk(d) => d.spectrum(lambda_max),
            Self::Blob(..) | Self::Region(..) => Err(SpectralError::Unsupported(format!(
                "{} has no eigenvalue solver; only heat coefficients are available",
                self.tag()
            ))),
        }
    }

    /// Heat coefficients; `max_two_k` pads or truncates only for boxes,
    /// where trailing orders vanish identically. The other shapes carry
    /// a fixed set of known orders.
    pub fn heat_coefficients(&self, max_two_k: Option<u32>) -> Result<HeatKernelCoefficients> {
        match self {
            Self::Box(b) => Ok(b.heat_coefficients(max_two_k.unwrap_or(b.dimension()))),
            Self::Ball(b) => Ok(b.heat_coefficients()),
            Self::Disk(d) => Ok(d.heat_coefficients()),
            Self::Blob(region, ..) | Self::Region(region, _) => planar_heat_coefficients(region),
        }
    }

    /// A certified tail majorant for heat traces truncated at `bound`,
    /// valid for t <= t_max. Boxes use their own cell-packing bound;
    /// the ball and disk inherit the bound of their circumscribed box
    /// via Dirichlet domain monotonicity (their eigenvalues lie above
    /// the box's, so their counting function lies below).
    pub fn tail_majorant(&self, bound: f64, t_max: f64) -> Result<WeylMajorant> {
        match self {
            Self::Box(b) => b.density_majorant(bound, t_max),
            Self::Ball(b) => BoxShape::new(vec![2.0 * b.radius(); 3])?.density_majorant(bound, t_max),
            Self::Disk(d) => BoxShape::new(vec![2.0 * d.radius(); 2])?.density_majorant(bound, t_max),
            Self::Blob(..) | Self::Region(..) => Err(SpectralError::Unsupported(
                "no spectrum, so no tail majorant".into(),
            )),
        }
    }

    pub fn region(&self) -> Option<&PlanarRegion> {
        match self {
            Self::Blob(region, ..) | Self::Region(region, _) => Some(region),
            _ => None,
        }
    }
}

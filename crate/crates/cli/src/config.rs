//! Run configuration: optional JSON config file, flag merging (flags
//! win), and the canonical config hash stamped into every table.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use weylkit_core::{Result, SpectralError, SmoothingConfig, Spectrum};

use crate::grid::{Grid, IndexGrid};
use crate::shape::{ShapeKind, ShapeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Csv,
    Json,
}

impl OutFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutFormat::Csv => "csv",
            OutFormat::Json => "json",
        }
    }
}

/// Defaults loadable from --config; every field mirrors a flag and an
/// explicit flag always wins.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub shape: Option<ShapeKind>,
    pub shape_file: Option<PathBuf>,
    pub dimension: Option<u32>,
    pub sides: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub holes: Option<usize>,
    pub points_per_curve: Option<usize>,
    pub lambda_max: Option<f64>,
    pub max_two_k: Option<u32>,
    pub lambda_grid: Option<String>,
    pub t_grid: Option<String>,
    pub n_grid: Option<String>,
    pub geometric: Option<bool>,
    pub beta: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    pub tail_cutoff: Option<f64>,
    pub coeffs_file: Option<PathBuf>,
    pub spectrum_file: Option<PathBuf>,
    pub format: Option<OutFormat>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                serde_json::from_str(&text).map_err(|e| {
                    SpectralError::InvalidInput(format!("config file {}: {e}", p.display()))
                })
            }
        }
    }
}

#[derive(Debug, Clone, Args, Default)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<OutFormat>,

    /// Output file; stdout when omitted
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// JSON config file supplying defaults for any flag of this
    /// subcommand; explicit flags win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

impl OutputArgs {
    pub fn resolve(&self, file: &FileConfig) -> (OutFormat, Option<PathBuf>) {
        (
            self.format.or(file.format).unwrap_or(OutFormat::Csv),
            self.out.clone().or_else(|| file.out.clone()),
        )
    }
}

#[derive(Debug, Clone, Args, Default)]
pub struct SmoothingArgs {
    /// Override the beta schedule for smoothed counting, comma
    /// separated and strictly increasing
    #[arg(long, value_name = "B1,B2,...", value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,

    /// Convergence tolerance between consecutive scheduled betas
    #[arg(long)]
    pub tolerance: Option<f64>,

    /// Fermi tail cutoff: terms with |beta (lambda_n - lambda)| beyond
    /// it are dropped, and certification requires the truncation bound
    /// to stay outside the window
    #[arg(long)]
    pub tail_cutoff: Option<f64>,
}

/// The resolved overrides, also serialized into the config hash.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct SmoothingSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_cutoff: Option<f64>,
}

impl SmoothingArgs {
    pub fn resolve(&self, file: &FileConfig) -> SmoothingSpec {
        SmoothingSpec {
            beta: self.beta.clone().or_else(|| file.beta.clone()),
            tolerance: self.tolerance.or(file.tolerance),
            tail_cutoff: self.tail_cutoff.or(file.tail_cutoff),
        }
    }
}

impl SmoothingSpec {
    /// Builds the working config, defaulting the schedule from the
    /// spectrum's median eigenvalue scale.
    pub fn build(&self, spectrum: &Spectrum) -> Result<SmoothingConfig> {
        let base = match &self.beta {
            Some(schedule) => SmoothingConfig::new(
                schedule.clone(),
                self.tolerance.unwrap_or(SmoothingConfig::DEFAULT_TOLERANCE),
                self.tail_cutoff.unwrap_or(SmoothingConfig::DEFAULT_TAIL_CUTOFF),
            )?,
            None => {
                let auto = SmoothingConfig::for_spectrum(spectrum)?;
                SmoothingConfig::new(
                    auto.beta_schedule().to_vec(),
                    self.tolerance.unwrap_or(auto.tolerance()),
                    self.tail_cutoff.unwrap_or(auto.tail_cutoff()),
                )?
            }
        };
        Ok(base)
    }

    pub fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

/// Everything that determines the numeric content of a run. Hashed
/// canonically (fixed field order, 17-digit floats) into the
/// provenance header. The output path is deliberately not part of the
/// hash: writing the same run to two places must give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_two_k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<IndexGrid>,
    #[serde(skip_serializing_if = "SmoothingSpec::is_default")]
    pub smoothing: SmoothingSpec,
    pub format: &'static str,
}

impl RunConfig {
    pub fn bare(command: &'static str, format: OutFormat) -> Self {
        Self {
            command,
            shape: None,
            coeffs_file: None,
            spectrum_file: None,
            lambda_max: None,
            max_two_k: None,
            lambda_grid: None,
            t_grid: None,
            n_grid: None,
            smoothing: SmoothingSpec::default(),
            format: format.name(),
        }
    }

    /// First 12 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> Result<String> {
        let canonical = weylkit_core::io::to_json_string_full(self)?;
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(12);
        for byte in digest.iter().take(6) {
            hex.push_str(&format!("{byte:02x}"));
        }
        Ok(hex)
    }
}

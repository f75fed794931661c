//! Subcommand runners. Each resolves flags against an optional config
//! file (usage errors, exit 2), computes (numerical errors, exit 3),
//! and emits provenance-stamped tables.

use std::path::{Path, PathBuf};

use clap::Args;
use weylkit_core::shapes::gauss_bonnet_defect;
use weylkit_core::{
    density_series, eigenvalue_solve, evaluate_counting_series, expansion_coefficients,
    transform_coefficients, CountingSeries, HeatKernelCoefficients, Result, SpectralError,
    Spectrum,
};

use crate::config::{FileConfig, OutFormat, OutputArgs, RunConfig, SmoothingArgs};
use crate::grid::{Grid, IndexGrid};
use crate::shape::{ShapeArgs, ShapeInstance};
use crate::table::{Cell, Provenance, Table};

/// Errors split by exit code: 2 for configuration problems, 3 for
/// numerical or I/O failures during the run.
#[derive(Debug)]
pub enum CliError {
    Usage(SpectralError),
    Numeric(SpectralError),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

trait Phase<T> {
    fn usage(self) -> CliResult<T>;
    fn numeric(self) -> CliResult<T>;
}

impl<T> Phase<T> for Result<T> {
    fn usage(self) -> CliResult<T> {
        self.map_err(CliError::Usage)
    }
    fn numeric(self) -> CliResult<T> {
        self.map_err(CliError::Numeric)
    }
}

fn missing(flag: &str) -> CliError {
    CliError::Usage(SpectralError::InvalidInput(format!("{flag} is required")))
}

pub fn error_payload(kind: &str, message: &str) -> String {
    let doc = serde_json::json!({"error": {"kind": kind, "message": message}});
    doc.to_string()
}

fn emit(
    table: &Table,
    provenance: &Provenance,
    format: OutFormat,
    out: Option<&Path>,
) -> Result<()> {
    let body = match format {
        OutFormat::Csv => table.render_csv(provenance),
        OutFormat::Json => table.render_json(provenance)?,
    };
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct SpectrumCmd {
    #[command(flatten)]
    pub shape: ShapeArgs,

    /// Truncation bound for the enumeration
    #[arg(long)]
    pub lambda_max: Option<f64>,

    /// Also write the spectrum in its JSON file format (readable back
    /// via --spectrum-file elsewhere)
    #[arg(long, value_name = "PATH")]
    pub spectrum_out: Option<PathBuf>,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn spectrum(cmd: &SpectrumCmd) -> CliResult<i32> {
    let file = FileConfig::load(cmd.output.config.as_deref()).usage()?;
    let shape = cmd.shape.resolve(&file).usage()?;
    let lambda_max = cmd
        .lambda_max
        .or(file.lambda_max)
        .ok_or_else(|| missing("--lambda-max"))?;
    let (format, out) = cmd.output.resolve(&file);
    let mut config = RunConfig::bare("spectrum", format);
    config.shape = Some(shape.spec());
    config.lambda_max = Some(lambda_max);
    let hash = config.hash().usage()?;

    let spectrum = shape.spectrum(lambda_max).numeric()?;
    let mut provenance = Provenance::new(&hash);
    provenance.push_text("table", "spectrum");
    provenance.push_text("shape", &shape.tag());
    provenance.push_float("truncation_bound", spectrum.truncation_bound());
    let mut table = Table::new(&["lambda", "multiplicity", "cumulative"]);
    let mut cumulative = 0u64;
    for &(lambda, mult) in spectrum.entries() {
        cumulative += mult;
        table
            .push_row(vec![
                Cell::Float(lambda),
                Cell::Count(mult),
                Cell::Count(cumulative),
            ])
            .numeric()?;
    }
    if let Some(path) = &cmd.spectrum_out {
        spectrum.write_json(path).numeric()?;
    }
    emit(&table, &provenance, format, out.as_deref()).numeric()?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct CountCmd {
    #[command(flatten)]
    pub shape: ShapeArgs,

    /// Spectrum JSON file instead of a shape
    #[arg(long, value_name = "PATH", conflicts_with_all = ["shape", "shape_file"])]
    pub spectrum_file: Option<PathBuf>,

    /// Truncation bound (required with a shape; files carry their own)
    #[arg(long)]
    pub lambda_max: Option<f64>,

    /// Evaluation grid start:stop:count
    #[arg(long, value_name = "A:B:N")]
    pub lambda_grid: Option<String>,

    /// Space the grid geometrically instead of linearly
    #[arg(long)]
    pub geometric: bool,

    #[command(flatten)]
    pub smoothing: SmoothingArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

/// Loads the spectrum from whichever source the config selects.
fn spectrum_source(
    shape_args: &ShapeArgs,
    spectrum_file: &Option<PathBuf>,
    lambda_max: Option<f64>,
    file: &FileConfig,
    config: &mut RunConfig,
) -> CliResult<(Spectrum, Option<ShapeInstance>)> {
    let from_file = spectrum_file.clone().or_else(|| file.spectrum_file.clone());
    match from_file {
        Some(path) => {
            config.spectrum_file = Some(path.display().to_string());
            let spectrum = Spectrum::read_json(&path).numeric()?;
            Ok((spectrum, None))
        }
        None => {
            let shape = shape_args.resolve(file).usage()?;
            let bound = lambda_max
                .or(file.lambda_max)
                .ok_or_else(|| missing("--lambda-max"))?;
            config.shape = Some(shape.spec());
            config.lambda_max = Some(bound);
            let spectrum = shape.spectrum(bound).numeric()?;
            Ok((spectrum, Some(shape)))
        }
    }
}

pub fn count(cmd: &CountCmd) -> CliResult<i32> {
    let file = FileConfig::load(cmd.output.config.as_deref()).usage()?;
    let grid_text = cmd
        .lambda_grid
        .clone()
        .or_else(|| file.lambda_grid.clone())
        .ok_or_else(|| missing("--lambda-grid"))?;
    let geometric = cmd.geometric || file.geometric.unwrap_or(false);
    let grid = Grid::parse(&grid_text, geometric).usage()?;
    let smoothing = cmd.smoothing.resolve(&file);
    let (format, out) = cmd.output.resolve(&file);

    let mut config = RunConfig::bare("count", format);
    config.lambda_grid = Some(grid);
    config.smoothing = smoothing.clone();
    let (spectrum, _) =
        spectrum_source(&cmd.shape, &cmd.spectrum_file, cmd.lambda_max, &file, &mut config)?;
    let hash = config.hash().usage()?;

    let smoothing_config = smoothing.build(&spectrum).numeric()?;
    // Terms with Fermi argument beyond the cutoff are dropped; each of
    // the (at most total_count) dropped terms is below e^{-cutoff}.
    let dropped_bound =
        spectrum.total_count() as f64 * (-smoothing_config.tail_cutoff()).exp();
    let mut provenance = Provenance::new(&hash);
    provenance.push_text("table", "count");
    provenance.push_text("shape", spectrum.shape_tag());
    provenance.push_float("truncation_bound", spectrum.truncation_bound());
    let mut table = Table::new(&[
        "lambda",
        "n_direct",
        "n_smoothed",
        "beta",
        "smoothing_dev",
        "dropped_weight_bound",
    ]);
    for lambda in grid.values() {
        let direct = spectrum.count_direct(lambda).numeric()?;
        let smoothed = spectrum.count_smoothed(lambda, &smoothing_config).numeric()?;
        table
            .push_row(vec![
                Cell::Float(lambda),
                Cell::Count(direct),
                Cell::Float(smoothed.value),
                Cell::Float(smoothed.beta),
                Cell::Float((smoothed.value - direct as f64).abs()),
                Cell::Float(dropped_bound),
            ])
            .numeric()?;
    }
    emit(&table, &provenance, format, out.as_deref()).numeric()?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// heat
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct HeatCmd {
    #[command(flatten)]
    pub shape: ShapeArgs,

    /// Truncation bound for the enumeration
    #[arg(long)]
    pub lambda_max: Option<f64>,

    /// Evaluation grid start:stop:count over t
    #[arg(long, value_name = "A:B:N")]
    pub t_grid: Option<String>,

    /// Space the grid geometrically instead of linearly
    #[arg(long)]
    pub geometric: bool,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn heat(cmd: &HeatCmd) -> CliResult<i32> {
    let file = FileConfig::load(cmd.output.config.as_deref()).usage()?;
    let shape = cmd.shape.resolve(&file).usage()?;
    let lambda_max = cmd
        .lambda_max
        .or(file.lambda_max)
        .ok_or_else(|| missing("--lambda-max"))?;
    let grid_text = cmd
        .t_grid
        .clone()
        .or_else(|| file.t_grid.clone())
        .ok_or_else(|| missing("--t-grid"))?;
    let geometric = cmd.geometric || file.geometric.unwrap_or(false);
    let grid = Grid::parse(&grid_text, geometric).usage()?;
    let (format, out) = cmd.output.resolve(&file);

    let mut config = RunConfig::bare("heat", format);
    config.shape = Some(shape.spec());
    config.lambda_max = Some(lambda_max);
    config.t_grid = Some(grid);
    let hash = config.hash().usage()?;

    let spectrum = shape.spectrum(lambda_max).numeric()?;
    let majorant = shape.tail_majorant(lambda_max, grid.stop).numeric()?;
    let mut provenance = Provenance::new(&hash);
    provenance.push_text("table", "heat");
    provenance.push_text("shape", &shape.tag());
    provenance.push_float("truncation_bound", spectrum.truncation_bound());
    provenance.push_text(
        "tail_bound_column",
        "certified upper bound on the heat-trace weight beyond truncation_bound",
    );
    let mut table = Table::new(&["t", "heat_trace", "tail_bound"]);
    for t in grid.values() {
        let k = spectrum.heat_trace(t, Some(&majorant)).numeric()?;
        table
            .push_row(vec![
                Cell::Float(t),
                Cell::Float(k.value),
                Cell::Float(k.tail_bound),
            ])
            .numeric()?;
    }
    emit(&table, &provenance, format, out.as_deref()).numeric()?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// coeffs
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct CoeffsCmd {
    #[command(flatten)]
    pub shape: ShapeArgs,

    /// Highest doubled index to emit (boxes only; other shapes carry a
    /// fixed set of known orders)
    #[arg(long, value_name = "2K")]
    pub max_two_k: Option<u32>,

    /// Also write the coefficients in their JSON file format (readable
    /// back via --coeffs-file elsewhere)
    #[arg(long, value_name = "PATH")]
    pub coeffs_out: Option<PathBuf>,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn coeffs(cmd: &CoeffsCmd) -> CliResult<i32> {
    let file = FileConfig::load(cmd.output.config.as_deref()).usage()?;
    let shape = cmd.shape.resolve(&file).usage()?;
    let max_two_k = cmd.max_two_k.or(file.max_two_k);
    let (format, out) = cmd.output.resolve(&file);

    let mut config = RunConfig::bare("coeffs", format);
    config.shape = Some(shape.spec());
    config.max_two_k = max_two_k;
    let hash = config.hash().usage()?;

    let hk = shape.heat_coefficients(max_two_k).numeric()?;
    let mut provenance = Provenance::new(&hash);
    provenance.push_text("table", "coeffs");
    provenance.push_text("shape", &shape.tag());
    let mut table = Table::new(&["two_k", "b"]);
    for (two_k, &b) in hk.coeffs().iter().enumerate() {
        table
            .push_row(vec![Cell::Count(two_k as u64), Cell::Float(b)])
            .numeric()?;
    }
    if let Some(path) = &cmd.coeffs_out {
        hk.write_json(path).numeric()?;
    }
    emit(&table, &provenance, format, out.as_deref()).numeric()?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct TransformCmd {
    #[command(flatten)]
    pub shape: ShapeArgs,

    /// Heat coefficient JSON file instead of a shape
    #[arg(long, value_name = "PATH", conflicts_with_all = ["shape", "shape_file"])]
    pub coeffs_file: Option<PathBuf>,

    /// Highest doubled index to take from a box shape
    #[arg(long, value_name = "2K")]
    pub max_two_k: Option<u32>,

    /// Also write the counting series in its JSON file format
    #[arg(long, value_name = "PATH")]
    pub series_out: Option<PathBuf>,

    #[command(flatten)]
    pub output: OutputArgs,
}

/// Heat coefficients from whichever source the config selects.
fn coefficient_source(
    shape_args: &ShapeArgs,
    coeffs_file: &Option<PathBuf>,
    max_two_k: Option<u32>,
    file: &FileConfig,
    config: &mut RunConfig,
) -> CliResult<HeatKernelCoefficients> {
    let from_file = coeffs_file.clone().or_else(|| file.coeffs_file.clone());
    match from_file {
        Some(path) => {
            config.coeffs_file = Some(path.display().to_string());
            HeatKernelCoefficients::read_json(&path).numeric()
        }
        None => {
            let shape = shape_args.resolve(file).usage()?;
            config.shape = Some(shape.spec());
            config.max_two_k = max_two_k;
            shape.heat_coefficients(max_two_k).numeric()
        }
    }
}

pub fn transform(cmd: &TransformCmd) -> CliResult<i32> {
    let file = FileConfig::load(cmd.output.config.as_deref()).usage()?;
    let max_two_k = cmd.max_two_k.or(file.max_two_k);
    let (format, out) = cmd.output.resolve(&file);

    let mut config = RunConfig::bare("transform", format);
    let hk = coefficient_source(&cmd.shape, &cmd.coeffs_file, max_two_k, &file, &mut config)?;
    let hash = config.hash().usage()?;

    let series = transform_coefficients(&hk);
    let mut provenance = Provenance::new(&hash);
    provenance.push_text("table", "transform");
    provenance.push_text("series", "power: c * lambda^((D - two_k)/2); delta: distributional at lambda = 0");
    let mut table = Table::new(&["kind", "index", "value"]);
    for term in series.power_terms() {
        table
            .push_row(vec![
                Cell::Text("power".into()),
                Cell::Count(term.two_k as u64),
                Cell::Float(term.coefficient),
            ])
            .numeric()?;
    }
    for term in series.delta_terms() {
        table
            .push_row(vec![
                Cell::Text("delta".into()),
                Cell::Count(term.order as u64),
                Cell::Float(term.weight),
            ])
            .numeric()?;
    }
    if let Some(path) = &cmd.series_out {
        series.write_json(path).numeric()?;
    }
    emit(&table, &provenance, format, out.as_deref()).numeric()?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct SolveCmd {
    #[command(flatten)]
    pub shape: ShapeArgs,

    /// Heat coefficient JSON file instead of a shape
    #[arg(long, value_name = "PATH", conflicts_with_all = ["shape", "shape_file"])]
    pub coeffs_file: Option<PathBuf>,

    /// Highest doubled index to take from a box shape
    #[arg(long, value_name = "2K")]
    pub max_two_k: Option<u32>,

    /// Eigenvalue index grid start:stop:count (1-based)
    #[arg(long, value_name = "A:B:N")]
    pub n_grid: Option<String>,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn solve(cmd: &SolveCmd) -> CliResult<i32> {
    let file = FileConfig::load(cmd.output.config.as_deref()).usage()?;
    let grid_text = cmd
        .n_grid
        .clone()
        .or_else(|| file.n_grid.clone())
        .ok_or_else(|| missing("--n-grid"))?;
    let grid = IndexGrid::parse(&grid_text).usage()?;
    let max_two_k = cmd.max_two_k.or(file.max_two_k);
    let (format, out) = cmd.output.resolve(&file);

    let mut config = RunConfig::bare("solve", format);
    config.n_grid = Some(grid);
    let hk = coefficient_source(&cmd.shape, &cmd.coeffs_file, max_two_k, &file, &mut config)?;
    let hash = config.hash().usage()?;

    let series = transform_coefficients(&hk);
    // The closed-form expansion needs the first three orders; when the
    // input carries fewer the table simply omits the comparison.
    let expansion = expansion_coefficients(&hk).ok();
    let mut provenance = Provenance::new(&hash);
    provenance.push_text("table", "solve");
    let columns: &[&str] = if expansion.is_some() {
        &["n", "lambda", "residual", "lambda_expansion", "rel_diff"]
    } else {
        &["n", "lambda", "residual"]
    };
    let mut table = Table::new(columns);
    for n in grid.values() {
        let lambda = eigenvalue_solve(&series, n).numeric()?;
        let residual =
            evaluate_counting_series(&series, lambda).numeric()?.value - n as f64;
        let mut row = vec![Cell::Count(n), Cell::Float(lambda), Cell::Float(residual)];
        if let Some(exp) = &expansion {
            let predicted = exp.evaluate_expansion(n).numeric()?;
            row.push(Cell::Float(predicted));
            row.push(Cell::Float((predicted - lambda).abs() / lambda));
        }
        table.push_row(row).numeric()?;
    }
    emit(&table, &provenance, format, out.as_deref()).numeric()?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// density
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct DensityCmd {
    #[command(flatten)]
    pub shape: ShapeArgs,

    /// Spectrum JSON file instead of a shape
    #[arg(long, value_name = "PATH", conflicts_with_all = ["shape", "shape_file"])]
    pub spectrum_file: Option<PathBuf>,

    /// Truncation bound (required with a shape; files carry their own)
    #[arg(long)]
    pub lambda_max: Option<f64>,

    /// Evaluation grid start:stop:count
    #[arg(long, value_name = "A:B:N")]
    pub lambda_grid: Option<String>,

    /// Space the grid geometrically instead of linearly
    #[arg(long)]
    pub geometric: bool,

    #[command(flatten)]
    pub smoothing: SmoothingArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn density(cmd: &DensityCmd) -> CliResult<i32> {
    let file = FileConfig::load(cmd.output.config.as_deref()).usage()?;
    let grid_text = cmd
        .lambda_grid
        .clone()
        .or_else(|| file.lambda_grid.clone())
        .ok_or_else(|| missing("--lambda-grid"))?;
    let geometric = cmd.geometric || file.geometric.unwrap_or(false);
    let grid = Grid::parse(&grid_text, geometric).usage()?;
    let smoothing = cmd.smoothing.resolve(&file);
    let (format, out) = cmd.output.resolve(&file);

    let mut config = RunConfig::bare("density", format);
    config.lambda_grid = Some(grid);
    config.smoothing = smoothing.clone();
    let (spectrum, shape) =
        spectrum_source(&cmd.shape, &cmd.spectrum_file, cmd.lambda_max, &file, &mut config)?;
    let hash = config.hash().usage()?;

    let smoothing_config = smoothing.build(&spectrum).numeric()?;
    let beta = smoothing_config.beta_schedule()[0];
    // Each term dropped by the Fermi-derivative cutoff is below
    // beta e^{-cutoff}, so the omitted weight is certified like count's.
    let dropped_bound = spectrum.total_count() as f64
        * beta
        * (-smoothing_config.tail_cutoff()).exp();
    // With a model shape the termwise differentiated counting series
    // rides along for comparison.
    let rho_series = match &shape {
        Some(s) => Some(density_series(&transform_coefficients(
            &s.heat_coefficients(None).numeric()?,
        ))),
        None => None,
    };
    let mut provenance = Provenance::new(&hash);
    provenance.push_text("table", "density");
    provenance.push_text("shape", spectrum.shape_tag());
    provenance.push_float("truncation_bound", spectrum.truncation_bound());
    let columns: &[&str] = if rho_series.is_some() {
        &[
            "lambda",
            "rho_smoothed",
            "beta",
            "dropped_weight_bound",
            "rho_series",
            "abs_diff",
        ]
    } else {
        &["lambda", "rho_smoothed", "beta", "dropped_weight_bound"]
    };
    let mut table = Table::new(columns);
    for lambda in grid.values() {
        let rho = spectrum.density_smoothed(lambda, &smoothing_config).numeric()?;
        let mut row = vec![
            Cell::Float(lambda),
            Cell::Float(rho),
            Cell::Float(beta),
            Cell::Float(dropped_bound),
        ];
        if let Some(series) = &rho_series {
            let smooth = evaluate_counting_series(series, lambda).numeric()?.value;
            row.push(Cell::Float(smooth));
            row.push(Cell::Float((smooth - rho).abs()));
        }
        table.push_row(row).numeric()?;
    }
    emit(&table, &provenance, format, out.as_deref()).numeric()?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct VerifyCmd {
    #[command(flatten)]
    pub shape: ShapeArgs,

    /// Truncation bound for the spectral checks (shapes with spectra)
    #[arg(long)]
    pub lambda_max: Option<f64>,

    #[command(flatten)]
    pub smoothing: SmoothingArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

struct CheckRow {
    check: &'static str,
    value: f64,
    bound: f64,
}

impl CheckRow {
    fn pass(&self) -> bool {
        self.value.is_finite() && self.value.abs() <= self.bound
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.check.into()),
            Cell::Float(self.value),
            Cell::Float(self.bound),
            Cell::Flag(self.pass()),
        ]
    }
}

/// Derives the companion counts path: `<stem>-counts.<ext>`.
fn counts_path(out: &Path, format: OutFormat) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = out
        .extension()
        .and_then(|s| s.to_str())
        .unwrap_or_else(|| format.name());
    out.with_file_name(format!("{stem}-counts.{ext}"))
}

pub fn verify(cmd: &VerifyCmd) -> CliResult<i32> {
    let file = FileConfig::load(cmd.output.config.as_deref()).usage()?;
    let shape = cmd.shape.resolve(&file).usage()?;
    let smoothing = cmd.smoothing.resolve(&file);
    let (format, out) = cmd.output.resolve(&file);
    let spectral = !matches!(shape, ShapeInstance::Blob(..) | ShapeInstance::Region(..));
    let lambda_max = if spectral {
        Some(
            cmd.lambda_max
                .or(file.lambda_max)
                .ok_or_else(|| missing("--lambda-max"))?,
        )
    } else {
        None
    };

    let mut config = RunConfig::bare("verify", format);
    config.shape = Some(shape.spec());
    config.lambda_max = lambda_max;
    config.smoothing = smoothing.clone();
    let hash = config.hash().usage()?;

    let mut rows: Vec<CheckRow> = Vec::new();
    let mut counts: Option<Table> = None;
    if let Some(bound) = lambda_max {
        let spectrum = shape.spectrum(bound).numeric()?;
        let hk = shape.heat_coefficients(None).numeric()?;
        let series = transform_coefficients(&hk);

        let laplace_max = [0.01, 0.1, 1.0]
            .iter()
            .map(|&t| spectrum.laplace_forward_check(t).map(f64::abs))
            .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))
            .numeric()?;
        rows.push(CheckRow {
            check: "laplace_residual_max",
            value: laplace_max,
            bound: 1e-12,
        });

        let smoothing_config = smoothing.build(&spectrum).numeric()?;
        let (dev, mismatches) =
            smoothed_midpoint_sweep(&spectrum, &smoothing_config).numeric()?;
        rows.push(CheckRow {
            check: "smoothed_pre_round_dev_max",
            value: dev,
            bound: 1e-8,
        });
        rows.push(CheckRow {
            check: "smoothed_round_mismatches",
            value: mismatches as f64,
            bound: 0.0,
        });

        rows.push(CheckRow {
            check: "transform_gamma_identity_max_dev",
            value: gamma_identity_dev(&hk, &series),
            bound: 1e-12,
        });

        let (windowed, leading) = windowed_series_deviation(&spectrum, &series).numeric()?;
        rows.push(CheckRow {
            check: "series_windowed_mean_dev",
            value: windowed,
            bound: 0.05 * leading,
        });

        let t0 = 20.0 / bound;
        let majorant = shape.tail_majorant(bound, 2.0 * t0).numeric()?;
        let k = spectrum.heat_trace(t0, Some(&majorant)).numeric()?;
        rows.push(CheckRow {
            check: "heat_tail_relative",
            value: k.tail_bound / k.value,
            bound: 1e-4,
        });

        counts = Some(counts_table(&spectrum, &series)?);
    }
    if let Some(region) = shape.region() {
        let defect = gauss_bonnet_defect(region).numeric()?;
        rows.push(CheckRow {
            check: "gauss_bonnet_defect",
            value: defect,
            bound: 1e-6 * 2.0 * std::f64::consts::PI,
        });
    }

    let mut provenance = Provenance::new(&hash);
    provenance.push_text("table", "residual_summary");
    provenance.push_text("shape", &shape.tag());
    if let Some(bound) = lambda_max {
        provenance.push_float("truncation_bound", bound);
    }
    let mut summary = Table::new(&["check", "value", "bound", "pass"]);
    for row in &rows {
        summary.push_row(row.cells()).numeric()?;
    }
    emit(&summary, &provenance, format, out.as_deref()).numeric()?;
    if let Some(counts) = counts {
        let mut counts_provenance = Provenance::new(&hash);
        counts_provenance.push_text("table", "counts");
        counts_provenance.push_text("shape", &shape.tag());
        counts_provenance.push_float("truncation_bound", lambda_max.unwrap_or(f64::NAN));
        let companion = out.as_deref().map(|p| counts_path(p, format));
        emit(&counts, &counts_provenance, format, companion.as_deref()).numeric()?;
    }

    let failed = rows.iter().filter(|r| !r.pass()).count();
    if failed > 0 {
        eprintln!(
            "{}",
            error_payload(
                "VerificationFailed",
                &format!("{failed} of {} checks failed", rows.len()),
            )
        );
        return Ok(3);
    }
    Ok(0)
}

/// Smoothed-vs-direct comparison on up to 25 gap midpoints. Gaps are
/// admitted only when the schedule can resolve them (the top beta must
/// put at least ~30 half-widths across the half-gap) and the smoothing
/// window at the first beta stays certified inside the truncation.
fn smoothed_midpoint_sweep(
    spectrum: &Spectrum,
    config: &weylkit_core::SmoothingConfig,
) -> Result<(f64, u64)> {
    let entries = spectrum.entries();
    let beta_first = config.beta_schedule()[0];
    let beta_last = *config.beta_schedule().last().expect("nonempty schedule");
    let certified_max = spectrum.truncation_bound() - config.tail_cutoff() / beta_first;
    let mut midpoints = Vec::new();
    for pair in entries.windows(2) {
        let (lo, hi) = (pair[0].0, pair[1].0);
        let mid = 0.5 * (lo + hi);
        if beta_last * 0.5 * (hi - lo) >= 60.0 && mid <= certified_max {
            midpoints.push(mid);
        }
    }
    if midpoints.is_empty() {
        return Err(SpectralError::Domain(
            "no resolvable gap midpoints for the smoothed-count check".into(),
        ));
    }
    let step = (midpoints.len() / 25).max(1);
    let mut max_dev = 0.0f64;
    let mut mismatches = 0u64;
    for mid in midpoints.iter().step_by(step) {
        let direct = spectrum.count_direct(*mid)?;
        let smoothed = spectrum.count_smoothed(*mid, config)?;
        max_dev = max_dev.max((smoothed.value - direct as f64).abs());
        if smoothed.value.round() as u64 != direct {
            mismatches += 1;
        }
    }
    Ok((max_dev, mismatches))
}

/// Max relative deviation of the Gamma round-trip identity
/// C_k Gamma(1 + D/2 - k) (4 pi)^{D/2} = B_k over the power terms.
fn gamma_identity_dev(hk: &HeatKernelCoefficients, series: &CountingSeries) -> f64 {
    let d = hk.dimension();
    let prefactor = (4.0 * std::f64::consts::PI).powf(d as f64 / 2.0);
    let mut worst = 0.0f64;
    for term in series.power_terms() {
        let gamma = weylkit_core::gamma::half_integer_gamma(2 + d as i64 - term.two_k as i64)
            .expect("power terms sit away from poles");
        let b = hk.get(term.two_k).unwrap_or(0.0);
        if b != 0.0 {
            worst = worst.max((term.coefficient * gamma * prefactor / b - 1.0).abs());
        }
    }
    worst
}

/// Mean of N_direct - series over five windows tiling the upper half
/// of the range, reported against the leading Weyl term at the bound.
fn windowed_series_deviation(
    spectrum: &Spectrum,
    series: &CountingSeries,
) -> Result<(f64, f64)> {
    let bound = spectrum.truncation_bound();
    let leading = series
        .power_terms()
        .first()
        .map(|t| t.coefficient * bound.powf(series.exponent(t.two_k)))
        .unwrap_or(0.0);
    let mut worst = 0.0f64;
    for w in 0..5 {
        let start = bound * (0.5 + 0.1 * w as f64);
        let width = bound * 0.1;
        let mut acc = 0.0;
        let samples = 64;
        for j in 0..samples {
            let lambda = start + width * (j as f64 + 0.5) / samples as f64;
            let direct = spectrum.count_direct(lambda)? as f64;
            let predicted = evaluate_counting_series(series, lambda)?.value;
            acc += direct - predicted;
        }
        worst = worst.max((acc / samples as f64).abs());
    }
    Ok((worst, leading.abs()))
}

/// N_direct vs series table over 200 points spanning the enumeration.
fn counts_table(spectrum: &Spectrum, series: &CountingSeries) -> CliResult<Table> {
    let mut table = Table::new(&["lambda", "n_direct", "n_series", "deviation"]);
    let first = spectrum.first_eigenvalue().unwrap_or(0.0);
    let bound = spectrum.truncation_bound();
    let points = 200;
    for i in 0..points {
        let lambda = first + (bound - first) * i as f64 / (points - 1) as f64;
        let direct = spectrum.count_direct(lambda).numeric()?;
        let predicted = evaluate_counting_series(series, lambda).numeric()?.value;
        table
            .push_row(vec![
                Cell::Float(lambda),
                Cell::Count(direct),
                Cell::Float(predicted),
                Cell::Float(direct as f64 - predicted),
            ])
            .numeric()?;
    }
    Ok(table)
}

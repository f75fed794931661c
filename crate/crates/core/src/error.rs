//! Error type shared by all weylkit operations.

/// Everything that can go wrong while building spectra or evaluating
/// spectral functions. Variants carry enough context to be actionable:
/// callers that want to recover programmatically can match on the fields
/// instead of parsing messages.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    /// The requested evaluation point lies at or beyond the truncation
    /// bound of the stored spectrum, so the result would silently miss
    /// states.
    #[error("lambda {lambda} is at or beyond the truncation bound {bound}; the count would be incomplete")]
    TruncationExceeded { lambda: f64, bound: f64 },

    /// The smoothing schedule was exhausted before two consecutive
    /// values agreed. Both trailing values are reported so the caller
    /// can judge how far from settled the iteration was.
    #[error("smoothing schedule exhausted without convergence (last {last}, previous {previous})")]
    NonConvergence { last: f64, previous: f64 },

    /// The evaluation point coincides with a stored eigenvalue, where
    /// the sharp count is ambiguous. Both natural answers are carried:
    /// the strict-inequality count and the smoothed limit, which splits
    /// the multiplicity in half.
    #[error("lambda {lambda} coincides with an eigenvalue of multiplicity {multiplicity}; strict count {strict_count}, smoothed limit {smoothed_limit}")]
    DegeneratePoint {
        lambda: f64,
        multiplicity: u64,
        strict_count: u64,
        smoothed_limit: f64,
    },

    /// States beyond the truncation bound could contribute more than
    /// the smoothing kernel's tail allowance, so the smoothed value
    /// cannot be certified from the stored spectrum alone.
    #[error("cannot certify the dropped tail: lambda {lambda} + cutoff {cutoff}/beta {beta} exceeds the truncation bound {bound}")]
    TailNotCertified {
        lambda: f64,
        beta: f64,
        cutoff: f64,
        bound: f64,
    },

    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The shape has no eigenvalues at or below the requested bound.
    #[error("no eigenvalues at or below {lambda_max}; the first eigenvalue is {first}")]
    EmptySpectrum { lambda_max: f64, first: f64 },

    /// The requested boundary condition is not implemented for this
    /// operation.
    #[error("unsupported boundary condition: {0}")]
    UnsupportedBoundaryCondition(String),

    /// An operation needed a heat coefficient past the end of the
    /// stored expansion.
    #[error("insufficient heat coefficients: need half-index 2k = {needed_two_k}, have up to {max_two_k}")]
    InsufficientCoefficients { needed_two_k: u32, max_two_k: u32 },

    /// A bracketing root search failed. The bracket endpoints and the
    /// function values there are reported for diagnosis.
    #[error("root search failed on [{lo}, {hi}] with f(lo) = {f_lo}, f(hi) = {f_hi}: {context}")]
    RootFind {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        context: String,
    },

    /// A planar region failed validation (orientation, containment,
    /// degenerate vertices, ...).
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    /// Boundary sampling is too coarse for curvature quadrature: some
    /// vertex turns so sharply that the polyline cannot be trusted as a
    /// sample of a smooth curve.
    #[error("boundary sampling too coarse: turning angle {max_turning_angle} rad at vertex {vertex}; estimated quadrature error {estimated_error}")]
    Resolution {
        max_turning_angle: f64,
        vertex: usize,
        estimated_error: f64,
    },

    /// Malformed input that is not a domain problem: bad schedules,
    /// unsorted eigenvalue lists, inconsistent dimensions.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The combination of options is valid but not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// File or encoding failure while reading or writing one of the
    /// on-disk formats. The message is pre-rendered because io errors
    /// are not Clone.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SpectralError {
    fn from(e: std::io::Error) -> Self {
        SpectralError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for SpectralError {
    fn from(e: serde_json::Error) -> Self {
        SpectralError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SpectralError>;

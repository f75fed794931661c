//! Truncated spectra and the counting and heat-trace operations on them.
//!
//! A [`Spectrum`] is an explicit list of eigenvalues with multiplicities
//! below a stated truncation bound. Everything downstream (sharp and
//! smoothed counting, heat traces, consistency residuals, mollified
//! state densities) is defined on this one type, and every reduction
//! runs through [`crate::kahan`] in a fixed order, so repeated runs are
//! reproducible bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};
use crate::gamma::upper_gamma_bound;
use crate::kahan::{sum_indexed, KahanSum};

/// Relative half-width inside which an evaluation point is considered
/// to sit exactly on an eigenvalue.
const DEGENERATE_ULPS: f64 = 8.0 * f64::EPSILON;

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

/// An explicitly enumerated spectrum, truncated at `truncation_bound`.
///
/// Invariants enforced on construction: eigenvalues are finite, strictly
/// positive, sorted nondecreasing, and at or below the truncation bound;
/// multiplicities are at least 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    dimension: u32,
    shape_tag: String,
    truncation_bound: f64,
    entries: Vec<(f64, u64)>,
    /// Inclusive prefix sums of the multiplicities.
    cumulative: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumFile {
    dimension: u32,
    shape_tag: String,
    truncation_bound: f64,
    entries: Vec<(f64, u64)>,
}

impl Spectrum {
    pub fn new(
        dimension: u32,
        shape_tag: impl Into<String>,
        truncation_bound: f64,
        entries: Vec<(f64, u64)>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(SpectralError::InvalidInput("dimension must be >= 1".into()));
        }
        if !(truncation_bound > 0.0) || !truncation_bound.is_finite() {
            return Err(SpectralError::InvalidInput(format!(
                "truncation bound must be positive and finite, got {truncation_bound}"
            )));
        }
        let mut prev = 0.0;
        for &(lambda, mult) in &entries {
            if !lambda.is_finite() || lambda <= 0.0 {
                return Err(SpectralError::InvalidInput(format!(
                    "eigenvalue {lambda} is not strictly positive and finite"
                )));
            }
            if lambda < prev {
                return Err(SpectralError::InvalidInput(format!(
                    "eigenvalues not sorted: {lambda} follows {prev}"
                )));
            }
            if lambda > truncation_bound {
                return Err(SpectralError::InvalidInput(format!(
                    "eigenvalue {lambda} exceeds truncation bound {truncation_bound}"
                )));
            }
            if mult == 0 {
                return Err(SpectralError::InvalidInput(format!(
                    "eigenvalue {lambda} has multiplicity 0"
                )));
            }
            prev = lambda;
        }
        let mut cumulative = Vec::with_capacity(entries.len());
        let mut running = 0u64;
        for &(_, m) in &entries {
            running += m;
            cumulative.push(running);
        }
        Ok(Self {
            dimension,
            shape_tag: shape_tag.into(),
            truncation_bound,
            entries,
            cumulative,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn shape_tag(&self) -> &str {
        &self.shape_tag
    }

    pub fn truncation_bound(&self) -> f64 {
        self.truncation_bound
    }

    /// Distinct (eigenvalue, multiplicity) pairs in ascending order.
    pub fn entries(&self) -> &[(f64, u64)] {
        &self.entries
    }

    /// Number of distinct eigenvalues stored.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of states, multiplicity included.
    pub fn total_count(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    pub fn first_eigenvalue(&self) -> Option<f64> {
        self.entries.first().map(|&(l, _)| l)
    }

    pub fn last_eigenvalue(&self) -> Option<f64> {
        self.entries.last().map(|&(l, _)| l)
    }

    /// Median eigenvalue weighted by multiplicity; the natural scale
    /// for smoothing schedules.
    pub fn median_eigenvalue(&self) -> Option<f64> {
        if self.entries.is_empty() {
            return None;
        }
        let half = self.total_count().div_ceil(2);
        let idx = self.cumulative.partition_point(|&c| c < half);
        Some(self.entries[idx].0)
    }

    /// The n-th eigenvalue (1-based, counting multiplicity).
    pub fn nth_eigenvalue(&self, n: u64) -> Option<f64> {
        if n == 0 || n > self.total_count() {
            return None;
        }
        let idx = self.cumulative.partition_point(|&c| c < n);
        Some(self.entries[idx].0)
    }

    // -----------------------------------------------------------------------
    // Counting
    // -----------------------------------------------------------------------

    /// Sharp counting function: the number of states with eigenvalue
    /// strictly below `lambda`.
    pub fn count_direct(&self, lambda: f64) -> Result<u64> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(SpectralError::Domain(format!(
                "count_direct needs 0 < lambda, got {lambda}"
            )));
        }
        if lambda > self.truncation_bound {
            return Err(SpectralError::TruncationExceeded {
                lambda,
                bound: self.truncation_bound,
            });
        }
        let idx = self.entries.partition_point(|&(l, _)| l < lambda);
        Ok(if idx == 0 { 0 } else { self.cumulative[idx - 1] })
    }

    /// Returns the entry whose eigenvalue coincides with `lambda` to
    /// within a few ulps, if any.
    fn degenerate_entry(&self, lambda: f64) -> Option<(f64, u64)> {
        let idx = self.entries.partition_point(|&(l, _)| l < lambda);
        for cand in [idx.wrapping_sub(1), idx] {
            if let Some(&(l, m)) = self.entries.get(cand) {
                if (l - lambda).abs() <= DEGENERATE_ULPS * l.abs().max(lambda.abs()) {
                    return Some((l, m));
                }
            }
        }
        None
    }

    /// Fermi-smoothed count at a single sharpness `beta`.
    ///
    /// Each state contributes 1 / (e^{beta (lambda_n - lambda)} + 1);
    /// states with beta (lambda_n - lambda) > tail_cutoff are dropped,
    /// which is why certification requires lambda + tail_cutoff / beta
    /// to stay at or below the truncation bound: beyond the bound we
    /// cannot know there are no states, so their kernel weight must be
    /// provably negligible.
    pub fn count_smoothed_at(&self, lambda: f64, beta: f64, tail_cutoff: f64) -> Result<f64> {
        if !lambda.is_finite() || lambda <= 0.0 || !(beta > 0.0) || !(tail_cutoff > 0.0) {
            return Err(SpectralError::Domain(format!(
                "count_smoothed_at needs lambda > 0, beta > 0, tail_cutoff > 0; got lambda={lambda}, beta={beta}, cutoff={tail_cutoff}"
            )));
        }
        if let Some((l, m)) = self.degenerate_entry(lambda) {
            let strict = self.entries.partition_point(|&(e, _)| e < l);
            let strict_count = if strict == 0 {
                0
            } else {
                self.cumulative[strict - 1]
            };
            return Err(SpectralError::DegeneratePoint {
                lambda,
                multiplicity: m,
                strict_count,
                smoothed_limit: strict_count as f64 + m as f64 / 2.0,
            });
        }
        if lambda + tail_cutoff / beta > self.truncation_bound {
            return Err(SpectralError::TailNotCertified {
                lambda,
                beta,
                cutoff: tail_cutoff,
                bound: self.truncation_bound,
            });
        }
        let entries = &self.entries;
        Ok(sum_indexed(entries.len(), |i| {
            let (l, m) = entries[i];
            let x = beta * (l - lambda);
            if x > tail_cutoff {
                0.0
            } else if x >= 0.0 {
                let e = (-x).exp();
                m as f64 * e / (1.0 + e)
            } else {
                m as f64 / (x.exp() + 1.0)
            }
        }))
    }

    /// Fermi-smoothed count driven to convergence along a schedule of
    /// increasing `beta`.
    ///
    /// The value is accepted once two consecutive schedule entries agree
    /// to within the configured tolerance. Certification of the dropped
    /// tail must hold for every scheduled beta (the smallest is the
    /// binding one), because convergence may stop the sweep at any
    /// entry.
    pub fn count_smoothed(&self, lambda: f64, config: &SmoothingConfig) -> Result<SmoothedCount> {
        let mut prev: Option<f64> = None;
        for (step, &beta) in config.beta_schedule.iter().enumerate() {
            let value = self.count_smoothed_at(lambda, beta, config.tail_cutoff)?;
            if let Some(p) = prev {
                if (value - p).abs() <= config.tolerance {
                    return Ok(SmoothedCount {
                        value,
                        beta,
                        steps: step + 1,
                    });
                }
            }
            prev = Some(value);
        }
        let last = prev.unwrap_or(f64::NAN);
        Err(SpectralError::NonConvergence {
            last,
            previous: if config.beta_schedule.len() >= 2 {
                // Recompute the penultimate value for the report; the
                // sweep above only keeps one element of history.
                self.count_smoothed_at(
                    lambda,
                    config.beta_schedule[config.beta_schedule.len() - 2],
                    config.tail_cutoff,
                )
                .unwrap_or(f64::NAN)
            } else {
                f64::NAN
            },
        })
    }

    // -----------------------------------------------------------------------
    // Heat trace
    // -----------------------------------------------------------------------

    /// Heat trace sum over the stored states, with a certified bound on
    /// the contribution of the states dropped by truncation.
    ///
    /// Without a majorant the spectrum is treated as complete and the
    /// tail bound is zero; pass a [`WeylMajorant`] whenever the spectrum
    /// is a truncation of an infinite one.
    pub fn heat_trace(&self, t: f64, majorant: Option<&WeylMajorant>) -> Result<HeatTraceValue> {
        if !t.is_finite() || t <= 0.0 {
            return Err(SpectralError::Domain(format!(
                "heat_trace needs t > 0, got {t}"
            )));
        }
        let entries = &self.entries;
        let value = sum_indexed(entries.len(), |i| {
            let (l, m) = entries[i];
            m as f64 * (-l * t).exp()
        });
        let tail_bound = match majorant {
            Some(m) => {
                if m.dimension != self.dimension {
                    return Err(SpectralError::InvalidInput(format!(
                        "majorant dimension {} does not match spectrum dimension {}",
                        m.dimension, self.dimension
                    )));
                }
                m.tail_bound(self.truncation_bound, t)
            }
            None => 0.0,
        };
        Ok(HeatTraceValue { value, tail_bound })
    }

    /// Relative residual of the forward transform identity
    /// K(t) = t * int_0^inf N(lambda) e^{-lambda t} dlambda, restricted
    /// to the truncated window.
    ///
    /// The left side is integrated in closed form over the intervals on
    /// which the counting function is constant; the right side is the
    /// heat trace minus the boundary correction N(bound) e^{-bound t}.
    /// The two routes share no intermediate arithmetic, so the residual
    /// is a genuine internal consistency check.
    pub fn laplace_forward_check(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t <= 0.0 {
            return Err(SpectralError::Domain(format!(
                "laplace_forward_check needs t > 0, got {t}"
            )));
        }
        let n = self.entries.len();
        let mut acc = KahanSum::new();
        for i in 0..n {
            let (l, _) = self.entries[i];
            let next = if i + 1 < n {
                self.entries[i + 1].0
            } else {
                self.truncation_bound
            };
            // t * int_l^next e^{-u t} du = e^{-l t} - e^{-next t}
            //                            = -e^{-l t} * expm1(-(next - l) t)
            let step = -(-l * t).exp() * (-(next - l) * t).exp_m1();
            acc.add(self.cumulative[i] as f64 * step);
        }
        let lhs = acc.value();
        let heat = self.heat_trace(t, None)?.value;
        let rhs = heat - self.total_count() as f64 * (-self.truncation_bound * t).exp();
        let scale = lhs.abs().max(rhs.abs());
        if scale == 0.0 {
            return Ok(0.0);
        }
        Ok((lhs - rhs) / scale)
    }

    // -----------------------------------------------------------------------
    // Smoothed density
    // -----------------------------------------------------------------------

    /// Mollified state density at sharpness `beta`: each state
    /// contributes beta times the Fermi kernel derivative, a bump of
    /// width ~1/beta centered on the eigenvalue.
    ///
    /// Unlike the smoothed count there is no degenerate-point error
    /// here: the kernel is smooth across eigenvalues (at lambda equal
    /// to an eigenvalue of multiplicity m it takes the value
    /// m * beta / 4), and no schedule sweep either, because the sharp
    /// limit of the density is a sum of delta spikes rather than a
    /// number to converge to.
    pub fn density_smoothed_at(&self, lambda: f64, beta: f64, tail_cutoff: f64) -> Result<f64> {
        if !lambda.is_finite() || lambda <= 0.0 || !(beta > 0.0) || !(tail_cutoff > 0.0) {
            return Err(SpectralError::Domain(format!(
                "density_smoothed_at needs lambda > 0, beta > 0, tail_cutoff > 0; got lambda={lambda}, beta={beta}, cutoff={tail_cutoff}"
            )));
        }
        if lambda + tail_cutoff / beta > self.truncation_bound {
            return Err(SpectralError::TailNotCertified {
                lambda,
                beta,
                cutoff: tail_cutoff,
                bound: self.truncation_bound,
            });
        }
        let entries = &self.entries;
        Ok(sum_indexed(entries.len(), |i| {
            let (l, m) = entries[i];
            let x = beta * (l - lambda);
            if x.abs() > tail_cutoff {
                0.0
            } else {
                // The kernel is even in x; evaluate through e^{-|x|}
                // so neither branch can overflow.
                let u = (-x.abs()).exp();
                m as f64 * beta * u / ((1.0 + u) * (1.0 + u))
            }
        }))
    }

    /// Mollified state density at the first scheduled beta of `config`.
    pub fn density_smoothed(&self, lambda: f64, config: &SmoothingConfig) -> Result<f64> {
        self.density_smoothed_at(lambda, config.beta_schedule[0], config.tail_cutoff)
    }

    // -----------------------------------------------------------------------
    // Serialization
    // -----------------------------------------------------------------------

    pub fn to_json_string(&self) -> Result<String> {
        crate::io::to_json_string_full(&SpectrumFile {
            dimension: self.dimension,
            shape_tag: self.shape_tag.clone(),
            truncation_bound: self.truncation_bound,
            entries: self.entries.clone(),
        })
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: SpectrumFile = serde_json::from_str(json)?;
        Spectrum::new(
            file.dimension,
            file.shape_tag,
            file.truncation_bound,
            file.entries,
        )
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// Result of a schedule-driven smoothed count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedCount {
    pub value: f64,
    /// The beta at which convergence was accepted.
    pub beta: f64,
    /// Number of schedule entries evaluated.
    pub steps: usize,
}

/// Heat trace value together with a certified upper bound on the
/// truncated tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatTraceValue {
    pub value: f64,
    pub tail_bound: f64,
}

// ---------------------------------------------------------------------------
// Smoothing configuration
// ---------------------------------------------------------------------------

/// Schedule and tolerances for Fermi smoothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    beta_schedule: Vec<f64>,
    tolerance: f64,
    tail_cutoff: f64,
}

impl SmoothingConfig {
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;
    pub const DEFAULT_TAIL_CUTOFF: f64 = 30.0;

    pub fn new(beta_schedule: Vec<f64>, tolerance: f64, tail_cutoff: f64) -> Result<Self> {
        if beta_schedule.len() < 2 {
            return Err(SpectralError::InvalidInput(
                "beta schedule needs at least two entries for convergence detection".into(),
            ));
        }
        let mut prev = 0.0;
        for &b in &beta_schedule {
            if !(b > prev) || !b.is_finite() {
                return Err(SpectralError::InvalidInput(format!(
                    "beta schedule must be strictly increasing and positive, got {b} after {prev}"
                )));
            }
            prev = b;
        }
        if !(tolerance > 0.0) || !(tail_cutoff > 0.0) {
            return Err(SpectralError::InvalidInput(format!(
                "tolerance and tail_cutoff must be positive, got {tolerance}, {tail_cutoff}"
            )));
        }
        Ok(Self {
            beta_schedule,
            tolerance,
            tail_cutoff,
        })
    }

    /// Default doubling schedule 2^6 .. 2^20 over a characteristic
    /// eigenvalue scale, usually the median eigenvalue.
    pub fn for_scale(lambda_scale: f64) -> Result<Self> {
        if !(lambda_scale > 0.0) || !lambda_scale.is_finite() {
            return Err(SpectralError::InvalidInput(format!(
                "smoothing scale must be positive and finite, got {lambda_scale}"
            )));
        }
        let schedule = (6..=20).map(|p| (1u64 << p) as f64 / lambda_scale).collect();
        Self::new(
            schedule,
            Self::DEFAULT_TOLERANCE,
            Self::DEFAULT_TAIL_CUTOFF,
        )
    }

    pub fn for_spectrum(spectrum: &Spectrum) -> Result<Self> {
        let scale = spectrum.median_eigenvalue().ok_or_else(|| {
            SpectralError::InvalidInput("cannot derive a smoothing scale from an empty spectrum".into())
        })?;
        Self::for_scale(scale)
    }

    pub fn beta_schedule(&self) -> &[f64] {
        &self.beta_schedule
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn tail_cutoff(&self) -> f64 {
        self.tail_cutoff
    }
}

// ---------------------------------------------------------------------------
// Weyl majorant for tail certification
// ---------------------------------------------------------------------------

/// Caller-asserted bound rho(lambda) <= a lambda^{D/2 - 1}
///                                     + b lambda^{D/2 - 3/2}
/// on the state density above the truncation bound, used to certify the
/// heat-trace tail. Coefficients must be nonnegative so that bounding
/// each incomplete-gamma factor from above preserves the direction of
/// the inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylMajorant {
    dimension: u32,
    a: f64,
    b: f64,
}

impl WeylMajorant {
    pub fn new(dimension: u32, a: f64, b: f64) -> Result<Self> {
        if dimension == 0 {
            return Err(SpectralError::InvalidInput("dimension must be >= 1".into()));
        }
        if !(a >= 0.0) || !(b >= 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(SpectralError::InvalidInput(format!(
                "majorant coefficients must be finite and nonnegative, got a={a}, b={b}"
            )));
        }
        Ok(Self { dimension, a, b })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    /// Upper bound on int_bound^inf rho(lambda) e^{-lambda t} dlambda,
    /// via int_L^inf lambda^{s-1} e^{-lambda t} dlambda
    ///        = t^{-s} Gamma(s, L t).
    pub fn tail_bound(&self, bound: f64, t: f64) -> f64 {
        let y = bound * t;
        let s1 = self.dimension as f64 / 2.0;
        let s2 = (self.dimension as f64 - 1.0) / 2.0;
        let mut tail = self.a * t.powf(-s1) * upper_gamma_bound(s1, y);
        if self.b > 0.0 {
            tail += self.b * t.powf(-s2) * upper_gamma_bound(s2, y);
        }
        tail
    }
}

//! Rectangular boxes with Dirichlet walls: exact spectra and heat
//! coefficients in any dimension.

use std::f64::consts::PI;

use crate::error::{Result, SpectralError};
use crate::spectrum::{Spectrum, WeylMajorant};
use crate::transform::HeatKernelCoefficients;

/// Relative tolerance for merging enumerated eigenvalues into one
/// multiplicity entry. Permutation-degenerate lattice sums land within
/// an ulp of each other; genuinely distinct box eigenvalues this close
/// are indistinguishable for counting purposes anyway.
const MERGE_EPS: f64 = 1e-9;

/// An axis-aligned box with the given side lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxShape {
    sides: Vec<f64>,
}

impl BoxShape {
    pub fn new(sides: Vec<f64>) -> Result<Self> {
        if sides.is_empty() {
            return Err(SpectralError::InvalidInput(
                "a box needs at least one side".into(),
            ));
        }
        if let Some(bad) = sides.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(SpectralError::InvalidInput(format!(
                "box sides must be positive and finite, got {bad}"
            )));
        }
        Ok(Self { sides })
    }

    pub fn unit(dimension: u32) -> Self {
        Self {
            sides: vec![1.0; dimension as usize],
        }
    }

    pub fn dimension(&self) -> u32 {
        self.sides.len() as u32
    }

    pub fn sides(&self) -> &[f64] {
        &self.sides
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().product()
    }

    pub fn tag(&self) -> String {
        format!("box L={:?}", self.sides)
    }

    /// Smallest eigenvalue, pi^2 sum 1/L_i^2.
    pub fn first_eigenvalue(&self) -> f64 {
        PI * PI * self.sides.iter().map(|l| 1.0 / (l * l)).sum::<f64>()
    }

    /// Enumerates all eigenvalues pi^2 sum (n_i / L_i)^2 with n_i >= 1
    /// up to `lambda_max`, merged into multiplicity entries.
    pub fn spectrum(&self, lambda_max: f64) -> Result<Spectrum> {
        if !(lambda_max > 0.0) || !lambda_max.is_finite() {
            return Err(SpectralError::Domain(format!(
                "lambda_max must be positive and finite, got {lambda_max}"
            )));
        }
        let first = self.first_eigenvalue();
        if lambda_max < first {
            return Err(SpectralError::EmptySpectrum { lambda_max, first });
        }
        let cap = lambda_max / (PI * PI);
        let mut sums = Vec::new();
        collect(&self.sides, 0, 0.0, cap, &mut sums);
        sums.sort_by(f64::total_cmp);

        let mut entries: Vec<(f64, u64)> = Vec::new();
        for q in sums {
            let lambda = PI * PI * q;
            if lambda > lambda_max {
                continue; // rounding pushed a boundary state just past the cap
            }
            match entries.last_mut() {
                Some((l, m)) if lambda - *l <= MERGE_EPS * lambda => *m += 1,
                _ => entries.push((lambda, 1)),
            }
        }
        Spectrum::new(self.dimension(), self.tag(), lambda_max, entries)
    }

    /// Heat coefficients B_{nu/2} = (-1)^nu pi^{nu/2} V e_nu(1/L_1, ...,
    /// 1/L_D) for nu = 0..=D, in terms of the elementary symmetric
    /// polynomials of the inverse sides; indices beyond D are zero and
    /// are padded explicitly up to `max_two_k`.
    pub fn heat_coefficients(&self, max_two_k: u32) -> HeatKernelCoefficients {
        let d = self.sides.len();
        // e[j] after processing some sides holds e_j of their inverses.
        let mut e = vec![0.0; d + 1];
        e[0] = 1.0;
        for (count, l) in self.sides.iter().enumerate() {
            let inv = 1.0 / l;
            for j in (1..=count + 1).rev() {
                e[j] += e[j - 1] * inv;
            }
        }
        let volume = self.volume();
        let coeffs: Vec<f64> = (0..=max_two_k)
            .map(|nu| {
                if (nu as usize) > d {
                    0.0
                } else {
                    let sign = if nu % 2 == 0 { 1.0 } else { -1.0 };
                    sign * PI.powf(nu as f64 / 2.0) * volume * e[nu as usize]
                }
            })
            .collect();
        HeatKernelCoefficients::new(self.dimension(), coeffs)
            .expect("box heat coefficients are always valid")
    }

    /// A density majorant certifying heat-trace tails up to `t_max`.
    ///
    /// For boxes the counting function obeys N(lambda) <= c lambda^{D/2}
    /// with c = (4 pi)^{-D/2} V / Gamma(D/2 + 1): each counted lattice
    /// point owns a unit cell inside the quarter ellipsoid. Integration
    /// by parts then bounds the dropped heat tail by t times the
    /// integral of that power, and the factor
    /// gamma = 2 + 4 lambda_cap t_max / D absorbs the ratio between the
    /// incomplete-gamma factors of the integrated and density forms for
    /// every t <= t_max. The result is a valid (if generous) density
    /// majorant A lambda^{D/2 - 1} for the tail beyond lambda_cap.
    pub fn density_majorant(&self, lambda_cap: f64, t_max: f64) -> Result<WeylMajorant> {
        if !(lambda_cap > 0.0) || !(t_max > 0.0) {
            return Err(SpectralError::Domain(format!(
                "density_majorant needs lambda_cap > 0 and t_max > 0, got {lambda_cap}, {t_max}"
            )));
        }
        let d = self.dimension() as f64;
        let c_n = (4.0 * PI).powf(-d / 2.0) * self.volume()
            / crate::gamma::half_integer_gamma(self.dimension() as i64 + 2)
                .expect("Gamma(D/2+1) is never a pole");
        let gamma_factor = 2.0 + 4.0 * lambda_cap * t_max / d;
        WeylMajorant::new(self.dimension(), gamma_factor * c_n * d / 2.0, 0.0)
    }
}

fn collect(sides: &[f64], level: usize, q: f64, cap: f64, out: &mut Vec<f64>) {
    let inv2 = 1.0 / (sides[level] * sides[level]);
    let mut n = 1u64;
    loop {
        let q_new = q + (n * n) as f64 * inv2;
        if q_new > cap {
            break;
        }
        if level + 1 == sides.len() {
            out.push(q_new);
        } else {
            collect(sides, level + 1, q_new, cap, out);
        }
        n += 1;
    }
}

/// Free-function form of [`BoxShape::spectrum`].
pub fn box_spectrum(shape: &BoxShape, lambda_max: f64) -> Result<Spectrum> {
    shape.spectrum(lambda_max)
}

/// Free-function form of [`BoxShape::heat_coefficients`].
pub fn box_heat_coefficients(shape: &BoxShape, max_two_k: u32) -> HeatKernelCoefficients {
    shape.heat_coefficients(max_two_k)
}

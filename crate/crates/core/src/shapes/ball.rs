//! The solid 3-ball with a Dirichlet boundary.
//!
//! Eigenvalues are (x_{l,k}/R)^2 where x_{l,k} runs over the zeros of
//! the spherical Bessel function j_l, each carrying the angular
//! multiplicity 2l + 1. The l = 0 ladder is exactly k pi.

use std::f64::consts::PI;

use crate::error::{Result, SpectralError};
use crate::shapes::bessel::spherical_j_zeros;
use crate::spectrum::Spectrum;
use crate::transform::{transform_coefficients, CountingSeries, HeatKernelCoefficients};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball3DShape {
    radius: f64,
}

impl Ball3DShape {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(SpectralError::InvalidInput(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3)
    }

    pub fn surface(&self) -> f64 {
        4.0 * PI * self.radius * self.radius
    }

    pub fn tag(&self) -> String {
        format!("ball3d R={:?} dirichlet", self.radius)
    }

    pub fn first_eigenvalue(&self) -> f64 {
        (PI / self.radius).powi(2)
    }

    /// Enumerates the Dirichlet spectrum up to `lambda_max`.
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
        let x_max = self.radius * lambda_max.sqrt();
        let mut pairs: Vec<(f64, u64)> = Vec::new();

        // l = 0: nodes of sin(x)/x at exact multiples of pi.
        let mut k = 1u64;
        while k as f64 * PI <= x_max {
            pairs.push((k as f64 * PI, 1));
            k += 1;
        }
        // l >= 1: zeros all exceed l + 1/2, so the ladder terminates.
        let mut l = 1usize;
        loop {
            let zeros = spherical_j_zeros(l, x_max)?;
            if zeros.is_empty() {
                break;
            }
            let mult = 2 * l as u64 + 1;
            for z in zeros {
                pairs.push((z, mult));
            }
            l += 1;
        }

        let radius = self.radius;
        let mut entries: Vec<(f64, u64)> = pairs
            .into_iter()
            .map(|(x, m)| ((x / radius) * (x / radius), m))
            .filter(|&(lambda, _)| lambda <= lambda_max)
            .collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        Spectrum::new(3, self.tag(), lambda_max, entries)
    }

    /// Heat coefficients through 2k = 4. Volume and surface terms are
    /// geometric; the three curvature corrections are the round-sphere
    /// boundary values.
    pub fn heat_coefficients(&self) -> HeatKernelCoefficients {
        let r = self.radius;
        HeatKernelCoefficients::new(
            3,
            vec![
                self.volume(),
                -0.5 * PI.sqrt() * self.surface(),
                8.0 * PI * r / 3.0,
                -PI.powf(1.5) / 6.0,
                -16.0 * PI / (315.0 * r),
            ],
        )
        .expect("ball heat coefficients are always valid")
    }

    /// Five-term smoothed counting series for the Dirichlet ball,
    /// obtained by transforming [`Self::heat_coefficients`]. For R = 1
    /// the power coefficients are 2/(9 pi), -1/4, 2/(3 pi), -1/48,
    /// -2/(315 pi).
    pub fn counting_series(&self) -> CountingSeries {
        transform_coefficients(&self.heat_coefficients())
    }
}

/// Free-function form of [`Ball3DShape::spectrum`].
pub fn ball3d_spectrum(shape: &Ball3DShape, lambda_max: f64) -> Result<Spectrum> {
    shape.spectrum(lambda_max)
}

/// Free-function form of [`Ball3DShape::counting_series`].
pub fn ball3d_counting_series(shape: &Ball3DShape) -> CountingSeries {
    shape.counting_series()
}

/// Leading Dirichlet heat coefficients for balls in dimensions 3, 4
/// and 5: volume, -sqrt(pi)/2 times the boundary area, and the
/// curvature term. The 3-ball extends to 2k = 4; the higher ones carry
/// the three coefficients that drive the eigenvalue expansions (see
/// `asymptotics::ball_expansion` for the induced spectra).
pub fn ball_heat_coefficients(dimension: u32, radius: f64) -> Result<HeatKernelCoefficients> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(SpectralError::InvalidInput(format!(
            "ball radius must be positive and finite, got {radius}"
        )));
    }
    let r = radius;
    match dimension {
        3 => Ok(Ball3DShape::new(r)?.heat_coefficients()),
        4 => HeatKernelCoefficients::new(
            4,
            vec![
                0.5 * PI * PI * r.powi(4),
                -PI.powf(2.5) * r.powi(3),
                5.0 * PI * PI * r * r,
            ],
        ),
        5 => HeatKernelCoefficients::new(
            5,
            vec![
                8.0 * PI * PI * r.powi(5) / 15.0,
                -4.0 / 3.0 * PI.powf(2.5) * r.powi(4),
                32.0 * PI * PI * r.powi(3) / 9.0,
            ],
        ),
        d => Err(SpectralError::Unsupported(format!(
            "ball heat coefficients are tabulated for dimensions 3..=5, not {d}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::transform::evaluate_counting_series;

    #[test]
    fn low_spectrum_structure() {
        let ball = Ball3DShape::new(1.0).unwrap();
        let s = ball.spectrum(120.0).unwrap();
        let e = s.entries();
        // pi^2 (l=0), then the first l=1 node 4.493409457909064.
        assert_relative_eq!(e[0].0, PI * PI, max_relative = 1e-14);
        assert_eq!(e[0].1, 1);
        assert_relative_eq!(e[1].0, 4.493409457909064f64.powi(2), max_relative = 1e-12);
        assert_eq!(e[1].1, 3);
        // Second l=0 eigenvalue is exactly 4 pi^2.
        let second_l0 = e
            .iter()
            .find(|&&(l, m)| m == 1 && l > 20.0)
            .expect("second l=0 state below 120");
        assert_relative_eq!(second_l0.0, 4.0 * PI * PI, max_relative = 1e-14);
    }

    #[test]
    fn state_total_from_zero_tables() {
        // Zeros with x <= 10: l=0 gives 3 (pi, 2pi, 3pi); l=1 two
        // (4.4934, 7.7253); l=2 two (5.7635, 9.0950); l=3..5 one each
        // (6.9879, 8.1826, 9.3558). Weighted by 2l+1: 3+6+10+7+9+11.
        let ball = Ball3DShape::new(1.0).unwrap();
        let s = ball.spectrum(100.0).unwrap();
        assert_eq!(s.total_count(), 46);
    }

    #[test]
    fn radius_scaling() {
        let unit = Ball3DShape::new(1.0).unwrap().spectrum(100.0).unwrap();
        let half = Ball3DShape::new(0.5).unwrap().spectrum(400.0).unwrap();
        assert_eq!(unit.total_count(), half.total_count());
        for (a, b) in unit.entries().iter().zip(half.entries()) {
            assert_relative_eq!(b.0, 4.0 * a.0, max_relative = 1e-12);
            assert_eq!(a.1, b.1);
        }
    }

    #[test]
    fn empty_below_first_eigenvalue() {
        let ball = Ball3DShape::new(1.0).unwrap();
        match ball.spectrum(9.0) {
            Err(SpectralError::EmptySpectrum { first, .. }) => {
                assert_relative_eq!(first, PI * PI, max_relative = 1e-15);
            }
            other => panic!("expected EmptySpectrum, got {other:?}"),
        }
    }

    #[test]
    fn unit_ball_series_coefficients() {
        let cs = Ball3DShape::new(1.0).unwrap().counting_series();
        let want = [
            2.0 / (9.0 * PI),
            -0.25,
            2.0 / (3.0 * PI),
            -1.0 / 48.0,
            -2.0 / (315.0 * PI),
        ];
        assert_eq!(cs.power_terms().len(), 5);
        for (t, w) in cs.power_terms().iter().zip(&want) {
            assert_relative_eq!(t.coefficient, w, max_relative = 1e-13);
        }
        assert!(cs.delta_terms().is_empty());
    }

    #[test]
    fn series_tracks_count_at_moderate_lambda() {
        let ball = Ball3DShape::new(1.0).unwrap();
        let s = ball.spectrum(400.0).unwrap();
        let cs = ball.counting_series();
        let lambda = 350.0;
        let n = s.count_direct(lambda).unwrap() as f64;
        let series = evaluate_counting_series(&cs, lambda).unwrap().value;
        assert!(
            (n - series).abs() <= 25.0,
            "count {n} vs series {series}: fluctuation implausibly large"
        );
    }

    #[test]
    fn tabulated_higher_dimensional_coefficients() {
        let b4 = ball_heat_coefficients(4, 1.0).unwrap();
        assert_relative_eq!(b4.coeffs()[0], 0.5 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(b4.coeffs()[1], -PI.powf(2.5), max_relative = 1e-15);
        let b5 = ball_heat_coefficients(5, 2.0).unwrap();
        assert_relative_eq!(b5.coeffs()[0], 8.0 * PI * PI * 32.0 / 15.0, max_relative = 1e-14);
        assert!(ball_heat_coefficients(6, 1.0).is_err());
    }
}

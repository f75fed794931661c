//! The unit-normalized disk with a Dirichlet boundary.
//!
//! Eigenvalues are (x_{m,k}/R)^2 over the zeros of the cylindrical
//! J_m; angular momentum m >= 1 contributes twice (sin and cos modes),
//! m = 0 once. This generator exists as the planar oracle against
//! which the two-dimensional counting series are checked.

use std::f64::consts::PI;

use crate::error::{Result, SpectralError};
use crate::shapes::bessel::bessel_j_zeros;
use crate::spectrum::Spectrum;
use crate::transform::HeatKernelCoefficients;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskShape {
    radius: f64,
}

impl DiskShape {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(SpectralError::InvalidInput(format!(
                "disk radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * PI * self.radius
    }

    pub fn tag(&self) -> String {
        format!("disk R={:?} dirichlet", self.radius)
    }

    pub fn first_eigenvalue(&self) -> f64 {
        // First zero of J_0.
        (2.404825557695773 / self.radius).powi(2)
    }

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
        let mut m = 0usize;
        loop {
            let zeros = bessel_j_zeros(m, x_max)?;
            if zeros.is_empty() {
                break;
            }
            let mult = if m == 0 { 1 } else { 2 };
            for z in zeros {
                pairs.push((z, mult));
            }
            m += 1;
        }
        let radius = self.radius;
        let mut entries: Vec<(f64, u64)> = pairs
            .into_iter()
            .map(|(x, mult)| ((x / radius) * (x / radius), mult))
            .filter(|&(lambda, _)| lambda <= lambda_max)
            .collect();
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        Spectrum::new(2, self.tag(), lambda_max, entries)
    }

    /// Heat coefficients [pi R^2, -pi^{3/2} R, 2 pi / 3]: area,
    /// -sqrt(pi)/2 times the perimeter, and the smooth-boundary
    /// curvature term, which for any simply connected smooth planar
    /// region is 2 pi / 3 regardless of size.
    pub fn heat_coefficients(&self) -> HeatKernelCoefficients {
        HeatKernelCoefficients::new(
            2,
            vec![
                self.area(),
                -0.5 * PI.sqrt() * self.perimeter(),
                2.0 * PI / 3.0,
            ],
        )
        .expect("disk heat coefficients are always valid")
    }
}

/// Free-function form of [`DiskShape::spectrum`].
pub fn disk_spectrum(shape: &DiskShape, lambda_max: f64) -> Result<Spectrum> {
    shape.spectrum(lambda_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_spectrum_from_zero_tables() {
        // Zeros below sqrt(40) = 6.325: J_0 at 2.4048 and 5.5201,
        // J_1 at 3.8317, J_2 at 5.1356. J_3's first zero 6.3802 is out.
        let disk = DiskShape::new(1.0).unwrap();
        let s = disk.spectrum(40.0).unwrap();
        assert_eq!(s.total_count(), 6);
        let e = s.entries();
        assert_relative_eq!(e[0].0, 2.404825557695773f64.powi(2), max_relative = 1e-12);
        assert_eq!(e[0].1, 1);
        assert_relative_eq!(e[1].0, 3.831705970207512f64.powi(2), max_relative = 1e-12);
        assert_eq!(e[1].1, 2);
        assert_relative_eq!(e[2].0, 5.135622301840683f64.powi(2), max_relative = 1e-11);
        assert_eq!(e[2].1, 2);
        assert_relative_eq!(e[3].0, 5.520078110286311f64.powi(2), max_relative = 1e-12);
        assert_eq!(e[3].1, 1);
    }

    #[test]
    fn count_tracks_weyl_law() {
        let disk = DiskShape::new(1.0).unwrap();
        let s = disk.spectrum(2000.0).unwrap();
        let n = s.count_direct(2000.0).unwrap() as f64;
        let weyl = 2000.0 / 4.0 - (2000.0f64).sqrt() / 2.0 + 1.0 / 6.0;
        assert!(
            (n - weyl).abs() <= 30.0,
            "N(2000) = {n} too far from two-term Weyl value {weyl}"
        );
    }

    #[test]
    fn empty_spectrum_error() {
        let disk = DiskShape::new(1.0).unwrap();
        assert!(matches!(
            disk.spectrum(5.0),
            Err(SpectralError::EmptySpectrum { .. })
        ));
    }
}

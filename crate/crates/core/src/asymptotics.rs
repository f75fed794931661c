//! Large-index eigenvalue asymptotics: the three-term expansion
//! lambda_n ~ a0 n^{2/D} + a1 n^{1/D} + a2 obtained by inverting a
//! counting series, plus a numeric inverter for individual indices.

use std::f64::consts::PI;

use crate::error::{Result, SpectralError};
use crate::gamma::half_integer_gamma;
use crate::shapes::BoundaryKind;
use crate::transform::{evaluate_counting_series, CountingSeries, HeatKernelCoefficients};

/// Coefficients of lambda_n ~ a0 n^{2/D} + a1 n^{1/D} + a2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumAsymptotics {
    dimension: u32,
    alpha: [f64; 3],
}

impl SpectrumAsymptotics {
    pub fn new(dimension: u32, alpha: [f64; 3]) -> Result<Self> {
        if dimension == 0 {
            return Err(SpectralError::InvalidInput("dimension must be >= 1".into()));
        }
        if !(alpha[0] > 0.0) || alpha.iter().any(|a| !a.is_finite()) {
            return Err(SpectralError::InvalidInput(format!(
                "expansion needs finite coefficients with a0 > 0, got {alpha:?}"
            )));
        }
        Ok(Self { dimension, alpha })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn alpha(&self) -> [f64; 3] {
        self.alpha
    }

    /// Predicted n-th eigenvalue (n is 1-based).
    pub fn evaluate_expansion(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(SpectralError::InvalidInput(
                "eigenvalue index n is 1-based".into(),
            ));
        }
        let root = (n as f64).powf(1.0 / self.dimension as f64);
        Ok((self.alpha[0] * root + self.alpha[1]) * root + self.alpha[2])
    }
}

/// Inverts the three leading orders of a heat expansion into the
/// eigenvalue expansion. Requires the doubled indices 0, 1, 2; with
/// g = Gamma(D/2 + 1), h = Gamma(D/2 + 1/2) and the ratios
/// r1 = B_{1/2}/B_0, r2 = B_1/B_0:
///
///   a0 = 4 pi g^{2/D} B_0^{-2/D}
///   a1 = -(4 sqrt(pi) / D) (g^{1 + 1/D} / h) r1 / B_0^{1/D}... B_0 in
///        a1 enters as B_0^{-1/D} through r1's normalization
///   a2 = (D/4) (Gamma(D/2)/h)^2 r1^2 - r2
pub fn expansion_coefficients(hk: &HeatKernelCoefficients) -> Result<SpectrumAsymptotics> {
    for needed in [0u32, 1, 2] {
        if hk.get(needed).is_none() {
            return Err(SpectralError::InsufficientCoefficients {
                needed_two_k: needed,
                max_two_k: hk.max_two_k(),
            });
        }
    }
    let d = hk.dimension();
    let df = d as f64;
    let b0 = hk.get(0).expect("checked above");
    let r1 = hk.get(1).expect("checked above") / b0;
    let r2 = hk.get(2).expect("checked above") / b0;
    let g_half = half_integer_gamma(d as i64).expect("positive argument");
    let g_mid = half_integer_gamma(d as i64 + 1).expect("positive argument");
    let g_top = half_integer_gamma(d as i64 + 2).expect("positive argument");
    let a0 = 4.0 * PI * g_top.powf(2.0 / df) * b0.powf(-2.0 / df);
    let a1 = -4.0 * PI.sqrt() / df * g_top.powf(1.0 + 1.0 / df) / g_mid * r1 * b0.powf(-1.0 / df);
    let a2 = df / 4.0 * (g_half / g_mid).powi(2) * r1 * r1 - r2;
    SpectrumAsymptotics::new(d, [a0, a1, a2])
}

/// Numerically inverts a counting series at integer height n: returns
/// the lambda with series(lambda) = n. The series must have a positive
/// leading coefficient with positive exponent (a Weyl term); that term
/// seeds the bracket and guarantees series -> infinity on the right.
/// Bisection keeps the invariant f(lo) < 0 <= f(hi) and is run to f64
/// resolution, so no polishing step is needed afterwards.
pub fn eigenvalue_solve(series: &CountingSeries, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(SpectralError::InvalidInput(
            "eigenvalue index n is 1-based".into(),
        ));
    }
    let lead = series.power_terms().first().ok_or_else(|| {
        SpectralError::Domain("cannot invert a series with no power terms".into())
    })?;
    let e0 = series.exponent(lead.two_k);
    if !(lead.coefficient > 0.0) || !(e0 > 0.0) {
        return Err(SpectralError::Domain(format!(
            "leading term {} * lambda^{e0} is not an invertible Weyl term",
            lead.coefficient
        )));
    }
    let target = n as f64;
    let guess = (target / lead.coefficient).powf(1.0 / e0);
    let f = |lambda: f64| -> Result<f64> {
        Ok(evaluate_counting_series(series, lambda)?.value - target)
    };
    let mut hi = 2.0 * guess;
    let mut f_hi = f(hi)?;
    let mut widening = 0;
    while f_hi <= 0.0 {
        hi *= 2.0;
        f_hi = f(hi)?;
        widening += 1;
        if widening > 60 {
            return Err(SpectralError::RootFind {
                lo: guess,
                hi,
                f_lo: f64::NAN,
                f_hi,
                context: format!("series never exceeds n = {n} above the Weyl estimate"),
            });
        }
    }
    let mut lo = 0.5 * guess;
    let mut f_lo = f(lo)?;
    widening = 0;
    while f_lo >= 0.0 {
        lo *= 0.5;
        f_lo = f(lo)?;
        widening += 1;
        if widening > 60 {
            return Err(SpectralError::RootFind {
                lo,
                hi,
                f_lo,
                f_hi,
                context: format!("series never drops below n = {n} under the Weyl estimate"),
            });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Frozen eigenvalue expansions of round balls with unit radius,
/// rescaled by 1/R^2; independent of [`expansion_coefficients`] so the
/// two can be played against each other. For the Neumann/Robin family
/// only the boundary term flips sign; the volume and curvature orders
/// are shared with Dirichlet.
pub fn ball_expansion(
    dimension: u32,
    kind: BoundaryKind,
    radius: f64,
) -> Result<SpectrumAsymptotics> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(SpectralError::InvalidInput(format!(
            "ball radius must be positive and finite, got {radius}"
        )));
    }
    let unit: [f64; 3] = match dimension {
        3 => [
            1.5 * (6.0 * PI * PI).powf(1.0 / 3.0),
            0.375 * (6.0 * PI * PI).powf(2.0 / 3.0),
            27.0 * PI * PI / 64.0 - 2.0,
        ],
        4 => [
            8.0,
            16.0 * 2.0f64.sqrt() / 3.0,
            -26.0 / 9.0,
        ],
        5 => [
            0.5 * (450.0 * 2.0f64.sqrt() * PI).powf(0.4),
            15.0 * PI / 32.0 * (3600.0 * PI).powf(0.2),
            1125.0 * PI * PI / 1024.0 - 20.0 / 3.0,
        ],
        other => {
            return Err(SpectralError::Unsupported(format!(
                "ball expansion tabulated for D in 3..=5, got {other}"
            )))
        }
    };
    let sign = match kind {
        BoundaryKind::Dirichlet => 1.0,
        BoundaryKind::NeumannOrRobin => -1.0,
    };
    let scale = 1.0 / (radius * radius);
    SpectrumAsymptotics::new(
        dimension,
        [unit[0] * scale, sign * unit[1] * scale, unit[2] * scale],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::ball::ball_heat_coefficients;
    use crate::shapes::boxes::BoxShape;
    use crate::transform::{transform_coefficients, PowerTerm};
    use approx::assert_relative_eq;

    #[test]
    fn ball_tables_match_heat_route() {
        // The tabulated expansions and the generic inversion start from
        // unrelated closed forms; agreement pins both.
        for d in [3u32, 4, 5] {
            let hk = ball_heat_coefficients(d, 1.0).unwrap();
            let from_hk = expansion_coefficients(&hk).unwrap();
            let table = ball_expansion(d, BoundaryKind::Dirichlet, 1.0).unwrap();
            for i in 0..3 {
                assert_relative_eq!(
                    from_hk.alpha()[i],
                    table.alpha()[i],
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn neumann_flips_only_the_boundary_order() {
        let d = ball_expansion(3, BoundaryKind::Dirichlet, 1.0).unwrap();
        let n = ball_expansion(3, BoundaryKind::NeumannOrRobin, 1.0).unwrap();
        assert_eq!(d.alpha()[0], n.alpha()[0]);
        assert_eq!(d.alpha()[1], -n.alpha()[1]);
        assert_eq!(d.alpha()[2], n.alpha()[2]);
        assert!(d.alpha()[1] > 0.0, "Dirichlet boundary term raises eigenvalues");
    }

    #[test]
    fn radius_rescales_all_orders() {
        let unit = ball_expansion(4, BoundaryKind::Dirichlet, 1.0).unwrap();
        let doubled = ball_expansion(4, BoundaryKind::Dirichlet, 2.0).unwrap();
        for i in 0..3 {
            assert_relative_eq!(doubled.alpha()[i], unit.alpha()[i] / 4.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn square_expansion_closed_form() {
        // Unit square: a0 = 4 pi, a1 = 8 sqrt(pi), a2 = 8 - pi, worked
        // out by hand from B = [1, -2 sqrt(pi), pi].
        let hk = BoxShape::new(vec![1.0, 1.0]).unwrap().heat_coefficients(2);
        let exp = expansion_coefficients(&hk).unwrap();
        assert_relative_eq!(exp.alpha()[0], 4.0 * PI, max_relative = 1e-13);
        assert_relative_eq!(exp.alpha()[1], 8.0 * PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(exp.alpha()[2], 8.0 - PI, max_relative = 1e-13);
    }

    #[test]
    fn weyl_term_alone_inverts_exactly() {
        let hk = ball_heat_coefficients(3, 1.0).unwrap();
        let exp = expansion_coefficients(&hk).unwrap();
        // a0 is the exact single-term inversion of the Weyl law:
        // C_0 * a0^{D/2} = 1.
        let c0 = transform_coefficients(&hk).power_terms()[0].coefficient;
        assert_relative_eq!(c0 * exp.alpha()[0].powf(1.5), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn missing_orders_are_reported() {
        let hk = HeatKernelCoefficients::new(3, vec![1.0, -2.0]).unwrap();
        match expansion_coefficients(&hk) {
            Err(SpectralError::InsufficientCoefficients { needed_two_k, max_two_k }) => {
                assert_eq!(needed_two_k, 2);
                assert_eq!(max_two_k, 1);
            }
            other => panic!("expected InsufficientCoefficients, got {other:?}"),
        }
    }

    #[test]
    fn solver_hits_the_target_height() {
        let series = transform_coefficients(&ball_heat_coefficients(3, 1.0).unwrap());
        let mut prev = 0.0;
        for n in [1u64, 10, 100, 1000, 1_000_000] {
            let lambda = eigenvalue_solve(&series, n).unwrap();
            let height = evaluate_counting_series(&series, lambda).unwrap().value;
            assert!(
                (height - n as f64).abs() <= 1e-9 * (n as f64).max(1.0),
                "n = {n}: series({lambda}) = {height}"
            );
            assert!(lambda > prev, "solved eigenvalues must increase");
            prev = lambda;
        }
    }

    #[test]
    fn solver_approaches_the_expansion() {
        // Solving the full five-term ball series and evaluating the
        // three-term expansion differ by O(n^{-1/3}).
        let hk = ball_heat_coefficients(3, 1.0).unwrap();
        let series = transform_coefficients(&hk);
        let exp = expansion_coefficients(&hk).unwrap();
        let mut prev = f64::INFINITY;
        for n in [1_000u64, 10_000, 100_000, 1_000_000] {
            let solved = eigenvalue_solve(&series, n).unwrap();
            let predicted = exp.evaluate_expansion(n).unwrap();
            let diff = (solved - predicted).abs();
            assert!(diff < prev, "n = {n}: diff {diff} vs previous {prev}");
            prev = diff;
        }
        assert!(prev <= 0.2, "terminal mismatch too large: {prev}");
    }

    #[test]
    fn pure_weyl_series_inverts_in_closed_form() {
        let series = CountingSeries::new(
            3,
            vec![PowerTerm { two_k: 0, coefficient: 0.05 }],
            vec![],
        )
        .unwrap();
        let lambda = eigenvalue_solve(&series, 40).unwrap();
        assert_relative_eq!(lambda, 800.0f64.powf(2.0 / 3.0), max_relative = 1e-12);
    }

    #[test]
    fn negative_leading_term_is_rejected() {
        let series = CountingSeries::new(
            2,
            vec![PowerTerm { two_k: 0, coefficient: -1.0 }],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            eigenvalue_solve(&series, 5),
            Err(SpectralError::Domain(_))
        ));
    }
}

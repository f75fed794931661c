//! Polyline-bounded planar regions with holes, and the discrete
//! Gauss-Bonnet check that gates their heat coefficients.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};
use crate::kahan::KahanSum;
use crate::transform::HeatKernelCoefficients;

/// Turning angles at or above this are treated as corners: the
/// polyline cannot plausibly be a dense sample of a smooth curve.
const CORNER_ANGLE: f64 = 1.0;

/// A bounded planar region: one outer boundary (counterclockwise) and
/// any number of hole boundaries (clockwise), all closed polylines.
///
/// Validation covers orientation, hole containment and degenerate
/// vertices; boundary curves are assumed non-self-intersecting (a full
/// segment intersection sweep is out of scope).
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarRegion {
    outer: Vec<[f64; 2]>,
    holes: Vec<Vec<[f64; 2]>>,
    area: f64,
    perimeter: f64,
}

#[derive(Serialize, Deserialize)]
struct RegionFile {
    outer: Vec<[f64; 2]>,
    holes: Vec<Vec<[f64; 2]>>,
}

fn signed_area(curve: &[[f64; 2]]) -> f64 {
    let mut acc = KahanSum::new();
    let n = curve.len();
    for i in 0..n {
        let [x0, y0] = curve[i];
        let [x1, y1] = curve[(i + 1) % n];
        acc.add(x0 * y1 - x1 * y0);
    }
    0.5 * acc.value()
}

fn curve_length(curve: &[[f64; 2]]) -> f64 {
    let mut acc = KahanSum::new();
    let n = curve.len();
    for i in 0..n {
        let [x0, y0] = curve[i];
        let [x1, y1] = curve[(i + 1) % n];
        acc.add(((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt());
    }
    acc.value()
}

/// Even-odd ray cast; points on an edge count as inside, which is good
/// enough for the containment sanity checks here.
fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let [xi, yi] = poly[i];
        let [xj, yj] = poly[j];
        if (yi > p[1]) != (yj > p[1]) {
            let x_cross = xi + (p[1] - yi) / (yj - yi) * (xj - xi);
            if p[0] < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Drops an explicit closing point and rejects curves that are too
/// short or have coincident consecutive vertices.
fn sanitize_curve(mut curve: Vec<[f64; 2]>, what: &str) -> Result<Vec<[f64; 2]>> {
    if curve.len() >= 2 && curve.first() == curve.last() {
        curve.pop();
    }
    if curve.len() < 3 {
        return Err(SpectralError::InvalidRegion(format!(
            "{what} needs at least 3 distinct vertices, got {}",
            curve.len()
        )));
    }
    for i in 0..curve.len() {
        let a = curve[i];
        let b = curve[(i + 1) % curve.len()];
        if a == b {
            return Err(SpectralError::InvalidRegion(format!(
                "{what} has coincident consecutive vertices at index {i}"
            )));
        }
        if !a[0].is_finite() || !a[1].is_finite() {
            return Err(SpectralError::InvalidRegion(format!(
                "{what} has a non-finite vertex at index {i}"
            )));
        }
    }
    Ok(curve)
}

impl PlanarRegion {
    pub fn new(outer: Vec<[f64; 2]>, holes: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let outer = sanitize_curve(outer, "outer boundary")?;
        let outer_area = signed_area(&outer);
        if outer_area <= 0.0 {
            return Err(SpectralError::InvalidRegion(format!(
                "outer boundary must wind counterclockwise (signed area {outer_area})"
            )));
        }
        let mut clean_holes = Vec::with_capacity(holes.len());
        let mut area = outer_area;
        let mut perimeter = curve_length(&outer);
        for (idx, hole) in holes.into_iter().enumerate() {
            let hole = sanitize_curve(hole, &format!("hole {idx}"))?;
            let hole_area = signed_area(&hole);
            if hole_area >= 0.0 {
                return Err(SpectralError::InvalidRegion(format!(
                    "hole {idx} must wind clockwise (signed area {hole_area})"
                )));
            }
            for v in &hole {
                if !point_in_polygon(*v, &outer) {
                    return Err(SpectralError::InvalidRegion(format!(
                        "hole {idx} has a vertex {v:?} outside the outer boundary"
                    )));
                }
            }
            for (jdx, other) in clean_holes.iter().enumerate() {
                let other: &Vec<[f64; 2]> = other;
                if hole.iter().any(|v| point_in_polygon(*v, other))
                    || other.iter().any(|v| point_in_polygon(*v, &hole))
                {
                    return Err(SpectralError::InvalidRegion(format!(
                        "holes {jdx} and {idx} overlap"
                    )));
                }
            }
            area += hole_area;
            perimeter += curve_length(&hole);
            clean_holes.push(hole);
        }
        if area <= 0.0 {
            return Err(SpectralError::InvalidRegion(format!(
                "holes exhaust the outer area (net area {area})"
            )));
        }
        Ok(Self {
            outer,
            holes: clean_holes,
            area,
            perimeter,
        })
    }

    pub fn outer(&self) -> &[[f64; 2]] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<[f64; 2]>] {
        &self.holes
    }

    pub fn hole_count(&self) -> usize {
        self.holes.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        1 - self.holes.len() as i64
    }

    /// Net area by the shoelace formula (holes subtracted).
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Total boundary length, holes included.
    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn to_json_string(&self) -> Result<String> {
        crate::io::to_json_string_full(&RegionFile {
            outer: self.outer.clone(),
            holes: self.holes.clone(),
        })
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: RegionFile = serde_json::from_str(json)?;
        Self::new(file.outer, file.holes)
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// Total curvature defect of the region's boundary: the turning-angle
/// sum over all boundary polylines minus 2 pi (1 - holes).
///
/// For closed polylines the turning-angle sum telescopes exactly to
/// 2 pi times the winding number, so away from floating-point noise
/// the defect of a valid region is zero; the value returned is that
/// noise, and a large value means the orientations or the topology
/// bookkeeping are inconsistent. Vertices that turn by [`CORNER_ANGLE`]
/// or more abort with a resolution error instead, since a near-corner
/// cannot be distinguished from an undersampled smooth arc.
pub fn gauss_bonnet_defect(region: &PlanarRegion) -> Result<f64> {
    let mut total = KahanSum::new();
    let mut vertex_count = 0usize;
    let mut check_curve = |curve: &[[f64; 2]]| -> Result<()> {
        let n = curve.len();
        for i in 0..n {
            let prev = curve[(i + n - 1) % n];
            let here = curve[i];
            let next = curve[(i + 1) % n];
            let u = [here[0] - prev[0], here[1] - prev[1]];
            let w = [next[0] - here[0], next[1] - here[1]];
            let cross = u[0] * w[1] - u[1] * w[0];
            let dot = u[0] * w[0] + u[1] * w[1];
            let angle = cross.atan2(dot);
            if angle.abs() >= CORNER_ANGLE {
                return Err(SpectralError::Resolution {
                    max_turning_angle: angle.abs(),
                    vertex: vertex_count + i,
                    estimated_error: 8.0 * (vertex_count + n) as f64 * f64::EPSILON * PI,
                });
            }
            total.add(angle);
        }
        vertex_count += n;
        Ok(())
    };
    check_curve(&region.outer)?;
    for hole in &region.holes {
        check_curve(hole)?;
    }
    Ok(total.value() - 2.0 * PI * (1.0 - region.holes.len() as f64))
}

/// Heat coefficients [area, -sqrt(pi)/2 * perimeter,
/// 2 pi/3 * (1 - holes)] of a smooth planar region, gated by the
/// Gauss-Bonnet defect: a defect above 1e-6 * 2 pi means the boundary
/// data cannot be trusted and no coefficients are produced.
pub fn planar_heat_coefficients(region: &PlanarRegion) -> Result<HeatKernelCoefficients> {
    let defect = gauss_bonnet_defect(region)?;
    if defect.abs() > 1e-6 * 2.0 * PI {
        return Err(SpectralError::InvalidRegion(format!(
            "Gauss-Bonnet defect {defect} too large for trustworthy heat coefficients"
        )));
    }
    HeatKernelCoefficients::new(
        2,
        vec![
            region.area(),
            -0.5 * PI.sqrt() * region.perimeter(),
            2.0 * PI / 3.0 * (1.0 - region.holes.len() as f64),
        ],
    )
}

// ---------------------------------------------------------------------------
// Preset generators
// ---------------------------------------------------------------------------

/// Inscribed regular n-gon approximation of a disk, counterclockwise.
pub fn disk_region(radius: f64, points: usize) -> Result<PlanarRegion> {
    if points < 8 {
        return Err(SpectralError::InvalidInput(
            "disk_region needs at least 8 points".into(),
        ));
    }
    let curve = (0..points)
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / points as f64;
            [radius * phi.cos(), radius * phi.sin()]
        })
        .collect();
    PlanarRegion::new(curve, vec![])
}

/// A smooth wavy blob with up to three circular holes, for exercising
/// the topology-dependent terms. Deterministic: the same arguments
/// always produce the same vertices.
pub fn blob_region(holes: usize, points_per_curve: usize) -> Result<PlanarRegion> {
    if holes > 3 {
        return Err(SpectralError::InvalidInput(
            "blob_region provides at most 3 holes".into(),
        ));
    }
    if points_per_curve < 64 {
        return Err(SpectralError::InvalidInput(
            "blob_region needs at least 64 points per curve".into(),
        ));
    }
    let n = points_per_curve;
    let outer = (0..n)
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / n as f64;
            let r = 2.0 + 0.3 * (3.0 * phi).cos() + 0.15 * (7.0 * phi).sin();
            [r * phi.cos(), r * phi.sin()]
        })
        .collect();
    // Hole centers on a radius-0.9 ring; the outer curve never dips
    // below radius 1.55, and the holes (max radius 0.35) stay disjoint.
    let centers = [[0.9, 0.0], [-0.45, 0.779_422_863_405_995_0], [-0.45, -0.779_422_863_405_995_0]];
    let hole_curves = centers
        .iter()
        .take(holes)
        .map(|c| {
            (0..n)
                .map(|i| {
                    // Negative angle sweep: clockwise.
                    let phi = -2.0 * PI * i as f64 / n as f64;
                    let r = 0.3 + 0.05 * (5.0 * phi).cos();
                    [c[0] + r * phi.cos(), c[1] + r * phi.sin()]
                })
                .collect()
        })
        .collect();
    PlanarRegion::new(outer, hole_curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn polygon_disk_area_and_perimeter() {
        let n = 4000;
        let region = disk_region(1.0, n).unwrap();
        // Inscribed n-gon: area (n/2) sin(2 pi/n), perimeter
        // 2 n sin(pi/n); both within ~1e-6 of the disk values.
        assert_relative_eq!(region.area(), PI, max_relative = 2e-6);
        assert_relative_eq!(region.perimeter(), 2.0 * PI, max_relative = 2e-6);
        assert_eq!(region.euler_characteristic(), 1);
    }

    #[test]
    fn defect_vanishes_for_smooth_samples() {
        for holes in 0..=3 {
            let region = blob_region(holes, 2000).unwrap();
            let defect = gauss_bonnet_defect(&region).unwrap();
            assert!(
                defect.abs() <= 1e-6 * 2.0 * PI,
                "defect {defect} with {holes} holes"
            );
            assert_eq!(region.euler_characteristic(), 1 - holes as i64);
        }
    }

    #[test]
    fn corners_trigger_resolution_error() {
        let square = PlanarRegion::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![],
        )
        .unwrap();
        match gauss_bonnet_defect(&square) {
            Err(SpectralError::Resolution {
                max_turning_angle, ..
            }) => {
                assert_abs_diff_eq!(max_turning_angle, PI / 2.0, epsilon = 1e-12);
            }
            other => panic!("expected Resolution error, got {other:?}"),
        }
    }

    #[test]
    fn heat_coefficients_of_polygon_disk() {
        let hk = planar_heat_coefficients(&disk_region(1.0, 4000).unwrap()).unwrap();
        assert_relative_eq!(hk.coeffs()[0], PI, max_relative = 2e-6);
        assert_relative_eq!(hk.coeffs()[1], -PI.powf(1.5), max_relative = 2e-6);
        assert_relative_eq!(hk.coeffs()[2], 2.0 * PI / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn topology_term_counts_holes() {
        let hk = planar_heat_coefficients(&blob_region(2, 1000).unwrap()).unwrap();
        assert_relative_eq!(hk.coeffs()[2], -2.0 * PI / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn orientation_is_enforced() {
        // Clockwise outer boundary.
        let cw: Vec<[f64; 2]> = (0..64)
            .map(|i| {
                let phi = -2.0 * PI * i as f64 / 64.0;
                [phi.cos(), phi.sin()]
            })
            .collect();
        assert!(matches!(
            PlanarRegion::new(cw, vec![]),
            Err(SpectralError::InvalidRegion(_))
        ));
        // Counterclockwise hole.
        let outer: Vec<[f64; 2]> = (0..64)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / 64.0;
                [2.0 * phi.cos(), 2.0 * phi.sin()]
            })
            .collect();
        let ccw_hole: Vec<[f64; 2]> = (0..64)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / 64.0;
                [0.5 * phi.cos(), 0.5 * phi.sin()]
            })
            .collect();
        assert!(matches!(
            PlanarRegion::new(outer, vec![ccw_hole]),
            Err(SpectralError::InvalidRegion(_))
        ));
    }

    #[test]
    fn containment_is_enforced() {
        let outer: Vec<[f64; 2]> = (0..64)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / 64.0;
                [phi.cos(), phi.sin()]
            })
            .collect();
        let far_hole: Vec<[f64; 2]> = (0..64)
            .map(|i| {
                let phi = -2.0 * PI * i as f64 / 64.0;
                [5.0 + 0.2 * phi.cos(), 0.2 * phi.sin()]
            })
            .collect();
        assert!(matches!(
            PlanarRegion::new(outer, vec![far_hole]),
            Err(SpectralError::InvalidRegion(_))
        ));
    }

    #[test]
    fn region_json_round_trip() {
        let region = blob_region(1, 128).unwrap();
        let back = PlanarRegion::from_json_str(&region.to_json_string().unwrap()).unwrap();
        assert_eq!(region, back);
    }
}

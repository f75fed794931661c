//! Evaluation grids parsed from "start:stop:count" strings.

use serde::Serialize;
use weylkit_core::{Result, SpectralError};

/// An inclusive grid over [start, stop] with `count` points, spaced
/// linearly or geometrically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub geometric: bool,
}

impl Grid {
    pub fn new(start: f64, stop: f64, count: usize, geometric: bool) -> Result<Self> {
        if count == 0 {
            return Err(SpectralError::InvalidInput("grid needs count >= 1".into()));
        }
        if !(start > 0.0) || !start.is_finite() || !stop.is_finite() {
            return Err(SpectralError::InvalidInput(format!(
                "grid bounds must be positive and finite, got {start}:{stop}"
            )));
        }
        if stop < start {
            return Err(SpectralError::InvalidInput(format!(
                "grid stop {stop} is below start {start}"
            )));
        }
        if count == 1 && stop != start {
            return Err(SpectralError::InvalidInput(
                "a single-point grid needs start = stop".into(),
            ));
        }
        if count > 1 && stop == start {
            return Err(SpectralError::InvalidInput(
                "a multi-point grid needs stop > start".into(),
            ));
        }
        Ok(Self {
            start,
            stop,
            count,
            geometric,
        })
    }

    /// Parses "start:stop:count". Geometric spacing is chosen by the
    /// caller (it is a separate flag, not part of the range text).
    pub fn parse(text: &str, geometric: bool) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(SpectralError::InvalidInput(format!(
                "grid must be start:stop:count, got {text:?}"
            )));
        }
        let start: f64 = parts[0].parse().map_err(|_| {
            SpectralError::InvalidInput(format!("bad grid start {:?}", parts[0]))
        })?;
        let stop: f64 = parts[1].parse().map_err(|_| {
            SpectralError::InvalidInput(format!("bad grid stop {:?}", parts[1]))
        })?;
        let count: usize = parts[2].parse().map_err(|_| {
            SpectralError::InvalidInput(format!("bad grid count {:?}", parts[2]))
        })?;
        Self::new(start, stop, count, geometric)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let s = i as f64 / n;
                if self.geometric {
                    self.start * (self.stop / self.start).powf(s)
                } else {
                    self.start + (self.stop - self.start) * s
                }
            })
            .collect()
    }
}

/// Integer index grid "start:stop:count" for eigenvalue indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexGrid {
    pub start: u64,
    pub stop: u64,
    pub count: usize,
}

impl IndexGrid {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(SpectralError::InvalidInput(format!(
                "index grid must be start:stop:count, got {text:?}"
            )));
        }
        let parse_u64 = |p: &str, what: &str| -> Result<u64> {
            p.parse()
                .map_err(|_| SpectralError::InvalidInput(format!("bad index grid {what} {p:?}")))
        };
        let start = parse_u64(parts[0], "start")?;
        let stop = parse_u64(parts[1], "stop")?;
        let count = parse_u64(parts[2], "count")? as usize;
        if start == 0 || count == 0 || stop < start {
            return Err(SpectralError::InvalidInput(format!(
                "index grid needs 1 <= start <= stop and count >= 1, got {text:?}"
            )));
        }
        Ok(Self { start, stop, count })
    }

    /// Distinct indices, evenly spaced and deduplicated; may return
    /// fewer than `count` values when the range is narrow.
    pub fn values(&self) -> Vec<u64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = (self.count - 1) as f64;
        let span = (self.stop - self.start) as f64;
        let mut out: Vec<u64> = (0..self.count)
            .map(|i| self.start + (span * i as f64 / n).round() as u64)
            .collect();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linear_grid_hits_both_ends() {
        let g = Grid::parse("1:9:5", false).unwrap();
        assert_eq!(g.values(), vec![1.0, 3.0, 5.0, 7.0, 9.0]);
    }

    #[test]
    fn geometric_grid_is_log_even() {
        let g = Grid::parse("0.01:1:3", true).unwrap();
        let v = g.values();
        assert_relative_eq!(v[0], 0.01, max_relative = 1e-15);
        assert_relative_eq!(v[1], 0.1, max_relative = 1e-14);
        assert_relative_eq!(v[2], 1.0, max_relative = 1e-15);
    }

    #[test]
    fn single_point_grid() {
        assert_eq!(Grid::parse("2:2:1", false).unwrap().values(), vec![2.0]);
        assert!(Grid::parse("2:3:1", false).is_err());
    }

    #[test]
    fn malformed_grids_are_rejected() {
        for bad in ["", "1:2", "1:2:3:4", "a:2:3", "1:b:3", "1:2:c", "0:2:3", "-1:2:3", "5:2:3"] {
            assert!(Grid::parse(bad, false).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn index_grid_dedupes() {
        let g = IndexGrid::parse("1:3:10").unwrap();
        assert_eq!(g.values(), vec![1, 2, 3]);
        assert!(IndexGrid::parse("0:3:2").is_err());
    }
}

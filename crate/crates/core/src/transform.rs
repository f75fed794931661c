//! Conversion between heat-trace expansions and counting-function series.
//!
//! Heat coefficients are indexed by half-integers k = 0, 1/2, 1, ...;
//! everything here stores the doubled index 2k in a u32 so that pole
//! detection is exact integer arithmetic. The transform divides each
//! coefficient by Gamma(1 + D/2 - k); where that Gamma has a pole the
//! power contribution vanishes and the coefficient reappears as a
//! distributional delta term of order l = k - D/2 - 1 instead.

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Result, SpectralError};
use crate::gamma::gamma_reciprocal_half;
use crate::kahan::KahanSum;

// ---------------------------------------------------------------------------
// Heat-kernel coefficients
// ---------------------------------------------------------------------------

/// Coefficients B_k of the small-t heat-trace expansion
/// K(t) ~ (4 pi t)^{-D/2} sum_k B_k t^k, stored densely by doubled index
/// with explicit zeros in any gaps. B_0 must be positive (it is the
/// D-volume of the underlying shape).
#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernelCoefficients {
    dimension: u32,
    coeffs: Vec<f64>,
}

impl HeatKernelCoefficients {
    pub fn new(dimension: u32, coeffs: Vec<f64>) -> Result<Self> {
        if dimension == 0 {
            return Err(SpectralError::InvalidInput("dimension must be >= 1".into()));
        }
        if coeffs.is_empty() {
            return Err(SpectralError::InvalidInput(
                "need at least the leading heat coefficient".into(),
            ));
        }
        if !(coeffs[0] > 0.0) {
            return Err(SpectralError::InvalidInput(format!(
                "leading heat coefficient must be positive (it is a volume), got {}",
                coeffs[0]
            )));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(SpectralError::InvalidInput(format!(
                "non-finite heat coefficient {bad}"
            )));
        }
        Ok(Self { dimension, coeffs })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    /// Largest stored doubled index.
    pub fn max_two_k(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    /// B_{two_k/2}, if stored.
    pub fn get(&self, two_k: u32) -> Option<f64> {
        self.coeffs.get(two_k as usize).copied()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn to_json_string(&self) -> Result<String> {
        crate::io::to_json_string_full(self)
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: HkFile = serde_json::from_str(json)?;
        let mut coeffs = vec![0.0; 0];
        for (key, value) in &file.coefficients {
            let idx: usize = key.parse().map_err(|_| {
                SpectralError::InvalidInput(format!("coefficient key {key:?} is not a 2k index"))
            })?;
            if idx >= coeffs.len() {
                coeffs.resize(idx + 1, 0.0);
            }
            coeffs[idx] = *value;
        }
        Self::new(file.dimension, coeffs)
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

#[derive(Deserialize)]
struct HkFile {
    dimension: u32,
    coefficients: BTreeMap<String, f64>,
}

/// Writes a dense slice as an object keyed by the doubled index, in
/// numeric order ("0", "1", ..., "10"); BTreeMap round-trips this fine
/// on the way back in.
struct KeyedSlice<'a>(&'a [f64]);

impl Serialize for KeyedSlice<'_> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (i, v) in self.0.iter().enumerate() {
            map.serialize_entry(&i.to_string(), v)?;
        }
        map.end()
    }
}

impl Serialize for HeatKernelCoefficients {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("HeatKernelCoefficients", 2)?;
        st.serialize_field("dimension", &self.dimension)?;
        st.serialize_field("coefficients", &KeyedSlice(&self.coeffs))?;
        st.end()
    }
}

// ---------------------------------------------------------------------------
// Counting series
// ---------------------------------------------------------------------------

/// One power contribution C_k lambda^{(D - 2k)/2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub two_k: u32,
    pub coefficient: f64,
}

/// One distributional contribution w * delta^{(order)}(lambda). These
/// carry coefficient bookkeeping across transform and differentiation
/// but evaluate to nothing at any lambda > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerm {
    pub order: u32,
    pub weight: f64,
}

/// Truncated counting-function series
/// N(lambda) ~ sum_k C_k lambda^{(D - 2k)/2} + delta terms.
/// Power exponents are strictly decreasing (doubled indices strictly
/// increasing).
#[derive(Debug, Clone, PartialEq)]
pub struct CountingSeries {
    dimension: u32,
    power_terms: Vec<PowerTerm>,
    delta_terms: Vec<DeltaTerm>,
}

impl CountingSeries {
    pub fn new(
        dimension: u32,
        power_terms: Vec<PowerTerm>,
        delta_terms: Vec<DeltaTerm>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(SpectralError::InvalidInput("dimension must be >= 1".into()));
        }
        let mut last: Option<u32> = None;
        for t in &power_terms {
            if !t.coefficient.is_finite() {
                return Err(SpectralError::InvalidInput(format!(
                    "non-finite series coefficient at 2k = {}",
                    t.two_k
                )));
            }
            if let Some(prev) = last {
                if t.two_k <= prev {
                    return Err(SpectralError::InvalidInput(format!(
                        "power terms must have strictly increasing 2k, got {} after {prev}",
                        t.two_k
                    )));
                }
            }
            last = Some(t.two_k);
        }
        let mut last_order: Option<u32> = None;
        for t in &delta_terms {
            if !t.weight.is_finite() {
                return Err(SpectralError::InvalidInput(format!(
                    "non-finite delta weight at order {}",
                    t.order
                )));
            }
            if let Some(prev) = last_order {
                if t.order <= prev {
                    return Err(SpectralError::InvalidInput(format!(
                        "delta terms must have strictly increasing order, got {} after {prev}",
                        t.order
                    )));
                }
            }
            last_order = Some(t.order);
        }
        Ok(Self {
            dimension,
            power_terms,
            delta_terms,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn power_terms(&self) -> &[PowerTerm] {
        &self.power_terms
    }

    pub fn delta_terms(&self) -> &[DeltaTerm] {
        &self.delta_terms
    }

    /// Exponent of the power term with doubled index `two_k`; exact in
    /// f64 because it is a half-integer.
    pub fn exponent(&self, two_k: u32) -> f64 {
        (self.dimension as f64 - two_k as f64) / 2.0
    }

    pub fn to_json_string(&self) -> Result<String> {
        crate::io::to_json_string_full(self)
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: CsFile = serde_json::from_str(json)?;
        let parse = |m: &BTreeMap<String, f64>, what: &str| -> Result<Vec<(u32, f64)>> {
            let mut out = Vec::with_capacity(m.len());
            for (key, value) in m {
                let idx: u32 = key.parse().map_err(|_| {
                    SpectralError::InvalidInput(format!("{what} key {key:?} is not an index"))
                })?;
                out.push((idx, *value));
            }
            out.sort_by_key(|&(i, _)| i);
            Ok(out)
        };
        let power = parse(&file.power_terms, "power term")?
            .into_iter()
            .map(|(two_k, coefficient)| PowerTerm { two_k, coefficient })
            .collect();
        let delta = parse(&file.delta_terms, "delta term")?
            .into_iter()
            .map(|(order, weight)| DeltaTerm { order, weight })
            .collect();
        Self::new(file.dimension, power, delta)
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

#[derive(Deserialize)]
struct CsFile {
    dimension: u32,
    power_terms: BTreeMap<String, f64>,
    delta_terms: BTreeMap<String, f64>,
}

impl Serialize for CountingSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct KeyedTerms {
            keys: Vec<u32>,
            values: Vec<f64>,
        }
        impl Serialize for KeyedTerms {
            fn serialize<S: serde::Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.keys.len()))?;
                for (k, v) in self.keys.iter().zip(&self.values) {
                    map.serialize_entry(&k.to_string(), v)?;
                }
                map.end()
            }
        }
        let power = KeyedTerms {
            keys: self.power_terms.iter().map(|t| t.two_k).collect(),
            values: self.power_terms.iter().map(|t| t.coefficient).collect(),
        };
        let delta = KeyedTerms {
            keys: self.delta_terms.iter().map(|t| t.order).collect(),
            values: self.delta_terms.iter().map(|t| t.weight).collect(),
        };
        let mut st = serializer.serialize_struct("CountingSeries", 3)?;
        st.serialize_field("dimension", &self.dimension)?;
        st.serialize_field("power_terms", &power)?;
        st.serialize_field("delta_terms", &delta)?;
        st.end()
    }
}

/// Value of a truncated series at a point, along with the magnitude of
/// the last (smallest-exponent) power term as a crude resolution
/// indicator: when it is not small against the value, the truncation
/// order is doing real work at this lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEvaluation {
    pub value: f64,
    pub last_term: f64,
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Termwise transform of a heat expansion into a counting series:
/// C_k = (4 pi)^{-D/2} B_k / Gamma(1 + D/2 - k). Indices where the
/// Gamma pole kills the power term (2k >= D + 2 with 2k - D even) are
/// rerouted to delta terms of order l = (2k - D - 2)/2 with weight
/// (4 pi)^{-D/2} B_k; those are emitted even at zero weight so the
/// pole bookkeeping stays visible. Power terms with zero coefficient
/// are dropped.
pub fn transform_coefficients(hk: &HeatKernelCoefficients) -> CountingSeries {
    let d = hk.dimension() as i64;
    let prefactor = (4.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0);
    let mut power = Vec::new();
    let mut delta = Vec::new();
    for (i, &b) in hk.coeffs().iter().enumerate() {
        let i = i as i64; // doubled index 2k
        let is_pole = i >= d + 2 && (i - d) % 2 == 0;
        if is_pole {
            delta.push(DeltaTerm {
                order: ((i - d - 2) / 2) as u32,
                weight: prefactor * b,
            });
        } else {
            let c = prefactor * b * gamma_reciprocal_half(2 + d - i);
            if c != 0.0 {
                power.push(PowerTerm {
                    two_k: i as u32,
                    coefficient: c,
                });
            }
        }
    }
    CountingSeries {
        dimension: hk.dimension(),
        power_terms: power,
        delta_terms: delta,
    }
}

/// Evaluates the power part of a counting series at lambda > 0. Delta
/// terms are distributional and contribute nothing away from zero.
pub fn evaluate_counting_series(series: &CountingSeries, lambda: f64) -> Result<SeriesEvaluation> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(SpectralError::Domain(format!(
            "series evaluation needs lambda > 0, got {lambda}"
        )));
    }
    let mut acc = KahanSum::new();
    let mut last = 0.0;
    for t in &series.power_terms {
        let term = t.coefficient * lambda.powf(series.exponent(t.two_k));
        acc.add(term);
        last = term.abs();
    }
    Ok(SeriesEvaluation {
        value: acc.value(),
        last_term: last,
    })
}

/// Termwise lambda-derivative of a counting series. Power exponents
/// drop by one (constants vanish) and each delta term's derivative
/// order rises by one. In the keyed representation the coefficient
/// that lived at doubled index 2k moves to 2k + 2, since that is the
/// key whose exponent is one lower.
pub fn density_series(series: &CountingSeries) -> CountingSeries {
    let mut power = Vec::new();
    for t in &series.power_terms {
        let e = series.exponent(t.two_k);
        if e == 0.0 {
            continue;
        }
        power.push(PowerTerm {
            two_k: t.two_k + 2,
            coefficient: t.coefficient * e,
        });
    }
    let delta = series
        .delta_terms
        .iter()
        .map(|t| DeltaTerm {
            order: t.order + 1,
            weight: t.weight,
        })
        .collect();
    CountingSeries {
        dimension: series.dimension,
        power_terms: power,
        delta_terms: delta,
    }
}

/// Planar cross-check of the forward and inverse routes: compares the
/// counting series N(lambda) against the heat expansion evaluated at
/// t = 1/lambda and divided by (4 pi t)^{... } termwise, truncated to
/// the orders the counting series carries. Returns the relative
/// deviation |N - K| / |N|; the leading orders cancel exactly, so the
/// deviation decays like lambda^{-1/2} times the mismatch at the first
/// order where dividing by Gamma matters.
pub fn inverse_check_2d_leading(
    series: &CountingSeries,
    hk: &HeatKernelCoefficients,
    lambda: f64,
) -> Result<f64> {
    if series.dimension != 2 || hk.dimension() != 2 {
        return Err(SpectralError::Unsupported(format!(
            "inverse_check_2d_leading is a planar check; got series D={}, coefficients D={}",
            series.dimension,
            hk.dimension()
        )));
    }
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(SpectralError::Domain(format!(
            "inverse check needs lambda > 0, got {lambda}"
        )));
    }
    let n_val = evaluate_counting_series(series, lambda)?.value;
    if n_val == 0.0 {
        return Err(SpectralError::Domain(
            "counting series vanishes at this lambda; relative deviation undefined".into(),
        ));
    }
    let prefactor = 1.0 / (4.0 * std::f64::consts::PI);
    let mut acc = KahanSum::new();
    for t in &series.power_terms {
        let b = hk.get(t.two_k).ok_or(SpectralError::InsufficientCoefficients {
            needed_two_k: t.two_k,
            max_two_k: hk.max_two_k(),
        })?;
        acc.add(prefactor * b * lambda.powf(series.exponent(t.two_k)));
    }
    let k_val = acc.value();
    Ok((n_val - k_val).abs() / n_val.abs())
}

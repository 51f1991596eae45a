//! Locating interference extrema in binned or gridded profiles and matching
//! them against predicted positions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extremum filter: a point must be the strict extreme of its ±`window`
/// neighbourhood, and the profile must rise (or fall) by at least
/// `relative_depth × max(profile)` on both sides within that neighbourhood.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremumFilter {
    pub window: usize,
    pub relative_depth: f64,
}

impl Default for ExtremumFilter {
    fn default() -> Self {
        ExtremumFilter { window: 2, relative_depth: 0.02 }
    }
}

impl ExtremumFilter {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::InvalidArgument("extremum window must be at least 1".into()));
        }
        if !(self.relative_depth >= 0.0 && self.relative_depth.is_finite()) {
            return Err(Error::InvalidArgument("extremum depth must be finite and non-negative".into()));
        }
        Ok(())
    }
}

fn detect(values: &[f64], filter: &ExtremumFilter, sign: f64) -> Result<Vec<usize>> {
    filter.validate()?;
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let depth = filter.relative_depth * peak;
    let w = filter.window;
    let n = values.len();
    let mut out = Vec::new();
    if n < 2 * w + 1 {
        return Ok(out);
    }
    for i in w..n - w {
        let v = sign * values[i];
        let left = &values[i - w..i];
        let right = &values[i + 1..=i + w];
        if left.iter().chain(right).any(|u| sign * u <= v) {
            continue;
        }
        let rise = |side: &[f64]| side.iter().map(|u| sign * u - v).fold(0.0, f64::max);
        if rise(left) >= depth && rise(right) >= depth {
            out.push(i);
        }
    }
    Ok(out)
}

/// Indices of local minima.
pub fn detect_minima(values: &[f64], filter: &ExtremumFilter) -> Result<Vec<usize>> {
    detect(values, filter, 1.0)
}

/// Indices of local maxima.
pub fn detect_maxima(values: &[f64], filter: &ExtremumFilter) -> Result<Vec<usize>> {
    detect(values, filter, -1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeMatch {
    pub expected: f64,
    /// Closest detected position, if any lies within tolerance.
    pub found: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeReport {
    pub expected: Vec<f64>,
    pub detected: Vec<f64>,
    pub matches: Vec<FringeMatch>,
    pub tolerance: f64,
    pub matched: usize,
    /// Detected positions not claimed by any expected one.
    pub spurious: usize,
    pub max_offset: f64,
    pub all_matched: bool,
}

/// Greedy nearest matching of `detected` to `expected` within `tolerance`.
pub fn fringe_report(expected: &[f64], detected: &[f64], tolerance: f64) -> Result<FringeReport> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument("fringe tolerance must be positive".into()));
    }
    let mut used = vec![false; detected.len()];
    let mut matches = Vec::with_capacity(expected.len());
    let mut max_offset = 0.0_f64;
    for &e in expected {
        let best = detected
            .iter()
            .enumerate()
            .filter(|(k, d)| !used[*k] && (*d - e).abs() <= tolerance)
            .min_by(|a, b| (a.1 - e).abs().total_cmp(&(b.1 - e).abs()));
        let found = best.map(|(k, d)| {
            used[k] = true;
            max_offset = max_offset.max((d - e).abs());
            *d
        });
        matches.push(FringeMatch { expected: e, found });
    }
    let matched = matches.iter().filter(|m| m.found.is_some()).count();
    Ok(FringeReport {
        expected: expected.to_vec(),
        detected: detected.to_vec(),
        tolerance,
        matched,
        spurious: used.iter().filter(|u| !**u).count(),
        max_offset,
        all_matched: matched == expected.len(),
        matches,
    })
}

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::diff;
use crate::error::{Error, Result};
use crate::field::SchroedingerVectorField;
use crate::grid::Grid1D;
use crate::solver::relative_floor;

/// Multiple of the largest unflagged |v| at t = 0 used when no clamp is configured.
pub const DEFAULT_CLAMP_FACTOR: f64 = 50.0;

const NODE_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftOptions {
    /// Density floor relative to max ρ of each frame.
    pub rho_floor: f64,
    /// Absolute velocity clamp; `None` means "derive from the first frame".
    pub clamp_value: Option<f64>,
}

impl Default for DriftOptions {
    fn default() -> Self {
        DriftOptions { rho_floor: 1e-12, clamp_value: None }
    }
}

/// Velocity fields of one field snapshot, ready for path integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftFieldFrame {
    pub grid: Grid1D,
    pub time: f64,
    /// Current velocity j/ρ, clamped to ±`clamp_value`.
    pub alpha_real: Vec<f64>,
    /// −(D/ρ)∇ρ; recorded, never used to move paths.
    pub alpha_imag: Vec<f64>,
    /// ρ at or below the floor.
    pub flags: Vec<bool>,
    pub clamped: Vec<bool>,
    pub clamp_value: f64,
}

impl DriftFieldFrame {
    /// Largest |alpha_real| over unflagged nodes.
    pub fn max_speed(&self) -> f64 {
        self.alpha_real.iter().zip(&self.flags).filter(|(_, f)| !**f).map(|(v, _)| v.abs()).fold(0.0, f64::max)
    }

    pub fn with_clamp(mut self, clamp_value: f64) -> Self {
        for (v, c) in self.alpha_real.iter_mut().zip(self.clamped.iter_mut()) {
            if v.abs() > clamp_value {
                *v = v.signum() * clamp_value;
                *c = true;
            }
        }
        self.clamp_value = clamp_value;
        self
    }

    pub fn clamped_count(&self) -> usize {
        self.clamped.iter().filter(|c| **c).count()
    }
}

pub fn build_drift_frame(
    field: &SchroedingerVectorField,
    options: &DriftOptions,
    constants: &PhysicalConstants,
) -> DriftFieldFrame {
    let grid = *field.grid();
    let rho = field.density();
    let floor = relative_floor(field, options.rho_floor);
    let scale = constants.hbar() / constants.mass();
    let cross = diff::cross_gradient(field.phi_r(), field.phi_c(), grid.dx());
    let grad_rho = diff::gradient(&rho, grid.dx());
    let d = constants.diffusion();
    let n = grid.len();
    let mut alpha_real = Vec::with_capacity(n);
    let mut alpha_imag = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    for i in 0..n {
        if rho[i] > floor {
            alpha_real.push(scale * cross[i] / rho[i]);
            alpha_imag.push(-d * grad_rho[i] / rho[i]);
            flags.push(false);
        } else {
            alpha_real.push(0.0);
            alpha_imag.push(0.0);
            flags.push(true);
        }
    }
    let frame = DriftFieldFrame {
        grid,
        time: field.time(),
        alpha_real,
        alpha_imag,
        flags,
        clamped: vec![false; n],
        clamp_value: f64::INFINITY,
    };
    match options.clamp_value {
        Some(c) => frame.with_clamp(c),
        None => frame,
    }
}

/// Clamp derived from a t = 0 frame; falls back to infinity for a field at rest.
pub fn default_clamp(frame: &DriftFieldFrame) -> f64 {
    let v = frame.max_speed();
    if v > 0.0 {
        DEFAULT_CLAMP_FACTOR * v
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSample {
    pub velocity: f64,
    pub flagged: bool,
    pub clamped: bool,
}

/// Linear interpolation of alpha_real; zero and flagged if either bracketing node is flagged.
pub fn drift_at(frame: &DriftFieldFrame, x: f64) -> Result<DriftSample> {
    let g = &frame.grid;
    let (i, frac) = g.locate(x).ok_or(Error::OutOfDomain { x, lo: g.x_min(), hi: g.x_max() })?;
    let j = i + 1;
    // Queries that land on a node up to rounding use that node alone.
    let snapped = if frac < NODE_SNAP { Some(i) } else if 1.0 - frac < NODE_SNAP { Some(j) } else { None };
    if let Some(k) = snapped {
        if frame.flags[k] {
            return Ok(DriftSample { velocity: 0.0, flagged: true, clamped: false });
        }
        return Ok(DriftSample { velocity: frame.alpha_real[k], flagged: false, clamped: frame.clamped[k] });
    }
    if frame.flags[i] || frame.flags[j] {
        return Ok(DriftSample { velocity: 0.0, flagged: true, clamped: false });
    }
    let velocity = (1.0 - frac) * frame.alpha_real[i] + frac * frame.alpha_real[j];
    Ok(DriftSample { velocity, flagged: false, clamped: frame.clamped[i] || frame.clamped[j] })
}

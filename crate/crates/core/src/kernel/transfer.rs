use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::field::SchroedingerVectorField;
use crate::potential::PotentialSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct TransferResult {
    pub field: SchroedingerVectorField,
    /// Σρ dx after each step, starting with the initial norm.
    pub norms: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Stencil {
    weights: Vec<f64>,
    reach: usize,
}

/// Discrete Gaussian convolution weights dx·g(k dx) for variance `var`, truncated at 10σ.
fn stencil(var: f64, dx: f64, n: usize) -> Stencil {
    let sd = var.sqrt();
    let reach = ((10.0 * sd / dx).ceil() as usize).min(n - 1);
    let norm = dx / (2.0 * std::f64::consts::PI * var).sqrt();
    let weights = (0..=reach).map(|k| norm * (-(k as f64 * dx).powi(2) / (2.0 * var)).exp()).collect();
    Stencil { weights, reach }
}

fn convolve(values: &[f64], s: &Stencil) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(s.reach);
            let hi = (i + s.reach).min(n - 1);
            (lo..=hi).map(|j| s.weights[i.abs_diff(j)] * values[j]).sum()
        })
        .collect()
}

fn check_resolution(var: f64, dx: f64) -> Result<()> {
    let std = var.sqrt();
    if std < 2.0 * dx {
        return Err(Error::KernelUnderresolved { std, two_dx: 2.0 * dx });
    }
    Ok(())
}

/// Smoothing of both components by a Gaussian of variance (ħ/m)·t.
pub fn heat_smooth(field: &SchroedingerVectorField, t: f64, constants: &PhysicalConstants) -> Result<SchroedingerVectorField> {
    let grid = *field.grid();
    let var = constants.noise_variance_rate() * t;
    check_resolution(var, grid.dx())?;
    let s = stencil(var, grid.dx(), grid.len());
    SchroedingerVectorField::new(grid, convolve(field.phi_r(), &s), convolve(field.phi_c(), &s), field.time() + t)
}

/// n_steps of [Gaussian convolution, variance (ħ/m)dt] ∘ [nodewise rotation by −V dt/ħ].
pub fn transfer_matrix_propagate(
    field0: &SchroedingerVectorField,
    potential: &PotentialSpec,
    dt: f64,
    n_steps: usize,
    constants: &PhysicalConstants,
) -> Result<TransferResult> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let grid = *field0.grid();
    let var = constants.noise_variance_rate() * dt;
    check_resolution(var, grid.dx())?;
    let s = stencil(var, grid.dx(), grid.len());
    let rot: Vec<(f64, f64)> =
        potential.sample(&grid)?.iter().map(|v| (-v * dt / constants.hbar()).sin_cos()).collect();

    let mut phi_r = field0.phi_r().to_vec();
    let mut phi_c = field0.phi_c().to_vec();
    let mut norms = Vec::with_capacity(n_steps + 1);
    norms.push(field0.norm());
    for _ in 0..n_steps {
        for (i, (sn, cs)) in rot.iter().enumerate() {
            let (r, c) = (phi_r[i], phi_c[i]);
            phi_r[i] = cs * r - sn * c;
            phi_c[i] = sn * r + cs * c;
        }
        phi_r = convolve(&phi_r, &s);
        phi_c = convolve(&phi_c, &s);
        norms.push(phi_r.iter().zip(&phi_c).map(|(r, c)| r * r + c * c).sum::<f64>() * grid.dx());
    }
    let field = SchroedingerVectorField::new(grid, phi_r, phi_c, field0.time() + dt * n_steps as f64)?;
    Ok(TransferResult { field, norms })
}

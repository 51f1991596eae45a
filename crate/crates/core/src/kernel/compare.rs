use serde::{Deserialize, Serialize};

use super::{propagate_by_kernel, transfer_matrix_propagate, KernelConfig, KernelEstimate};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::field::SchroedingerVectorField;
use crate::potential::PotentialSpec;
use crate::solver::Propagator;
use crate::stats::linear_fit;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonConfig {
    pub t_total: f64,
    /// Crank–Nicolson step for the grid solver leg.
    pub solver_dt: f64,
    /// Shared by the Monte Carlo and transfer-matrix legs, so their slicing matches.
    pub kernel: KernelConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub t_total: f64,
    pub evaluation_nodes: usize,
    pub solver_vs_transfer: f64,
    pub solver_vs_monte_carlo: f64,
    pub transfer_vs_monte_carlo: f64,
    /// L2 norm of the pooled per-node MC standard error.
    pub monte_carlo_l2_std_error: f64,
    pub max_std_error: f64,
    /// Fraction of nodes where |MC − transfer| ≤ 3 × pooled standard error.
    pub fraction_within_3se: f64,
    pub exit_fraction: f64,
    pub solver_norms: Vec<f64>,
    pub transfer_norms: Vec<f64>,
    pub monte_carlo_norm: f64,
}

fn restrict(field: &SchroedingerVectorField, template: &SchroedingerVectorField, stride: usize) -> Result<SchroedingerVectorField> {
    let m = template.grid().len();
    let pick = |v: &[f64]| (0..m).map(|j| v[j * stride]).collect::<Vec<_>>();
    SchroedingerVectorField::new(*template.grid(), pick(field.phi_r()), pick(field.phi_c()), field.time())
}

/// Fraction of evaluation nodes where the estimate lies within `k` pooled
/// standard errors of `reference` (already on the evaluation grid).
pub(crate) fn fraction_within(estimate: &KernelEstimate, reference: &SchroedingerVectorField, k: f64) -> f64 {
    let se = estimate.pooled_std_error();
    let f = &estimate.field;
    let hits = (0..se.len())
        .filter(|&i| {
            let d = ((f.phi_r()[i] - reference.phi_r()[i]).powi(2) + (f.phi_c()[i] - reference.phi_c()[i]).powi(2)).sqrt();
            d <= k * se[i]
        })
        .count();
    hits as f64 / se.len() as f64
}

/// Runs the grid solver, the transfer-matrix kernel and the Monte Carlo kernel
/// from the same field and reports their pairwise gaps. Agreement between the
/// solver and either kernel is not expected and is only recorded.
pub fn compare_propagations(
    field0: &SchroedingerVectorField,
    potential: &PotentialSpec,
    config: &ComparisonConfig,
    constants: &PhysicalConstants,
) -> Result<ComparisonReport> {
    let t = config.t_total;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_total must be positive, got {t}")));
    }
    if !(config.solver_dt > 0.0) {
        return Err(Error::InvalidArgument(format!("solver_dt must be positive, got {}", config.solver_dt)));
    }
    config.kernel.validate()?;
    let stride = config.kernel.node_stride;

    let solver_steps = (t / config.solver_dt).round().max(1.0) as usize;
    let prop = Propagator::new(field0.grid(), potential, constants, t / solver_steps as f64)?;
    let mut solved = field0.clone();
    let mut solver_norms = vec![solved.norm()];
    for _ in 0..solver_steps {
        prop.advance(&mut solved)?;
        solver_norms.push(solved.norm());
    }

    let slices = config.kernel.n_time_slices;
    let transfer = transfer_matrix_propagate(field0, potential, t / slices as f64, slices, constants)?;
    let mc = propagate_by_kernel(field0, t, potential, &config.kernel, constants)?;

    let solver_c = restrict(&solved, &mc.field, stride)?;
    let transfer_c = restrict(&transfer.field, &mc.field, stride)?;
    let se = mc.pooled_std_error();
    Ok(ComparisonReport {
        t_total: t,
        evaluation_nodes: mc.field.grid().len(),
        solver_vs_transfer: solver_c.l2_distance(&transfer_c),
        solver_vs_monte_carlo: solver_c.l2_distance(&mc.field),
        transfer_vs_monte_carlo: transfer_c.l2_distance(&mc.field),
        monte_carlo_l2_std_error: mc.l2_std_error(),
        max_std_error: se.iter().copied().fold(0.0, f64::max),
        fraction_within_3se: fraction_within(&mc, &transfer_c, 3.0),
        exit_fraction: mc.exit_fraction,
        solver_norms,
        transfer_norms: transfer.norms,
        monte_carlo_norm: mc.field.norm(),
    })
}

/// L2 error of the Monte Carlo kernel against the transfer matrix as a function of sample count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub sample_counts: Vec<usize>,
    pub errors: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Slope of log(error) against log(n_samples).
    pub slope: f64,
}

pub fn mc_convergence(
    field0: &SchroedingerVectorField,
    t_total: f64,
    potential: &PotentialSpec,
    base: &KernelConfig,
    sample_counts: &[usize],
    constants: &PhysicalConstants,
) -> Result<ConvergenceStudy> {
    if sample_counts.len() < 2 {
        return Err(Error::InsufficientSamples { required: 2, found: sample_counts.len() });
    }
    let slices = base.n_time_slices;
    let transfer = transfer_matrix_propagate(field0, potential, t_total / slices as f64, slices, constants)?;
    let mut errors = Vec::with_capacity(sample_counts.len());
    let mut std_errors = Vec::with_capacity(sample_counts.len());
    for &n in sample_counts {
        let cfg = KernelConfig { n_samples: n, ..*base };
        let mc = propagate_by_kernel(field0, t_total, potential, &cfg, constants)?;
        let reference = restrict(&transfer.field, &mc.field, cfg.node_stride)?;
        errors.push(reference.l2_distance(&mc.field));
        std_errors.push(mc.l2_std_error());
    }
    let lx: Vec<f64> = sample_counts.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (slope, _) = linear_fit(&lx, &ly);
    Ok(ConvergenceStudy { sample_counts: sample_counts.to_vec(), errors, std_errors, slope })
}

#[cfg(test)]
pub(crate) fn tests_restrict(field: &SchroedingerVectorField, template: &SchroedingerVectorField, stride: usize) -> SchroedingerVectorField {
    restrict(field, template, stride).unwrap()
}

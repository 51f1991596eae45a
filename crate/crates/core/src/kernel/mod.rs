//! Real-valued matrix Feynman–Kac kernel.
//!
//! The Green function is a Wiener-measure average of 2×2 rotations
//! exp(−(1/ħ)∫V ds · J): the symplectic matrix touches only the potential,
//! the kinetic part enters as a real heat kernel with variance (ħ/m)t.
//! Nothing here renormalizes; the kernel contracts the L2 norm.

mod compare;
mod monte_carlo;
mod transfer;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use compare::{compare_propagations, mc_convergence, ComparisonConfig, ComparisonReport, ConvergenceStudy};
pub use monte_carlo::{
    audit_paths, pinned_green_matrix, propagate_by_kernel, propagate_pinned, write_paths_csv, GreenMatrix,
    KernelEstimate,
};
pub use transfer::{heat_smooth, transfer_matrix_propagate, TransferResult};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::potential::PotentialSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Full 2×2 G(q, t; q0, 0) on a coarse mesh from Brownian bridges.
    PinnedEndpoint,
    /// Direct estimate of the propagated field from free paths.
    #[default]
    ExpectationForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub n_time_slices: usize,
    pub n_samples: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub estimator: Estimator,
    /// Evaluate every `node_stride`-th grid node (must divide the cell count).
    #[serde(default = "one")]
    pub node_stride: usize,
}

fn one() -> usize {
    1
}

impl KernelConfig {
    pub fn new(n_time_slices: usize, n_samples: usize, master_seed: u64) -> Self {
        KernelConfig { n_time_slices, n_samples, master_seed, estimator: Estimator::ExpectationForm, node_stride: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_time_slices == 0 {
            return Err(Error::InvalidArgument("kernel n_time_slices must be at least 1".into()));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidArgument("kernel n_samples must be at least 1".into()));
        }
        if self.node_stride == 0 {
            return Err(Error::InvalidArgument("kernel node_stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// exp(angle·J) = [[cos a, −sin a], [sin a, cos a]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationWeight {
    pub angle: f64,
}

impl RotationWeight {
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.angle.sin_cos();
        [[c, -s], [s, c]]
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.angle.sin_cos();
        [c * v[0] - s * v[1], s * v[0] + c * v[1]]
    }

    /// Product of two weights; rotations commute, so angles add.
    pub fn compose(&self, other: &RotationWeight) -> RotationWeight {
        RotationWeight { angle: self.angle + other.angle }
    }
}

/// Brownian path from `x_start` with `n_slices` independent N(0, (ħ/m)Δt) increments.
pub fn sample_wiener_path<R: Rng + ?Sized>(
    x_start: f64,
    t_total: f64,
    n_slices: usize,
    constants: &PhysicalConstants,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if n_slices == 0 {
        return Err(Error::InvalidArgument("n_slices must be at least 1".into()));
    }
    if !(t_total >= 0.0) {
        return Err(Error::InvalidArgument(format!("t_total must be non-negative, got {t_total}")));
    }
    let sd = (constants.noise_variance_rate() * t_total / n_slices as f64).sqrt();
    let mut path = Vec::with_capacity(n_slices + 1);
    let mut x = x_start;
    path.push(x);
    for _ in 0..n_slices {
        let z: f64 = rng.sample(StandardNormal);
        x += sd * z;
        path.push(x);
    }
    Ok(path)
}

/// Weight of a forward-time path q_0 … q_N over total time `t_total`:
/// angle = −(Δt/ħ) Σ_{k<N} V(q_k), the potential taken at the earlier end of each slice.
pub fn rotation_weight(path: &[f64], t_total: f64, potential: &PotentialSpec, constants: &PhysicalConstants) -> RotationWeight {
    let n = path.len().saturating_sub(1);
    if n == 0 {
        return RotationWeight { angle: 0.0 };
    }
    let dt = t_total / n as f64;
    let sum: f64 = path[..n].iter().map(|&q| potential.value(q)).sum();
    RotationWeight { angle: -dt * sum / constants.hbar() }
}

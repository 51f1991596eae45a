use serde::{Deserialize, Serialize};

use super::drift::DriftOptions;
use super::ensemble::EnsembleState;
use super::frames::solver_frames;
use crate::constants::PhysicalConstants;
use crate::diff;
use crate::error::{Error, Result};
use crate::field::SchroedingerVectorField;
use crate::grid::Grid1D;
use crate::potential::PotentialSpec;
use crate::scenarios::analytic::{classical_trajectory, CoherentStateSpec};
use crate::seeding::stage;

/// Unnormalized local momentum ψ̄ᵀp̂ψ̄ = ħ(φ_r∇φ_c − φ_c∇φ_r) = m·j at every node.
pub fn local_momentum_density(field: &SchroedingerVectorField, constants: &PhysicalConstants) -> Vec<f64> {
    diff::cross_gradient(field.phi_r(), field.phi_c(), field.grid().dx()).into_iter().map(|v| constants.hbar() * v).collect()
}

pub fn local_momentum_at(field: &SchroedingerVectorField, node: usize, constants: &PhysicalConstants) -> Result<f64> {
    if node >= field.grid().len() {
        return Err(Error::InvalidArgument(format!("node {node} outside grid of {}", field.grid().len())));
    }
    Ok(local_momentum_density(field, constants)[node])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalResidual {
    /// dP/dt + ρ∇V at every node, with ρ averaged over the two frames.
    pub residual: Vec<f64>,
    pub l2: f64,
    pub momentum_rate_l2: f64,
    pub force_density_l2: f64,
}

/// Nodewise residual of the momentum-density force law between two consecutive frames.
pub fn canonical_residual(
    before: &SchroedingerVectorField,
    after: &SchroedingerVectorField,
    potential: &PotentialSpec,
    dt: f64,
    constants: &PhysicalConstants,
) -> Result<CanonicalResidual> {
    if !before.grid().same_as(after.grid()) {
        return Err(Error::InvalidGrid("canonical residual needs both frames on one grid".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let grid = before.grid();
    let p0 = local_momentum_density(before, constants);
    let p1 = local_momentum_density(after, constants);
    let (r0, r1) = (before.density(), after.density());
    let mut residual = Vec::with_capacity(grid.len());
    let (mut s_res, mut s_rate, mut s_force) = (0.0, 0.0, 0.0);
    for (i, x) in grid.nodes().enumerate() {
        let rate = (p1[i] - p0[i]) / dt;
        let force_density = -0.5 * (r0[i] + r1[i]) * potential.force(x);
        let r = rate + force_density;
        s_res += r * r;
        s_rate += rate * rate;
        s_force += force_density * force_density;
        residual.push(r);
    }
    let dx = grid.dx();
    Ok(CanonicalResidual {
        residual,
        l2: (s_res * dx).sqrt(),
        momentum_rate_l2: (s_rate * dx).sqrt(),
        force_density_l2: (s_force * dx).sqrt(),
    })
}

/// Noise-off path through a solver-evolved coherent state, against the classical oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentPathCheck {
    pub dt: f64,
    pub n_steps: usize,
    pub max_error: f64,
    pub final_error: f64,
    pub path: Vec<f64>,
    pub oracle: Vec<f64>,
}

pub fn coherent_state_bohmian(
    spec: &CoherentStateSpec,
    grid: &Grid1D,
    dt: f64,
    n_steps: usize,
    constants: &PhysicalConstants,
) -> Result<CoherentPathCheck> {
    let field0 = spec.field(grid, 0.0, constants)?;
    let potential = spec.potential(constants);
    let mut frames = solver_frames(field0, &potential, dt, 1, DriftOptions::default(), *constants)?;
    let path = super::ensemble::bohmian_trajectory(spec.q0, &mut frames, dt, n_steps, constants)?;
    let oracle: Vec<f64> = classical_trajectory(&potential, spec.q0, spec.p0, dt, n_steps, constants).into_iter().map(|(q, _)| q).collect();
    let errors: Vec<f64> = path.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).collect();
    Ok(CoherentPathCheck {
        dt,
        n_steps,
        max_error: errors.iter().copied().fold(0.0, f64::max),
        final_error: *errors.last().unwrap_or(&0.0),
        path,
        oracle,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalLimitSpec {
    pub coherent: CoherentStateSpec,
    #[serde(default = "one")]
    pub periods: f64,
    pub dt: f64,
    pub n_paths: usize,
    pub master_seed: u64,
    /// Grid nodes per shortest de Broglie wavelength in the packet.
    #[serde(default = "default_ppw")]
    pub points_per_wavelength: f64,
}

fn one() -> f64 {
    1.0
}

fn default_ppw() -> f64 {
    200.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLimitEntry {
    pub hbar: f64,
    pub width: f64,
    pub grid: Grid1D,
    /// max over time of |ensemble mean − classical q|.
    pub max_deviation: f64,
    pub final_deviation: f64,
    /// Standard error of the final ensemble mean.
    pub final_std_error: f64,
    /// √(ħ/m)·√dt, the per-step noise magnitude.
    pub noise_per_step: f64,
    pub flagged_steps: u64,
    pub reflections: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalLimitReport {
    pub entries: Vec<ClassicalLimitEntry>,
    /// Deviations strictly decrease along the supplied ħ sequence.
    pub monotone: bool,
}

/// Grid for a coherent state at a given ħ: wide enough for the oscillation and
/// the noise spread, fine enough for the carrier wavelength.
pub fn classical_limit_grid(spec: &ClassicalLimitSpec, constants: &PhysicalConstants) -> Result<Grid1D> {
    let c = &spec.coherent;
    let (hbar, m) = (constants.hbar(), constants.mass());
    let sigma = c.width(constants);
    let amplitude = ((c.q0 - c.center).powi(2) + (c.p0 / (m * c.omega)).powi(2)).sqrt();
    let t = spec.periods * c.period();
    let spread = (hbar * t / m).sqrt();
    let half = amplitude + 8.0 * sigma.max(spread);
    let p_max = m * c.omega * amplitude + 4.0 * hbar / (2.0 * sigma);
    let wavelength = 2.0 * std::f64::consts::PI * hbar / p_max;
    let dx = (sigma / 20.0).min(wavelength / spec.points_per_wavelength);
    let n = ((2.0 * half / dx).ceil() as usize + 1).max(crate::grid::MIN_POINTS);
    Grid1D::new(c.center - half, c.center + half, n)
}

/// Noise-on ensembles in the coherent state at each ħ in `hbar_scales`; the
/// packet width follows √ħ through the coherent-state width.
pub fn classical_limit_run(spec: &ClassicalLimitSpec, hbar_scales: &[f64], constants: &PhysicalConstants) -> Result<ClassicalLimitReport> {
    spec.coherent.validate()?;
    if hbar_scales.is_empty() {
        return Err(Error::InvalidArgument("classical limit needs at least one hbar".into()));
    }
    if !(spec.dt > 0.0) || spec.n_paths < 2 {
        return Err(Error::InvalidArgument("classical limit needs dt > 0 and at least 2 paths".into()));
    }
    let mut entries = Vec::with_capacity(hbar_scales.len());
    for (run, &hbar) in hbar_scales.iter().enumerate() {
        let c = constants.with_hbar(hbar)?;
        let grid = classical_limit_grid(spec, &c)?;
        let field0 = spec.coherent.field(&grid, 0.0, &c)?;
        let potential = spec.coherent.potential(&c);
        let n_steps = (spec.periods * spec.coherent.period() / spec.dt).round() as usize;
        let seed = crate::seeding::derive_seed(spec.master_seed, stage::PATH_NOISE, run as u64);
        let initial = super::ensemble::sample_initial_positions(&grid, &field0.density(), spec.n_paths, seed)?;
        let mut frames = solver_frames(field0, &potential, spec.dt, 1, DriftOptions::default(), c)?;
        let oracle = classical_trajectory(&potential, spec.coherent.q0, spec.coherent.p0, spec.dt, n_steps, &c);
        let mut state = EnsembleState::new(&initial, seed, 0.0);
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        let mut max_dev = (mean(&initial) - oracle[0].0).abs();
        let mut last = (0.0, 0.0);
        state.run(&mut frames, spec.dt, n_steps, true, &c, |n, s| {
            let xs = s.positions();
            let m = mean(&xs);
            let d = (m - oracle[n].0).abs();
            max_dev = max_dev.max(d);
            if n == n_steps {
                let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
                last = (d, (var / xs.len() as f64).sqrt());
            }
        })?;
        let counters = state.counters();
        entries.push(ClassicalLimitEntry {
            hbar,
            width: spec.coherent.width(&c),
            grid,
            max_deviation: max_dev,
            final_deviation: last.0,
            final_std_error: last.1,
            noise_per_step: (c.noise_variance_rate() * spec.dt).sqrt(),
            flagged_steps: counters.flagged_steps,
            reflections: counters.reflections,
        });
    }
    let monotone = entries.windows(2).all(|w| w[1].max_deviation < w[0].max_deviation);
    Ok(ClassicalLimitReport { entries, monotone })
}

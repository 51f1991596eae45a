//! Time propagation of ħ J ∂ₜψ̄ = (−(ħ²/2m)∇² + V) ψ̄ on a uniform grid.
//!
//! The scheme is the implicit midpoint (Crank–Nicolson) rule on the coupled
//! real system. The 2n×2n system is block tridiagonal with 2×2 blocks of the
//! form aI + bJ and is solved with a block Thomas sweep factorized once per
//! propagator. The smallest nodal value of V is split off and applied as an
//! exact rotation exp(−J V_ref dt/ħ); it commutes with Ĥ, so a spatially
//! constant potential turns every node vector by exactly −V dt/ħ.

mod observables;

use serde::{Deserialize, Serialize};

pub use observables::{
    continuity_residual, energy_expectation, flux, hamiltonian_apply, local_energy, local_velocity, observe,
    phase_angle, relative_floor, time_reverse, NodalObservable, ObservableFrame, PhaseProfile,
};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::field::SchroedingerVectorField;
use crate::potential::PotentialSpec;

pub const DEFAULT_RHO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub dt: f64,
    pub n_steps: usize,
    /// Density floor relative to max ρ below which local observables are flagged.
    #[serde(default = "default_floor")]
    pub rho_floor: f64,
}

fn default_floor() -> f64 {
    DEFAULT_RHO_FLOOR
}

impl SolverConfig {
    pub fn new(dt: f64, n_steps: usize) -> Self {
        SolverConfig { dt, n_steps, rho_floor: DEFAULT_RHO_FLOOR }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidArgument(format!("solver dt must be positive, got {}", self.dt)));
        }
        if !(self.rho_floor >= 0.0 && self.rho_floor < 1.0) {
            return Err(Error::InvalidArgument(format!("rho_floor must lie in [0, 1), got {}", self.rho_floor)));
        }
        Ok(())
    }

    /// Whether dt satisfies the explicit-scheme bound dt ≤ dx² m/ħ. The implicit
    /// propagator does not need it; explicit diagnostics do.
    pub fn explicit_stable(&self, dx: f64, constants: &PhysicalConstants) -> bool {
        self.dt <= dx * dx * constants.mass() / constants.hbar()
    }
}

/// 2×2 real block [[a, b], [c, d]].
#[derive(Debug, Clone, Copy, PartialEq)]
struct Block {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Block {
    const ZERO: Block = Block { a: 0.0, b: 0.0, c: 0.0, d: 0.0 };

    /// s·I + t·J.
    fn rotation_like(s: f64, t: f64) -> Block {
        Block { a: s, b: -t, c: t, d: s }
    }

    fn mul(self, o: Block) -> Block {
        Block {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    fn sub(self, o: Block) -> Block {
        Block { a: self.a - o.a, b: self.b - o.b, c: self.c - o.c, d: self.d - o.d }
    }

    fn apply(self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    fn inverse(self) -> Option<Block> {
        let det = self.a * self.d - self.b * self.c;
        if !det.is_finite() || det.abs() < 1e-300 {
            return None;
        }
        let inv = 1.0 / det;
        Some(Block { a: self.d * inv, b: -self.b * inv, c: -self.c * inv, d: self.a * inv })
    }
}

/// Factorized Crank–Nicolson step for a fixed grid, potential and dt.
#[derive(Debug, Clone)]
pub struct Propagator {
    dt: f64,
    hbar: f64,
    kappa: f64,
    reduced_v: Vec<f64>,
    v_ref: f64,
    off: Block,
    pivots_inv: Vec<Block>,
    upper: Vec<Block>,
}

impl Propagator {
    pub fn new(
        grid: &crate::grid::Grid1D,
        potential: &PotentialSpec,
        constants: &PhysicalConstants,
        dt: f64,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        let v = potential.sample(grid)?;
        let v_ref = v.iter().copied().fold(f64::INFINITY, f64::min);
        let reduced_v: Vec<f64> = v.iter().map(|x| x - v_ref).collect();
        let hbar = constants.hbar();
        let dx = grid.dx();
        let kappa = hbar * hbar / (2.0 * constants.mass() * dx * dx);
        let s = dt / (2.0 * hbar);
        let n = grid.len();

        // LHS: I + s J H, diagonal blocks I + s(2κ + V_i)J, off-diagonal −sκJ.
        let off = Block::rotation_like(0.0, -s * kappa);
        let mut pivots_inv = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        let mut prev_upper = Block::ZERO;
        for (i, vi) in reduced_v.iter().enumerate() {
            let diag = Block::rotation_like(1.0, s * (2.0 * kappa + vi));
            let pivot = if i == 0 { diag } else { diag.sub(off.mul(prev_upper)) };
            let inv = pivot.inverse().ok_or(Error::LinearSolveFailure(i))?;
            let u = inv.mul(off);
            pivots_inv.push(inv);
            upper.push(u);
            prev_upper = u;
        }
        Ok(Propagator { dt, hbar, kappa, reduced_v, v_ref, off, pivots_inv, upper })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `field` by one step in place.
    #[allow(clippy::needless_range_loop)]
    pub fn advance(&self, field: &mut SchroedingerVectorField) -> Result<()> {
        let n = self.reduced_v.len();
        if field.grid().len() != n {
            return Err(Error::LengthMismatch { expected: n, found: field.grid().len() });
        }
        let s = self.dt / (2.0 * self.hbar);
        let (phi_r, phi_c, time) = field.parts_mut();

        // RHS: (I − s J H) ψ̄ with J(h_r, h_c) = (−h_c, h_r).
        let mut rhs = Vec::with_capacity(n);
        for i in 0..n {
            let (lr, lc) = if i > 0 { (phi_r[i - 1], phi_c[i - 1]) } else { (0.0, 0.0) };
            let (rr, rc) = if i + 1 < n { (phi_r[i + 1], phi_c[i + 1]) } else { (0.0, 0.0) };
            let diag = 2.0 * self.kappa + self.reduced_v[i];
            let hr = diag * phi_r[i] - self.kappa * (lr + rr);
            let hc = diag * phi_c[i] - self.kappa * (lc + rc);
            rhs.push([phi_r[i] + s * hc, phi_c[i] - s * hr]);
        }

        // Forward sweep.
        let mut prev = [0.0, 0.0];
        for i in 0..n {
            let coupled = if i == 0 { rhs[i] } else {
                let t = self.off.apply(prev);
                [rhs[i][0] - t[0], rhs[i][1] - t[1]]
            };
            let d = self.pivots_inv[i].apply(coupled);
            rhs[i] = d;
            prev = d;
        }
        // Back substitution.
        for i in (0..n - 1).rev() {
            let t = self.upper[i].apply(rhs[i + 1]);
            rhs[i] = [rhs[i][0] - t[0], rhs[i][1] - t[1]];
        }

        let (sn, cs) = (-self.v_ref * self.dt / self.hbar).sin_cos();
        for (i, x) in rhs.iter().enumerate() {
            phi_r[i] = cs * x[0] - sn * x[1];
            phi_c[i] = sn * x[0] + cs * x[1];
        }
        *time += self.dt;
        Ok(())
    }
}

/// One Crank–Nicolson step.
pub fn step(
    field: &SchroedingerVectorField,
    potential: &PotentialSpec,
    config: &SolverConfig,
    constants: &PhysicalConstants,
) -> Result<SchroedingerVectorField> {
    config.validate()?;
    let p = Propagator::new(field.grid(), potential, constants, config.dt)?;
    let mut out = field.clone();
    p.advance(&mut out)?;
    Ok(out)
}

/// Runs `config.n_steps` steps, recording a frame at t = 0 and every `frame_stride` steps.
pub fn propagate(
    field: &SchroedingerVectorField,
    potential: &PotentialSpec,
    config: &SolverConfig,
    constants: &PhysicalConstants,
    frame_stride: usize,
) -> Result<Vec<(SchroedingerVectorField, ObservableFrame)>> {
    config.validate()?;
    if frame_stride == 0 {
        return Err(Error::InvalidArgument("frame_stride must be at least 1".into()));
    }
    let v = potential.sample(field.grid())?;
    let p = Propagator::new(field.grid(), potential, constants, config.dt)?;
    let mut current = field.clone();
    let mut out = vec![(current.clone(), observe(&current, &v, constants, config.rho_floor))];
    for n in 1..=config.n_steps {
        p.advance(&mut current)?;
        if n % frame_stride == 0 {
            out.push((current.clone(), observe(&current, &v, constants, config.rho_floor)));
        }
    }
    Ok(out)
}

/// Advances without recording anything.
pub fn evolve(
    field: &SchroedingerVectorField,
    potential: &PotentialSpec,
    dt: f64,
    n_steps: usize,
    constants: &PhysicalConstants,
) -> Result<SchroedingerVectorField> {
    let p = Propagator::new(field.grid(), potential, constants, dt)?;
    let mut current = field.clone();
    for _ in 0..n_steps {
        p.advance(&mut current)?;
    }
    Ok(current)
}

/// Conservation diagnostics of a propagation, written into run manifests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub initial_norm: f64,
    pub max_norm_drift: f64,
    pub initial_energy: f64,
    pub max_relative_energy_drift: f64,
}

/// Propagates while tracking the worst norm and energy drift.
pub fn evolve_tracked(
    field: &SchroedingerVectorField,
    potential: &PotentialSpec,
    dt: f64,
    n_steps: usize,
    constants: &PhysicalConstants,
) -> Result<(SchroedingerVectorField, ConservationReport)> {
    let v = potential.sample(field.grid())?;
    let p = Propagator::new(field.grid(), potential, constants, dt)?;
    let n0 = field.norm();
    let e0 = energy_expectation(field, &v, constants);
    let scale = e0.abs().max(f64::MIN_POSITIVE);
    let mut report = ConservationReport { initial_norm: n0, max_norm_drift: 0.0, initial_energy: e0, max_relative_energy_drift: 0.0 };
    let mut current = field.clone();
    for _ in 0..n_steps {
        p.advance(&mut current)?;
        report.max_norm_drift = report.max_norm_drift.max((current.norm() - n0).abs());
        let e = energy_expectation(&current, &v, constants);
        report.max_relative_energy_drift = report.max_relative_energy_drift.max((e - e0).abs() / scale);
    }
    Ok((current, report))
}

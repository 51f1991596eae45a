use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::diff;
use crate::error::Result;
use crate::field::SchroedingerVectorField;

/// Nodal values with low-density flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalObservable {
    pub values: Vec<f64>,
    pub flagged: Vec<bool>,
}

impl NodalObservable {
    pub fn unflagged(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().zip(&self.flagged).enumerate().filter(|(_, (_, f))| !**f).map(|(i, (v, _))| (i, *v))
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|f| **f).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseProfile {
    pub theta: Vec<f64>,
    pub flagged: Vec<bool>,
    /// Cells where the wrapped phase step exceeded π/2, i.e. the grid barely resolves the phase.
    pub resolution_warnings: usize,
}

/// Local observables of one recorded solver frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableFrame {
    pub time: f64,
    pub rho: Vec<f64>,
    pub flux_j: Vec<f64>,
    pub v_local: Vec<f64>,
    pub e_local: Vec<f64>,
    pub theta: Vec<f64>,
    pub flagged: Vec<bool>,
}

impl ObservableFrame {
    pub fn write_csv<W: Write>(&self, grid: &crate::grid::Grid1D, mut w: W) -> Result<()> {
        writeln!(w, "x,rho,j,v,E_local,theta")?;
        for (i, x) in grid.nodes().enumerate() {
            writeln!(
                w,
                "{x:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.rho[i], self.flux_j[i], self.v_local[i], self.e_local[i], self.theta[i]
            )?;
        }
        Ok(())
    }
}

/// Absolute density floor `relative × max ρ`.
pub fn relative_floor(field: &SchroedingerVectorField, relative: f64) -> f64 {
    relative * field.density().iter().copied().fold(0.0, f64::max)
}

/// j = (ħ/m)(φ_r ∇φ_c − φ_c ∇φ_r).
pub fn flux(field: &SchroedingerVectorField, constants: &PhysicalConstants) -> Vec<f64> {
    let f = constants.hbar() / constants.mass();
    diff::cross_gradient(field.phi_r(), field.phi_c(), field.grid().dx()).into_iter().map(|v| v * f).collect()
}

/// v = j/ρ where ρ > `rho_floor`, else 0 and flagged.
pub fn local_velocity(field: &SchroedingerVectorField, constants: &PhysicalConstants, rho_floor: f64) -> NodalObservable {
    divide_by_density(&flux(field, constants), &field.density(), rho_floor)
}

fn divide_by_density(numerator: &[f64], rho: &[f64], rho_floor: f64) -> NodalObservable {
    let (values, flagged) = numerator
        .iter()
        .zip(rho)
        .map(|(&n, &r)| if r > rho_floor { (n / r, false) } else { (0.0, true) })
        .unzip();
    NodalObservable { values, flagged }
}

/// Discrete Ĥψ̄ with the three-point Laplacian and Dirichlet walls.
pub fn hamiltonian_apply(
    field: &SchroedingerVectorField,
    potential: &[f64],
    constants: &PhysicalConstants,
) -> (Vec<f64>, Vec<f64>) {
    let dx = field.grid().dx();
    let k = -constants.hbar() * constants.hbar() / (2.0 * constants.mass());
    let apply = |phi: &[f64]| -> Vec<f64> {
        diff::laplacian(phi, dx).iter().zip(phi).zip(potential).map(|((l, p), v)| k * l + v * p).collect()
    };
    (apply(field.phi_r()), apply(field.phi_c()))
}

/// E_local = ψ̄ᵀĤψ̄ / ρ, flagged below the floor.
pub fn local_energy(
    field: &SchroedingerVectorField,
    potential: &[f64],
    constants: &PhysicalConstants,
    rho_floor: f64,
) -> NodalObservable {
    let (hr, hc) = hamiltonian_apply(field, potential, constants);
    let num: Vec<f64> = (0..hr.len()).map(|i| field.phi_r()[i] * hr[i] + field.phi_c()[i] * hc[i]).collect();
    divide_by_density(&num, &field.density(), rho_floor)
}

/// ⟨Ĥ⟩ = Σ ψ̄ᵀĤψ̄ dx.
pub fn energy_expectation(field: &SchroedingerVectorField, potential: &[f64], constants: &PhysicalConstants) -> f64 {
    let (hr, hc) = hamiltonian_apply(field, potential, constants);
    let s: f64 = (0..hr.len()).map(|i| field.phi_r()[i] * hr[i] + field.phi_c()[i] * hc[i]).sum();
    s * field.grid().dx()
}

/// θ = atan2(φ_c, φ_r), unwrapped outward from the density maximum across unflagged nodes.
pub fn phase_angle(field: &SchroedingerVectorField, rho_floor: f64) -> PhaseProfile {
    let rho = field.density();
    let n = rho.len();
    let wrapped: Vec<f64> = field.phi_r().iter().zip(field.phi_c()).map(|(r, c)| c.atan2(*r)).collect();
    let flagged: Vec<bool> = rho.iter().map(|r| *r <= rho_floor).collect();
    let mut theta = wrapped.clone();
    let mut warnings = 0;

    let start = rho.iter().enumerate().fold(0, |best, (i, r)| if *r > rho[best] { i } else { best });
    let mut sweep = |range: &mut dyn Iterator<Item = usize>| {
        let mut last = start;
        for i in range {
            if flagged[i] {
                continue;
            }
            let mut step = wrapped[i] - wrapped[last];
            step -= 2.0 * PI * (step / (2.0 * PI)).round();
            if step.abs() > PI / 2.0 && i.abs_diff(last) == 1 {
                warnings += 1;
            }
            theta[i] = theta[last] + step;
            last = i;
        }
    };
    sweep(&mut (start + 1..n));
    sweep(&mut (0..start).rev());
    PhaseProfile { theta, flagged, resolution_warnings: warnings }
}

/// (φ_r, φ_c) → (φ_r, −φ_c).
pub fn time_reverse(field: &SchroedingerVectorField) -> SchroedingerVectorField {
    SchroedingerVectorField::from_parts_unchecked(
        *field.grid(),
        field.phi_r().to_vec(),
        field.phi_c().iter().map(|c| -c).collect(),
        field.time(),
    )
}

/// L2 norm over interior nodes of (ρ_after − ρ_before)/dt + ∇·j, with j from the averaged field.
pub fn continuity_residual(
    before: &SchroedingerVectorField,
    after: &SchroedingerVectorField,
    dt: f64,
    constants: &PhysicalConstants,
) -> f64 {
    let grid = *before.grid();
    let mid = SchroedingerVectorField::from_parts_unchecked(
        grid,
        before.phi_r().iter().zip(after.phi_r()).map(|(a, b)| 0.5 * (a + b)).collect(),
        before.phi_c().iter().zip(after.phi_c()).map(|(a, b)| 0.5 * (a + b)).collect(),
        0.5 * (before.time() + after.time()),
    );
    let div_j = diff::gradient(&flux(&mid, constants), grid.dx());
    let (rb, ra) = (before.density(), after.density());
    let n = grid.len();
    let sum: f64 = (1..n - 1).map(|i| ((ra[i] - rb[i]) / dt + div_j[i]).powi(2)).sum();
    (sum * grid.dx()).sqrt()
}

/// All local observables of a field.
pub fn observe(
    field: &SchroedingerVectorField,
    potential: &[f64],
    constants: &PhysicalConstants,
    relative_rho_floor: f64,
) -> ObservableFrame {
    let floor = relative_floor(field, relative_rho_floor);
    let v = local_velocity(field, constants, floor);
    let e = local_energy(field, potential, constants, floor);
    let theta = phase_angle(field, floor);
    ObservableFrame {
        time: field.time(),
        rho: field.density(),
        flux_j: flux(field, constants),
        v_local: v.values,
        e_local: e.values,
        theta: theta.theta,
        flagged: v.flagged,
    }
}

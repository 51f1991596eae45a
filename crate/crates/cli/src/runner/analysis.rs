use std::io::Write;

use dualpath_core::kernel::{compare_propagations, mc_convergence, ComparisonConfig};
use dualpath_core::scenarios::scaling::{
    hydrogen_scaling, scaling_stationarity_check, uncertainty_estimators, wiener_increments,
};
use dualpath_core::stats::moments;
use dualpath_core::{gaussian_packet, PotentialSpec};

use super::{tag, Run};
use crate::config::{HydrogenParams, KernelComparisonParams, UncertaintyParams};
use crate::error::{CliError, StageExt};
use crate::report::{Bound, Check};

pub(super) fn hydrogen(run: &mut Run, p: &HydrogenParams) -> Result<(), CliError> {
    run.tag(&[tag::HYDROGEN, tag::STATIONARITY]);
    let c = run.cfg.constants;
    let (hbar, m, e) = (c.hbar(), c.mass(), c.charge());
    let a0 = hbar * hbar / (m * e * e);
    let rydberg = m * e.powi(4) / (hbar * hbar);

    let r = hydrogen_scaling(p.z, p.n, &c).stage("hydrogen scaling")?;
    let (z, n) = (p.z as f64, p.n as f64);
    run.measure("radius", r.radius)?;
    run.measure("energy", r.energy)?;
    run.check(Check::new("radius", r.radius, Bound::Within { target: n * n * a0 / z, tolerance: p.identity_tolerance * a0 }));
    run.check(Check::new(
        "energy",
        r.energy,
        Bound::Within { target: -z * z * rydberg / (2.0 * n * n), tolerance: p.identity_tolerance * rydberg },
    ));

    let mut radius_err = 0.0_f64;
    let mut energy_err = 0.0_f64;
    let mut rows = Vec::new();
    for zi in 1..=p.identity_grid_max {
        for ni in 1..=p.identity_grid_max {
            let r = hydrogen_scaling(zi, ni, &c).stage("hydrogen scaling")?;
            let (zf, nf) = (zi as f64, ni as f64);
            radius_err = radius_err.max((r.radius * zf / (nf * nf) - a0).abs() / a0);
            energy_err = energy_err.max((r.energy * 2.0 * nf * nf / (zf * zf) + rydberg).abs() / rydberg);
            rows.push(r);
        }
    }
    run.check(Check::new("radius_identity_error", radius_err, Bound::AtMost { limit: p.identity_tolerance }));
    run.check(Check::new("energy_identity_error", energy_err, Bound::AtMost { limit: p.identity_tolerance }));
    run.artifact("hydrogen_levels.csv", |w| {
        writeln!(w, "z,n,radius,energy")?;
        for r in &rows {
            writeln!(w, "{},{},{:.17e},{:.17e}", r.z, r.n, r.radius, r.energy)?;
        }
        Ok(())
    })?;

    let st = scaling_stationarity_check(p.z, &c).stage("stationarity")?;
    run.measure("stationarity", st)?;
    run.check(Check::new("argmin_relative_error", st.relative_error, Bound::Below { limit: p.stationarity_tolerance }));
    run.check(Check::new("slope_at_argmin", st.slope_at_min.abs(), Bound::Below { limit: p.stationarity_tolerance }));
    run.check(Check::holds("energy_rises_to_zero_beyond_argmin", st.monotone_tail));
    Ok(())
}

pub(super) fn uncertainty(run: &mut Run, p: &UncertaintyParams) -> Result<(), CliError> {
    run.tag(&[tag::WIENER, tag::UNCERTAINTY]);
    let (c, seed) = (run.cfg.constants, run.cfg.master_seed);
    let k = p.std_errors;
    let rate = c.noise_variance_rate();
    for (label, dt) in [("dt", p.dt), ("quarter_dt", p.dt / 4.0)] {
        let inc = wiener_increments(p.n_increments, dt, &c, seed);
        let sq: Vec<f64> = inc.iter().map(|d| d * d / dt).collect();
        let r = moments(&sq);
        let u = uncertainty_estimators(&inc, dt, &c).stage("uncertainty")?;
        let step = moments(&inc.iter().map(|d| d.abs()).collect::<Vec<_>>());
        run.measure(&format!("{label}_variance_rate"), r)?;
        run.measure(&format!("{label}_products"), u)?;
        run.measure(&format!("{label}_mean_abs_step"), step)?;
        run.check(Check::new(
            format!("{label}_variance_rate"),
            r.mean,
            Bound::Within { target: rate, tolerance: k * r.std_error },
        ));
        run.check(Check::new(
            format!("{label}_pq_product"),
            u.pq_product,
            Bound::Within { target: c.hbar(), tolerance: k * u.pq_std_error },
        ));
        run.check(Check::new(
            format!("{label}_et_product"),
            u.et_product,
            Bound::Within { target: 0.5 * c.hbar(), tolerance: k * u.et_std_error },
        ));
    }
    // Δt → Δt/4 must halve the typical step.
    let full = moments(&wiener_increments(p.n_increments, p.dt, &c, seed).iter().map(|d| d.abs()).collect::<Vec<_>>());
    let quarter =
        moments(&wiener_increments(p.n_increments, p.dt / 4.0, &c, seed).iter().map(|d| d.abs()).collect::<Vec<_>>());
    let ratio = full.mean / quarter.mean;
    let ratio_se = ratio * ((full.std_error / full.mean).powi(2) + (quarter.std_error / quarter.mean).powi(2)).sqrt();
    run.measure("step_ratio", ratio)?;
    run.check(Check::new("step_halves_at_quarter_dt", ratio, Bound::Within { target: 2.0, tolerance: k * ratio_se }));
    Ok(())
}

pub(super) fn kernel_comparison(run: &mut Run, p: &KernelComparisonParams) -> Result<(), CliError> {
    run.tag(&[tag::SOLVER, tag::KERNEL_MC, tag::KERNEL_TRANSFER]);
    let cfg = run.cfg;
    let (g, c) = (cfg.grid, cfg.constants);
    let f0 = gaussian_packet(&g, p.center, p.width, p.momentum, &c).stage("packet")?;
    let potential = PotentialSpec::harmonic(p.omega, c.mass(), 0.0);
    let cc = ComparisonConfig { t_total: p.t_total, solver_dt: cfg.kernel_solver_dt, kernel: cfg.kernel };
    let rep = compare_propagations(&f0, &potential, &cc, &c).stage("kernel comparison")?;
    run.check(Check::new(
        "fraction_within_3_pooled_se",
        rep.fraction_within_3se,
        Bound::AtLeast { limit: p.min_fraction_within },
    ));
    // Reported only: the solver and the kernels propagate different equations.
    run.measure("solver_vs_transfer_l2", rep.solver_vs_transfer)?;
    run.measure("solver_vs_monte_carlo_l2", rep.solver_vs_monte_carlo)?;
    run.measure("transfer_vs_monte_carlo_l2", rep.transfer_vs_monte_carlo)?;
    run.measure("exit_fraction", rep.exit_fraction)?;
    run.json_artifact("comparison.json", &rep)?;

    let conv = mc_convergence(&f0, p.t_total, &potential, &cfg.kernel, &p.convergence_samples, &c).stage("convergence")?;
    run.measure("convergence_slope", conv.slope)?;
    run.check(Check::new(
        "error_vs_samples_slope",
        conv.slope,
        Bound::Within { target: p.slope_target, tolerance: p.slope_tolerance },
    ));
    run.artifact("convergence.csv", |w| {
        writeln!(w, "samples,l2_error,l2_std_error")?;
        for ((n, e), s) in conv.sample_counts.iter().zip(&conv.errors).zip(&conv.std_errors) {
            writeln!(w, "{n},{e:.17e},{s:.17e}")?;
        }
        Ok(())
    })?;
    Ok(())
}

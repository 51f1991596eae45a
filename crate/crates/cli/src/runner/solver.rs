use std::io::Write;

use dualpath_core::paths::{
    build_drift_frame, canonical_residual, coherent_state_bohmian, endpoint_histogram, evolve_ensemble,
    local_momentum_at, sample_initial_positions, solver_frames, DriftOptions, SdeConfig,
};
use dualpath_core::scenarios::analytic::{analytic_free_gaussian, CoherentStateSpec, GaussianOrbital};
use dualpath_core::seeding::{derive_seed, stage};
use dualpath_core::solver::{
    evolve, evolve_tracked, local_energy, local_velocity, observe, phase_angle, relative_floor, step, time_reverse,
    SolverConfig,
};
use dualpath_core::stats::{linear_fit, BinSpec};
use dualpath_core::{plane_wave_window, PotentialSpec, SchroedingerVectorField};

use super::{tag, Run};
use crate::config::{FreeGaussianParams, HarmonicParams, PlaneWaveParams};
use crate::error::{CliError, StageExt};
use crate::report::{Bound, Check};

fn wrap(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    a - tau * (a / tau).round()
}

fn normalized_density(f: &SchroedingerVectorField) -> Vec<f64> {
    let n = f.norm();
    f.density().iter().map(|r| r / n).collect()
}

pub(super) fn free_gaussian(run: &mut Run, p: &FreeGaussianParams) -> Result<(), CliError> {
    run.tag(&[tag::FIELD, tag::SOLVER, tag::CONSTANT_ROTATION, tag::TIME_REVERSAL, tag::SDE, tag::BOHMIAN]);
    let cfg = run.cfg;
    let (g, c) = (cfg.grid, cfg.constants);
    let (dt, n) = (cfg.solver.dt, cfg.solver.n_steps);
    let t = dt * n as f64;
    let free = PotentialSpec::Free;
    let orbital = GaussianOrbital::new(p.center, p.width, p.momentum);

    let f0 = analytic_free_gaussian(&g, 0.0, &orbital, &c).and_then(|f| f.normalize()).stage("initial field")?;
    let (f1, conservation) = evolve_tracked(&f0, &free, dt, n, &c).stage("solver")?;
    let exact = analytic_free_gaussian(&g, t, &orbital, &c).stage("closed form")?;
    let l2 = f1.l2_distance(&exact);
    run.measure("solver_vs_closed_form_l2", l2)?;
    run.measure("conservation", conservation)?;
    run.check(Check::new("solver_vs_closed_form_l2", l2, Bound::Below { limit: p.max_l2_error }));
    run.check(Check::new("norm_drift", conservation.max_norm_drift, Bound::Below { limit: p.max_norm_drift }));
    run.check(Check::new(
        "relative_energy_drift",
        conservation.max_relative_energy_drift,
        Bound::Below { limit: p.max_energy_drift },
    ));
    let header = f1.header(&c);
    run.artifact("field_initial.csv", |w| f0.write_csv(w))?;
    run.artifact("field_final.csv", |w| f1.write_csv(w))?;
    run.json_artifact("field_final.json", &header)?;
    let v = free.sample(&g).stage("potential")?;
    let obs = observe(&f1, &v, &c, cfg.solver.rho_floor);
    run.artifact("observables_final.csv", |w| obs.write_csv(&g, w))?;

    // Constant potential: same evolution turned rigidly by −V0 t/ħ.
    let v0 = p.constant_potential;
    let shifted = evolve(&f0, &PotentialSpec::Constant { value: v0 }, dt, n, &c).stage("constant potential")?;
    let rho1 = f1.density();
    let density_err = shifted.density().iter().zip(&rho1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let floor = relative_floor(&f1, 1e-6);
    let angle = -v0 * t / c.hbar();
    let angle_err = (0..g.len())
        .filter(|&i| rho1[i] > floor)
        .map(|i| {
            let turned = shifted.phi_c()[i].atan2(shifted.phi_r()[i]) - f1.phi_c()[i].atan2(f1.phi_r()[i]);
            wrap(turned - angle).abs()
        })
        .fold(0.0, f64::max);
    run.measure("constant_potential_density_error", density_err)?;
    run.measure("constant_potential_angle_error", angle_err)?;
    run.check(Check::new(
        "constant_potential_density_error",
        density_err,
        Bound::AtMost { limit: p.max_rotation_density_error },
    ));
    run.check(Check::new("constant_potential_angle_error", angle_err, Bound::Below { limit: 1e-9 }));

    // forward, reverse, forward, reverse
    let back = |f: &SchroedingerVectorField| -> Result<SchroedingerVectorField, CliError> {
        Ok(time_reverse(&evolve(&time_reverse(f), &free, dt, n, &c).stage("time reversal")?))
    };
    let b1 = back(&f1)?;
    let f2 = evolve(&b1, &free, dt, n, &c).stage("time reversal")?;
    let b2 = back(&f2)?;
    let round_trip = b2.l2_distance(&f0);
    run.measure("solver_round_trip_l2", round_trip)?;
    run.check(Check::new("solver_round_trip_l2", round_trip, Bound::Below { limit: p.max_round_trip_error }));

    // Paths guided by the co-evolving solver field.
    let sde = cfg.sde;
    let per_frame = (sde.dt / dt).round() as usize;
    let frames = |start: SchroedingerVectorField| {
        solver_frames(start, &free, dt, per_frame, sde.drift_options(), c).stage("solver frames")
    };
    let initial = sample_initial_positions(&g, &f0.density(), sde.n_paths, sde.master_seed).stage("initial positions")?;
    let sd_t = orbital.density_width(t, &c);
    let mean_t = p.center + p.momentum / c.mass() * t;
    let bins_t = BinSpec::new((mean_t - 6.0 * sd_t).max(g.x_min()), (mean_t + 6.0 * sd_t).min(g.x_max()), p.histogram_bins)
        .stage("histogram")?;
    let reference_t = bins_t.bin_masses(&g, &normalized_density(&f1));

    let bohm = evolve_ensemble(&initial, &mut frames(f0.clone())?, &sde.noise_off(), &c).stage("noise-off ensemble")?;
    let transport = endpoint_histogram(&bohm.endpoints, bins_t, &reference_t).stage("histogram")?;
    run.measure("noise_off_manifest", bohm.manifest())?;
    run.measure("noise_off_transport_l1", transport.l1)?;
    run.measure("noise_off_sampling_baseline", transport.sampling_baseline)?;
    run.check(Check::new("noise_off_transport_l1", transport.l1, Bound::Below { limit: p.max_transport_l1 }));
    run.artifact("histogram_noise_off.csv", |w| transport.write_csv(w))?;
    run.artifact("endpoints_noise_off.csv", |w| bohm.write_endpoints_csv(w))?;
    if cfg.output.path_dump_cap > 0 && cfg.sde.record_every > 0 {
        run.artifact("paths_noise_off.csv", |w| bohm.write_paths_csv(cfg.output.path_dump_cap, w))?;
    }

    // Noise-on there and back: the start density is not recovered.
    let forward = evolve_ensemble(&initial, &mut frames(f0.clone())?, &sde, &c).stage("noise-on ensemble")?;
    let back_cfg = SdeConfig { master_seed: derive_seed(sde.master_seed, stage::PATH_NOISE, u64::MAX), ..sde };
    let returned =
        evolve_ensemble(&forward.endpoints, &mut frames(time_reverse(&f1))?, &back_cfg, &c).stage("reversed ensemble")?;
    let bins_0 = BinSpec::new(p.center - 6.0 * p.width, p.center + 6.0 * p.width, p.histogram_bins).stage("histogram")?;
    let reference_0 = bins_0.bin_masses(&g, &normalized_density(&f0));
    let rt = endpoint_histogram(&returned.endpoints, bins_0, &reference_0).stage("histogram")?;
    run.measure("noise_on_round_trip_l1", rt.l1)?;
    run.measure("noise_on_round_trip_baseline", rt.sampling_baseline)?;
    run.measure("noise_on_manifest", forward.manifest())?;
    run.check(Check::new(
        "noise_on_round_trip_l1_over_baseline",
        rt.l1 / rt.sampling_baseline,
        Bound::Above { limit: p.irreversibility_factor },
    ));
    run.artifact("histogram_round_trip.csv", |w| rt.write_csv(w))?;
    Ok(())
}

pub(super) fn harmonic(run: &mut Run, p: &HarmonicParams) -> Result<(), CliError> {
    run.tag(&[tag::FIELD, tag::SOLVER, tag::BOHMIAN, tag::CANONICAL]);
    let cfg = run.cfg;
    let (g, c) = (cfg.grid, cfg.constants);
    let spec = CoherentStateSpec { omega: p.omega, center: p.center, q0: p.q0, p0: p.p0 };
    let (dt, n) = (cfg.solver.dt, cfg.solver.n_steps);

    let f0 = spec.field(&g, 0.0, &c).stage("coherent state")?;
    let potential = spec.potential(&c);
    let f1 = step(&f0, &potential, &SolverConfig::new(dt, 1), &c).stage("solver")?;
    let residual = canonical_residual(&f0, &f1, &potential, dt, &c).stage("force law")?;
    run.measure("force_law_residual_l2", residual.l2)?;
    run.measure("force_density_l2", residual.force_density_l2)?;

    let path = coherent_state_bohmian(&spec, &g, dt, n, &c).stage("guided path")?;
    run.measure("path_max_error", path.max_error)?;
    run.measure("path_final_error", path.final_error)?;
    run.measure("run_time", dt * n as f64)?;
    run.check(Check::new("guided_path_vs_classical_max_error", path.max_error, Bound::Below { limit: p.max_path_error }));
    let stride = (n / 2000).max(1);
    run.artifact("guided_path.csv", |w| {
        writeln!(w, "step,time,x,classical_x")?;
        for (k, (x, q)) in path.path.iter().zip(&path.oracle).enumerate().step_by(stride) {
            writeln!(w, "{k},{:.17e},{x:.17e},{q:.17e}", k as f64 * dt)?;
        }
        Ok(())
    })?;
    Ok(())
}

pub(super) fn plane_wave(run: &mut Run, p: &PlaneWaveParams) -> Result<(), CliError> {
    run.tag(&[tag::FIELD, tag::LOCAL_OBSERVABLES, tag::CALIBRATION, tag::SDE]);
    let cfg = run.cfg;
    let (g, c) = (cfg.grid, cfg.constants);
    let [a, b] = p.window;
    let f = plane_wave_window(&g, p.momentum, (a, b), p.phase, &c).stage("plane wave")?;
    let floor = relative_floor(&f, cfg.solver.rho_floor);
    let inner: Vec<usize> = (0..g.len()).filter(|&i| g.x(i) >= a + 2.0 * g.dx() && g.x(i) <= b - 2.0 * g.dx()).collect();

    let speed = p.momentum / c.mass();
    let energy = p.momentum * p.momentum / (2.0 * c.mass());
    let k = p.momentum / c.hbar();
    let rel = |x: f64, want: f64| (x - want).abs() / want.abs();

    let vel = local_velocity(&f, &c, floor);
    let drift = build_drift_frame(&f, &DriftOptions::default(), &c);
    let e = local_energy(&f, &PotentialSpec::Free.sample(&g).stage("potential")?, &c, floor);
    let theta = phase_angle(&f, floor);
    let mut velocity_err = 0.0_f64;
    let mut drift_err = 0.0_f64;
    let mut energy_err = 0.0_f64;
    let mut momentum_err = 0.0_f64;
    for &i in &inner {
        velocity_err = velocity_err.max(rel(vel.values[i], speed));
        drift_err = drift_err.max(rel(drift.alpha_real[i], speed));
        energy_err = energy_err.max(rel(e.values[i], energy));
        momentum_err = momentum_err.max(rel(local_momentum_at(&f, i, &c).stage("local momentum")?, p.momentum));
    }
    let xs: Vec<f64> = inner.iter().map(|&i| g.x(i)).collect();
    let th: Vec<f64> = inner.iter().map(|&i| theta.theta[i]).collect();
    let (slope, intercept) = linear_fit(&xs, &th);
    let slope_err = rel(slope, k);
    let tol = Bound::Below { limit: p.max_relative_error };

    run.measure("momentum_calibration", c.momentum_calibration())?;
    run.measure("time_calibration", c.time_calibration())?;
    run.measure("phase_slope", slope)?;
    run.measure("phase_intercept", wrap(intercept - p.phase))?;
    run.measure("phase_resolution_warnings", theta.resolution_warnings)?;
    run.check(Check::new("local_velocity_relative_error", velocity_err, tol));
    run.check(Check::new("drift_relative_error", drift_err, tol));
    run.check(Check::new("local_energy_relative_error", energy_err, tol));
    run.check(Check::new("local_momentum_relative_error", momentum_err, tol));
    run.check(Check::new("phase_slope_relative_error", slope_err, tol));
    run.artifact("plane_wave.csv", |w| f.write_csv(w))?;
    Ok(())
}

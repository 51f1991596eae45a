use std::io::Write;

use dualpath_core::paths::{
    analytic_frames, analytic_pair_frames, classical_limit_run, endpoint_histogram, evolve_ensemble, evolve_pairs,
    sample_initial_positions, sample_pair_positions, ClassicalLimitSpec, EndpointReport,
};
use dualpath_core::scenarios::analytic::{double_slit_field, CoherentStateSpec, DoubleSlitSpec, GaussianOrbital};
use dualpath_core::scenarios::entangled::{
    channel_statistics, dissociation_run, entangled_pair_field, exchange_defects, two_particle_sde_run, Channel,
    ChannelPoint, ChannelStatistics, DissociationSpec, EntangledPairSpec, Region, TwoParticleRunSpec,
};
use dualpath_core::scenarios::fringes::{detect_minima, fringe_report, ExtremumFilter, FringeReport};
use dualpath_core::seeding::{derive_seed, stage};
use dualpath_core::stats::BinSpec;
use dualpath_core::{Grid1D, Grid2D};

use super::{tag, Run};
use crate::config::{ClassicalLimitParams, DoubleSlitParams, EntanglementParams, H2PlusParams};
use crate::error::{CliError, StageExt};
use crate::report::{Bound, Check};

/// Minima of a histogram inside |x| ≤ core, matched against the closed form.
fn histogram_minima(rep: &EndpointReport, filter: &ExtremumFilter, expected: &[f64], core: f64, bins: f64) -> Result<FringeReport, CliError> {
    let b = rep.histogram.bins;
    let found: Vec<f64> = detect_minima(&rep.histogram.masses(), filter)
        .stage("fringe detection")?
        .into_iter()
        .map(|i| b.center(i))
        .filter(|x| x.abs() <= core)
        .collect();
    fringe_report(expected, &found, bins * b.width()).stage("fringe matching")
}

pub(super) fn double_slit(run: &mut Run, p: &DoubleSlitParams) -> Result<(), CliError> {
    run.tag(&[tag::FIELD, tag::SDE, tag::BOHMIAN, tag::FRINGES]);
    let cfg = run.cfg;
    let (g, c, sde) = (cfg.grid, cfg.constants, cfg.sde);
    let t = sde.total_time();
    let spec = DoubleSlitSpec {
        slit_separation: p.slit_separation,
        slit_width: p.slit_width,
        forward_momentum: p.forward_momentum,
        screen_time: t,
    };
    let f0 = double_slit_field(&g, &spec, 0.0, &c).stage("slit field")?;
    let bins = BinSpec::new(p.histogram_range[0], p.histogram_range[1], p.histogram_bins).stage("histogram")?;
    let reference = bins.bin_masses_fn(|x| spec.amplitude(x, t, &c).norm_sqr());
    let envelope = GaussianOrbital::new(0.0, p.slit_width, 0.0).density_width(t, &c);
    let core = (p.core_widths * envelope).min(p.histogram_range[1]).min(-p.histogram_range[0]);
    let expected = spec.minima(t, -core, core, &c);
    let filter = ExtremumFilter { window: p.extremum_window, relative_depth: p.extremum_depth };
    run.measure("screen_time", t)?;
    run.measure("fringe_spacing", spec.fringe_spacing(t, &c))?;
    run.measure("expected_minima", &expected)?;

    // The closed-form density itself, on the grid.
    let f_t = double_slit_field(&g, &spec, t, &c).stage("slit field")?;
    let grid_minima: Vec<f64> = detect_minima(&f_t.density(), &ExtremumFilter { window: 1, relative_depth: 0.0 })
        .stage("fringe detection")?
        .into_iter()
        .map(|i| g.x(i))
        .filter(|x| x.abs() <= core)
        .collect();
    let on_grid = fringe_report(&expected, &grid_minima, g.dx()).stage("fringe matching")?;
    run.check(Check::holds("closed_form_minima_within_one_cell", on_grid.all_matched && on_grid.spurious == 0));

    let initial = sample_initial_positions(&g, &f0.density(), sde.n_paths, sde.master_seed).stage("initial positions")?;
    let spacing = sde.dt * cfg.frame_every as f64;
    for (label, noise_on, minima_bins) in [("noise_on", true, p.noise_on_minima_bins), ("noise_off", false, p.noise_off_minima_bins)] {
        let mut frames =
            analytic_frames(0.0, spacing, sde.drift_options(), c, |s| double_slit_field(&g, &spec, s, &c)).stage("frames")?;
        let config = if noise_on { sde } else { sde.noise_off() };
        let ens = evolve_ensemble(&initial, &mut frames, &config, &c).stage("ensemble")?;
        let rep = endpoint_histogram(&ens.endpoints, bins, &reference).stage("histogram")?;
        let fr = histogram_minima(&rep, &filter, &expected, core, minima_bins)?;
        run.measure(&format!("{label}_l1"), rep.l1)?;
        run.measure(&format!("{label}_chi_square"), rep.chi_square)?;
        run.measure(&format!("{label}_sampling_baseline"), rep.sampling_baseline)?;
        run.measure(&format!("{label}_manifest"), ens.manifest())?;
        run.measure(&format!("{label}_minima"), &fr)?;
        run.check(Check::new(format!("{label}_histogram_l1"), rep.l1, Bound::Below { limit: p.max_l1 }));
        run.check(Check::holds(format!("{label}_minima_within_{minima_bins}_bins"), fr.all_matched && fr.spurious == 0));
        run.artifact(&format!("histogram_{label}.csv"), |w| rep.write_csv(w))?;
        run.artifact(&format!("endpoints_{label}.csv"), |w| ens.write_endpoints_csv(w))?;
    }
    Ok(())
}

pub(super) fn classical_limit(run: &mut Run, p: &ClassicalLimitParams) -> Result<(), CliError> {
    run.tag(&[tag::SDE, tag::SOLVER, tag::CLASSICAL_LIMIT]);
    let cfg = run.cfg;
    let spec = ClassicalLimitSpec {
        coherent: CoherentStateSpec { omega: p.omega, center: p.center, q0: p.q0, p0: p.p0 },
        periods: p.periods,
        dt: cfg.sde.dt,
        n_paths: cfg.sde.n_paths,
        master_seed: cfg.master_seed,
        points_per_wavelength: p.points_per_wavelength,
    };
    let report = classical_limit_run(&spec, &p.hbar_scales, &cfg.constants).stage("classical limit")?;
    run.measure("deviations", report.entries.iter().map(|e| e.max_deviation).collect::<Vec<_>>())?;
    run.measure("entries", &report.entries)?;
    run.check(Check::holds("deviation_decreases_with_hbar", report.monotone));
    run.artifact("classical_limit.csv", |w| {
        writeln!(w, "hbar,width,grid_points,max_deviation,final_deviation,final_std_error,flagged_steps")?;
        for e in &report.entries {
            writeln!(
                w,
                "{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e},{}",
                e.hbar,
                e.width,
                e.grid.len(),
                e.max_deviation,
                e.final_deviation,
                e.final_std_error,
                e.flagged_steps
            )?;
        }
        Ok(())
    })?;
    Ok(())
}

/// Left and right half-lines of the axis, covering every reachable position.
fn halves(g: &Grid1D) -> (Region, Region) {
    (Region { lo: g.x_min(), hi: 0.0 }, Region { lo: 0.0, hi: g.x_max() + g.dx() })
}

fn channel_checks<P: ChannelPoint>(run: &mut Run, endpoints: &[P], g: &Grid1D) -> Result<ChannelStatistics, CliError> {
    let (a, b) = halves(g);
    let s = channel_statistics(endpoints, &a, &b).stage("channels")?;
    let swapped = channel_statistics(endpoints, &b, &a).stage("channels")?;
    run.check(Check::holds(
        "region_swap_exchanges_channels",
        swapped.frac_ab == s.frac_ba && swapped.frac_ba == s.frac_ab,
    ));
    run.check(Check::holds("channel_fractions_sum_to_one", s.ab + s.ba + s.undecided == s.n));
    run.measure("channels", s)?;
    Ok(s)
}

pub(super) fn entanglement(run: &mut Run, p: &EntanglementParams) -> Result<(), CliError> {
    run.tag(&[tag::ENTANGLED, tag::SDE, tag::CHANNELS]);
    let cfg = run.cfg;
    let (g, c, sde) = (cfg.grid, cfg.constants, cfg.sde);
    let h = 0.5 * p.separation;
    let pair = EntangledPairSpec {
        orbital_a: GaussianOrbital::new(-h, p.width, -p.momentum),
        orbital_b: GaussianOrbital::new(h, p.width, p.momentum),
    };
    let grid = Grid2D::square(g);
    let t = sde.total_time();
    let mut worst = [0.0_f64; 3];
    for s in [0.0, 0.25 * t, 0.5 * t, t] {
        let f = entangled_pair_field(&grid, &pair, s, &c).stage("entangled field")?;
        let d = exchange_defects(&f).stage("exchange symmetry")?;
        for (w, v) in worst.iter_mut().zip([d.antisymmetry, d.density_symmetry, d.diagonal_density]) {
            *w = w.max(v);
        }
    }
    let tol = Bound::AtMost { limit: p.symmetry_tolerance };
    run.check(Check::new("antisymmetry_defect", worst[0], tol));
    run.check(Check::new("density_symmetry_defect", worst[1], tol));
    run.check(Check::new("diagonal_density", worst[2], tol));

    let spec = TwoParticleRunSpec { pair, axis: g, frame_every: cfg.frame_every };
    let ens = two_particle_sde_run(&spec, &sde, &c).stage("pair ensemble")?;
    let s = channel_checks(run, &ens.endpoints, &g)?;
    run.check(Check::new("frac_ab", s.frac_ab, Bound::Between { lo: p.frac_ab_range[0], hi: p.frac_ab_range[1] }));
    run.check(Check::new("frac_undecided", s.frac_undecided, Bound::Below { limit: p.max_undecided }));
    run.measure("noise_on_counters", ens.counters)?;
    run.artifact("pair_endpoints.csv", |w| {
        writeln!(w, "pair,seed,x1_start,x2_start,x1,x2")?;
        for (i, ((a, b), s)) in ens.initial.iter().zip(&ens.endpoints).zip(&ens.path_seeds).enumerate() {
            writeln!(w, "{i},{s},{:.17e},{:.17e},{:.17e},{:.17e}", a[0], a[1], b[0], b[1])?;
        }
        Ok(())
    })?;

    // Noise off: the node on the diagonal is never crossed and each pair keeps its order.
    let f0 = entangled_pair_field(&grid, &pair, 0.0, &c).stage("entangled field")?;
    let seed = derive_seed(cfg.master_seed, stage::INITIAL_POSITIONS, 1);
    let initial = sample_pair_positions(&f0, p.noise_off_pairs, seed).stage("pair sampling")?;
    let mut frames = analytic_pair_frames(0.0, sde.dt * cfg.frame_every as f64, sde.drift_options(), c, |s| {
        entangled_pair_field(&grid, &pair, s, &c)
    })
    .stage("pair frames")?;
    let off_cfg = dualpath_core::paths::SdeConfig { n_paths: p.noise_off_pairs, ..sde.noise_off() };
    let off = evolve_pairs(&initial, &mut frames, &off_cfg, &c).stage("noise-off pairs")?;
    let (a, b) = halves(&g);
    let misordered = off
        .initial
        .iter()
        .zip(&off.endpoints)
        .filter(|(x0, x)| {
            let want = if x0[0] < x0[1] { Channel::Ab } else { Channel::Ba };
            let got = x.channel(&a, &b);
            got != Channel::Undecided && got != want
        })
        .count();
    run.measure("noise_off_diagonal_crossings", off.diagonal_crossings)?;
    run.measure("noise_off_misordered", misordered)?;
    run.check(Check::holds("noise_off_no_diagonal_crossing", off.diagonal_crossings == 0));
    run.check(Check::holds("noise_off_split_follows_initial_order", misordered == 0));
    Ok(())
}

pub(super) fn h2plus(run: &mut Run, p: &H2PlusParams) -> Result<(), CliError> {
    run.tag(&[tag::SDE, tag::CHANNELS]);
    let cfg = run.cfg;
    let spec = DissociationSpec {
        separation: p.separation,
        width: p.width,
        recoil_momentum: p.recoil_momentum,
        axis: cfg.grid,
        frame_every: cfg.frame_every,
    };
    let ens = dissociation_run(&spec, &cfg.sde, &cfg.constants).stage("dissociation")?;
    let s = channel_checks(run, &ens.endpoints, &cfg.grid)?;
    run.check(Check::new(
        "frac_ab",
        s.frac_ab,
        Bound::Within { target: 0.5, tolerance: p.std_errors * s.frac_ab_std_error },
    ));
    run.check(Check::new("frac_undecided", s.frac_undecided, Bound::Below { limit: p.max_undecided }));
    run.measure("manifest", ens.manifest())?;
    run.artifact("endpoints.csv", |w| ens.write_endpoints_csv(w))?;
    Ok(())
}

use super::*;
use crate::constants::PhysicalConstants;
use crate::error::Error;
use crate::field::{gaussian_packet, plane_wave_window, SchroedingerVectorField};
use crate::grid::Grid1D;
use crate::potential::PotentialSpec;
use crate::scenarios::analytic::{analytic_free_gaussian, CoherentStateSpec, GaussianOrbital};
use crate::seeding::stream_rng;
use crate::solver::{phase_angle, Propagator};
use crate::stats::{moments, variance_std_error, BinSpec};

fn unit() -> PhysicalConstants {
    PhysicalConstants::new(1.0, 1.0).unwrap()
}

fn uniform_frame(grid: Grid1D, v: f64) -> DriftFieldFrame {
    let n = grid.len();
    DriftFieldFrame {
        grid,
        time: 0.0,
        alpha_real: vec![v; n],
        alpha_imag: vec![0.0; n],
        flags: vec![false; n],
        clamped: vec![false; n],
        clamp_value: f64::INFINITY,
    }
}

#[test]
fn packet_drift_is_group_velocity() {
    let c = PhysicalConstants::new(1.0, 2.0).unwrap();
    let grid = Grid1D::new(-10.0, 10.0, 2001).unwrap();
    let (q0, s, p0) = (0.5, 1.0, 1.5);
    let f = gaussian_packet(&grid, q0, s, p0, &c).unwrap();
    let frame = build_drift_frame(&f, &DriftOptions::default(), &c);
    for (i, x) in grid.nodes().enumerate() {
        if (x - q0).abs() < 4.0 * s {
            assert!(!frame.flags[i]);
            assert!((frame.alpha_real[i] - p0 / c.mass()).abs() < 1e-4 * p0, "{x}: {}", frame.alpha_real[i]);
        }
    }
}

#[test]
fn real_field_has_only_osmotic_part() {
    let c = unit();
    let grid = Grid1D::new(-10.0, 10.0, 2001).unwrap();
    let s = 1.2;
    let f = gaussian_packet(&grid, 0.0, s, 0.0, &c).unwrap();
    let frame = build_drift_frame(&f, &DriftOptions::default(), &c);
    assert!(frame.alpha_real.iter().all(|&v| v == 0.0));
    for (i, x) in grid.nodes().enumerate() {
        if x.abs() < 3.0 * s {
            // ρ ∝ exp(−x²/2s²) ⇒ −D ρ'/ρ = D x / s².
            assert!((frame.alpha_imag[i] - c.diffusion() * x / (s * s)).abs() < 1e-4, "{x}");
        }
    }
    assert!(frame.alpha_imag.iter().any(|v| v.abs() > 0.1));
}

#[test]
fn plane_wave_window_drift() {
    let c = unit();
    let grid = Grid1D::new(-10.0, 10.0, 4001).unwrap();
    let p0 = 2.0;
    let f = plane_wave_window(&grid, p0, (-4.0, 4.0), 0.3, &c).unwrap();
    let frame = build_drift_frame(&f, &DriftOptions::default(), &c);
    for (i, x) in grid.nodes().enumerate() {
        if x.abs() < 3.9 {
            assert!((frame.alpha_real[i] - p0).abs() < 1e-4 * p0);
        }
        if x.abs() > 4.1 {
            assert!(frame.flags[i]);
        }
    }
}

#[test]
fn drift_identity_holds_at_unflagged_nodes() {
    let c = PhysicalConstants::new(0.7, 1.3).unwrap();
    let grid = Grid1D::new(-8.0, 8.0, 801).unwrap();
    let f = gaussian_packet(&grid, -1.0, 0.8, 0.9, &c).unwrap().rotated(0.4);
    let frame = build_drift_frame(&f, &DriftOptions::default(), &c);
    let p = local_momentum_density(&f, &c);
    let rho = f.density();
    for i in 0..grid.len() {
        if !frame.flags[i] {
            let lhs = frame.alpha_real[i] * rho[i] * c.mass();
            assert!((lhs - p[i]).abs() <= 1e-12 * p[i].abs().max(1e-300));
        }
    }
}

#[test]
fn clamp_limits_drift_and_is_counted() {
    let c = unit();
    let grid = Grid1D::new(-10.0, 10.0, 2001).unwrap();
    let f = gaussian_packet(&grid, 0.0, 1.0, 3.0, &c).unwrap();
    let frame = build_drift_frame(&f, &DriftOptions { rho_floor: 1e-12, clamp_value: Some(2.0) }, &c);
    assert!(frame.alpha_real.iter().all(|v| v.abs() <= 2.0));
    assert!(frame.clamped_count() > 0);
    let free = build_drift_frame(&f, &DriftOptions::default(), &c);
    assert!((default_clamp(&free) - DEFAULT_CLAMP_FACTOR * free.max_speed()).abs() < 1e-12);
}

#[test]
fn drift_interpolation_rules() {
    let grid = Grid1D::new(0.0, 1.0, 11).unwrap();
    let mut frame = uniform_frame(grid, 0.0);
    frame.alpha_real = grid.nodes().map(|x| 3.0 * x * x).collect();
    let at = |f: &DriftFieldFrame, x| drift_at(f, x).unwrap();
    assert_eq!(at(&frame, 0.3).velocity, frame.alpha_real[3]);
    let mid = at(&frame, 0.45).velocity;
    assert!((mid - 0.5 * (frame.alpha_real[4] + frame.alpha_real[5])).abs() < 1e-15);
    frame.flags[7] = true;
    let s = at(&frame, 0.65);
    assert!(s.flagged && s.velocity == 0.0);
    assert!(matches!(drift_at(&frame, 1.5), Err(Error::OutOfDomain { .. })));
}

#[test]
fn euler_maruyama_basic_cases() {
    let c = PhysicalConstants::new(1.0, 0.5).unwrap();
    let grid = Grid1D::new(-100.0, 100.0, 101).unwrap();
    let mut rng = stream_rng(3, 0, 0);
    let still = uniform_frame(grid, 0.0);
    assert_eq!(euler_maruyama_step(1.25, &still, 0.01, false, &mut rng, &c).unwrap().x, 1.25);
    let moving = uniform_frame(grid, 0.75);
    let out = euler_maruyama_step(1.25, &moving, 0.01, false, &mut rng, &c).unwrap();
    assert_eq!(out.x, 1.25 + 0.75 * 0.01);

    let dt = 0.02;
    let inc: Vec<f64> = (0..100_000).map(|_| euler_maruyama_step(0.0, &still, dt, true, &mut rng, &c).unwrap().x).collect();
    let m = moments(&inc);
    let expected = c.noise_variance_rate() * dt;
    assert!((m.variance - expected).abs() < 3.0 * variance_std_error(&inc));
}

#[test]
fn reflection_keeps_paths_inside() {
    assert_eq!(reflect(1.2, 0.0, 1.0), (0.8, 1));
    assert_eq!(reflect(-0.25, 0.0, 1.0), (0.25, 1));
    let (x, n) = reflect(2.5, 0.0, 1.0);
    assert!((x - 0.5).abs() < 1e-15 && n == 2);
}

fn free_stream(
    orbital: GaussianOrbital,
    grid: Grid1D,
    spacing: f64,
    c: PhysicalConstants,
) -> FrameStream<DriftFieldFrame, impl FnMut(usize) -> crate::error::Result<DriftFieldFrame>> {
    analytic_frames(0.0, spacing, DriftOptions::default(), c, move |t| analytic_free_gaussian(&grid, t, &orbital, &c)).unwrap()
}

#[test]
fn noise_off_ensemble_mean_moves_with_group_velocity() {
    let c = unit();
    let grid = Grid1D::new(-12.0, 16.0, 2801).unwrap();
    let orbital = GaussianOrbital::new(-2.0, 0.7, 1.5);
    let f0 = analytic_free_gaussian(&grid, 0.0, &orbital, &c).unwrap();
    let n = 20_000;
    let initial = stratified_initial_positions(&grid, &f0.density(), n).unwrap();
    let cfg = SdeConfig { record_every: 100, ..SdeConfig::new(1e-3, 2000, n, 1).noise_off() };
    let mut frames = free_stream(orbital, grid, 1e-3, c);
    let ens = evolve_ensemble(&initial, &mut frames, &cfg, &c).unwrap();
    assert_eq!(ens.times.len(), 21);
    assert!(ens.times.windows(2).all(|w| w[1] > w[0]));
    for (t, row) in ens.times.iter().zip(&ens.positions) {
        let mean = row.iter().sum::<f64>() / n as f64;
        assert!((mean - (-2.0 + 1.5 * t)).abs() < 1e-3, "t={t}: {mean}");
    }
}

#[test]
fn ensembles_are_reproducible() {
    let c = unit();
    let grid = Grid1D::new(-10.0, 10.0, 401).unwrap();
    let orbital = GaussianOrbital::new(0.0, 1.0, 0.5);
    let cfg = SdeConfig::new(0.01, 50, 64, 99);
    let initial = sample_initial_positions(&grid, &analytic_free_gaussian(&grid, 0.0, &orbital, &c).unwrap().density(), 64, 99).unwrap();
    let run = || evolve_ensemble(&initial, &mut free_stream(orbital, grid, 0.01, c), &cfg, &c).unwrap();
    let a = run();
    assert_eq!(a, run());
    #[cfg(feature = "parallel")]
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        assert_eq!(pool.install(run), a);
    }
    let single = SdeConfig { n_paths: 1, ..cfg };
    let one = || evolve_ensemble(&initial[..1], &mut free_stream(orbital, grid, 0.01, c), &single, &c).unwrap();
    assert_eq!(one().endpoints, one().endpoints);
    assert_eq!(one().endpoints[0], a.endpoints[0]);
}

#[test]
fn frame_coverage_is_checked() {
    let c = unit();
    let grid = Grid1D::new(-10.0, 10.0, 401).unwrap();
    let fields: Vec<SchroedingerVectorField> =
        (0..5).map(|k| gaussian_packet(&grid, 0.0, 1.0, 0.0, &c).unwrap().with_time(0.1 * k as f64)).collect();
    let mut frames = RecordedFrames::from_fields(&fields, &DriftOptions::default(), &c).unwrap();
    let ok = SdeConfig::new(0.01, 40, 4, 1);
    assert!(evolve_ensemble(&[0.0; 4], &mut frames, &ok, &c).is_ok());
    let too_long = SdeConfig::new(0.01, 41, 4, 1);
    assert!(matches!(evolve_ensemble(&[0.0; 4], &mut frames, &too_long, &c), Err(Error::FrameMismatch(_))));
    let too_sparse = SdeConfig::new(0.005, 10, 4, 1);
    assert!(matches!(evolve_ensemble(&[0.0; 4], &mut frames, &too_sparse, &c), Err(Error::FrameMismatch(_))));
    let mut bad = fields.clone();
    bad[2] = bad[2].clone().with_time(0.25);
    assert!(matches!(RecordedFrames::from_fields(&bad, &DriftOptions::default(), &c), Err(Error::FrameMismatch(_))));
}

#[test]
fn bohmian_paths_in_eigenstate_stand_still() {
    let c = unit();
    let grid = Grid1D::new(-8.0, 8.0, 3201).unwrap();
    let v = PotentialSpec::harmonic(1.0, 1.0, 0.0);
    let f0 = gaussian_packet(&grid, 0.0, (0.5f64).sqrt(), 0.0, &c).unwrap();
    let mut frames = solver_frames(f0, &v, 0.01, 1, DriftOptions::default(), c).unwrap();
    let path = bohmian_trajectory(0.7, &mut frames, 0.01, 300, &c).unwrap();
    // The sampled Gaussian is an eigenstate of the continuum operator only, so
    // the discrete flow carries a residual velocity of order dx².
    let worst = path.iter().map(|x| (x - 0.7).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-5, "{worst}");
}

#[test]
fn bohmian_matches_single_noise_off_path_and_keeps_order() {
    let c = unit();
    let grid = Grid1D::new(-12.0, 12.0, 1201).unwrap();
    let orbital = GaussianOrbital::new(0.0, 0.5, 0.0);
    let path = bohmian_trajectory(0.3, &mut free_stream(orbital, grid, 1e-3, c), 1e-3, 1000, &c).unwrap();
    let ens = evolve_ensemble(&[0.3], &mut free_stream(orbital, grid, 1e-3, c), &SdeConfig::new(1e-3, 1000, 1, 5).noise_off(), &c).unwrap();
    assert_eq!(*path.last().unwrap(), ens.endpoints[0]);
    // Free expansion: x(t) = x0 σ(t)/σ0.
    let expected = 0.3 * orbital.density_width(1.0, &c) / orbital.density_width(0.0, &c);
    assert!((path.last().unwrap() - expected).abs() < 1e-3, "{} vs {expected}", path.last().unwrap());

    let starts = [-1.0, -0.4, 0.0, 0.2, 0.9];
    let cfg = SdeConfig { record_every: 1, ..SdeConfig::new(0.01, 100, 5, 5).noise_off() };
    let ens = evolve_ensemble(&starts, &mut free_stream(orbital, grid, 0.01, c), &cfg, &c).unwrap();
    for row in &ens.positions {
        assert!(row.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn histogram_of_exact_samples_is_within_baseline() {
    let grid = Grid1D::new(-6.0, 6.0, 1201).unwrap();
    let rho: Vec<f64> = grid.nodes().map(|x| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()).collect();
    let xs = sample_initial_positions(&grid, &rho, 100_000, 4).unwrap();
    let bins = BinSpec::new(-5.0, 5.0, 64).unwrap();
    let reference = bins.bin_masses_fn(|x| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt());
    let rep = endpoint_histogram(&xs, bins, &reference).unwrap();
    assert!(rep.l1 < 0.03, "{}", rep.l1);
    let single = endpoint_histogram(&[0.1], bins, &reference).unwrap();
    assert_eq!(single.histogram.counts.iter().filter(|&&c| c > 0).count(), 1);
    let mut csv = Vec::new();
    rep.write_csv(&mut csv).unwrap();
    assert!(String::from_utf8(csv).unwrap().starts_with("bin_center,count,reference_density\n"));
    assert!(endpoint_histogram(&[], bins, &reference).is_err());
}

#[test]
fn local_momentum_identities() {
    let c = unit();
    let grid = Grid1D::new(-10.0, 10.0, 4001).unwrap();
    let (q0, p0) = (1.0, 0.8);
    let f = gaussian_packet(&grid, q0, 1.0, p0, &c).unwrap();
    let center = grid.nearest(q0);
    let rho = f.density();
    assert!((local_momentum_at(&f, center, &c).unwrap() - rho[center] * p0).abs() < 1e-4 * rho[center] * p0);
    let real = gaussian_packet(&grid, q0, 1.0, 0.0, &c).unwrap();
    assert!(local_momentum_density(&real, &c).iter().all(|&p| p == 0.0));

    let g = gaussian_packet(&grid, 0.0, 1.0, 0.0, &c).unwrap();
    let chirped = SchroedingerVectorField::from_fn(grid, 0.0, |x| {
        let a = g.grid().interpolate(g.phi_r(), x);
        let th = 0.3 * x * x;
        (a * th.cos(), a * th.sin())
    })
    .unwrap();
    let theta = phase_angle(&chirped, 1e-12);
    let p = local_momentum_density(&chirped, &c);
    let rho = chirped.density();
    for i in 1..grid.len() - 1 {
        if grid.x(i).abs() < 3.0 {
            let grad = (theta.theta[i + 1] - theta.theta[i - 1]) / (2.0 * grid.dx());
            assert!((p[i] - c.hbar() * rho[i] * grad).abs() < 1e-5, "{}", grid.x(i));
        }
    }
    assert!(local_momentum_at(&f, grid.len(), &c).is_err());
}

#[test]
fn canonical_residual_cases() {
    let c = unit();
    let grid = Grid1D::new(-10.0, 10.0, 2001).unwrap();
    let dt = 1e-3;
    let f0 = gaussian_packet(&grid, 0.0, 0.8, 1.0, &c).unwrap();

    let free = Propagator::new(&grid, &PotentialSpec::Free, &c, dt).unwrap();
    let mut f1 = f0.clone();
    free.advance(&mut f1).unwrap();
    let r = canonical_residual(&f0, &f1, &PotentialSpec::Free, dt, &c).unwrap();
    assert_eq!(r.l2, r.momentum_rate_l2);
    assert_eq!(r.force_density_l2, 0.0);

    let flat = PotentialSpec::Constant { value: 3.0 };
    let r = canonical_residual(&f0, &f1, &flat, dt, &c).unwrap();
    assert_eq!(r.l2, r.momentum_rate_l2);

    let omega = 1.3;
    let v = PotentialSpec::harmonic(omega, 1.0, 0.0);
    let sigma = (1.0 / (2.0 * omega)).sqrt();
    let g0 = gaussian_packet(&grid, 0.0, sigma, 0.0, &c).unwrap();
    let mut g1 = g0.clone();
    Propagator::new(&grid, &v, &c, dt).unwrap().advance(&mut g1).unwrap();
    let r = canonical_residual(&g0, &g1, &v, dt, &c).unwrap();
    let expected = omega * omega * (sigma / (4.0 * std::f64::consts::PI.sqrt())).sqrt();
    assert!(r.momentum_rate_l2 < 1e-3 * expected);
    assert!((r.force_density_l2 - expected).abs() < 1e-4 * expected, "{} vs {expected}", r.force_density_l2);
}

#[test]
fn coherent_state_bohmian_path_follows_classical_orbit() {
    let c = unit();
    let spec = CoherentStateSpec { omega: 1.0, center: 0.0, q0: 1.0, p0: 0.0 };
    let grid = Grid1D::new(-6.0, 6.0, 1201).unwrap();
    let check = coherent_state_bohmian(&spec, &grid, 1e-3, 1571, &c).unwrap();
    assert!(check.max_error < 2e-3, "{}", check.max_error);
}

#[test]
fn coherent_ensemble_mean_tracks_classical_at_unit_hbar() {
    let c = unit();
    let spec = ClassicalLimitSpec {
        coherent: CoherentStateSpec { omega: 1.0, center: 0.0, q0: 1.0, p0: 0.0 },
        periods: 0.25,
        dt: 2e-3,
        n_paths: 1000,
        master_seed: 21,
        points_per_wavelength: 40.0,
    };
    let report = classical_limit_run(&spec, &[1.0], &c).unwrap();
    let e = &report.entries[0];
    assert!(e.final_deviation < 4.0 * e.final_std_error, "{e:?}");
    assert!((e.noise_per_step - (2e-3f64).sqrt()).abs() < 1e-15);
}

#[test]
fn noise_breaks_the_round_trip_but_bohmian_paths_return() {
    let c = unit();
    let grid = Grid1D::new(-15.0, 15.0, 1501).unwrap();
    let orbital = GaussianOrbital::new(0.0, 0.5, 0.0);
    let (dt, n) = (1e-3, 1000);
    let t_end = dt * n as f64;
    let start = analytic_free_gaussian(&grid, 0.0, &orbital, &c).unwrap();
    let initial = sample_initial_positions(&grid, &start.density(), 20_000, 8).unwrap();
    let bins = BinSpec::new(-3.0, 3.0, 32).unwrap();
    let reference = bins.bin_masses(&grid, &start.density().iter().map(|r| r / start.norm()).collect::<Vec<_>>());
    for noise_on in [false, true] {
        let mut state = EnsembleState::new(&initial, 8, 0.0);
        state.run(&mut free_stream(orbital, grid, dt, c), dt, n, noise_on, &c, |_, _| {}).unwrap();
        let mut back = analytic_frames(0.0, dt, DriftOptions::default(), c, |s| {
            Ok(crate::solver::time_reverse(&analytic_free_gaussian(&grid, t_end - s, &orbital, &c)?))
        })
        .unwrap();
        state.run(&mut back, dt, n, noise_on, &c, |_, _| {}).unwrap();
        let returned = state.positions();
        if noise_on {
            let rep = endpoint_histogram(&returned, bins, &reference).unwrap();
            assert!(rep.l1 > 5.0 * rep.sampling_baseline, "{} vs {}", rep.l1, rep.sampling_baseline);
        } else {
            let err = returned.iter().zip(&initial).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-2, "{err}");
        }
    }
}

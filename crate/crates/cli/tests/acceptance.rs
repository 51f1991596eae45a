//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every reference value is computed here, independently of the library:
//! closed-form packets with `num_complex`, the exact harmonic trajectory,
//! histograms, minima, channel counts and fits. The library only supplies
//! the propagations under test.
//!
//! Gaps listed in `KNOWN_GAPS` are still printed as FAIL but do not fail the
//! process; any other failing check does.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64;

use dualpath_cli::{run_scenario, validate_config};
use dualpath_core::kernel::{propagate_by_kernel, transfer_matrix_propagate, KernelConfig};
use dualpath_core::paths::{
    analytic_frames, classical_limit_run, coherent_state_bohmian, evolve_ensemble, sample_initial_positions,
    solver_frames, ClassicalLimitSpec, DriftOptions, SdeConfig,
};
use dualpath_core::scenarios::analytic::{double_slit_field, CoherentStateSpec, DoubleSlitSpec, GaussianOrbital};
use dualpath_core::scenarios::entangled::{entangled_pair_field, two_particle_sde_run, EntangledPairSpec, TwoParticleRunSpec};
use dualpath_core::scenarios::scaling::{hydrogen_scaling, uncertainty_estimators, wiener_increments};
use dualpath_core::solver::{evolve, Propagator};
use dualpath_core::{gaussian_packet, Grid1D, Grid2D, PhysicalConstants, PotentialSpec, SchroedingerVectorField};

const SEED: u64 = 7;

/// (criterion, check) pairs that are expected to fail; see the notes in
/// README.md under "Known gaps".
const KNOWN_GAPS: &[(&str, &str)] = &[("C8", "noise_on_histogram_l1")];

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name, passed, detail: detail.into() }
}

fn below(name: &'static str, x: f64, limit: f64) -> Check {
    check(name, x < limit, format!("{x:.3e} < {limit:.0e}"))
}

fn within_runtime(elapsed: Duration, limit_s: f64) -> Check {
    let s = elapsed.as_secs_f64();
    check("runtime", s < limit_s, format!("{s:.1}s < {limit_s}s"))
}

type Criterion = (&'static str, &'static str, Option<f64>, fn() -> Vec<Check>);

fn constants() -> PhysicalConstants {
    PhysicalConstants::new(1.0, 1.0).unwrap()
}

// ---------------------------------------------------------------- oracles

/// Free Gaussian of position width σ, initial centre a and momentum p, at time t.
fn free_gaussian(x: f64, t: f64, a: f64, sigma: f64, p: f64, c: &PhysicalConstants) -> Complex64 {
    let (hbar, m) = (c.hbar(), c.mass());
    let s = Complex64::new(1.0, hbar * t / (2.0 * m * sigma * sigma));
    let d = x - a - p * t / m;
    let amp = (2.0 * PI * sigma * sigma).powf(-0.25) / s.sqrt();
    let phase = Complex64::new(0.0, (p * (x - a) - p * p * t / (2.0 * m)) / hbar);
    amp * (-(d * d) / (4.0 * sigma * sigma * s) + phase).exp()
}

fn field_from(grid: &Grid1D, t: f64, psi: impl Fn(f64) -> Complex64) -> SchroedingerVectorField {
    SchroedingerVectorField::from_fn(*grid, t, |x| {
        let z = psi(x);
        (z.re, z.im)
    })
    .unwrap()
}

fn l2(a: &SchroedingerVectorField, b: &SchroedingerVectorField) -> f64 {
    let s: f64 = a.phi_r().iter().zip(b.phi_r()).chain(a.phi_c().iter().zip(b.phi_c())).map(|(x, y)| (x - y).powi(2)).sum();
    (s * a.grid().dx()).sqrt()
}

fn norm(f: &SchroedingerVectorField) -> f64 {
    f.phi_r().iter().chain(f.phi_c()).map(|x| x * x).sum::<f64>() * f.grid().dx()
}

/// ⟨ψ|H|ψ⟩ for the three-point Laplacian with zero ghosts and no potential.
fn kinetic_energy(f: &SchroedingerVectorField, c: &PhysicalConstants) -> f64 {
    let dx = f.grid().dx();
    let mut s = 0.0;
    for comp in [f.phi_r(), f.phi_c()] {
        let n = comp.len();
        let at = |i: isize| if i < 0 || i >= n as isize { 0.0 } else { comp[i as usize] };
        for i in -1..n as isize {
            s += (at(i + 1) - at(i)).powi(2);
        }
    }
    c.hbar().powi(2) / (2.0 * c.mass()) * s / dx
}

fn conj(f: &SchroedingerVectorField) -> SchroedingerVectorField {
    SchroedingerVectorField::new(*f.grid(), f.phi_r().to_vec(), f.phi_c().iter().map(|v| -v).collect(), f.time()).unwrap()
}

/// Composite Simpson on [a, b] with an even number of panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for k in 1..panels {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

struct Bins {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Bins {
    fn width(&self) -> f64 {
        (self.hi - self.lo) / self.n as f64
    }

    fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width()
    }

    fn fractions(&self, xs: &[f64]) -> Vec<f64> {
        let mut counts = vec![0usize; self.n];
        for &x in xs {
            if x >= self.lo && x < self.hi {
                counts[(((x - self.lo) / self.width()) as usize).min(self.n - 1)] += 1;
            }
        }
        counts.iter().map(|&k| k as f64 / xs.len() as f64).collect()
    }

    fn masses(&self, density: impl Fn(f64) -> f64) -> Vec<f64> {
        let w = self.width();
        (0..self.n).map(|i| simpson(&density, self.lo + i as f64 * w, self.lo + (i + 1) as f64 * w, 64)).collect()
    }
}

fn l1(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

/// Expected L1 of an exact multinomial sample of size n (normal approximation).
fn multinomial_l1(masses: &[f64], n: usize) -> f64 {
    masses.iter().map(|&p| (2.0 * p * (1.0 - p) / (PI * n as f64)).sqrt()).sum()
}

/// Bins strictly below their ±window neighbours, with a rise of at least
/// depth·max on both sides.
fn local_minima(v: &[f64], window: usize, depth: f64) -> Vec<usize> {
    let top = v.iter().copied().fold(0.0, f64::max);
    (window..v.len() - window)
        .filter(|&i| {
            let left = &v[i - window..i];
            let right = &v[i + 1..=i + window];
            let lowest = left.iter().chain(right).all(|&u| u > v[i]);
            let rise = |side: &[f64]| side.iter().copied().fold(0.0, f64::max) - v[i] >= depth * top;
            lowest && rise(left) && rise(right)
        })
        .collect()
}

/// Every expected minimum has a detected one within tol, and vice versa.
fn minima_agree(expected: &[f64], found: &[f64], tol: f64) -> (bool, f64) {
    let near = |x: f64, set: &[f64]| set.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min);
    let a = expected.iter().map(|&x| near(x, found));
    let worst = a.chain(found.iter().map(|&x| near(x, expected))).fold(0.0, f64::max);
    (expected.len() == found.len() && worst <= tol, worst)
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Mean of x²/dt and its standard error.
fn mean_square_rate(xs: &[f64], dt: f64) -> (f64, f64) {
    let n = xs.len() as f64;
    let v: Vec<f64> = xs.iter().map(|x| x * x / dt).collect();
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

// ---------------------------------------------------------------- criteria

fn c1_hydrogen() -> Vec<Check> {
    let mut out = Vec::new();
    let r = hydrogen_scaling(1, 1, &PhysicalConstants::ATOMIC).unwrap();
    out.push(check("ground_state_exact", r.radius == 1.0 && r.energy == -0.5, format!("radius={} energy={}", r.radius, r.energy)));
    let mut worst = 0.0_f64;
    for c in [PhysicalConstants::ATOMIC, PhysicalConstants::with_charge(1.3, 0.7, 0.9).unwrap()] {
        let a0 = c.hbar().powi(2) / (c.mass() * c.charge().powi(2));
        let ry = c.mass() * c.charge().powi(4) / (2.0 * c.hbar().powi(2));
        for z in 1..=5u32 {
            for n in 1..=5u32 {
                let r = hydrogen_scaling(z, n, &c).unwrap();
                let (zf, nf) = (z as f64, n as f64);
                worst = worst.max((r.radius - a0 * nf * nf / zf).abs() / a0);
                worst = worst.max((r.energy + ry * zf * zf / (nf * nf)).abs() / ry);
                worst = worst.max((r.energy * r.radius + zf * c.charge().powi(2) / 2.0).abs());
            }
        }
    }
    out.push(check("identity_grid", worst <= 1e-12, format!("max defect {worst:.1e} <= 1e-12")));
    out
}

fn c2_wiener() -> Vec<Check> {
    let c = PhysicalConstants::new(0.5, 2.0).unwrap();
    let target = c.hbar() / c.mass();
    let dt = 0.02;
    let (r, re) = mean_square_rate(&wiener_increments(100_000, dt, &c, SEED), dt);
    let quarter = wiener_increments(100_000, dt / 4.0, &c, SEED ^ 1);
    let (q, qe) = mean_square_rate(&quarter, dt / 4.0);
    let pooled = (re * re + qe * qe).sqrt();
    vec![
        check("rate_equals_hbar_over_m", (r - target).abs() < 3.0 * re, format!("{r:.5} vs {target} (3se {:.1e})", 3.0 * re)),
        check("quarter_step_rate", (q - target).abs() < 3.0 * qe, format!("{q:.5} vs {target} (3se {:.1e})", 3.0 * qe)),
        check("rate_invariant_under_rescaling", (q - r).abs() < 3.0 * pooled, format!("|{q:.5}-{r:.5}| < {:.1e}", 3.0 * pooled)),
    ]
}

fn c3_uncertainty() -> Vec<Check> {
    let c = constants();
    let dt = 0.01;
    let inc = wiener_increments(100_000, dt, &c, SEED);
    let (rate, se) = mean_square_rate(&inc, dt);
    let (pq, pq_se) = (c.mass() * rate, c.mass() * se);
    let (et, et_se) = (0.5 * pq, 0.5 * pq_se);
    let lib = uncertainty_estimators(&inc, dt, &c).unwrap();
    vec![
        check("pq_equals_hbar", (pq - c.hbar()).abs() < 3.0 * pq_se, format!("{pq:.5} vs {} (3se {:.1e})", c.hbar(), 3.0 * pq_se)),
        check("et_equals_half_hbar", (et - 0.5 * c.hbar()).abs() < 3.0 * et_se, format!("{et:.5} vs {}", 0.5 * c.hbar())),
        check(
            "library_estimator_agrees",
            (lib.pq_product - pq).abs() <= 1e-12 * pq && (lib.et_product - et).abs() <= 1e-12 * et,
            format!("{:.6} / {:.6}", lib.pq_product, lib.et_product),
        ),
    ]
}

fn c4_free_gaussian() -> Vec<Check> {
    let c = constants();
    let g = Grid1D::new(-20.0, 20.0, 2048).unwrap();
    let (sigma, p, dt, n) = (1.0, 0.5, 1e-3, 2000);
    let t = dt * n as f64;
    let f0 = field_from(&g, 0.0, |x| free_gaussian(x, 0.0, 0.0, sigma, p, &c));
    let prop = Propagator::new(&g, &PotentialSpec::Free, &c, dt).unwrap();
    let (n0, e0) = (norm(&f0), kinetic_energy(&f0, &c));
    let (mut dn, mut de) = (0.0_f64, 0.0_f64);
    let mut f = f0.clone();
    for _ in 0..n {
        prop.advance(&mut f).unwrap();
        dn = dn.max((norm(&f) - n0).abs());
        de = de.max((kinetic_energy(&f, &c) - e0).abs() / e0);
    }
    let exact = field_from(&g, t, |x| free_gaussian(x, t, 0.0, sigma, p, &c));
    vec![
        below("l2_vs_closed_form", l2(&f, &exact), 1e-4),
        below("norm_drift", dn, 1e-10),
        below("relative_energy_drift", de, 1e-8),
    ]
}

fn c5_constant_rotation() -> Vec<Check> {
    let c = PhysicalConstants::new(0.8, 1.3).unwrap();
    let g = Grid1D::new(-20.0, 20.0, 1024).unwrap();
    let (v0, dt, n) = (0.37, 2e-3, 500);
    let t = dt * n as f64;
    let f0 = field_from(&g, 0.0, |x| free_gaussian(x, 0.0, -1.0, 1.2, 0.7, &c));
    let free = evolve(&f0, &PotentialSpec::Free, dt, n, &c).unwrap();
    let shifted = evolve(&f0, &PotentialSpec::Constant { value: v0 }, dt, n, &c).unwrap();
    let (s, co) = (-v0 * t / c.hbar()).sin_cos();
    let (mut rho_err, mut vec_err) = (0.0_f64, 0.0_f64);
    for i in 0..g.len() {
        let (r, i_) = (free.phi_r()[i], free.phi_c()[i]);
        let (a, b) = (shifted.phi_r()[i], shifted.phi_c()[i]);
        rho_err = rho_err.max((a * a + b * b - r * r - i_ * i_).abs());
        vec_err = vec_err.max((a - (co * r - s * i_)).abs().max((b - (s * r + co * i_)).abs()));
    }
    vec![
        check("density_unchanged", rho_err <= 1e-12, format!("{rho_err:.1e} <= 1e-12")),
        check("nodewise_rotation", vec_err <= 1e-12, format!("{vec_err:.1e} <= 1e-12")),
    ]
}

fn c6_kernels() -> Vec<Check> {
    let c = constants();
    let g = Grid1D::new(-6.0, 6.0, 601).unwrap();
    let f0 = gaussian_packet(&g, 0.5, 0.5, 1.0, &c).unwrap();
    let potential = PotentialSpec::harmonic(1.0, c.mass(), 0.0);
    let (t, slices, stride) = (0.5, 10, 8);
    let transfer = transfer_matrix_propagate(&f0, &potential, t / slices as f64, slices, &c).unwrap().field;
    let base = KernelConfig { node_stride: stride, ..KernelConfig::new(slices, 100_000, SEED) };
    let mc = propagate_by_kernel(&f0, t, &potential, &base, &c).unwrap();
    let m = mc.field.grid().len();
    let pick = |v: &[f64], j: usize| v[j * stride];
    let gap = |mc: &dualpath_core::kernel::KernelEstimate, j: usize| {
        ((mc.field.phi_r()[j] - pick(transfer.phi_r(), j)).powi(2) + (mc.field.phi_c()[j] - pick(transfer.phi_c(), j)).powi(2)).sqrt()
    };
    let hits = (0..m)
        .filter(|&j| gap(&mc, j) <= 3.0 * (mc.std_error_r[j].powi(2) + mc.std_error_c[j].powi(2)).sqrt())
        .count();
    let fraction = hits as f64 / m as f64;

    let counts = [1000usize, 4000, 16000, 64000];
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for &n in &counts {
        let est = propagate_by_kernel(&f0, t, &potential, &KernelConfig { n_samples: n, ..base }, &c).unwrap();
        let err = ((0..m).map(|j| gap(&est, j).powi(2)).sum::<f64>() * est.field.grid().dx()).sqrt();
        lx.push((n as f64).ln());
        ly.push(err.ln());
    }
    let slope = least_squares_slope(&lx, &ly);
    vec![
        check("fraction_within_3_pooled_se", fraction >= 0.95, format!("{fraction:.3} >= 0.95 on {m} nodes")),
        check("error_slope", (slope + 0.5).abs() <= 0.15, format!("{slope:.3} in -0.5 ± 0.15")),
    ]
}

fn c7_classicality() -> Vec<Check> {
    let c = constants();
    let spec = CoherentStateSpec { omega: 1.0, center: 0.0, q0: 1.0, p0: 0.5 };
    let g = Grid1D::new(-6.0, 6.0, 2401).unwrap();
    let dt = 5e-5;
    let n = (TAU / dt).round() as usize;
    let path = coherent_state_bohmian(&spec, &g, dt, n, &c).unwrap().path;
    let exact = |t: f64| spec.center + (spec.q0 - spec.center) * t.cos() + spec.p0 / c.mass() * t.sin();
    let err = path.iter().enumerate().map(|(k, x)| (x - exact(k as f64 * dt)).abs()).fold(0.0, f64::max);

    let limit = ClassicalLimitSpec { coherent: spec, periods: 1.0, dt: 1e-3, n_paths: 2000, master_seed: SEED, points_per_wavelength: 200.0 };
    let rep = classical_limit_run(&limit, &[1.0, 0.1, 0.01], &c).unwrap();
    let dev: Vec<f64> = rep.entries.iter().map(|e| e.max_deviation).collect();
    let decreasing = dev.windows(2).all(|w| w[1] < w[0]);
    vec![
        below("guided_path_max_error", err, 1e-4),
        check("deviation_decreases_with_hbar", decreasing, dev.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join(" > ")),
    ]
}

fn c8_double_slit() -> Vec<Check> {
    let c = constants();
    let (d, sigma, dt, n_steps, n_paths) = (2.0, 0.1, 2e-4, 5000, 100_000);
    let t = dt * n_steps as f64;
    let g = Grid1D::new(-32.0, 32.0, 12801).unwrap();
    let spec = DoubleSlitSpec { slit_separation: d, slit_width: sigma, forward_momentum: 0.0, screen_time: t };

    let pair = |x: f64| free_gaussian(x, t, -0.5 * d, sigma, 0.0, &c) + free_gaussian(x, t, 0.5 * d, sigma, 0.0, &c);
    let total = simpson(|x| pair(x).norm_sqr(), -60.0, 60.0, 240_000);
    let density = |x: f64| pair(x).norm_sqr() / total;
    let bins = Bins { lo: -16.0, hi: 16.0, n: 64 };
    let reference = bins.masses(density);

    // Dark fringes where the two branches are in antiphase.
    let tau = c.hbar() * t / (2.0 * c.mass() * sigma * sigma);
    let spacing = TAU * 2.0 * sigma * sigma * (1.0 + tau * tau) / (d * tau);
    let core = 2.0 * sigma * (1.0 + tau * tau).sqrt();
    let expected: Vec<f64> = (-20i32..20).map(|k| (k as f64 + 0.5) * spacing).filter(|x| x.abs() <= core).collect();

    let f0 = double_slit_field(&g, &spec, 0.0, &c).unwrap();
    let initial = sample_initial_positions(&g, &f0.density(), n_paths, SEED).unwrap();
    let sde = SdeConfig::new(dt, n_steps, n_paths, SEED);
    let mut out = Vec::new();
    for (label, noise_on, tol_bins) in [("noise_on", true, 2.0), ("noise_off", false, 1.0)] {
        let mut frames = analytic_frames(0.0, dt, DriftOptions::default(), c, |s| double_slit_field(&g, &spec, s, &c)).unwrap();
        let cfg = if noise_on { sde } else { sde.noise_off() };
        let ens = evolve_ensemble(&initial, &mut frames, &cfg, &c).unwrap();
        let hist = bins.fractions(&ens.endpoints);
        let dist = l1(&hist, &reference);
        let found: Vec<f64> =
            local_minima(&hist, 2, 0.02).into_iter().map(|i| bins.center(i)).filter(|x| x.abs() <= core).collect();
        let (ok, worst) = minima_agree(&expected, &found, tol_bins * bins.width());
        let (l1_name, minima_name) = if noise_on {
            ("noise_on_histogram_l1", "noise_on_minima_within_2_bins")
        } else {
            ("noise_off_histogram_l1", "noise_off_minima_within_1_bin")
        };
        let baseline = multinomial_l1(&reference, n_paths);
        out.push(check(l1_name, dist < 0.05, format!("{label} L1 {dist:.3} < 0.05 (sampling {baseline:.3})")));
        out.push(check(minima_name, ok, format!("{} expected, {} found, worst offset {worst:.3}", expected.len(), found.len())));
    }
    out
}

fn c9_detanglement() -> Vec<Check> {
    let c = constants();
    let axis = Grid1D::new(-30.0, 30.0, 481).unwrap();
    let grid = Grid2D::square(axis);
    let (s, w, p) = (6.0, 1.0, 3.0);
    let pair = EntangledPairSpec {
        orbital_a: GaussianOrbital::new(-0.5 * s, w, -p),
        orbital_b: GaussianOrbital::new(0.5 * s, w, p),
    };
    let sde = SdeConfig::new(0.02, 200, 10_000, SEED);
    let t = sde.dt * sde.n_steps as f64;
    let n = axis.len();
    let (mut anti, mut sym) = (0.0_f64, 0.0_f64);
    for probe in [0.0, 0.25 * t, 0.5 * t, t] {
        let f = entangled_pair_field(&grid, &pair, probe, &c).unwrap();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (f.at(i, j), f.at(j, i));
                anti = anti.max((a.0 + b.0).abs()).max((a.1 + b.1).abs());
                sym = sym.max((a.0 * a.0 + a.1 * a.1 - b.0 * b.0 - b.1 * b.1).abs());
            }
        }
    }
    let ens = two_particle_sde_run(&TwoParticleRunSpec { pair, axis, frame_every: 10 }, &sde, &c).unwrap();
    let ab = ens.endpoints.iter().filter(|x| x[0] < 0.0 && x[1] >= 0.0).count();
    let ba = ens.endpoints.iter().filter(|x| x[0] >= 0.0 && x[1] < 0.0).count();
    let total = ens.endpoints.len() as f64;
    let frac_ab = ab as f64 / total;
    let undecided = (ens.endpoints.len() - ab - ba) as f64 / total;
    vec![
        check("antisymmetry", anti <= 1e-12, format!("{anti:.1e} <= 1e-12")),
        check("density_symmetry", sym <= 1e-12, format!("{sym:.1e} <= 1e-12")),
        check("frac_ab", (0.485..=0.515).contains(&frac_ab), format!("{frac_ab:.4} in [0.485, 0.515]")),
        below("frac_undecided", undecided, 0.05),
    ]
}

fn c10_determinism() -> Vec<Check> {
    let mut out = Vec::new();
    for (name, kind) in [("entanglement_report", "entanglement"), ("free_gaussian_report", "free_gaussian")] {
        let cfg = validate_config(&format!(r#"{{"scenario":{{"kind":"{kind}"}},"master_seed":{SEED}}}"#)).unwrap();
        let reports: Vec<String> = [1usize, 4]
            .iter()
            .map(|&threads| {
                let dir = tempfile::tempdir().unwrap();
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                let report = pool.install(|| run_scenario(&cfg, dir.path())).unwrap();
                report.deterministic_json().unwrap()
            })
            .collect();
        out.push(check(name, reports[0] == reports[1], format!("1 vs 4 threads, {} bytes", reports[0].len())));
    }
    out
}

fn c11_time_reversal() -> Vec<Check> {
    let c = constants();
    let g = Grid1D::new(-20.0, 20.0, 2048).unwrap();
    let (dt, n) = (1e-3, 2000);
    let free = PotentialSpec::Free;
    let f0 = field_from(&g, 0.0, |x| free_gaussian(x, 0.0, 0.0, 1.0, 0.0, &c));
    let fwd = |f: &SchroedingerVectorField| evolve(f, &free, dt, n, &c).unwrap();
    let rev = |f: &SchroedingerVectorField| conj(&fwd(&conj(f)));
    let f1 = fwd(&f0);
    let back = rev(&fwd(&rev(&f1)));
    let round_trip = l2(&back, &f0);

    // Noise-on paths forward to T, then back through the conjugated field.
    let (sde_dt, per_frame) = (5e-3, 5);
    let n_paths = 100_000;
    let frames = |start: SchroedingerVectorField| solver_frames(start, &free, dt, per_frame, DriftOptions::default(), c).unwrap();
    let sde = SdeConfig::new(sde_dt, n / per_frame, n_paths, SEED);
    let initial = sample_initial_positions(&g, &f0.density(), n_paths, SEED).unwrap();
    let there = evolve_ensemble(&initial, &mut frames(f0.clone()), &sde, &c).unwrap();
    let again = evolve_ensemble(&there.endpoints, &mut frames(conj(&f1)), &SdeConfig { master_seed: SEED + 1, ..sde }, &c).unwrap();
    let bins = Bins { lo: -6.0, hi: 6.0, n: 64 };
    let reference = bins.masses(|x| free_gaussian(x, 0.0, 0.0, 1.0, 0.0, &c).norm_sqr());
    let dist = l1(&bins.fractions(&again.endpoints), &reference);
    let baseline = multinomial_l1(&reference, n_paths);
    vec![
        below("solver_round_trip_l2", round_trip, 1e-8),
        check("noise_on_round_trip_irreversible", dist > 5.0 * baseline, format!("L1 {dist:.3} > 5 x {baseline:.4}")),
    ]
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("C1", "hydrogen scaling", Some(1.0), c1_hydrogen),
        ("C2", "Wiener scaling law", Some(10.0), c2_wiener),
        ("C3", "uncertainty products", Some(10.0), c3_uncertainty),
        ("C4", "solver vs closed-form packet", Some(30.0), c4_free_gaussian),
        ("C5", "constant-potential rotation", None, c5_constant_rotation),
        ("C6", "Monte Carlo vs transfer-matrix kernel", Some(120.0), c6_kernels),
        ("C7", "guided path classicality", Some(60.0), c7_classicality),
        ("C8", "double-slit fringes", Some(300.0), c8_double_slit),
        ("C9", "detanglement statistics", Some(300.0), c9_detanglement),
        ("C10", "determinism across thread counts", None, c10_determinism),
        ("C11", "time-reversal round trip", None, c11_time_reversal),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = 0;
    for (id, title, limit, run) in criteria {
        if !only.is_empty() && !only.iter().any(|o| o == id) {
            continue;
        }
        let clock = Instant::now();
        let mut checks = run();
        if let Some(limit) = limit {
            checks.push(within_runtime(clock.elapsed(), limit));
        }
        let passed = checks.iter().all(|c| c.passed);
        println!("{} {id} {title}", if passed { "PASS" } else { "FAIL" });
        for c in &checks {
            let known = KNOWN_GAPS.contains(&(id, c.name));
            let mark = match (c.passed, known) {
                (true, _) => "ok",
                (false, true) => "known gap",
                (false, false) => "FAILED",
            };
            println!("     {:<36} {:<10} {}", c.name, mark, c.detail);
            if !c.passed && !known {
                unexpected += 1;
            }
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} acceptance check(s) failed outside the known gaps");
        std::process::exit(1);
    }
}

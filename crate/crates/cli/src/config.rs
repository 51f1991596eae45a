//! Run descriptions. The file names a scenario with its parameters and may
//! override any of the generic sections; sections left out take the
//! scenario's defaults. Validation reports every violation at once.

use std::path::PathBuf;

use dualpath_core::kernel::{Estimator, KernelConfig};
use dualpath_core::paths::SdeConfig;
use dualpath_core::solver::SolverConfig;
use dualpath_core::{Grid1D, PhysicalConstants};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, ConfigIssue};

/// Packets must keep this many density widths from either wall at the end of a run.
pub const FINAL_CLEARANCE: f64 = 6.0;
/// ... and this many at the start.
pub const INITIAL_CLEARANCE: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    FreeGaussian(FreeGaussianParams),
    Harmonic(HarmonicParams),
    PlaneWaveCalibration(PlaneWaveParams),
    DoubleSlit(DoubleSlitParams),
    HydrogenScaling(HydrogenParams),
    UncertaintyScaling(UncertaintyParams),
    KernelComparison(KernelComparisonParams),
    Entanglement(EntanglementParams),
    #[serde(rename = "h2plus_channel")]
    H2PlusChannel(H2PlusParams),
    ClassicalLimit(ClassicalLimitParams),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::FreeGaussian(_) => "free_gaussian",
            Scenario::Harmonic(_) => "harmonic",
            Scenario::PlaneWaveCalibration(_) => "plane_wave_calibration",
            Scenario::DoubleSlit(_) => "double_slit",
            Scenario::HydrogenScaling(_) => "hydrogen_scaling",
            Scenario::UncertaintyScaling(_) => "uncertainty_scaling",
            Scenario::KernelComparison(_) => "kernel_comparison",
            Scenario::Entanglement(_) => "entanglement",
            Scenario::H2PlusChannel(_) => "h2plus_channel",
            Scenario::ClassicalLimit(_) => "classical_limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FreeGaussianParams {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
    /// Constant potential used for the rigid-rotation check.
    pub constant_potential: f64,
    pub histogram_bins: usize,
    pub max_l2_error: f64,
    pub max_norm_drift: f64,
    pub max_energy_drift: f64,
    pub max_rotation_density_error: f64,
    pub max_round_trip_error: f64,
    pub max_transport_l1: f64,
    /// Noise-on round trips must miss the start by this many sampling baselines.
    pub irreversibility_factor: f64,
}

impl Default for FreeGaussianParams {
    fn default() -> Self {
        FreeGaussianParams {
            center: 0.0,
            width: 1.0,
            momentum: 0.0,
            constant_potential: 0.37,
            histogram_bins: 64,
            max_l2_error: 1e-4,
            max_norm_drift: 1e-10,
            max_energy_drift: 1e-8,
            max_rotation_density_error: 1e-12,
            max_round_trip_error: 1e-8,
            max_transport_l1: 0.05,
            irreversibility_factor: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarmonicParams {
    pub omega: f64,
    pub center: f64,
    pub q0: f64,
    pub p0: f64,
    pub periods: f64,
    pub max_path_error: f64,
}

impl Default for HarmonicParams {
    fn default() -> Self {
        HarmonicParams { omega: 1.0, center: 0.0, q0: 1.0, p0: 0.0, periods: 1.0, max_path_error: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlaneWaveParams {
    pub momentum: f64,
    pub window: [f64; 2],
    pub phase: f64,
    pub max_relative_error: f64,
}

impl Default for PlaneWaveParams {
    fn default() -> Self {
        PlaneWaveParams { momentum: 2.0, window: [-5.0, 5.0], phase: 0.3, max_relative_error: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoubleSlitParams {
    pub slit_separation: f64,
    pub slit_width: f64,
    pub forward_momentum: f64,
    pub histogram_range: [f64; 2],
    pub histogram_bins: usize,
    /// Minima are compared only where |x| is below this many envelope widths.
    pub core_widths: f64,
    pub extremum_window: usize,
    pub extremum_depth: f64,
    pub max_l1: f64,
    pub noise_on_minima_bins: f64,
    pub noise_off_minima_bins: f64,
}

impl Default for DoubleSlitParams {
    fn default() -> Self {
        DoubleSlitParams {
            slit_separation: 2.0,
            slit_width: 0.1,
            forward_momentum: 0.0,
            histogram_range: [-16.0, 16.0],
            histogram_bins: 64,
            core_widths: 2.0,
            extremum_window: 2,
            extremum_depth: 0.02,
            max_l1: 0.05,
            noise_on_minima_bins: 2.0,
            noise_off_minima_bins: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HydrogenParams {
    pub z: u32,
    pub n: u32,
    /// Identities are checked on (Z, n) ∈ [1, max]².
    pub identity_grid_max: u32,
    pub identity_tolerance: f64,
    pub stationarity_tolerance: f64,
}

impl Default for HydrogenParams {
    fn default() -> Self {
        HydrogenParams { z: 1, n: 1, identity_grid_max: 5, identity_tolerance: 1e-12, stationarity_tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UncertaintyParams {
    pub n_increments: usize,
    pub dt: f64,
    /// Tolerances in standard errors.
    pub std_errors: f64,
}

impl Default for UncertaintyParams {
    fn default() -> Self {
        UncertaintyParams { n_increments: 100_000, dt: 0.01, std_errors: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelComparisonParams {
    pub omega: f64,
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
    pub t_total: f64,
    pub convergence_samples: Vec<usize>,
    pub min_fraction_within: f64,
    pub slope_target: f64,
    pub slope_tolerance: f64,
}

impl Default for KernelComparisonParams {
    fn default() -> Self {
        KernelComparisonParams {
            omega: 1.0,
            center: 0.5,
            width: 0.5,
            momentum: 1.0,
            t_total: 0.5,
            convergence_samples: vec![1_000, 4_000, 16_000, 64_000],
            min_fraction_within: 0.95,
            slope_target: -0.5,
            slope_tolerance: 0.15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntanglementParams {
    pub separation: f64,
    pub width: f64,
    pub momentum: f64,
    /// Pairs for the noise-off no-crossing check.
    pub noise_off_pairs: usize,
    pub symmetry_tolerance: f64,
    pub frac_ab_range: [f64; 2],
    pub max_undecided: f64,
}

impl Default for EntanglementParams {
    fn default() -> Self {
        EntanglementParams {
            separation: 6.0,
            width: 1.0,
            momentum: 3.0,
            noise_off_pairs: 1_000,
            symmetry_tolerance: 1e-12,
            frac_ab_range: [0.485, 0.515],
            max_undecided: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct H2PlusParams {
    pub separation: f64,
    pub width: f64,
    pub recoil_momentum: f64,
    pub std_errors: f64,
    pub max_undecided: f64,
}

impl Default for H2PlusParams {
    fn default() -> Self {
        H2PlusParams { separation: 2.0, width: 1.0, recoil_momentum: 2.0, std_errors: 3.0, max_undecided: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalLimitParams {
    pub omega: f64,
    pub center: f64,
    pub q0: f64,
    pub p0: f64,
    pub periods: f64,
    pub hbar_scales: Vec<f64>,
    pub points_per_wavelength: f64,
}

impl Default for ClassicalLimitParams {
    fn default() -> Self {
        ClassicalLimitParams {
            omega: 1.0,
            center: 0.0,
            q0: 1.0,
            p0: 0.0,
            periods: 1.0,
            hbar_scales: vec![1.0, 0.1, 0.01],
            points_per_wavelength: 200.0,
        }
    }
}

// ---------------------------------------------------------------------------
// Generic sections as written in the file: plain numbers, checked later.

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsSection {
    pub hbar: f64,
    pub mass: f64,
    pub charge: f64,
}

impl Default for ConstantsSection {
    fn default() -> Self {
        ConstantsSection { hbar: 1.0, mass: 1.0, charge: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub dt: f64,
    pub n_steps: usize,
    #[serde(default = "default_rho_floor")]
    pub rho_floor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeSection {
    pub dt: f64,
    pub n_steps: usize,
    pub n_paths: usize,
    #[serde(default = "default_rho_floor")]
    pub rho_floor: f64,
    #[serde(default)]
    pub clamp_value: Option<f64>,
    /// SDE steps per drift frame for analytically driven scenarios.
    #[serde(default = "one")]
    pub frame_every: usize,
    #[serde(default)]
    pub record_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub n_time_slices: usize,
    pub n_samples: usize,
    #[serde(default)]
    pub estimator: Estimator,
    #[serde(default = "one")]
    pub node_stride: usize,
    /// Crank–Nicolson step of the solver leg.
    pub solver_dt: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    /// Full paths written to CSV, at most.
    pub path_dump_cap: usize,
}

fn default_rho_floor() -> f64 {
    1e-12
}

fn one() -> usize {
    1
}

/// The file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub master_seed: Option<u64>,
    #[serde(default)]
    pub constants: ConstantsSection,
    #[serde(default)]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub solver: Option<SolverSection>,
    #[serde(default)]
    pub sde: Option<SdeSection>,
    #[serde(default)]
    pub kernel: Option<KernelSection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// A fully resolved and validated run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub master_seed: u64,
    pub constants: PhysicalConstants,
    pub grid: Grid1D,
    pub solver: SolverConfig,
    pub sde: SdeConfig,
    pub frame_every: usize,
    pub kernel: KernelConfig,
    pub kernel_solver_dt: f64,
    pub output: OutputSection,
}

struct Defaults {
    grid: GridSection,
    solver: SolverSection,
    sde: SdeSection,
    kernel: KernelSection,
}

fn sde(dt: f64, n_steps: usize, n_paths: usize, frame_every: usize) -> SdeSection {
    SdeSection { dt, n_steps, n_paths, rho_floor: default_rho_floor(), clamp_value: None, frame_every, record_every: 0 }
}

fn solver(dt: f64, n_steps: usize) -> SolverSection {
    SolverSection { dt, n_steps, rho_floor: default_rho_floor() }
}

fn grid(x_min: f64, x_max: f64, n_points: usize) -> GridSection {
    GridSection { x_min, x_max, n_points }
}

const KERNEL_DEFAULT: KernelSection =
    KernelSection { n_time_slices: 10, n_samples: 100_000, estimator: Estimator::ExpectationForm, node_stride: 8, solver_dt: 1e-3 };

fn defaults(s: &Scenario) -> Defaults {
    let base = |g, so, sd| Defaults { grid: g, solver: so, sde: sd, kernel: KERNEL_DEFAULT };
    match s {
        Scenario::FreeGaussian(_) => base(grid(-20.0, 20.0, 2048), solver(1e-3, 2000), sde(5e-3, 400, 100_000, 1)),
        Scenario::Harmonic(p) => {
            let dt = 5e-5;
            let n = (p.periods * std::f64::consts::TAU / p.omega / dt).round() as usize;
            base(grid(-6.0, 6.0, 2401), solver(dt, n), sde(dt, n, 1, 1))
        }
        Scenario::PlaneWaveCalibration(_) => base(grid(-10.0, 10.0, 2001), solver(1e-3, 1), sde(1e-3, 1, 1, 1)),
        Scenario::DoubleSlit(_) => base(grid(-32.0, 32.0, 12_801), solver(2e-4, 5000), sde(2e-4, 5000, 100_000, 1)),
        Scenario::HydrogenScaling(_) | Scenario::UncertaintyScaling(_) => {
            base(grid(-10.0, 10.0, 201), solver(1e-3, 1), sde(1e-2, 1, 1, 1))
        }
        Scenario::KernelComparison(_) => base(grid(-6.0, 6.0, 601), solver(1e-3, 500), sde(1e-3, 1, 1, 1)),
        Scenario::Entanglement(_) => base(grid(-30.0, 30.0, 481), solver(0.02, 200), sde(0.02, 200, 10_000, 10)),
        Scenario::H2PlusChannel(_) => base(grid(-40.0, 40.0, 801), solver(0.01, 400), sde(0.01, 400, 10_000, 5)),
        Scenario::ClassicalLimit(_) => base(grid(-10.0, 10.0, 201), solver(1e-3, 1), sde(1e-3, 1, 2_000, 1)),
    }
}

/// Parses and validates a run description; every violation is reported.
pub fn validate_config(raw_text: &str) -> Result<ScenarioConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(raw_text)
        .map_err(|e| CliError::ConfigInvalid(vec![ConfigIssue::new("", format!("cannot parse config: {e}"))]))?;
    resolve(raw)
}

pub fn resolve(raw: RawConfig) -> Result<ScenarioConfig, CliError> {
    let mut issues = Vec::new();
    let d = defaults(&raw.scenario);
    let g = raw.grid.unwrap_or(d.grid);
    let so = raw.solver.unwrap_or(d.solver);
    let sd = raw.sde.unwrap_or(d.sde);
    let k = raw.kernel.unwrap_or(d.kernel);

    let master_seed = raw.master_seed.unwrap_or_else(|| {
        issues.push(ConfigIssue::new("master_seed", "master_seed required for reproducibility"));
        0
    });

    let c = raw.constants;
    for (name, v) in [("constants.hbar", c.hbar), ("constants.mass", c.mass), ("constants.charge", c.charge)] {
        if !(v.is_finite() && v > 0.0) {
            issues.push(ConfigIssue::new(name, format!("must be positive, got {v}")));
        }
    }
    let constants = PhysicalConstants::with_charge(c.hbar, c.mass, c.charge).unwrap_or(PhysicalConstants::ATOMIC);

    let grid1d = match Grid1D::new(g.x_min, g.x_max, g.n_points) {
        Ok(g) => Some(g),
        Err(e) => {
            issues.push(ConfigIssue::new("grid", e.to_string()));
            None
        }
    };

    positive(&mut issues, "solver.dt", so.dt);
    if !(so.rho_floor >= 0.0 && so.rho_floor < 1.0) {
        issues.push(ConfigIssue::new("solver.rho_floor", format!("must lie in [0, 1), got {}", so.rho_floor)));
    }
    positive(&mut issues, "sde.dt", sd.dt);
    at_least_one(&mut issues, "sde.n_paths", sd.n_paths);
    at_least_one(&mut issues, "sde.frame_every", sd.frame_every);
    if sd.frame_every > 0 && !sd.n_steps.is_multiple_of(sd.frame_every) {
        issues.push(ConfigIssue::new(
            "sde.frame_every",
            format!("frame stride {} must divide sde.n_steps = {}", sd.frame_every, sd.n_steps),
        ));
    }
    if !(sd.rho_floor >= 0.0) {
        issues.push(ConfigIssue::new("sde.rho_floor", format!("must be non-negative, got {}", sd.rho_floor)));
    }
    if let Some(v) = sd.clamp_value {
        positive(&mut issues, "sde.clamp_value", v);
    }
    at_least_one(&mut issues, "kernel.n_time_slices", k.n_time_slices);
    at_least_one(&mut issues, "kernel.n_samples", k.n_samples);
    at_least_one(&mut issues, "kernel.node_stride", k.node_stride);
    positive(&mut issues, "kernel.solver_dt", k.solver_dt);

    // Grid-dependent rules are skipped when the grid itself is invalid.
    scenario_rules(&raw.scenario, grid1d.as_ref(), &so, &sd, &k, &constants, &mut issues);

    if !issues.is_empty() {
        return Err(CliError::ConfigInvalid(issues));
    }
    let mut sde_config = SdeConfig::new(sd.dt, sd.n_steps, sd.n_paths, master_seed);
    sde_config.rho_floor = sd.rho_floor;
    sde_config.clamp_value = sd.clamp_value;
    sde_config.record_every = sd.record_every;
    Ok(ScenarioConfig {
        scenario: raw.scenario,
        master_seed,
        constants,
        grid: grid1d.expect("validated"),
        solver: SolverConfig { dt: so.dt, n_steps: so.n_steps, rho_floor: so.rho_floor },
        sde: sde_config,
        frame_every: sd.frame_every,
        kernel: KernelConfig {
            n_time_slices: k.n_time_slices,
            n_samples: k.n_samples,
            master_seed,
            estimator: k.estimator,
            node_stride: k.node_stride,
        },
        kernel_solver_dt: k.solver_dt,
        output: raw.output,
    })
}

fn positive(issues: &mut Vec<ConfigIssue>, field: &str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        issues.push(ConfigIssue::new(field, format!("must be positive, got {v}")));
    }
}

fn at_least_one(issues: &mut Vec<ConfigIssue>, field: &str, v: usize) {
    if v == 0 {
        issues.push(ConfigIssue::new(field, "must be at least 1"));
    }
}

/// Density width of a freely spreading Gaussian.
fn spread(width: f64, t: f64, c: &PhysicalConstants) -> f64 {
    let s = c.hbar() * t / (2.0 * c.mass() * width);
    (width * width + s * s).sqrt()
}

/// Containment: [lo, hi] plus `k` widths on each side must fit inside the grid.
fn contain(issues: &mut Vec<ConfigIssue>, field: &str, g: Option<&Grid1D>, lo: f64, hi: f64, width: f64, k: f64) {
    let Some(g) = g else { return };
    if lo - k * width < g.x_min() || hi + k * width > g.x_max() {
        issues.push(ConfigIssue::new(
            field,
            format!(
                "packet support [{:.4}, {:.4}] ± {k}σ (σ = {width:.4}) leaves the grid [{}, {}]",
                lo,
                hi,
                g.x_min(),
                g.x_max()
            ),
        ));
    }
}

fn integer_ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let n = r.round();
    (n >= 1.0 && (r - n).abs() < 1e-9 * n).then_some(n as usize)
}

fn scenario_rules(
    s: &Scenario,
    g: Option<&Grid1D>,
    so: &SolverSection,
    sd: &SdeSection,
    k: &KernelSection,
    c: &PhysicalConstants,
    issues: &mut Vec<ConfigIssue>,
) {
    let t_solver = so.dt * so.n_steps as f64;
    let t_sde = sd.dt * sd.n_steps as f64;
    match s {
        Scenario::FreeGaussian(p) => {
            positive(issues, "scenario.width", p.width);
            at_least_one(issues, "solver.n_steps", so.n_steps);
            at_least_one(issues, "scenario.histogram_bins", p.histogram_bins);
            if p.width > 0.0 {
                contain(issues, "scenario.center", g, p.center, p.center, p.width, INITIAL_CLEARANCE);
                let end = p.center + p.momentum / c.mass() * t_solver;
                contain(issues, "scenario.center", g, end, end, spread(p.width, t_solver, c), FINAL_CLEARANCE);
            }
            if so.dt > 0.0 && sd.dt > 0.0 && integer_ratio(sd.dt, so.dt).is_none() {
                issues.push(ConfigIssue::new(
                    "sde.dt",
                    format!("frame stride: sde.dt = {} must be a whole multiple of solver.dt = {}", sd.dt, so.dt),
                ));
            }
            if (t_solver - t_sde).abs() > 1e-9 * t_solver.max(1.0) {
                issues.push(ConfigIssue::new(
                    "sde.n_steps",
                    format!("SDE run time {t_sde} must equal the solver run time {t_solver}"),
                ));
            }
        }
        Scenario::Harmonic(p) => {
            positive(issues, "scenario.omega", p.omega);
            at_least_one(issues, "solver.n_steps", so.n_steps);
            if p.omega > 0.0 {
                let sigma = (c.hbar() / (2.0 * c.mass() * p.omega)).sqrt();
                let amp = ((p.q0 - p.center).powi(2) + (p.p0 / (c.mass() * p.omega)).powi(2)).sqrt();
                contain(issues, "scenario.q0", g, p.center - amp, p.center + amp, sigma, FINAL_CLEARANCE);
            }
        }
        Scenario::PlaneWaveCalibration(p) => {
            let [a, b] = p.window;
            if let Some(g) = g {
                if !(a < b && a > g.x_min() && b < g.x_max()) {
                    issues.push(ConfigIssue::new("scenario.window", format!("window [{a}, {b}] must lie strictly inside the grid")));
                } else if ((b - a) / g.dx()) < 8.0 {
                    issues.push(ConfigIssue::new("scenario.window", "window must span at least 8 grid cells"));
                }
            }
            positive(issues, "scenario.max_relative_error", p.max_relative_error);
        }
        Scenario::DoubleSlit(p) => {
            positive(issues, "scenario.slit_width", p.slit_width);
            if !(p.slit_separation > 2.0 * p.slit_width) {
                issues.push(ConfigIssue::new("scenario.slit_separation", "need slit_separation > 2 slit_width"));
            }
            at_least_one(issues, "sde.n_steps", sd.n_steps);
            if p.slit_width > 0.0 {
                let h = 0.5 * p.slit_separation;
                contain(issues, "scenario.slit_separation", g, -h, h, p.slit_width, INITIAL_CLEARANCE);
                contain(issues, "scenario.slit_separation", g, -h, h, spread(p.slit_width, t_sde, c), FINAL_CLEARANCE);
            }
            histogram_window(issues, g, p.histogram_range, p.histogram_bins);
        }
        Scenario::HydrogenScaling(p) => {
            if p.z == 0 || p.n == 0 || p.identity_grid_max == 0 {
                issues.push(ConfigIssue::new("scenario", "z, n and identity_grid_max must be at least 1"));
            }
        }
        Scenario::UncertaintyScaling(p) => {
            positive(issues, "scenario.dt", p.dt);
            if p.n_increments < dualpath_core::scenarios::scaling::MIN_UNCERTAINTY_SAMPLES {
                issues.push(ConfigIssue::new(
                    "scenario.n_increments",
                    format!("at least {} increments needed", dualpath_core::scenarios::scaling::MIN_UNCERTAINTY_SAMPLES),
                ));
            }
        }
        Scenario::KernelComparison(p) => {
            positive(issues, "scenario.width", p.width);
            positive(issues, "scenario.t_total", p.t_total);
            if p.width > 0.0 {
                contain(issues, "scenario.center", g, p.center, p.center, p.width, INITIAL_CLEARANCE);
            }
            if let Some(g) = g.filter(|g| k.node_stride > 0 && !(g.len() - 1).is_multiple_of(k.node_stride)) {
                issues.push(ConfigIssue::new(
                    "kernel.node_stride",
                    format!("stride {} must divide the {} grid cells", k.node_stride, g.len() - 1),
                ));
            }
            if k.solver_dt > 0.0 && p.t_total > 0.0 && integer_ratio(p.t_total, k.solver_dt).is_none() {
                issues.push(ConfigIssue::new("kernel.solver_dt", "must divide t_total into whole steps"));
            }
            if p.convergence_samples.len() < 2 || p.convergence_samples.contains(&0) {
                issues.push(ConfigIssue::new("scenario.convergence_samples", "need at least two positive sample counts"));
            }
        }
        Scenario::Entanglement(p) => {
            positive(issues, "scenario.width", p.width);
            at_least_one(issues, "sde.n_steps", sd.n_steps);
            if p.width > 0.0 {
                let h = 0.5 * p.separation;
                contain(issues, "scenario.separation", g, -h, h, p.width, INITIAL_CLEARANCE);
                let end = h + p.momentum.abs() / c.mass() * t_sde;
                contain(issues, "scenario.separation", g, -end, end, spread(p.width, t_sde, c), FINAL_CLEARANCE);
            }
            if !(p.separation > 0.0) {
                issues.push(ConfigIssue::new("scenario.separation", "orbitals must be separated"));
            }
        }
        Scenario::H2PlusChannel(p) => {
            positive(issues, "scenario.width", p.width);
            at_least_one(issues, "sde.n_steps", sd.n_steps);
            if p.width > 0.0 {
                let h = 0.5 * p.separation;
                contain(issues, "scenario.separation", g, -h, h, p.width, INITIAL_CLEARANCE);
                let end = h + p.recoil_momentum.abs() / c.mass() * t_sde;
                contain(issues, "scenario.separation", g, -end, end, spread(p.width, t_sde, c), FINAL_CLEARANCE);
            }
        }
        Scenario::ClassicalLimit(p) => {
            positive(issues, "scenario.omega", p.omega);
            positive(issues, "scenario.periods", p.periods);
            if p.hbar_scales.is_empty() || p.hbar_scales.iter().any(|h| !(*h > 0.0)) {
                issues.push(ConfigIssue::new("scenario.hbar_scales", "need at least one positive hbar"));
            }
            if sd.n_paths < 2 {
                issues.push(ConfigIssue::new("sde.n_paths", "classical limit needs at least 2 paths"));
            }
        }
    }
}

fn histogram_window(issues: &mut Vec<ConfigIssue>, g: Option<&Grid1D>, range: [f64; 2], bins: usize) {
    at_least_one(issues, "scenario.histogram_bins", bins);
    let [a, b] = range;
    let inside = g.is_none_or(|g| a >= g.x_min() && b <= g.x_max());
    if !(a < b && inside) {
        issues.push(ConfigIssue::new("scenario.histogram_range", format!("[{a}, {b}] must be a sub-interval of the grid")));
    }
}

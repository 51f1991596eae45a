use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::drift::{drift_at, DriftFieldFrame, DriftOptions};
use super::frames::FrameSource;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::par;
use crate::seeding::{derive_seed, stage, stream_rng};
use crate::stats::{BinSpec, GridSampler, Histogram};

/// Frames may be at most this many SDE steps apart.
pub const MAX_FRAME_STRIDE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub n_paths: usize,
    pub master_seed: u64,
    #[serde(default = "yes")]
    pub noise_on: bool,
    #[serde(default = "default_floor")]
    pub rho_floor: f64,
    #[serde(default)]
    pub clamp_value: Option<f64>,
    #[serde(default)]
    pub interpolation: Interpolation,
    /// Record all positions every this many steps; 0 keeps only start and end.
    #[serde(default)]
    pub record_every: usize,
}

fn yes() -> bool {
    true
}

fn default_floor() -> f64 {
    1e-12
}

impl SdeConfig {
    pub fn new(dt: f64, n_steps: usize, n_paths: usize, master_seed: u64) -> Self {
        SdeConfig {
            dt,
            n_steps,
            n_paths,
            master_seed,
            noise_on: true,
            rho_floor: default_floor(),
            clamp_value: None,
            interpolation: Interpolation::Linear,
            record_every: 0,
        }
    }

    pub fn noise_off(self) -> Self {
        SdeConfig { noise_on: false, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("sde.dt must be positive, got {}", self.dt)));
        }
        if self.n_paths == 0 {
            return Err(Error::InvalidArgument("sde.n_paths must be at least 1".into()));
        }
        if let Some(c) = self.clamp_value {
            if !(c > 0.0) {
                return Err(Error::InvalidArgument(format!("sde.clamp_value must be positive, got {c}")));
            }
        }
        if !(self.rho_floor >= 0.0) {
            return Err(Error::InvalidArgument(format!("sde.rho_floor must be non-negative, got {}", self.rho_floor)));
        }
        Ok(())
    }

    pub fn drift_options(&self) -> DriftOptions {
        DriftOptions { rho_floor: self.rho_floor, clamp_value: self.clamp_value }
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

/// Folds `x` back into `[lo, hi]` by mirror reflection; returns the number of bounces.
pub fn reflect(mut x: f64, lo: f64, hi: f64) -> (f64, u32) {
    let mut bounces = 0;
    while x < lo || x > hi {
        x = if x < lo { 2.0 * lo - x } else { 2.0 * hi - x };
        bounces += 1;
        if bounces > 64 {
            x = x.clamp(lo, hi);
            break;
        }
    }
    (x, bounces)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub x: f64,
    pub reflections: u32,
    pub flagged: bool,
    pub clamped: bool,
}

/// x' = x + α^Real(x)·dt + √(ħ/m)·ΔW, ΔW ~ N(0, dt), reflected at the grid edges.
pub fn euler_maruyama_step<R: Rng + ?Sized>(
    x: f64,
    frame: &DriftFieldFrame,
    dt: f64,
    noise_on: bool,
    rng: &mut R,
    constants: &PhysicalConstants,
) -> Result<StepOutcome> {
    let d = drift_at(frame, x)?;
    let mut next = x + d.velocity * dt;
    if noise_on {
        let z: f64 = rng.sample(StandardNormal);
        next += (constants.noise_variance_rate() * dt).sqrt() * z;
    }
    let (next, reflections) = reflect(next, frame.grid.x_min(), frame.grid.x_max());
    Ok(StepOutcome { x: next, reflections, flagged: d.flagged, clamped: d.clamped })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EnsembleCounters {
    pub reflections: u64,
    pub flagged_steps: u64,
    pub clamped_steps: u64,
}

impl EnsembleCounters {
    fn add(&mut self, o: &EnsembleCounters) {
        self.reflections += o.reflections;
        self.flagged_steps += o.flagged_steps;
        self.clamped_steps += o.clamped_steps;
    }
}

#[derive(Debug, Clone)]
struct Walker {
    x: f64,
    rng: ChaCha8Rng,
    counters: EnsembleCounters,
}

/// Positions and noise streams of an ensemble between runs. Path `i` draws
/// its noise only from its own stream, so results do not depend on scheduling.
#[derive(Debug, Clone)]
pub struct EnsembleState {
    walkers: Vec<Walker>,
    master_seed: u64,
    time: f64,
}

impl EnsembleState {
    pub fn new(initial: &[f64], master_seed: u64, start_time: f64) -> Self {
        let walkers = initial
            .iter()
            .enumerate()
            .map(|(i, &x)| Walker { x, rng: stream_rng(master_seed, stage::PATH_NOISE, i as u64), counters: EnsembleCounters::default() })
            .collect();
        EnsembleState { walkers, master_seed, time: start_time }
    }

    pub fn len(&self) -> usize {
        self.walkers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walkers.is_empty()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn positions(&self) -> Vec<f64> {
        self.walkers.iter().map(|w| w.x).collect()
    }

    pub fn counters(&self) -> EnsembleCounters {
        let mut c = EnsembleCounters::default();
        for w in &self.walkers {
            c.add(&w.counters);
        }
        c
    }

    /// One Euler–Maruyama step of every path under `frame`.
    pub fn step(&mut self, frame: &DriftFieldFrame, dt: f64, noise_on: bool, constants: &PhysicalConstants) -> Result<()> {
        par::try_for_each_mut(&mut self.walkers, |_, w| {
            let out = euler_maruyama_step(w.x, frame, dt, noise_on, &mut w.rng, constants)?;
            w.x = out.x;
            w.counters.reflections += out.reflections as u64;
            w.counters.flagged_steps += out.flagged as u64;
            w.counters.clamped_steps += out.clamped as u64;
            Ok::<(), Error>(())
        })?;
        self.time += dt;
        Ok(())
    }

    /// Runs `n_steps` steps with frames from `source`, indexed from the start of
    /// this run. `record` sees the positions after every step.
    pub fn run<S>(
        &mut self,
        source: &mut S,
        dt: f64,
        n_steps: usize,
        noise_on: bool,
        constants: &PhysicalConstants,
        mut record: impl FnMut(usize, &EnsembleState),
    ) -> Result<()>
    where
        S: FrameSource<Frame = DriftFieldFrame> + ?Sized,
    {
        let spacing = source.spacing();
        check_coverage(spacing, source.frame_count(), dt, n_steps)?;
        for n in 0..n_steps {
            let k = nearest_frame(n, dt, spacing);
            let frame = source.frame(k)?;
            self.step(frame, dt, noise_on, constants)?;
            record(n + 1, self);
        }
        Ok(())
    }
}

pub(crate) fn nearest_frame(step: usize, dt: f64, spacing: f64) -> usize {
    if spacing.is_infinite() {
        0
    } else {
        (step as f64 * dt / spacing).round() as usize
    }
}

pub(crate) fn check_coverage(spacing: f64, len: Option<usize>, dt: f64, n_steps: usize) -> Result<()> {
    if spacing.is_finite() && spacing > MAX_FRAME_STRIDE * dt * (1.0 + 1e-12) {
        return Err(Error::FrameMismatch(format!(
            "frame spacing {spacing} exceeds {MAX_FRAME_STRIDE} SDE steps of {dt}"
        )));
    }
    let t_end = dt * n_steps as f64;
    match len {
        Some(0) => Err(Error::FrameMismatch("no drift frames".into())),
        Some(1) if n_steps > 0 && spacing.is_finite() => {
            Err(Error::FrameMismatch(format!("a single frame cannot cover [0, {t_end}]")))
        }
        Some(n) if spacing.is_finite() && ((n - 1) as f64) * spacing < t_end * (1.0 - 1e-12) => Err(Error::FrameMismatch(
            format!("frames cover [0, {}] but the run needs [0, {t_end}]", (n - 1) as f64 * spacing),
        )),
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEnsemble {
    pub master_seed: u64,
    pub dt: f64,
    pub noise_on: bool,
    /// Times of the rows of `positions`, strictly increasing.
    pub times: Vec<f64>,
    /// positions[k][i]: path i at times[k].
    pub positions: Vec<Vec<f64>>,
    pub endpoints: Vec<f64>,
    /// Seed of each path's noise stream.
    pub path_seeds: Vec<u64>,
    pub counters: EnsembleCounters,
}

/// Counters and seeds of an ensemble run, without the positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleManifest {
    pub master_seed: u64,
    pub n_paths: usize,
    pub dt: f64,
    pub n_steps: usize,
    pub noise_on: bool,
    pub noise_stage: u64,
    pub counters: EnsembleCounters,
}

impl PathEnsemble {
    pub fn n_paths(&self) -> usize {
        self.endpoints.len()
    }

    pub fn manifest(&self) -> EnsembleManifest {
        EnsembleManifest {
            master_seed: self.master_seed,
            n_paths: self.n_paths(),
            dt: self.dt,
            n_steps: ((self.times.last().copied().unwrap_or(0.0) - self.times.first().copied().unwrap_or(0.0)) / self.dt)
                .round() as usize,
            noise_on: self.noise_on,
            noise_stage: stage::PATH_NOISE,
            counters: self.counters,
        }
    }

    /// One path followed through the recorded times.
    pub fn path(&self, i: usize) -> Vec<f64> {
        self.positions.iter().map(|row| row[i]).collect()
    }

    pub fn write_endpoints_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "path,seed,x")?;
        for (i, (x, s)) in self.endpoints.iter().zip(&self.path_seeds).enumerate() {
            writeln!(w, "{i},{s},{x:.17e}")?;
        }
        Ok(())
    }

    /// Recorded positions of at most `cap` paths as `path,time,x`.
    pub fn write_paths_csv<W: Write>(&self, cap: usize, mut w: W) -> Result<()> {
        writeln!(w, "path,time,x")?;
        for i in 0..cap.min(self.n_paths()) {
            for (t, row) in self.times.iter().zip(&self.positions) {
                writeln!(w, "{i},{t:.17e},{:.17e}", row[i])?;
            }
        }
        Ok(())
    }
}

/// Initial positions drawn from ρ on the grid, one derived stream per path.
pub fn sample_initial_positions(grid: &Grid1D, rho: &[f64], n_paths: usize, master_seed: u64) -> Result<Vec<f64>> {
    let sampler = GridSampler::new(grid, rho)?;
    Ok(par::map_indices(n_paths, |i| sampler.sample(&mut stream_rng(master_seed, stage::INITIAL_POSITIONS, i as u64))))
}

/// Deterministic positions at the quantiles (i + ½)/n of ρ, for noise-off ensembles.
pub fn stratified_initial_positions(grid: &Grid1D, rho: &[f64], n_paths: usize) -> Result<Vec<f64>> {
    let sampler = GridSampler::new(grid, rho)?;
    Ok((0..n_paths).map(|i| sampler.quantile((i as f64 + 0.5) / n_paths as f64)).collect())
}

/// Evolves paths from `initial` through `config.n_steps` steps with the
/// drift frame nearest to each step's start time.
pub fn evolve_ensemble<S>(
    initial: &[f64],
    source: &mut S,
    config: &SdeConfig,
    constants: &PhysicalConstants,
) -> Result<PathEnsemble>
where
    S: FrameSource<Frame = DriftFieldFrame> + ?Sized,
{
    config.validate()?;
    if initial.len() != config.n_paths {
        return Err(Error::LengthMismatch { expected: config.n_paths, found: initial.len() });
    }
    let mut state = EnsembleState::new(initial, config.master_seed, 0.0);
    let mut times = vec![0.0];
    let mut positions = vec![initial.to_vec()];
    let every = config.record_every;
    let n_steps = config.n_steps;
    state.run(source, config.dt, n_steps, config.noise_on, constants, |n, s| {
        if (every > 0 && n % every == 0) || n == n_steps {
            times.push(s.time());
            positions.push(s.positions());
        }
    })?;
    Ok(PathEnsemble {
        master_seed: config.master_seed,
        dt: config.dt,
        noise_on: config.noise_on,
        times,
        endpoints: state.positions(),
        positions,
        path_seeds: (0..config.n_paths).map(|i| derive_seed(config.master_seed, stage::PATH_NOISE, i as u64)).collect(),
        counters: state.counters(),
    })
}

/// Noise-off path from `x0`; identical to a one-path `evolve_ensemble` without noise.
pub fn bohmian_trajectory<S>(x0: f64, source: &mut S, dt: f64, n_steps: usize, constants: &PhysicalConstants) -> Result<Vec<f64>>
where
    S: FrameSource<Frame = DriftFieldFrame> + ?Sized,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let mut state = EnsembleState::new(&[x0], 0, 0.0);
    let mut path = Vec::with_capacity(n_steps + 1);
    path.push(x0);
    state.run(source, dt, n_steps, false, constants, |_, s| path.push(s.walkers[0].x))?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointReport {
    pub histogram: Histogram,
    pub reference_masses: Vec<f64>,
    pub l1: f64,
    pub chi_square: f64,
    pub chi_square_per_bin: Vec<f64>,
    /// Expected L1 of an exact sampler with the same count.
    pub sampling_baseline: f64,
}

impl EndpointReport {
    /// `bin_center,count,reference_density` table.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "bin_center,count,reference_density")?;
        let width = self.histogram.bins.width();
        for (i, (c, m)) in self.histogram.counts.iter().zip(&self.reference_masses).enumerate() {
            writeln!(w, "{:.17e},{c},{:.17e}", self.histogram.bins.center(i), m / width)?;
        }
        Ok(())
    }
}

/// Histogram of the endpoints with L1 and χ² distances to reference bin masses.
pub fn endpoint_histogram(endpoints: &[f64], bins: BinSpec, reference_masses: &[f64]) -> Result<EndpointReport> {
    if endpoints.is_empty() {
        return Err(Error::InsufficientSamples { required: 1, found: 0 });
    }
    if reference_masses.len() != bins.bins {
        return Err(Error::LengthMismatch { expected: bins.bins, found: reference_masses.len() });
    }
    let histogram = Histogram::build(endpoints, bins)?;
    let l1 = histogram.l1_distance(reference_masses);
    let (chi_square, chi_square_per_bin) = histogram.chi_square(reference_masses);
    Ok(EndpointReport {
        sampling_baseline: Histogram::sampling_baseline(reference_masses, endpoints.len()),
        histogram,
        reference_masses: reference_masses.to_vec(),
        l1,
        chi_square,
        chi_square_per_bin,
    })
}

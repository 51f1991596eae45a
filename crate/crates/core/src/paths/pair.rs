use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::drift::{DriftOptions, DEFAULT_CLAMP_FACTOR};
use super::ensemble::{check_coverage, nearest_frame, reflect, EnsembleCounters, SdeConfig};
use super::frames::{FrameSource, FrameStream};
use crate::constants::PhysicalConstants;
use crate::diff;
use crate::error::{Error, Result};
use crate::field::SchroedingerVectorField2D;
use crate::grid::Grid2D;
use crate::par;
use crate::seeding::{derive_seed, stage, stream_rng};

/// Two-particle drift: one velocity component per particle on the product grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDriftFrame {
    pub grid: Grid2D,
    pub time: f64,
    pub alpha1: Vec<f64>,
    pub alpha2: Vec<f64>,
    pub flags: Vec<bool>,
    pub clamped: Vec<bool>,
    pub clamp_value: f64,
}

impl PairDriftFrame {
    pub fn max_speed(&self) -> f64 {
        self.alpha1
            .iter()
            .zip(&self.alpha2)
            .zip(&self.flags)
            .filter(|(_, f)| !**f)
            .map(|((a, b), _)| a.abs().max(b.abs()))
            .fold(0.0, f64::max)
    }

    pub fn with_clamp(mut self, clamp_value: f64) -> Self {
        for k in 0..self.alpha1.len() {
            for a in [&mut self.alpha1[k], &mut self.alpha2[k]] {
                if a.abs() > clamp_value {
                    *a = a.signum() * clamp_value;
                    self.clamped[k] = true;
                }
            }
        }
        self.clamp_value = clamp_value;
        self
    }
}

/// α_k = (ħ/mρ)(φ_r ∂_k φ_c − φ_c ∂_k φ_r) for k = 1, 2.
pub fn build_pair_drift_frame(
    field: &SchroedingerVectorField2D,
    options: &DriftOptions,
    constants: &PhysicalConstants,
) -> PairDriftFrame {
    let grid = *field.grid();
    let (n1, n2) = (grid.q1.len(), grid.q2.len());
    let scale = constants.hbar() / constants.mass();
    let rho = field.density();
    let floor = options.rho_floor * rho.iter().copied().fold(0.0, f64::max);
    let mut cross1 = vec![0.0; grid.len()];
    let mut cross2 = vec![0.0; grid.len()];
    let (pr, pc) = (field.phi_r(), field.phi_c());
    for j in 0..n2 {
        let a: Vec<f64> = (0..n1).map(|i| pr[grid.index(i, j)]).collect();
        let b: Vec<f64> = (0..n1).map(|i| pc[grid.index(i, j)]).collect();
        for (i, v) in diff::cross_gradient(&a, &b, grid.q1.dx()).into_iter().enumerate() {
            cross1[grid.index(i, j)] = v;
        }
    }
    for i in 0..n1 {
        let row = grid.index(i, 0)..grid.index(i, 0) + n2;
        for (j, v) in diff::cross_gradient(&pr[row.clone()], &pc[row], grid.q2.dx()).into_iter().enumerate() {
            cross2[grid.index(i, j)] = v;
        }
    }
    let mut alpha1 = vec![0.0; grid.len()];
    let mut alpha2 = vec![0.0; grid.len()];
    let mut flags = vec![false; grid.len()];
    for k in 0..grid.len() {
        if rho[k] > floor {
            alpha1[k] = scale * cross1[k] / rho[k];
            alpha2[k] = scale * cross2[k] / rho[k];
        } else {
            flags[k] = true;
        }
    }
    let frame = PairDriftFrame {
        grid,
        time: field.time(),
        alpha1,
        alpha2,
        flags,
        clamped: vec![false; grid.len()],
        clamp_value: f64::INFINITY,
    };
    match options.clamp_value {
        Some(c) => frame.with_clamp(c),
        None => frame,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDriftSample {
    pub velocity: [f64; 2],
    pub flagged: bool,
    pub clamped: bool,
}

/// Bilinear interpolation; zero and flagged if any corner of the cell is flagged.
/// The corner sum is ordered so that mirrored queries give mirrored results bit for bit.
pub fn pair_drift_at(frame: &PairDriftFrame, x: [f64; 2]) -> Result<PairDriftSample> {
    let g = &frame.grid;
    let out = |v: f64, axis: &crate::grid::Grid1D| Error::OutOfDomain { x: v, lo: axis.x_min(), hi: axis.x_max() };
    let (i, f1) = g.q1.locate(x[0]).ok_or_else(|| out(x[0], &g.q1))?;
    let (j, f2) = g.q2.locate(x[1]).ok_or_else(|| out(x[1], &g.q2))?;
    let k00 = g.index(i, j);
    let k10 = g.index(i + 1, j);
    let k01 = g.index(i, j + 1);
    let k11 = g.index(i + 1, j + 1);
    let corners = [k00, k10, k01, k11];
    if corners.iter().any(|&k| frame.flags[k]) {
        return Ok(PairDriftSample { velocity: [0.0, 0.0], flagged: true, clamped: false });
    }
    let w00 = (1.0 - f1) * (1.0 - f2);
    let w11 = f1 * f2;
    let w10 = f1 * (1.0 - f2);
    let w01 = (1.0 - f1) * f2;
    let mix = |a: &[f64]| w00 * a[k00] + w11 * a[k11] + (w10 * a[k10] + w01 * a[k01]);
    Ok(PairDriftSample {
        velocity: [mix(&frame.alpha1), mix(&frame.alpha2)],
        flagged: false,
        clamped: corners.iter().any(|&k| frame.clamped[k]),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStepOutcome {
    pub x: [f64; 2],
    pub reflections: u32,
    pub flagged: bool,
    pub clamped: bool,
}

/// Euler–Maruyama step with given standard-normal draws `z` (one per particle).
pub fn pair_step_with_noise(
    x: [f64; 2],
    frame: &PairDriftFrame,
    dt: f64,
    z: Option<[f64; 2]>,
    constants: &PhysicalConstants,
) -> Result<PairStepOutcome> {
    let d = pair_drift_at(frame, x)?;
    let sd = (constants.noise_variance_rate() * dt).sqrt();
    let z = z.unwrap_or([0.0, 0.0]);
    let (a, ra) = reflect(x[0] + d.velocity[0] * dt + sd * z[0], frame.grid.q1.x_min(), frame.grid.q1.x_max());
    let (b, rb) = reflect(x[1] + d.velocity[1] * dt + sd * z[1], frame.grid.q2.x_min(), frame.grid.q2.x_max());
    Ok(PairStepOutcome { x: [a, b], reflections: ra + rb, flagged: d.flagged, clamped: d.clamped })
}

/// Independent Wiener increments per particle, drawn in particle order.
pub fn pair_step<R: Rng + ?Sized>(
    x: [f64; 2],
    frame: &PairDriftFrame,
    dt: f64,
    noise_on: bool,
    rng: &mut R,
    constants: &PhysicalConstants,
) -> Result<PairStepOutcome> {
    let z = if noise_on {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        Some([z1, z2])
    } else {
        None
    };
    pair_step_with_noise(x, frame, dt, z, constants)
}

#[derive(Debug, Clone)]
struct PairWalker {
    x: [f64; 2],
    rng: ChaCha8Rng,
    counters: EnsembleCounters,
    diagonal_crossings: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEnsemble {
    pub master_seed: u64,
    pub dt: f64,
    pub n_steps: usize,
    pub noise_on: bool,
    pub initial: Vec<[f64; 2]>,
    pub endpoints: Vec<[f64; 2]>,
    pub path_seeds: Vec<u64>,
    pub counters: EnsembleCounters,
    /// Steps in which a pair changed the sign of q1 − q2.
    pub diagonal_crossings: u64,
}

/// Evolves pairs (X1, X2) with drift frames nearest each step's start time.
pub fn evolve_pairs<S>(
    initial: &[[f64; 2]],
    source: &mut S,
    config: &SdeConfig,
    constants: &PhysicalConstants,
) -> Result<PairEnsemble>
where
    S: FrameSource<Frame = PairDriftFrame> + ?Sized,
{
    config.validate()?;
    if initial.len() != config.n_paths {
        return Err(Error::LengthMismatch { expected: config.n_paths, found: initial.len() });
    }
    let spacing = source.spacing();
    check_coverage(spacing, source.frame_count(), config.dt, config.n_steps)?;
    let mut walkers: Vec<PairWalker> = initial
        .iter()
        .enumerate()
        .map(|(i, &x)| PairWalker {
            x,
            rng: stream_rng(config.master_seed, stage::PAIR_NOISE, i as u64),
            counters: EnsembleCounters::default(),
            diagonal_crossings: 0,
        })
        .collect();
    for n in 0..config.n_steps {
        let frame = source.frame(nearest_frame(n, config.dt, spacing))?;
        par::try_for_each_mut(&mut walkers, |_, w| {
            let out = pair_step(w.x, frame, config.dt, config.noise_on, &mut w.rng, constants)?;
            if (w.x[0] - w.x[1]).signum() != (out.x[0] - out.x[1]).signum() {
                w.diagonal_crossings += 1;
            }
            w.x = out.x;
            w.counters.reflections += out.reflections as u64;
            w.counters.flagged_steps += out.flagged as u64;
            w.counters.clamped_steps += out.clamped as u64;
            Ok::<(), Error>(())
        })?;
    }
    let mut counters = EnsembleCounters::default();
    let mut crossings = 0;
    for w in &walkers {
        counters.reflections += w.counters.reflections;
        counters.flagged_steps += w.counters.flagged_steps;
        counters.clamped_steps += w.counters.clamped_steps;
        crossings += w.diagonal_crossings;
    }
    Ok(PairEnsemble {
        master_seed: config.master_seed,
        dt: config.dt,
        n_steps: config.n_steps,
        noise_on: config.noise_on,
        initial: initial.to_vec(),
        endpoints: walkers.iter().map(|w| w.x).collect(),
        path_seeds: (0..config.n_paths).map(|i| derive_seed(config.master_seed, stage::PAIR_NOISE, i as u64)).collect(),
        counters,
        diagonal_crossings: crossings,
    })
}

/// Pair positions drawn from ρ(q1, q2): a node by its mass, then uniform within its cell.
pub fn sample_pair_positions(field: &SchroedingerVectorField2D, n_pairs: usize, master_seed: u64) -> Result<Vec<[f64; 2]>> {
    let g = *field.grid();
    let rho = field.density();
    let mut cdf = Vec::with_capacity(rho.len());
    let mut acc = 0.0;
    for r in &rho {
        acc += r;
        cdf.push(acc);
    }
    if !(acc > 0.0) {
        return Err(Error::ZeroNorm(acc));
    }
    Ok(par::map_indices(n_pairs, |p| {
        let mut rng = stream_rng(master_seed, stage::INITIAL_POSITIONS, p as u64);
        let u: f64 = rng.random::<f64>() * acc;
        let k = cdf.partition_point(|&c| c <= u).min(rho.len() - 1);
        let (i, j) = (k / g.q2.len(), k % g.q2.len());
        let j1: f64 = rng.random::<f64>() - 0.5;
        let j2: f64 = rng.random::<f64>() - 0.5;
        [
            (g.q1.x(i) + j1 * g.q1.dx()).clamp(g.q1.x_min(), g.q1.x_max()),
            (g.q2.x(j) + j2 * g.q2.dx()).clamp(g.q2.x_min(), g.q2.x_max()),
        ]
    }))
}

/// Stream of pair drift frames from a closed-form two-particle field.
pub fn analytic_pair_frames<G>(
    t0: f64,
    spacing: f64,
    options: DriftOptions,
    constants: PhysicalConstants,
    field_at: G,
) -> Result<FrameStream<PairDriftFrame, impl FnMut(usize) -> Result<PairDriftFrame>>>
where
    G: Fn(f64) -> Result<SchroedingerVectorField2D>,
{
    let clamp = match options.clamp_value {
        Some(c) => c,
        None => {
            let v = build_pair_drift_frame(&field_at(t0)?, &options, &constants).max_speed();
            if v > 0.0 { DEFAULT_CLAMP_FACTOR * v } else { f64::INFINITY }
        }
    };
    let opts = DriftOptions { clamp_value: Some(clamp), ..options };
    FrameStream::new(spacing, None, move |k| Ok(build_pair_drift_frame(&field_at(t0 + k as f64 * spacing)?, &opts, &constants)))
}

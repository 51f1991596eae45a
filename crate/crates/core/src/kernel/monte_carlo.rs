use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Estimator, KernelConfig};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::field::SchroedingerVectorField;
use crate::grid::Grid1D;
use crate::par;
use crate::potential::PotentialSpec;
use crate::seeding::{stage, stream_rng};

/// Monte Carlo estimate of the propagated field with per-node standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEstimate {
    /// Estimate on the evaluation grid (the run grid coarsened by `node_stride`).
    pub field: SchroedingerVectorField,
    pub std_error_r: Vec<f64>,
    pub std_error_c: Vec<f64>,
    /// Fraction of sampled paths that left the grid at least once.
    pub exit_fraction: f64,
    pub n_samples: usize,
}

impl KernelEstimate {
    /// √(se_r² + se_c²) per node.
    pub fn pooled_std_error(&self) -> Vec<f64> {
        self.std_error_r.iter().zip(&self.std_error_c).map(|(a, b)| (a * a + b * b).sqrt()).collect()
    }

    /// L2 norm of the pooled standard error over the evaluation grid.
    pub fn l2_std_error(&self) -> f64 {
        let dx = self.field.grid().dx();
        (self.pooled_std_error().iter().map(|s| s * s).sum::<f64>() * dx).sqrt()
    }
}

struct Walk {
    end: f64,
    angle: f64,
    exited: bool,
}

/// One backward-time Brownian walk from `x0`. The potential is summed at the
/// positions after each increment, which are the earlier-time ends of the
/// slices in forward time. Positions off the grid evaluate V at the nearest wall.
#[allow(clippy::too_many_arguments)]
fn walk<R: Rng + ?Sized>(
    rng: &mut R,
    x0: f64,
    sd: f64,
    slices: usize,
    dt: f64,
    grid: &Grid1D,
    potential: &PotentialSpec,
    hbar: f64,
    mut record: Option<&mut Vec<f64>>,
) -> Walk {
    let mut x = x0;
    let mut sum = 0.0;
    let mut exited = false;
    if let Some(r) = record.as_deref_mut() {
        r.push(x);
    }
    for _ in 0..slices {
        let z: f64 = rng.sample(StandardNormal);
        x += sd * z;
        if !grid.contains(x) {
            exited = true;
        }
        sum += potential.value(x.clamp(grid.x_min(), grid.x_max()));
        if let Some(r) = record.as_deref_mut() {
            r.push(x);
        }
    }
    Walk { end: x, angle: -dt * sum / hbar, exited }
}

fn evaluation_grid(grid: &Grid1D, stride: usize) -> Result<Grid1D> {
    if stride == 1 {
        Ok(*grid)
    } else {
        grid.coarsen(stride)
    }
}

/// ψ̄(x, t) ≈ mean over Brownian paths from x of exp(angle·J) ψ̄(X_end, 0).
pub fn propagate_by_kernel(
    field0: &SchroedingerVectorField,
    t_total: f64,
    potential: &PotentialSpec,
    config: &KernelConfig,
    constants: &PhysicalConstants,
) -> Result<KernelEstimate> {
    config.validate()?;
    potential.validate()?;
    if !(t_total >= 0.0 && t_total.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_total must be non-negative, got {t_total}")));
    }
    if config.estimator == Estimator::PinnedEndpoint {
        return propagate_pinned(field0, t_total, potential, config, constants);
    }
    let grid = *field0.grid();
    let eval = evaluation_grid(&grid, config.node_stride)?;
    let slices = config.n_time_slices;
    let dt = t_total / slices as f64;
    let sd = (constants.noise_variance_rate() * dt).sqrt();
    let hbar = constants.hbar();
    let n = config.n_samples;

    let per_node = par::map_indices(eval.len(), |j| {
        let node = j * config.node_stride;
        let x0 = grid.x(node);
        let mut rng = stream_rng(config.master_seed, stage::KERNEL_MC, node as u64);
        let (mut mr, mut mc, mut m2r, mut m2c) = (0.0, 0.0, 0.0, 0.0);
        let mut exits = 0usize;
        for k in 0..n {
            let w = walk(&mut rng, x0, sd, slices, dt, &grid, potential, hbar, None);
            let pr = grid.interpolate(field0.phi_r(), w.end);
            let pc = grid.interpolate(field0.phi_c(), w.end);
            let (s, c) = w.angle.sin_cos();
            let (vr, vc) = (c * pr - s * pc, s * pr + c * pc);
            // Welford update.
            let kf = (k + 1) as f64;
            let (dr, dc) = (vr - mr, vc - mc);
            mr += dr / kf;
            mc += dc / kf;
            m2r += dr * (vr - mr);
            m2c += dc * (vc - mc);
            exits += w.exited as usize;
        }
        let nf = n as f64;
        let se = |m2: f64| if n > 1 { (m2 / ((nf - 1.0) * nf)).sqrt() } else { f64::INFINITY };
        (mr, mc, se(m2r), se(m2c), exits)
    });

    let mut phi_r = Vec::with_capacity(eval.len());
    let mut phi_c = Vec::with_capacity(eval.len());
    let mut se_r = Vec::with_capacity(eval.len());
    let mut se_c = Vec::with_capacity(eval.len());
    let mut exits = 0usize;
    for (mr, mc, er, ec, ex) in per_node {
        phi_r.push(mr);
        phi_c.push(mc);
        se_r.push(er);
        se_c.push(ec);
        exits += ex;
    }
    Ok(KernelEstimate {
        field: SchroedingerVectorField::new(eval, phi_r, phi_c, field0.time() + t_total)?,
        std_error_r: se_r,
        std_error_c: se_c,
        exit_fraction: exits as f64 / (n * eval.len()) as f64,
        n_samples: n,
    })
}

/// The first `cap` paths the expectation-form estimator draws for grid node `node`.
pub fn audit_paths(
    field0: &SchroedingerVectorField,
    node: usize,
    t_total: f64,
    potential: &PotentialSpec,
    config: &KernelConfig,
    constants: &PhysicalConstants,
    cap: usize,
) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let grid = *field0.grid();
    if node >= grid.len() {
        return Err(Error::InvalidArgument(format!("node {node} outside grid")));
    }
    let dt = t_total / config.n_time_slices as f64;
    let sd = (constants.noise_variance_rate() * dt).sqrt();
    let mut rng = stream_rng(config.master_seed, stage::KERNEL_MC, node as u64);
    Ok((0..cap.min(config.n_samples))
        .map(|_| {
            let mut rec = Vec::with_capacity(config.n_time_slices + 1);
            walk(&mut rng, grid.x(node), sd, config.n_time_slices, dt, &grid, potential, constants.hbar(), Some(&mut rec));
            rec
        })
        .collect())
}

/// `path,slice,time,x` table; `time` runs backward from the evaluation point.
pub fn write_paths_csv<W: Write>(paths: &[Vec<f64>], dt: f64, mut w: W) -> Result<()> {
    writeln!(w, "path,slice,time,x")?;
    for (p, path) in paths.iter().enumerate() {
        for (k, x) in path.iter().enumerate() {
            writeln!(w, "{p},{k},{:.17e},{x:.17e}", k as f64 * dt)?;
        }
    }
    Ok(())
}

/// G(q, t; q0, 0) = p_t(q − q0) (E[cos a] I + E[sin a] J) on a mesh, from
/// Brownian bridges pinned at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreenMatrix {
    pub mesh: Grid1D,
    pub t_total: f64,
    /// Row-major over (q, q0): heat-kernel density times (E cos a, E sin a).
    pub entries: Vec<[f64; 2]>,
    /// Covariance of the estimated (cos, sin) means, scaled like `entries`²: (v_cc, v_ss, v_cs).
    pub covariance: Vec<[f64; 3]>,
}

impl GreenMatrix {
    pub fn entry(&self, q: usize, q0: usize) -> [[f64; 2]; 2] {
        let [c, s] = self.entries[q * self.mesh.len() + q0];
        [[c, -s], [s, c]]
    }
}

pub fn pinned_green_matrix(
    mesh: &Grid1D,
    t_total: f64,
    potential: &PotentialSpec,
    config: &KernelConfig,
    constants: &PhysicalConstants,
) -> Result<GreenMatrix> {
    config.validate()?;
    potential.validate()?;
    if !(t_total > 0.0 && t_total.is_finite()) {
        return Err(Error::InvalidArgument(format!("pinned kernel needs t_total > 0, got {t_total}")));
    }
    let m = mesh.len();
    let slices = config.n_time_slices;
    let dt = t_total / slices as f64;
    let rate = constants.noise_variance_rate();
    let hbar = constants.hbar();
    let heat_var = rate * t_total;
    let n = config.n_samples;

    let cells = par::map_indices(m * m, |idx| {
        let (qi, q0i) = (idx / m, idx % m);
        let (q, q0) = (mesh.x(qi), mesh.x(q0i));
        let density = (-(q - q0).powi(2) / (2.0 * heat_var)).exp() / (2.0 * std::f64::consts::PI * heat_var).sqrt();
        let mut rng = stream_rng(config.master_seed, stage::KERNEL_BRIDGE, idx as u64);
        let (mut sc, mut ss, mut qcc, mut qss, mut qcs) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let mut x = q0;
            let mut sum = 0.0;
            for k in 0..slices {
                sum += potential.value(x.clamp(mesh.x_min(), mesh.x_max()));
                if k + 1 < slices {
                    let remaining = t_total - k as f64 * dt;
                    let mean = x + (q - x) * dt / remaining;
                    let var = rate * dt * (remaining - dt) / remaining;
                    let z: f64 = rng.sample(StandardNormal);
                    x = mean + var.sqrt() * z;
                }
            }
            let (s, c) = (-dt * sum / hbar).sin_cos();
            sc += c;
            ss += s;
            qcc += c * c;
            qss += s * s;
            qcs += c * s;
        }
        let nf = n as f64;
        let (mc, ms) = (sc / nf, ss / nf);
        let denom = if n > 1 { nf * (nf - 1.0) / nf } else { f64::INFINITY };
        let d2 = density * density;
        (
            [density * mc, density * ms],
            [
                d2 * (qcc / nf - mc * mc).max(0.0) / denom,
                d2 * (qss / nf - ms * ms).max(0.0) / denom,
                d2 * (qcs / nf - mc * ms) / denom,
            ],
        )
    });
    let (entries, covariance) = cells.into_iter().unzip();
    Ok(GreenMatrix { mesh: *mesh, t_total, entries, covariance })
}

/// ψ̄(q, t) = Σ_{q0} G(q, t; q0, 0) ψ̄(q0, 0) Δq0 on the mesh coarsened by `node_stride`.
pub fn propagate_pinned(
    field0: &SchroedingerVectorField,
    t_total: f64,
    potential: &PotentialSpec,
    config: &KernelConfig,
    constants: &PhysicalConstants,
) -> Result<KernelEstimate> {
    let grid = *field0.grid();
    let mesh = evaluation_grid(&grid, config.node_stride)?;
    if t_total == 0.0 {
        let pick = |v: &[f64]| (0..mesh.len()).map(|j| v[j * config.node_stride]).collect::<Vec<_>>();
        return Ok(KernelEstimate {
            field: SchroedingerVectorField::new(mesh, pick(field0.phi_r()), pick(field0.phi_c()), field0.time())?,
            std_error_r: vec![0.0; mesh.len()],
            std_error_c: vec![0.0; mesh.len()],
            exit_fraction: 0.0,
            n_samples: config.n_samples,
        });
    }
    let std = (constants.noise_variance_rate() * t_total).sqrt();
    if std < 2.0 * mesh.dx() {
        return Err(Error::KernelUnderresolved { std, two_dx: 2.0 * mesh.dx() });
    }
    let g = pinned_green_matrix(&mesh, t_total, potential, config, constants)?;
    let m = mesh.len();
    let w = mesh.dx();
    let src_r: Vec<f64> = (0..m).map(|j| field0.phi_r()[j * config.node_stride]).collect();
    let src_c: Vec<f64> = (0..m).map(|j| field0.phi_c()[j * config.node_stride]).collect();
    let mut phi_r = vec![0.0; m];
    let mut phi_c = vec![0.0; m];
    let mut var_r = vec![0.0; m];
    let mut var_c = vec![0.0; m];
    for q in 0..m {
        for q0 in 0..m {
            let k = q * m + q0;
            let [c, s] = g.entries[k];
            let [vcc, vss, vcs] = g.covariance[k];
            let (pr, pc) = (src_r[q0], src_c[q0]);
            phi_r[q] += w * (c * pr - s * pc);
            phi_c[q] += w * (s * pr + c * pc);
            var_r[q] += w * w * (pr * pr * vcc + pc * pc * vss - 2.0 * pr * pc * vcs);
            var_c[q] += w * w * (pr * pr * vss + pc * pc * vcc + 2.0 * pr * pc * vcs);
        }
    }
    Ok(KernelEstimate {
        field: SchroedingerVectorField::new(mesh, phi_r, phi_c, field0.time() + t_total)?,
        std_error_r: var_r.into_iter().map(|v| v.max(0.0).sqrt()).collect(),
        std_error_c: var_c.into_iter().map(|v| v.max(0.0).sqrt()).collect(),
        exit_fraction: 0.0,
        n_samples: config.n_samples,
    })
}

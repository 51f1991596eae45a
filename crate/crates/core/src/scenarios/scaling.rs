//! Order-of-magnitude scaling laws for a bound electron: the trade-off
//! between localization kinetic energy ħ²/(2mΔq²) and Coulomb attraction.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::stats::{moments, Moments};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydrogenScalingResult {
    pub radius: f64,
    pub energy: f64,
    pub z: u32,
    pub n: u32,
}

/// Radius n²ħ²/(Zme²) and energy −Z²me⁴/(2n²ħ²); level n uses ħ → nħ.
pub fn hydrogen_scaling(z: u32, n: u32, constants: &PhysicalConstants) -> Result<HydrogenScalingResult> {
    if z == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("Z and n must be at least 1, got Z={z}, n={n}")));
    }
    let (hbar, m, e2) = (constants.hbar() * n as f64, constants.mass(), constants.charge().powi(2));
    let zf = z as f64;
    Ok(HydrogenScalingResult {
        radius: hbar * hbar / (zf * m * e2),
        energy: -zf * zf * m * e2 * e2 / (2.0 * hbar * hbar),
        z,
        n,
    })
}

/// H(Δq) = ħ²/(2mΔq²) − Ze²/Δq.
pub fn localization_energy(dq: f64, z: f64, constants: &PhysicalConstants) -> f64 {
    let (hbar, m, e2) = (constants.hbar(), constants.mass(), constants.charge().powi(2));
    hbar * hbar / (2.0 * m * dq * dq) - z * e2 / dq
}

fn localization_slope(dq: f64, z: f64, c: &PhysicalConstants) -> f64 {
    let (hbar, m, e2) = (c.hbar(), c.mass(), c.charge().powi(2));
    -hbar * hbar / (m * dq.powi(3)) + z * e2 / (dq * dq)
}

fn localization_curvature(dq: f64, z: f64, c: &PhysicalConstants) -> f64 {
    let (hbar, m, e2) = (c.hbar(), c.mass(), c.charge().powi(2));
    3.0 * hbar * hbar / (m * dq.powi(4)) - 2.0 * z * e2 / dq.powi(3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub z: u32,
    pub argmin: f64,
    pub expected_argmin: f64,
    pub relative_error: f64,
    pub energy_at_min: f64,
    pub slope_at_min: f64,
    /// H rises monotonically towards 0⁻ on a geometric sweep beyond the minimum.
    pub monotone_tail: bool,
}

/// Numerical minimization of H over (0, 100 a0]: golden-section bracketing
/// followed by Newton steps on dH/dΔq.
pub fn scaling_stationarity_check(z: u32, constants: &PhysicalConstants) -> Result<StationarityReport> {
    if z == 0 {
        return Err(Error::InvalidArgument("Z must be at least 1".into()));
    }
    let zf = z as f64;
    let a0 = hydrogen_scaling(1, 1, constants)?.radius;
    let expected = a0 / zf;
    let h = |q: f64| localization_energy(q, zf, constants);

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (1e-6 * a0, 100.0 * a0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (h(x1), h(x2));
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = h(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = h(x2);
        }
        if hi - lo < 1e-10 * a0 {
            break;
        }
    }
    let mut q = 0.5 * (lo + hi);
    for _ in 0..20 {
        let step = localization_slope(q, zf, constants) / localization_curvature(q, zf, constants);
        q -= step;
        if step.abs() < 1e-15 * q {
            break;
        }
    }
    let tail: Vec<f64> = (0..40).map(|k| h(q * 1.5f64.powi(k + 1))).collect();
    let monotone_tail = tail.windows(2).all(|w| w[1] > w[0]) && tail.iter().all(|&v| v < 0.0);
    Ok(StationarityReport {
        z,
        argmin: q,
        expected_argmin: expected,
        relative_error: (q - expected).abs() / expected,
        energy_at_min: h(q),
        slope_at_min: localization_slope(q, zf, constants),
        monotone_tail,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyProducts {
    pub n: usize,
    pub dt: f64,
    /// m·mean(Δq²)/Δt, compared with ħ.
    pub pq_product: f64,
    pub pq_std_error: f64,
    /// (m/2)·mean(Δq²)/Δt, compared with ħ/2.
    pub et_product: f64,
    pub et_std_error: f64,
}

pub const MIN_UNCERTAINTY_SAMPLES: usize = 1000;

/// Momentum-position and energy-time products from drift-free increments over Δt.
pub fn uncertainty_estimators(increments: &[f64], dt: f64, constants: &PhysicalConstants) -> Result<UncertaintyProducts> {
    if increments.len() < MIN_UNCERTAINTY_SAMPLES {
        return Err(Error::InsufficientSamples { required: MIN_UNCERTAINTY_SAMPLES, found: increments.len() });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let m = constants.mass();
    let pq: Vec<f64> = increments.iter().map(|d| m * d * d / dt).collect();
    let Moments { mean, std_error, .. } = moments(&pq);
    Ok(UncertaintyProducts {
        n: increments.len(),
        dt,
        pq_product: mean,
        pq_std_error: std_error,
        et_product: 0.5 * mean,
        et_std_error: 0.5 * std_error,
    })
}

/// Drift-free increments √(ħ/m)·ΔW over `dt` from the Wiener stream of `seed`.
pub fn wiener_increments(n: usize, dt: f64, constants: &PhysicalConstants, seed: u64) -> Vec<f64> {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let sd = (constants.noise_variance_rate() * dt).sqrt();
    let mut rng = crate::seeding::stream_rng(seed, crate::seeding::stage::WIENER, dt.to_bits());
    (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            sd * z
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WienerScaling {
    pub n: usize,
    pub dt: f64,
    /// Var(Δq)/Δt at dt, compared with ħ/m.
    pub rate: f64,
    pub rate_std_error: f64,
    /// The same at dt/4, where the typical Δq halves.
    pub quarter_rate: f64,
    pub quarter_rate_std_error: f64,
    pub mean_abs_step: f64,
    pub quarter_mean_abs_step: f64,
}

/// Var(Δq)/Δt from `n` drift-free increments, re-simulated at Δt/4.
pub fn wiener_scaling_check(n: usize, dt: f64, constants: &PhysicalConstants, seed: u64) -> Result<WienerScaling> {
    if n < 2 {
        return Err(Error::InsufficientSamples { required: 2, found: n });
    }
    let rate = |inc: &[f64], dt: f64| {
        let sq: Vec<f64> = inc.iter().map(|d| d * d / dt).collect();
        let m = moments(&sq);
        let mean_abs = inc.iter().map(|d| d.abs()).sum::<f64>() / inc.len() as f64;
        (m.mean, m.std_error, mean_abs)
    };
    let (r, re, a) = rate(&wiener_increments(n, dt, constants, seed), dt);
    let (q, qe, qa) = rate(&wiener_increments(n, dt / 4.0, constants, seed), dt / 4.0);
    Ok(WienerScaling {
        n,
        dt,
        rate: r,
        rate_std_error: re,
        quarter_rate: q,
        quarter_rate_std_error: qe,
        mean_abs_step: a,
        quarter_mean_abs_step: qa,
    })
}

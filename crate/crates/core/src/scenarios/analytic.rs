//! Closed-form fields used as oracles and as drift sources.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::field::SchroedingerVectorField;
use crate::grid::Grid1D;
use crate::potential::PotentialSpec;

/// Free Gaussian wave packet parameters at t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianOrbital {
    pub center: f64,
    pub width: f64,
    #[serde(default)]
    pub momentum: f64,
}

impl GaussianOrbital {
    pub fn new(center: f64, width: f64, momentum: f64) -> Self {
        GaussianOrbital { center, width, momentum }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::InvalidArgument(format!("orbital width must be positive, got {}", self.width)));
        }
        if !(self.center.is_finite() && self.momentum.is_finite()) {
            return Err(Error::InvalidArgument("orbital center and momentum must be finite".into()));
        }
        Ok(())
    }

    /// Exact freely evolved amplitude ψ(x, t).
    ///
    /// ψ = (2πσ0²)^{-1/4} (1 + iτ)^{-1/2} exp(−(x − q0 − p0t/m)²/(4σ0²(1 + iτ)) + ik0(x − q0) − iħk0²t/2m)
    /// with τ = ħt/(2mσ0²) and k0 = p0/ħ.
    pub fn amplitude(&self, x: f64, t: f64, constants: &PhysicalConstants) -> Complex64 {
        let (hbar, m) = (constants.hbar(), constants.mass());
        let s2 = self.width * self.width;
        let tau = hbar * t / (2.0 * m * s2);
        let spread = Complex64::new(1.0, tau);
        let k0 = self.momentum / hbar;
        let d = x - self.center - self.momentum * t / m;
        let exponent = Complex64::new(-d * d, 0.0) / (4.0 * s2 * spread)
            + Complex64::i() * (k0 * (x - self.center) - hbar * k0 * k0 * t / (2.0 * m));
        (2.0 * PI * s2).powf(-0.25) * exponent.exp() / spread.sqrt()
    }

    /// Position standard deviation of |ψ|² at time t.
    pub fn density_width(&self, t: f64, constants: &PhysicalConstants) -> f64 {
        let spread = constants.hbar() * t / (2.0 * constants.mass() * self.width);
        (self.width * self.width + spread * spread).sqrt()
    }

    /// ⟨ψ_a|ψ_b⟩ for two free orbitals; time independent.
    pub fn overlap(&self, other: &GaussianOrbital, constants: &PhysicalConstants) -> Complex64 {
        let (s1, s2) = (self.width * self.width, other.width * other.width);
        let (k1, k2) = (self.momentum / constants.hbar(), other.momentum / constants.hbar());
        // ∫ a*(x) b(x) dx at t = 0 in closed form.
        let a = Complex64::new(1.0 / (4.0 * s1) + 1.0 / (4.0 * s2), 0.0);
        let b = Complex64::new(self.center / (2.0 * s1) + other.center / (2.0 * s2), k2 - k1);
        let c = Complex64::new(
            -self.center * self.center / (4.0 * s1) - other.center * other.center / (4.0 * s2),
            k1 * self.center - k2 * other.center,
        );
        let norm = (2.0 * PI * s1).powf(-0.25) * (2.0 * PI * s2).powf(-0.25);
        norm * (PI / a).sqrt() * (b * b / (4.0 * a) + c).exp()
    }
}

fn sample(grid: &Grid1D, t: f64, f: impl Fn(f64) -> Complex64) -> Result<SchroedingerVectorField> {
    SchroedingerVectorField::from_fn(*grid, t, |x| {
        let z = f(x);
        (z.re, z.im)
    })
}

/// The exactly dispersed free Gaussian sampled on `grid` (not renormalized).
pub fn analytic_free_gaussian(
    grid: &Grid1D,
    t: f64,
    orbital: &GaussianOrbital,
    constants: &PhysicalConstants,
) -> Result<SchroedingerVectorField> {
    orbital.validate()?;
    sample(grid, t, |x| orbital.amplitude(x, t, constants))
}

/// Transverse two-slit model: equal-weight superposition of free Gaussians centred at ±d/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleSlitSpec {
    pub slit_separation: f64,
    pub slit_width: f64,
    /// Longitudinal momentum; contributes a global phase only.
    #[serde(default)]
    pub forward_momentum: f64,
    pub screen_time: f64,
}

impl DoubleSlitSpec {
    pub fn validate(&self) -> Result<()> {
        let (d, s) = (self.slit_separation, self.slit_width);
        if !(s > 0.0 && d > 2.0 * s && d.is_finite()) {
            return Err(Error::InvalidArgument(format!("double slit needs d > 2σ > 0, got d = {d}, σ = {s}")));
        }
        if !(self.screen_time > 0.0 && self.screen_time.is_finite()) {
            return Err(Error::InvalidArgument("screen_time must be positive".into()));
        }
        Ok(())
    }

    pub fn slits(&self) -> [GaussianOrbital; 2] {
        let h = 0.5 * self.slit_separation;
        [GaussianOrbital::new(-h, self.slit_width, 0.0), GaussianOrbital::new(h, self.slit_width, 0.0)]
    }

    /// Far-field fringe period 2πħt/(m d).
    pub fn fringe_spacing(&self, t: f64, constants: &PhysicalConstants) -> f64 {
        2.0 * PI * constants.hbar() * t / (constants.mass() * self.slit_separation)
    }

    pub fn amplitude(&self, x: f64, t: f64, constants: &PhysicalConstants) -> Complex64 {
        let [a, b] = self.slits();
        let overlap = (-self.slit_separation.powi(2) / (8.0 * self.slit_width.powi(2))).exp();
        let norm = 1.0 / (2.0 * (1.0 + overlap)).sqrt();
        let longitudinal = -self.forward_momentum.powi(2) * t / (2.0 * constants.mass() * constants.hbar());
        norm * (a.amplitude(x, t, constants) + b.amplitude(x, t, constants)) * Complex64::from_polar(1.0, longitudinal)
    }

    /// Exact interference minima of |ψ|² inside `[lo, hi]`.
    ///
    /// The relative phase of the two slit amplitudes is x d τ/(2σ²(1 + τ²)); the
    /// density vanishes nowhere, but its minima sit where that phase is an odd
    /// multiple of π.
    pub fn minima(&self, t: f64, lo: f64, hi: f64, constants: &PhysicalConstants) -> Vec<f64> {
        let s2 = self.slit_width * self.slit_width;
        let tau = constants.hbar() * t / (2.0 * constants.mass() * s2);
        let rate = self.slit_separation * tau / (2.0 * s2 * (1.0 + tau * tau));
        if rate == 0.0 {
            return Vec::new();
        }
        let period = 2.0 * PI / rate;
        let first = ((lo / period) - 0.5).ceil() as i64;
        (first..)
            .map(|k| (k as f64 + 0.5) * period)
            .take_while(|x| *x <= hi)
            .collect()
    }
}

pub fn double_slit_field(
    grid: &Grid1D,
    spec: &DoubleSlitSpec,
    t: f64,
    constants: &PhysicalConstants,
) -> Result<SchroedingerVectorField> {
    spec.validate()?;
    sample(grid, t, |x| spec.amplitude(x, t, constants))
}

/// Harmonic coherent state: the Gaussian ground-state profile displaced to (q0, p0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentStateSpec {
    pub omega: f64,
    #[serde(default)]
    pub center: f64,
    pub q0: f64,
    #[serde(default)]
    pub p0: f64,
}

impl CoherentStateSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidArgument("coherent state omega must be positive".into()));
        }
        Ok(())
    }

    pub fn potential(&self, constants: &PhysicalConstants) -> PotentialSpec {
        PotentialSpec::harmonic(self.omega, constants.mass(), self.center)
    }

    /// Ground-state position width √(ħ/(2mω)).
    pub fn width(&self, constants: &PhysicalConstants) -> f64 {
        (constants.hbar() / (2.0 * constants.mass() * self.omega)).sqrt()
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    /// Exact classical phase-space point (q_c, p_c) at time t.
    pub fn classical(&self, t: f64, constants: &PhysicalConstants) -> (f64, f64) {
        let m = constants.mass();
        let (s, c) = (self.omega * t).sin_cos();
        let dq = self.q0 - self.center;
        (
            self.center + dq * c + self.p0 / (m * self.omega) * s,
            self.p0 * c - m * self.omega * dq * s,
        )
    }

    /// ψ(x, t), phase-aligned with the packet built by [`crate::field::gaussian_packet`] at t = 0.
    pub fn amplitude(&self, x: f64, t: f64, constants: &PhysicalConstants) -> Complex64 {
        let (hbar, m) = (constants.hbar(), constants.mass());
        let (qc, pc) = self.classical(t, constants);
        let (qr, qr0) = (qc - self.center, self.q0 - self.center);
        let d = x - qc;
        let phase = pc * d / hbar + (pc * qr - self.p0 * qr0) / (2.0 * hbar) - 0.5 * self.omega * t;
        let amp = (m * self.omega / (PI * hbar)).powf(0.25) * (-m * self.omega * d * d / (2.0 * hbar)).exp();
        Complex64::from_polar(amp, phase)
    }

    pub fn field(&self, grid: &Grid1D, t: f64, constants: &PhysicalConstants) -> Result<SchroedingerVectorField> {
        self.validate()?;
        sample(grid, t, |x| self.amplitude(x, t, constants))
    }
}

/// Classical trajectory (q, p) sampled every `dt` by velocity Verlet under `potential`.
pub fn classical_trajectory(
    potential: &PotentialSpec,
    q0: f64,
    p0: f64,
    dt: f64,
    n_steps: usize,
    constants: &PhysicalConstants,
) -> Vec<(f64, f64)> {
    let m = constants.mass();
    let (mut q, mut p) = (q0, p0);
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push((q, p));
    for _ in 0..n_steps {
        p += 0.5 * dt * potential.force(q);
        q += dt * p / m;
        p += 0.5 * dt * potential.force(q);
        out.push((q, p));
    }
    out
}

//! The two-component real Schrödinger vector ψ̄ = (φ_r, φ_c) on a grid.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::diff;
use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D};

const ZERO_NORM: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct SchroedingerVectorField {
    grid: Grid1D,
    phi_r: Vec<f64>,
    phi_c: Vec<f64>,
    time: f64,
}

impl SchroedingerVectorField {
    pub fn new(grid: Grid1D, phi_r: Vec<f64>, phi_c: Vec<f64>, time: f64) -> Result<Self> {
        for len in [phi_r.len(), phi_c.len()] {
            if len != grid.len() {
                return Err(Error::LengthMismatch { expected: grid.len(), found: len });
            }
        }
        if let Some(i) = phi_r.iter().zip(&phi_c).position(|(r, c)| !(r.is_finite() && c.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(SchroedingerVectorField { grid, phi_r, phi_c, time })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        SchroedingerVectorField { grid, phi_r: vec![0.0; grid.len()], phi_c: vec![0.0; grid.len()], time: 0.0 }
    }

    /// Samples `f(x) -> (φ_r, φ_c)` at every node.
    pub fn from_fn(grid: Grid1D, time: f64, f: impl Fn(f64) -> (f64, f64)) -> Result<Self> {
        let (phi_r, phi_c) = grid.nodes().map(f).unzip();
        Self::new(grid, phi_r, phi_c, time)
    }

    pub(crate) fn from_parts_unchecked(grid: Grid1D, phi_r: Vec<f64>, phi_c: Vec<f64>, time: f64) -> Self {
        debug_assert_eq!(phi_r.len(), grid.len());
        debug_assert_eq!(phi_c.len(), grid.len());
        SchroedingerVectorField { grid, phi_r, phi_c, time }
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut [f64], &mut f64) {
        (&mut self.phi_r, &mut self.phi_c, &mut self.time)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn phi_r(&self) -> &[f64] {
        &self.phi_r
    }

    pub fn phi_c(&self) -> &[f64] {
        &self.phi_c
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn into_parts(self) -> (Grid1D, Vec<f64>, Vec<f64>, f64) {
        (self.grid, self.phi_r, self.phi_c, self.time)
    }

    /// The symplectic rotation J(φ_r, φ_c) = (−φ_c, φ_r).
    pub fn apply_j(&self) -> Self {
        let phi_r = self.phi_c.iter().map(|c| -c).collect();
        Self::from_parts_unchecked(self.grid, phi_r, self.phi_r.clone(), self.time)
    }

    /// ρ = φ_r² + φ_c² at every node.
    pub fn density(&self) -> Vec<f64> {
        self.phi_r.iter().zip(&self.phi_c).map(|(r, c)| r * r + c * c).collect()
    }

    /// Σ ρ dx.
    pub fn norm(&self) -> f64 {
        self.density().iter().sum::<f64>() * self.grid.dx()
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm >= ZERO_NORM) {
            return Err(Error::ZeroNorm(norm));
        }
        Ok(self.scaled(1.0 / norm.sqrt()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_parts_unchecked(
            self.grid,
            self.phi_r.iter().map(|v| v * factor).collect(),
            self.phi_c.iter().map(|v| v * factor).collect(),
            self.time,
        )
    }

    /// Rotates every node vector by `angle`, i.e. applies exp(angle·J).
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let (phi_r, phi_c) = self
            .phi_r
            .iter()
            .zip(&self.phi_c)
            .map(|(&r, &i)| (c * r - s * i, s * r + c * i))
            .unzip();
        Self::from_parts_unchecked(self.grid, phi_r, phi_c, self.time)
    }

    /// Discrete L2 distance Σ|ψ̄_a − ψ̄_b|² dx, square-rooted.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let s: f64 = self
            .phi_r
            .iter()
            .zip(&self.phi_c)
            .zip(other.phi_r.iter().zip(&other.phi_c))
            .map(|((ar, ac), (br, bc))| (ar - br).powi(2) + (ac - bc).powi(2))
            .sum();
        (s * self.grid.dx()).sqrt()
    }

    /// ∫ ψ̄ᵀ p̂ ψ̄ dq with p̂ = −ħJ∇, i.e. Σ ħ(φ_r∇φ_c − φ_c∇φ_r) dx.
    pub fn momentum_expectation(&self, constants: &PhysicalConstants) -> f64 {
        diff::cross_gradient(&self.phi_r, &self.phi_c, self.grid.dx()).iter().sum::<f64>()
            * constants.hbar()
            * self.grid.dx()
    }

    /// ⟨q⟩ = Σ q ρ dx / Σ ρ dx.
    pub fn mean_position(&self) -> f64 {
        let rho = self.density();
        let total: f64 = rho.iter().sum();
        self.grid.nodes().zip(&rho).map(|(x, r)| x * r).sum::<f64>() / total
    }

    /// Writes a `x,phi_r,phi_c,rho` table with header row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,phi_r,phi_c,rho")?;
        for (i, x) in self.grid.nodes().enumerate() {
            let (r, c) = (self.phi_r[i], self.phi_c[i]);
            writeln!(w, "{x:.17e},{r:.17e},{c:.17e},{:.17e}", r * r + c * c)?;
        }
        Ok(())
    }

    pub fn header(&self, constants: &PhysicalConstants) -> SnapshotHeader {
        SnapshotHeader { grid: self.grid, constants: *constants, time: self.time }
    }
}

/// JSON side-car describing a CSV field snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub grid: Grid1D,
    pub constants: PhysicalConstants,
    pub time: f64,
}

/// Coherent-state Gaussian N exp(−(q−q0)²/(4σ²)) exp(i p0 (q−q0)/ħ), normalized on the grid.
pub fn gaussian_packet(
    grid: &Grid1D,
    center: f64,
    width: f64,
    momentum: f64,
    constants: &PhysicalConstants,
) -> Result<SchroedingerVectorField> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::InvalidArgument(format!("packet width must be positive, got {width}")));
    }
    if center - grid.x_min() <= 5.0 * width || grid.x_max() - center <= 5.0 * width {
        return Err(Error::PacketTruncated { center, width });
    }
    let amp = (2.0 * PI * width * width).powf(-0.25);
    let k = momentum / constants.hbar();
    SchroedingerVectorField::from_fn(*grid, 0.0, |x| {
        let d = x - center;
        let env = amp * (-d * d / (4.0 * width * width)).exp();
        let (s, c) = (k * d).sin_cos();
        (env * c, env * s)
    })?
    .normalize()
}

/// Unit-amplitude plane wave (cos(p0 q/ħ + χ), sin(p0 q/ħ + χ)) on `[a, b]`, zero elsewhere.
/// Deliberately left unnormalized.
pub fn plane_wave_window(
    grid: &Grid1D,
    momentum: f64,
    interval: (f64, f64),
    phase: f64,
    constants: &PhysicalConstants,
) -> Result<SchroedingerVectorField> {
    let (a, b) = interval;
    if !(a < b && grid.contains(a) && grid.contains(b)) {
        return Err(Error::InvalidArgument(format!(
            "window [{a}, {b}] must lie inside [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    let k = momentum / constants.hbar();
    // Half-cell slack so nodes sitting on the window edges count as inside.
    let eps = 1e-9 * grid.dx();
    SchroedingerVectorField::from_fn(*grid, 0.0, |x| {
        if x >= a - eps && x <= b + eps {
            let (s, c) = (k * x + phase).sin_cos();
            (c, s)
        } else {
            (0.0, 0.0)
        }
    })
}

/// Two-particle field on a product grid, row-major over (q1, q2).
#[derive(Debug, Clone, PartialEq)]
pub struct SchroedingerVectorField2D {
    grid: Grid2D,
    phi_r: Vec<f64>,
    phi_c: Vec<f64>,
    time: f64,
}

impl SchroedingerVectorField2D {
    pub fn new(grid: Grid2D, phi_r: Vec<f64>, phi_c: Vec<f64>, time: f64) -> Result<Self> {
        for len in [phi_r.len(), phi_c.len()] {
            if len != grid.len() {
                return Err(Error::LengthMismatch { expected: grid.len(), found: len });
            }
        }
        if let Some(i) = phi_r.iter().zip(&phi_c).position(|(r, c)| !(r.is_finite() && c.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(SchroedingerVectorField2D { grid, phi_r, phi_c, time })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn phi_r(&self) -> &[f64] {
        &self.phi_r
    }

    pub fn phi_c(&self) -> &[f64] {
        &self.phi_c
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn at(&self, i: usize, j: usize) -> (f64, f64) {
        let k = self.grid.index(i, j);
        (self.phi_r[k], self.phi_c[k])
    }

    pub fn density(&self) -> Vec<f64> {
        self.phi_r.iter().zip(&self.phi_c).map(|(r, c)| r * r + c * c).collect()
    }

    pub fn norm(&self) -> f64 {
        self.density().iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm >= ZERO_NORM) {
            return Err(Error::ZeroNorm(norm));
        }
        let f = 1.0 / norm.sqrt();
        Ok(SchroedingerVectorField2D {
            grid: self.grid,
            phi_r: self.phi_r.iter().map(|v| v * f).collect(),
            phi_c: self.phi_c.iter().map(|v| v * f).collect(),
            time: self.time,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D {
        Grid1D::new(-10.0, 10.0, 401).unwrap()
    }

    fn field(r: Vec<f64>, c: Vec<f64>) -> SchroedingerVectorField {
        let g = Grid1D::new(0.0, 1.0, r.len()).unwrap();
        SchroedingerVectorField::new(g, r, c, 0.0).unwrap()
    }

    #[test]
    fn j_maps_real_unit_to_imaginary_unit() {
        let f = field(vec![1.0; 8], vec![0.0; 8]).apply_j();
        assert!(f.phi_r().iter().all(|&v| v == 0.0));
        assert!(f.phi_c().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn j_rotates_by_quarter_turn() {
        let thetas: Vec<f64> = (0..8).map(|i| 0.7 * i as f64).collect();
        let f = field(thetas.iter().map(|t| t.cos()).collect(), thetas.iter().map(|t| t.sin()).collect());
        let g = f.apply_j();
        for (i, t) in thetas.iter().enumerate() {
            assert_eq!(g.phi_r()[i], -t.sin());
            assert_eq!(g.phi_c()[i], t.cos());
        }
    }

    #[test]
    fn density_examples() {
        let f = field(vec![0.6; 8], vec![0.8; 8]);
        assert!(f.density().iter().all(|&r| (r - 1.0).abs() < 1e-15));
        let z = SchroedingerVectorField::zeros(grid());
        assert!(z.density().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn normalize_halves_norm_four_field() {
        let g = Grid1D::new(0.0, 7.0, 8).unwrap();
        // Σρ dx = 8 nodes × ρ × 1 = 4 with ρ = 0.5
        let a = 0.5f64.sqrt();
        let f = SchroedingerVectorField::new(g, vec![a; 8], vec![0.0; 8], 0.0).unwrap();
        assert!((f.norm() - 4.0).abs() < 1e-14);
        let n = f.normalize().unwrap();
        for v in n.phi_r() {
            assert!((v - a / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_rejects_zero_field() {
        assert!(matches!(SchroedingerVectorField::zeros(grid()).normalize(), Err(Error::ZeroNorm(_))));
    }

    #[test]
    fn new_rejects_bad_arrays() {
        let g = grid();
        assert!(matches!(
            SchroedingerVectorField::new(g, vec![0.0; 3], vec![0.0; 401], 0.0),
            Err(Error::LengthMismatch { .. })
        ));
        let mut r = vec![0.0; 401];
        r[17] = f64::NAN;
        assert!(matches!(SchroedingerVectorField::new(g, r, vec![0.0; 401], 0.0), Err(Error::NonFinite(17))));
    }

    #[test]
    fn packet_with_zero_momentum_is_real() {
        let p = gaussian_packet(&grid(), 0.5, 1.0, 0.0, &PhysicalConstants::ATOMIC).unwrap();
        assert!(p.phi_c().iter().all(|&v| v == 0.0));
        assert!((p.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn packet_density_variance_is_width_squared() {
        // Oracle: trapezoid quadrature of the closed-form density (2πσ²)^{-1/2} exp(−(q−q0)²/(2σ²)).
        let (q0, s) = (0.3, 0.8);
        let g = Grid1D::new(-12.0, 12.0, 4801).unwrap();
        let p = gaussian_packet(&g, q0, s, 1.3, &PhysicalConstants::ATOMIC).unwrap();
        let rho = p.density();
        let mean = p.mean_position();
        let var: f64 = g.nodes().zip(&rho).map(|(x, r)| (x - mean).powi(2) * r).sum::<f64>() * g.dx();
        assert!((mean - q0).abs() < 1e-12);
        assert!((var - s * s).abs() < 1e-10, "variance {var}");
    }

    #[test]
    fn packet_near_wall_is_truncated() {
        let r = gaussian_packet(&grid(), 8.0, 1.0, 0.0, &PhysicalConstants::ATOMIC);
        assert!(matches!(r, Err(Error::PacketTruncated { .. })));
    }

    #[test]
    fn plane_window_unit_density_and_momentum() {
        let c = PhysicalConstants::ATOMIC;
        let g = Grid1D::new(-5.0, 5.0, 2001).unwrap();
        let w = plane_wave_window(&g, 1.5, (-2.0, 2.0), 0.0, &c).unwrap();
        let i0 = g.nearest(0.0);
        assert!((w.phi_r()[i0] - 1.0).abs() < 1e-15 && w.phi_c()[i0].abs() < 1e-15);
        for (x, r) in g.nodes().zip(w.density()) {
            if x.abs() <= 2.0 - 1e-9 {
                assert!((r - 1.0).abs() < 1e-14);
            } else if x.abs() > 2.0 + 1e-9 {
                assert_eq!(r, 0.0);
            }
        }
        // p0 times the window length, up to the sin(k dx)/dx stencil factor.
        let p = w.momentum_expectation(&c);
        assert!((p - 1.5 * 4.0).abs() < 1e-4 * 6.0, "momentum {p}");
    }

    #[test]
    fn csv_snapshot_has_header_and_rows() {
        let f = gaussian_packet(&grid(), 0.0, 1.0, 0.0, &PhysicalConstants::ATOMIC).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "x,phi_r,phi_c,rho");
        assert_eq!(text.lines().count(), 402);
        let h = serde_json::to_string(&f.header(&PhysicalConstants::ATOMIC)).unwrap();
        let back: SnapshotHeader = serde_json::from_str(&h).unwrap();
        assert_eq!(back.grid, *f.grid());
    }
}

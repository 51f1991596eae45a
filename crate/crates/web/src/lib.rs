//! Browser bindings: the two-slit density and its guided paths, and a packet
//! propagated by the grid solver. All arrays cross the boundary as `Float64Array`.

use wasm_bindgen::prelude::*;

use dualpath_core::paths::{analytic_frames, evolve_ensemble, sample_initial_positions, PathEnsemble, SdeConfig};
use dualpath_core::scenarios::analytic::{double_slit_field, DoubleSlitSpec, GaussianOrbital};
use dualpath_core::solver::{energy_expectation, Propagator};
use dualpath_core::stats::{BinSpec, Histogram};
use dualpath_core::{gaussian_packet, Grid1D, PhysicalConstants, PotentialSpec, SchroedingerVectorField};

fn js(e: dualpath_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

const UNITS: PhysicalConstants = PhysicalConstants::ATOMIC;

/// Steps per drift frame in the path runs.
const FRAME_EVERY: usize = 5;

#[wasm_bindgen]
pub struct DoubleSlit {
    spec: DoubleSlitSpec,
    grid: Grid1D,
}

#[wasm_bindgen]
impl DoubleSlit {
    /// Grid spans the envelope at the screen with 6σ to spare and resolves σ/20.
    #[wasm_bindgen(constructor)]
    pub fn new(separation: f64, slit_width: f64, screen_time: f64) -> Result<DoubleSlit, JsError> {
        let spec = DoubleSlitSpec { slit_separation: separation, slit_width, forward_momentum: 0.0, screen_time };
        spec.validate().map_err(js)?;
        let envelope = GaussianOrbital::new(0.0, slit_width, 0.0).density_width(screen_time, &UNITS);
        let half = 0.5 * separation + 6.0 * envelope;
        let n = ((2.0 * half / (slit_width / 20.0)).ceil() as usize + 1).min(40_001);
        let grid = Grid1D::new(-half, half, n).map_err(js)?;
        Ok(DoubleSlit { spec, grid })
    }

    pub fn xs(&self) -> Vec<f64> {
        self.grid.nodes().collect()
    }

    pub fn density(&self, t: f64) -> Result<Vec<f64>, JsError> {
        Ok(double_slit_field(&self.grid, &self.spec, t, &UNITS).map_err(js)?.density())
    }

    /// Closed-form dark fringes on the grid at time t.
    pub fn minima(&self, t: f64) -> Vec<f64> {
        self.spec.minima(t, self.grid.x_min(), self.grid.x_max(), &UNITS)
    }

    pub fn fringe_spacing(&self) -> f64 {
        self.spec.fringe_spacing(self.spec.screen_time, &UNITS)
    }

    /// Paths from |ψ(0)|² to the screen, with or without the Wiener term.
    pub fn paths(&self, n_paths: usize, n_steps: usize, noise: bool, seed: u64) -> Result<Paths, JsError> {
        let dt = self.spec.screen_time / n_steps.max(1) as f64;
        let mut sde = SdeConfig::new(dt, n_steps, n_paths, seed);
        sde.noise_on = noise;
        sde.record_every = (n_steps / 100).max(1);
        let f0 = double_slit_field(&self.grid, &self.spec, 0.0, &UNITS).map_err(js)?;
        let initial = sample_initial_positions(&self.grid, &f0.density(), n_paths, seed).map_err(js)?;
        let (g, spec) = (self.grid, self.spec);
        let mut frames = analytic_frames(0.0, dt * FRAME_EVERY as f64, sde.drift_options(), UNITS, move |s| {
            double_slit_field(&g, &spec, s, &UNITS)
        })
        .map_err(js)?;
        let ensemble = evolve_ensemble(&initial, &mut frames, &sde, &UNITS).map_err(js)?;
        Ok(Paths { ensemble })
    }

    /// Histogram of `points` as a density, next to the exact bin-averaged |ψ(t)|².
    pub fn compare_histogram(&self, points: &[f64], t: f64, bins: usize) -> Result<Vec<f64>, JsError> {
        let spec = BinSpec::new(self.grid.x_min(), self.grid.x_max(), bins).map_err(js)?;
        let h = Histogram::build(points, spec).map_err(js)?;
        let exact: Vec<f64> = spec.bin_masses_fn(|x| self.spec.amplitude(x, t, &UNITS).norm_sqr()).iter().map(|m| m / spec.width()).collect();
        Ok(h.density().into_iter().chain(exact).collect())
    }
}

#[wasm_bindgen]
pub struct Paths {
    ensemble: PathEnsemble,
}

#[wasm_bindgen]
impl Paths {
    pub fn times(&self) -> Vec<f64> {
        self.ensemble.times.clone()
    }

    /// Row-major: all paths at the first recorded time, then the next.
    pub fn positions(&self) -> Vec<f64> {
        self.ensemble.positions.concat()
    }

    pub fn endpoints(&self) -> Vec<f64> {
        self.ensemble.endpoints.clone()
    }

    pub fn reflections(&self) -> f64 {
        self.ensemble.counters.reflections as f64
    }
}

/// A Gaussian packet in a harmonic well, advanced by the Crank–Nicolson solver.
#[wasm_bindgen]
pub struct Packet {
    field: SchroedingerVectorField,
    propagator: Propagator,
    potential: Vec<f64>,
}

#[wasm_bindgen]
impl Packet {
    #[wasm_bindgen(constructor)]
    pub fn new(center: f64, width: f64, momentum: f64, omega: f64, dt: f64) -> Result<Packet, JsError> {
        let grid = Grid1D::new(-15.0, 15.0, 1501).map_err(js)?;
        let v = PotentialSpec::harmonic(omega, UNITS.mass(), 0.0);
        let field = gaussian_packet(&grid, center, width, momentum, &UNITS).map_err(js)?;
        let propagator = Propagator::new(&grid, &v, &UNITS, dt).map_err(js)?;
        let potential = v.sample(&grid).map_err(js)?;
        Ok(Packet { field, propagator, potential })
    }

    pub fn advance(&mut self, steps: usize) -> Result<(), JsError> {
        for _ in 0..steps {
            self.propagator.advance(&mut self.field).map_err(js)?;
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        self.field.grid().nodes().collect()
    }

    pub fn density(&self) -> Vec<f64> {
        self.field.density()
    }

    pub fn phi_r(&self) -> Vec<f64> {
        self.field.phi_r().to_vec()
    }

    pub fn phi_c(&self) -> Vec<f64> {
        self.field.phi_c().to_vec()
    }

    pub fn time(&self) -> f64 {
        self.field.time()
    }

    pub fn norm(&self) -> f64 {
        self.field.norm()
    }

    pub fn energy(&self) -> f64 {
        energy_expectation(&self.field, &self.potential, &UNITS)
    }

    pub fn mean_position(&self) -> f64 {
        self.field.mean_position()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slit_grid_resolves_slits_and_covers_screen() {
        let d = DoubleSlit::new(3.0, 0.25, 1.0).unwrap();
        assert!(d.grid.dx() <= 0.25 / 20.0 + 1e-12);
        let rho = d.density(1.0).unwrap();
        let mass: f64 = rho.iter().sum::<f64>() * d.grid.dx();
        assert!((mass - 1.0).abs() < 1e-6, "{mass}");
        assert!(d.minima(1.0).len() >= 4);
    }

    #[test]
    fn guided_paths_keep_shape() {
        let d = DoubleSlit::new(3.0, 0.25, 0.5).unwrap();
        let p = d.paths(50, 200, false, 1).unwrap();
        let times = p.times();
        assert_eq!(p.positions().len(), times.len() * 50);
        assert_eq!(p.endpoints().len(), 50);
        assert!((times.last().unwrap() - 0.5).abs() < 1e-12);
        let both = d.compare_histogram(&p.endpoints(), 0.5, 16).unwrap();
        assert_eq!(both.len(), 32);
    }

    #[test]
    fn packet_conserves_norm() {
        let mut p = Packet::new(1.0, 0.7, 0.0, 1.0, 5e-3).unwrap();
        let (n0, e0) = (p.norm(), p.energy());
        p.advance(200).unwrap();
        assert!((p.norm() - n0).abs() < 1e-10);
        assert!((p.energy() - e0).abs() < 1e-8 * e0.abs());
        assert!(p.mean_position() < 1.0);
        assert!((p.time() - 1.0).abs() < 1e-12);
    }
}

//! Antisymmetrized two-orbital states, their path ensembles and the
//! channel bookkeeping used for detanglement and dissociation runs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::analytic::GaussianOrbital;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::field::{SchroedingerVectorField, SchroedingerVectorField2D};
use crate::grid::{Grid1D, Grid2D};
use crate::paths::{
    analytic_frames, analytic_pair_frames, evolve_ensemble, evolve_pairs, sample_initial_positions, sample_pair_positions,
    PairEnsemble, PathEnsemble, SdeConfig,
};

/// Below this 1 − |⟨a|b⟩|² the antisymmetrized state has no norm to speak of.
const DEGENERACY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntangledPairSpec {
    pub orbital_a: GaussianOrbital,
    pub orbital_b: GaussianOrbital,
}

impl EntangledPairSpec {
    pub fn validate(&self) -> Result<()> {
        self.orbital_a.validate()?;
        self.orbital_b.validate()
    }

    /// N = 1/√(2(1 − |⟨a|b⟩|²)); constant in time for free orbitals.
    pub fn normalization(&self, constants: &PhysicalConstants) -> Result<f64> {
        let s = self.orbital_a.overlap(&self.orbital_b, constants).norm_sqr();
        let gap = 1.0 - s;
        if !(gap > DEGENERACY) {
            return Err(Error::DegenerateOrbitals);
        }
        Ok(1.0 / (2.0 * gap).sqrt())
    }
}

/// ψ(q1, q2, t) = N [a(q1) b(q2) − b(q1) a(q2)] on the product grid.
pub fn entangled_pair_field(
    grid: &Grid2D,
    spec: &EntangledPairSpec,
    t: f64,
    constants: &PhysicalConstants,
) -> Result<SchroedingerVectorField2D> {
    spec.validate()?;
    let norm = spec.normalization(constants)?;
    let eval = |axis: &Grid1D, o: &GaussianOrbital| axis.nodes().map(|x| o.amplitude(x, t, constants)).collect::<Vec<_>>();
    let (a1, b1) = (eval(&grid.q1, &spec.orbital_a), eval(&grid.q1, &spec.orbital_b));
    let (a2, b2) = (eval(&grid.q2, &spec.orbital_a), eval(&grid.q2, &spec.orbital_b));
    let mut phi_r = Vec::with_capacity(grid.len());
    let mut phi_c = Vec::with_capacity(grid.len());
    for i in 0..grid.q1.len() {
        for j in 0..grid.q2.len() {
            let z: Complex64 = (a1[i] * b2[j] - b1[i] * a2[j]) * norm;
            phi_r.push(z.re);
            phi_c.push(z.im);
        }
    }
    SchroedingerVectorField2D::new(*grid, phi_r, phi_c, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangeDefects {
    /// max |ψ(q1,q2) + ψ(q2,q1)|.
    pub antisymmetry: f64,
    /// max |ρ(q1,q2) − ρ(q2,q1)|.
    pub density_symmetry: f64,
    /// max ρ(q, q).
    pub diagonal_density: f64,
}

/// Exchange symmetry defects on a square product grid.
pub fn exchange_defects(field: &SchroedingerVectorField2D) -> Result<ExchangeDefects> {
    let g = field.grid();
    if !g.q1.same_as(&g.q2) {
        return Err(Error::InvalidGrid("exchange symmetry needs identical axes".into()));
    }
    let n = g.q1.len();
    let rho = field.density();
    let mut d = ExchangeDefects { antisymmetry: 0.0, density_symmetry: 0.0, diagonal_density: 0.0 };
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (g.index(i, j), g.index(j, i));
            let s = ((field.phi_r()[a] + field.phi_r()[b]).powi(2) + (field.phi_c()[a] + field.phi_c()[b]).powi(2)).sqrt();
            d.antisymmetry = d.antisymmetry.max(s);
            d.density_symmetry = d.density_symmetry.max((rho[a] - rho[b]).abs());
        }
        d.diagonal_density = d.diagonal_density.max(rho[g.index(i, i)]);
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoParticleRunSpec {
    pub pair: EntangledPairSpec,
    /// Axis shared by both particles.
    pub axis: Grid1D,
    /// SDE steps between drift frames.
    pub frame_every: usize,
}

/// Pair ensemble sampled from ρ(q1, q2, 0), driven by frames of the analytic
/// entangled field.
pub fn two_particle_sde_run(spec: &TwoParticleRunSpec, sde: &SdeConfig, constants: &PhysicalConstants) -> Result<PairEnsemble> {
    sde.validate()?;
    if spec.frame_every == 0 {
        return Err(Error::InvalidArgument("frame_every must be at least 1".into()));
    }
    let grid = Grid2D::square(spec.axis);
    let pair = spec.pair;
    let c = *constants;
    let f0 = entangled_pair_field(&grid, &pair, 0.0, &c)?;
    let initial = sample_pair_positions(&f0, sde.n_paths, sde.master_seed)?;
    let mut frames = analytic_pair_frames(0.0, sde.dt * spec.frame_every as f64, sde.drift_options(), c, move |t| {
        entangled_pair_field(&grid, &pair, t, &c)
    })?;
    evolve_pairs(&initial, &mut frames, sde, constants)
}

/// Half-open interval [lo, hi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
}

impl Region {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("region needs lo < hi, got [{lo}, {hi})")));
        }
        Ok(Region { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x < self.hi
    }

    pub fn overlaps(&self, other: &Region) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Ab,
    Ba,
    Undecided,
}

/// Something that can be sorted into one of the two outcome channels.
pub trait ChannelPoint {
    fn channel(&self, a: &Region, b: &Region) -> Channel;
}

/// Pair endpoints: AB when particle 1 ends in A and particle 2 in B.
impl ChannelPoint for [f64; 2] {
    fn channel(&self, a: &Region, b: &Region) -> Channel {
        if a.contains(self[0]) && b.contains(self[1]) {
            Channel::Ab
        } else if b.contains(self[0]) && a.contains(self[1]) {
            Channel::Ba
        } else {
            Channel::Undecided
        }
    }
}

/// Single-electron endpoints: AB when the electron stays with the fragment in A.
impl ChannelPoint for f64 {
    fn channel(&self, a: &Region, b: &Region) -> Channel {
        if a.contains(*self) {
            Channel::Ab
        } else if b.contains(*self) {
            Channel::Ba
        } else {
            Channel::Undecided
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelStatistics {
    pub n: usize,
    pub ab: usize,
    pub ba: usize,
    pub undecided: usize,
    pub frac_ab: f64,
    pub frac_ba: f64,
    pub frac_undecided: f64,
    /// Binomial standard error of frac_ab.
    pub frac_ab_std_error: f64,
}

pub fn channel_statistics<P: ChannelPoint>(endpoints: &[P], a: &Region, b: &Region) -> Result<ChannelStatistics> {
    if a.overlaps(b) {
        return Err(Error::InvalidArgument("channel regions must be disjoint".into()));
    }
    if endpoints.is_empty() {
        return Err(Error::InsufficientSamples { required: 1, found: 0 });
    }
    let (mut ab, mut ba, mut un) = (0, 0, 0);
    for p in endpoints {
        match p.channel(a, b) {
            Channel::Ab => ab += 1,
            Channel::Ba => ba += 1,
            Channel::Undecided => un += 1,
        }
    }
    let n = endpoints.len();
    let nf = n as f64;
    let frac_ab = ab as f64 / nf;
    let frac_ba = ba as f64 / nf;
    Ok(ChannelStatistics {
        n,
        ab,
        ba,
        undecided: un,
        frac_ab,
        frac_ba,
        frac_undecided: un as f64 / nf,
        frac_ab_std_error: (frac_ab * (1.0 - frac_ab) / nf).sqrt(),
    })
}

/// One electron shared by two receding fragments: ψ = N[a + b] with a and b
/// moving apart. Dissociation outcomes are the side each path ends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissociationSpec {
    /// Initial fragment separation.
    pub separation: f64,
    pub width: f64,
    /// Momentum of each fragment's orbital, pointing away from the other.
    pub recoil_momentum: f64,
    pub axis: Grid1D,
    pub frame_every: usize,
}

impl DissociationSpec {
    pub fn orbitals(&self) -> [GaussianOrbital; 2] {
        let h = 0.5 * self.separation;
        [
            GaussianOrbital::new(-h, self.width, -self.recoil_momentum),
            GaussianOrbital::new(h, self.width, self.recoil_momentum),
        ]
    }

    pub fn field(&self, t: f64, constants: &PhysicalConstants) -> Result<SchroedingerVectorField> {
        let [a, b] = self.orbitals();
        a.validate()?;
        let s = a.overlap(&b, constants).re;
        let norm = 1.0 / (2.0 * (1.0 + s)).sqrt();
        SchroedingerVectorField::from_fn(self.axis, t, |x| {
            let z = (a.amplitude(x, t, constants) + b.amplitude(x, t, constants)) * norm;
            (z.re, z.im)
        })
    }
}

pub fn dissociation_run(spec: &DissociationSpec, sde: &SdeConfig, constants: &PhysicalConstants) -> Result<PathEnsemble> {
    sde.validate()?;
    if spec.frame_every == 0 {
        return Err(Error::InvalidArgument("frame_every must be at least 1".into()));
    }
    let f0 = spec.field(0.0, constants)?;
    let initial = sample_initial_positions(&spec.axis, &f0.density(), sde.n_paths, sde.master_seed)?;
    let s = *spec;
    let c = *constants;
    let mut frames = analytic_frames(0.0, sde.dt * spec.frame_every as f64, sde.drift_options(), c, move |t| s.field(t, &c))?;
    evolve_ensemble(&initial, &mut frames, sde, constants)
}

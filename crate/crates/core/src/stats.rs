//! Sample statistics, histograms and density sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1D;

/// Mean, unbiased variance and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
}

pub fn moments(samples: &[f64]) -> Moments {
    let n = samples.len();
    if n == 0 {
        return Moments { n, mean: f64::NAN, variance: f64::NAN, std_error: f64::NAN };
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 { samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    Moments { n, mean, variance, std_error: (variance / n as f64).sqrt() }
}

/// Standard error of the sample variance, estimated from the fourth central moment.
pub fn variance_std_error(samples: &[f64]) -> f64 {
    let m = moments(samples);
    let n = m.n as f64;
    let m4 = samples.iter().map(|x| (x - m.mean).powi(4)).sum::<f64>() / n;
    ((m4 - m.variance * m.variance * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt()
}

/// Least-squares slope and intercept of y on x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl BinSpec {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        let b = BinSpec { lo, hi, bins };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins == 0 || !(self.hi > self.lo) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidArgument(format!("bad binning [{}, {}) x {}", self.lo, self.hi, self.bins)));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.width()
    }

    pub fn index(&self, x: f64) -> Option<usize> {
        if x < self.lo || x > self.hi {
            return None;
        }
        Some((((x - self.lo) / self.width()) as usize).min(self.bins - 1))
    }

    /// Probability mass per bin of a density given on `grid`, by midpoint
    /// quadrature of its linear interpolant.
    pub fn bin_masses(&self, grid: &Grid1D, density: &[f64]) -> Vec<f64> {
        const SUB: usize = 32;
        let w = self.width();
        (0..self.bins)
            .map(|i| {
                let left = self.lo + i as f64 * w;
                (0..SUB).map(|k| grid.interpolate(density, left + (k as f64 + 0.5) * w / SUB as f64)).sum::<f64>() * w
                    / SUB as f64
            })
            .collect()
    }

    /// Probability mass per bin of a density function.
    pub fn bin_masses_fn(&self, density: impl Fn(f64) -> f64) -> Vec<f64> {
        const SUB: usize = 32;
        let w = self.width();
        (0..self.bins)
            .map(|i| {
                let left = self.lo + i as f64 * w;
                (0..SUB).map(|k| density(left + (k as f64 + 0.5) * w / SUB as f64)).sum::<f64>() * w / SUB as f64
            })
            .collect()
    }
}

/// Normalized histogram of samples, with distances to an optional reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: BinSpec,
    pub counts: Vec<u64>,
    /// Samples that fell outside the bin range.
    pub outside: u64,
    pub total: u64,
}

impl Histogram {
    pub fn build(samples: &[f64], bins: BinSpec) -> Result<Self> {
        bins.validate()?;
        let mut counts = vec![0u64; bins.bins];
        let mut outside = 0;
        for &x in samples {
            match bins.index(x) {
                Some(i) => counts[i] += 1,
                None => outside += 1,
            }
        }
        Ok(Histogram { bins, counts, outside, total: samples.len() as u64 })
    }

    /// Fraction of all samples per bin.
    pub fn masses(&self) -> Vec<f64> {
        let n = self.total.max(1) as f64;
        self.counts.iter().map(|c| *c as f64 / n).collect()
    }

    /// Density estimate per bin (mass / width).
    pub fn density(&self) -> Vec<f64> {
        let w = self.bins.width();
        self.masses().into_iter().map(|m| m / w).collect()
    }

    /// ∫|ρ̂ − ρ| = Σ|p̂_i − p_i| plus reference mass outside the range is not counted.
    pub fn l1_distance(&self, reference_masses: &[f64]) -> f64 {
        self.masses().iter().zip(reference_masses).map(|(a, b)| (a - b).abs()).sum::<f64>()
            + self.outside as f64 / self.total.max(1) as f64
    }

    /// Pearson χ² = Σ (O_i − E_i)²/E_i over bins with positive expectation.
    pub fn chi_square(&self, reference_masses: &[f64]) -> (f64, Vec<f64>) {
        let n = self.total as f64;
        let per_bin: Vec<f64> = self
            .counts
            .iter()
            .zip(reference_masses)
            .map(|(&o, &p)| {
                let e = n * p;
                if e > 0.0 {
                    (o as f64 - e).powi(2) / e
                } else {
                    0.0
                }
            })
            .collect();
        (per_bin.iter().sum(), per_bin)
    }

    /// Expected L1 distance of an i.i.d. sample of this size from the reference,
    /// Σ √(2 p_i (1 − p_i) / (π n)) in the normal approximation.
    pub fn sampling_baseline(reference_masses: &[f64], n: usize) -> f64 {
        reference_masses
            .iter()
            .map(|p| (2.0 * p * (1.0 - p) / (std::f64::consts::PI * n as f64)).sqrt())
            .sum()
    }
}

/// Inverse-CDF sampler for a non-negative density tabulated on a grid
/// (piecewise-constant cells between nodes).
#[derive(Debug, Clone)]
pub struct GridSampler {
    grid: Grid1D,
    cdf: Vec<f64>,
}

impl GridSampler {
    pub fn new(grid: &Grid1D, density: &[f64]) -> Result<Self> {
        if density.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: density.len() });
        }
        let mut cdf = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in density.windows(2) {
            acc += 0.5 * (w[0].max(0.0) + w[1].max(0.0));
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::ZeroNorm(acc));
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        Ok(GridSampler { grid: *grid, cdf })
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.grid.x(i - 1) + frac.clamp(0.0, 1.0) * self.grid.dx()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::stream_rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn moments_of_known_sample() {
        let m = moments(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.variance - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| -0.5 * v + 2.0).collect();
        let (s, b) = linear_fit(&x, &y);
        assert!((s + 0.5).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
    }

    fn gaussian_masses(bins: &BinSpec) -> Vec<f64> {
        bins.bin_masses_fn(|x| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt())
    }

    #[test]
    fn iid_gaussian_histogram_is_close() {
        let mut rng = stream_rng(11, 0, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let bins = BinSpec::new(-5.0, 5.0, 64).unwrap();
        let h = Histogram::build(&xs, bins).unwrap();
        let reference = gaussian_masses(&bins);
        let l1 = h.l1_distance(&reference);
        assert!(l1 < 0.03, "L1 {l1}");
        let baseline = Histogram::sampling_baseline(&reference, xs.len());
        assert!(l1 < 2.0 * baseline, "L1 {l1} vs baseline {baseline}");
        let (chi2, _) = h.chi_square(&reference);
        // 64 bins: χ² should sit near its degrees of freedom.
        assert!(chi2 < 120.0, "χ² {chi2}");
    }

    #[test]
    fn uniform_against_uniform() {
        let mut rng = stream_rng(12, 0, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        let bins = BinSpec::new(0.0, 1.0, 64).unwrap();
        let h = Histogram::build(&xs, bins).unwrap();
        let reference = vec![1.0 / 64.0; 64];
        let baseline = Histogram::sampling_baseline(&reference, xs.len());
        // The expected i.i.d. L1 here is itself ≈ 0.020.
        assert!((baseline - 0.0200).abs() < 5e-4, "baseline {baseline}");
        let l1 = h.l1_distance(&reference);
        assert!(l1 < 1.25 * baseline, "L1 {l1}");
    }

    #[test]
    fn single_sample_fills_one_bin() {
        let bins = BinSpec::new(-1.0, 1.0, 16).unwrap();
        let h = Histogram::build(&[0.3], bins).unwrap();
        assert_eq!(h.counts.iter().filter(|c| **c > 0).count(), 1);
        assert_eq!(h.masses().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn grid_sampler_reproduces_density() {
        let grid = Grid1D::new(-8.0, 8.0, 1601).unwrap();
        let rho: Vec<f64> = grid.nodes().map(|x| (-x * x / 2.0).exp()).collect();
        let s = GridSampler::new(&grid, &rho).unwrap();
        assert!((s.quantile(0.5)).abs() < 1e-9);
        let mut rng = stream_rng(3, 0, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| s.sample(&mut rng)).collect();
        let m = moments(&xs);
        assert!(m.mean.abs() < 3.0 * m.std_error * 1.5);
        assert!((m.variance - 1.0).abs() < 0.02);
        assert!(GridSampler::new(&grid, &vec![0.0; 1601]).is_err());
    }

    #[test]
    fn variance_error_matches_normal_theory() {
        let mut rng = stream_rng(5, 0, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        // Var(s²) = 2σ⁴/(n−1) for a normal sample.
        let se = variance_std_error(&xs);
        assert!((se - (2.0f64 / 99_999.0).sqrt()).abs() < 2e-4);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 8;

/// Uniform 1D grid with Dirichlet (zero) walls at both end nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl TryFrom<RawGrid> for Grid1D {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        Grid1D::new(raw.x_min, raw.x_max, raw.n_points)
    }
}

impl From<Grid1D> for RawGrid {
    fn from(g: Grid1D) -> Self {
        RawGrid { x_min: g.x_min, x_max: g.x_max, n_points: g.n_points }
    }
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!("n_points must be at least {MIN_POINTS}, got {n_points}")));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!("need finite x_min < x_max, got [{x_min}, {x_max}]")));
        }
        let dx = (x_max - x_min) / (n_points - 1) as f64;
        Ok(Grid1D { x_min, x_max, n_points, dx })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Index of the cell `[x_i, x_{i+1}]` holding `x` and the fractional offset within it.
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if !self.contains(x) {
            return None;
        }
        let s = (x - self.x_min) / self.dx;
        let i = (s.floor() as usize).min(self.n_points - 2);
        Some((i, s - i as f64))
    }

    /// Nearest node index, clamped into the grid.
    pub fn nearest(&self, x: f64) -> usize {
        let s = ((x - self.x_min) / self.dx).round();
        if s <= 0.0 {
            0
        } else {
            (s as usize).min(self.n_points - 1)
        }
    }

    /// Linear interpolation of nodal values; zero outside the grid (Dirichlet walls).
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        match self.locate(x) {
            Some((i, w)) => values[i] * (1.0 - w) + values[i + 1] * w,
            None => 0.0,
        }
    }

    /// Every `stride`-th node, always including the last one.
    pub fn coarsen(&self, stride: usize) -> Result<Grid1D> {
        if stride == 0 || !(self.n_points - 1).is_multiple_of(stride) {
            return Err(Error::InvalidGrid(format!(
                "stride {stride} does not divide {} cells",
                self.n_points - 1
            )));
        }
        Grid1D::new(self.x_min, self.x_max, (self.n_points - 1) / stride + 1)
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.n_points == other.n_points && self.x_min == other.x_min && self.x_max == other.x_max
    }
}

/// Product grid for two-particle configuration space, row-major over (q1, q2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub q1: Grid1D,
    pub q2: Grid1D,
}

impl Grid2D {
    pub fn square(axis: Grid1D) -> Self {
        Grid2D { q1: axis, q2: axis }
    }

    pub fn len(&self) -> usize {
        self.q1.len() * self.q2.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.q2.len() + j
    }

    pub fn cell_area(&self) -> f64 {
        self.q1.dx() * self.q2.dx()
    }
}

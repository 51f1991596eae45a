//! Real-valued Schrödinger dynamics, its matrix Feynman–Kac path integral and
//! the quantum stochastic path SDE, with closed-form scenarios to check them
//! against each other.
//!
//! * [`solver`] propagates the two-component real field (φ_r, φ_c).
//! * [`kernel`] estimates the same evolution with Wiener paths weighted by
//!   2×2 rotations, both by Monte Carlo and by a Trotterized transfer matrix.
//! * [`paths`] evolves ensembles of dX = α^Real dt + √(ħ/m) dW.
//! * [`scenarios`] holds the analytic fields, scaling laws and statistics.

// Guards are written as !(x > 0.0) so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
mod diff;
pub mod error;
pub mod field;
pub mod grid;
pub mod kernel;
mod par;
pub mod paths;
pub mod potential;
pub mod scenarios;
pub mod seeding;
pub mod solver;
pub mod stats;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use field::{gaussian_packet, plane_wave_window, SchroedingerVectorField, SchroedingerVectorField2D};
pub use grid::{Grid1D, Grid2D};
pub use potential::PotentialSpec;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field norm {0:e} is too small to normalize")]
    ZeroNorm(f64),
    #[error("wave packet centred at {center} with width {width} is within 5 widths of the grid boundary")]
    PacketTruncated { center: f64, width: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid physical constants: {0}")]
    InvalidConstants(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("array length {found} does not match grid of {expected} nodes")]
    LengthMismatch { expected: usize, found: usize },
    #[error("non-finite value at node {0}")]
    NonFinite(usize),
    #[error("tridiagonal solve failed at row {0}: singular pivot")]
    LinearSolveFailure(usize),
    #[error("Gaussian kernel std {std:e} is narrower than 2 dx = {two_dx:e}")]
    KernelUnderresolved { std: f64, two_dx: f64 },
    #[error("position {x} is outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("field trajectory does not cover the run: {0}")]
    FrameMismatch(String),
    #[error("at least {required} samples are required, got {found}")]
    InsufficientSamples { required: usize, found: usize },
    #[error("entangled orbitals are degenerate: antisymmetrized field has zero norm")]
    DegenerateOrbitals,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Stochastic paths dX = α^Real dt + √(ħ/m) dW driven by drift frames taken
//! from a field trajectory, with the noise-off (Bohmian) limit and the
//! momentum-density diagnostics.

mod canonical;
mod drift;
mod ensemble;
mod frames;
mod pair;

pub use canonical::{
    canonical_residual, classical_limit_grid, classical_limit_run, coherent_state_bohmian, local_momentum_at,
    local_momentum_density, CanonicalResidual, ClassicalLimitEntry, ClassicalLimitReport, ClassicalLimitSpec,
    CoherentPathCheck,
};
pub use drift::{build_drift_frame, default_clamp, drift_at, DriftFieldFrame, DriftOptions, DriftSample, DEFAULT_CLAMP_FACTOR};
pub use ensemble::{
    bohmian_trajectory, endpoint_histogram, euler_maruyama_step, evolve_ensemble, reflect, sample_initial_positions,
    stratified_initial_positions,
    EndpointReport, EnsembleCounters, EnsembleManifest, EnsembleState, Interpolation, PathEnsemble, SdeConfig,
    StepOutcome, MAX_FRAME_STRIDE,
};
pub use frames::{analytic_frames, solver_frames, FrameSource, FrameStream, RecordedFrames};
pub use pair::{
    analytic_pair_frames, build_pair_drift_frame, evolve_pairs, pair_drift_at, pair_step, pair_step_with_noise,
    sample_pair_positions, PairDriftFrame, PairDriftSample, PairEnsemble, PairStepOutcome,
};

#[cfg(test)]
mod tests;

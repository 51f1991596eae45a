use super::drift::{build_drift_frame, default_clamp, DriftFieldFrame, DriftOptions};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::field::SchroedingerVectorField;
use crate::potential::PotentialSpec;
use crate::solver::Propagator;

/// Drift frames at times `k · spacing()` from the start of a run. Paths use
/// the frame nearest to their current time.
pub trait FrameSource {
    type Frame;

    fn spacing(&self) -> f64;

    /// Number of frames available, or `None` for an unbounded stream.
    fn frame_count(&self) -> Option<usize>;

    fn frame(&mut self, index: usize) -> Result<&Self::Frame>;
}

/// Frames held in memory, e.g. recorded from a solver run.
#[derive(Debug, Clone)]
pub struct RecordedFrames<F> {
    frames: Vec<F>,
    spacing: f64,
}

impl RecordedFrames<DriftFieldFrame> {
    /// Checks that the frames are equally spaced in time.
    pub fn new(frames: Vec<DriftFieldFrame>) -> Result<Self> {
        let spacing = match frames.as_slice() {
            [] => return Err(Error::FrameMismatch("no drift frames".into())),
            [_] => f64::INFINITY,
            [a, b, ..] => b.time - a.time,
        };
        if frames.len() > 1 {
            if !(spacing > 0.0) {
                return Err(Error::FrameMismatch(format!("frame times not increasing (spacing {spacing})")));
            }
            let t0 = frames[0].time;
            for (k, f) in frames.iter().enumerate() {
                let expected = t0 + k as f64 * spacing;
                if (f.time - expected).abs() > 1e-9 * spacing.max(1.0) {
                    return Err(Error::FrameMismatch(format!("frame {k} at t={} but expected t={expected}", f.time)));
                }
            }
        }
        Ok(RecordedFrames { frames, spacing })
    }

    /// Builds frames from solver snapshots, resolving the default clamp from the first.
    pub fn from_fields(fields: &[SchroedingerVectorField], options: &DriftOptions, constants: &PhysicalConstants) -> Result<Self> {
        let mut frames: Vec<DriftFieldFrame> = fields.iter().map(|f| build_drift_frame(f, options, constants)).collect();
        if options.clamp_value.is_none() {
            if let Some(first) = frames.first() {
                let c = default_clamp(first);
                frames = frames.into_iter().map(|f| f.with_clamp(c)).collect();
            }
        }
        Self::new(frames)
    }

    pub fn frames(&self) -> &[DriftFieldFrame] {
        &self.frames
    }
}

impl<F> FrameSource for RecordedFrames<F> {
    type Frame = F;

    fn spacing(&self) -> f64 {
        self.spacing
    }

    fn frame_count(&self) -> Option<usize> {
        Some(self.frames.len())
    }

    fn frame(&mut self, index: usize) -> Result<&F> {
        let n = self.frames.len();
        self.frames.get(index).ok_or_else(|| Error::FrameMismatch(format!("frame {index} requested, {n} recorded")))
    }
}

/// Frames produced on demand by `producer(index)`; only the latest one is kept.
pub struct FrameStream<F, P> {
    spacing: f64,
    len: Option<usize>,
    producer: P,
    cached: Option<(usize, F)>,
}

impl<F, P> FrameStream<F, P>
where
    P: FnMut(usize) -> Result<F>,
{
    pub fn new(spacing: f64, len: Option<usize>, producer: P) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidArgument(format!("frame spacing must be positive, got {spacing}")));
        }
        Ok(FrameStream { spacing, len, producer, cached: None })
    }
}

impl<F, P> FrameSource for FrameStream<F, P>
where
    P: FnMut(usize) -> Result<F>,
{
    type Frame = F;

    fn spacing(&self) -> f64 {
        self.spacing
    }

    fn frame_count(&self) -> Option<usize> {
        self.len
    }

    fn frame(&mut self, index: usize) -> Result<&F> {
        if let Some(n) = self.len {
            if index >= n {
                return Err(Error::FrameMismatch(format!("frame {index} requested, stream holds {n}")));
            }
        }
        if self.cached.as_ref().map(|(i, _)| *i) != Some(index) {
            let f = (self.producer)(index)?;
            self.cached = Some((index, f));
        }
        Ok(&self.cached.as_ref().expect("frame cached above").1)
    }
}

/// Stream of drift frames from a field known in closed form at any time.
/// Frame k is built from `field_at(t0 + k · spacing)`.
pub fn analytic_frames<G>(
    t0: f64,
    spacing: f64,
    options: DriftOptions,
    constants: PhysicalConstants,
    field_at: G,
) -> Result<FrameStream<DriftFieldFrame, impl FnMut(usize) -> Result<DriftFieldFrame>>>
where
    G: Fn(f64) -> Result<SchroedingerVectorField>,
{
    let mut clamp = options.clamp_value;
    if clamp.is_none() {
        clamp = Some(default_clamp(&build_drift_frame(&field_at(t0)?, &options, &constants)));
    }
    let opts = DriftOptions { clamp_value: clamp, ..options };
    FrameStream::new(spacing, None, move |k| {
        Ok(build_drift_frame(&field_at(t0 + k as f64 * spacing)?, &opts, &constants))
    })
}

/// Stream that co-evolves the grid solver with the paths. Frames are taken
/// every `steps_per_frame` solver steps and must be requested in
/// non-decreasing order.
pub fn solver_frames(
    field0: SchroedingerVectorField,
    potential: &PotentialSpec,
    solver_dt: f64,
    steps_per_frame: usize,
    options: DriftOptions,
    constants: PhysicalConstants,
) -> Result<FrameStream<DriftFieldFrame, impl FnMut(usize) -> Result<DriftFieldFrame>>> {
    if steps_per_frame == 0 {
        return Err(Error::InvalidArgument("steps_per_frame must be at least 1".into()));
    }
    let propagator = Propagator::new(field0.grid(), potential, &constants, solver_dt)?;
    let clamp = options.clamp_value.unwrap_or_else(|| default_clamp(&build_drift_frame(&field0, &options, &constants)));
    let opts = DriftOptions { clamp_value: Some(clamp), ..options };
    let mut field = field0;
    let mut at = 0usize;
    FrameStream::new(solver_dt * steps_per_frame as f64, None, move |k| {
        if k < at {
            return Err(Error::FrameMismatch(format!("solver stream is at frame {at}, cannot rewind to {k}")));
        }
        for _ in 0..(k - at) * steps_per_frame {
            propagator.advance(&mut field)?;
        }
        at = k;
        Ok(build_drift_frame(&field, &opts, &constants))
    })
}

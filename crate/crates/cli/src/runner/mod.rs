//! Scenario stage lists. Each scenario pushes its measurements, checks and
//! artifacts into a [`Run`] which becomes the [`RunReport`].

mod analysis;
mod paths;
mod solver;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::config::{Scenario, ScenarioConfig};
use crate::error::CliError;
use crate::report::{Check, RunReport, RunTiming};

pub(crate) mod tag {
    pub const FIELD: &str = "two_component_real_field";
    pub const SOLVER: &str = "crank_nicolson_solver";
    pub const CONSTANT_ROTATION: &str = "constant_potential_rotation";
    pub const TIME_REVERSAL: &str = "time_reversal";
    pub const LOCAL_OBSERVABLES: &str = "local_observables";
    pub const CALIBRATION: &str = "momentum_time_calibration";
    pub const KERNEL_MC: &str = "matrix_feynman_kac_monte_carlo";
    pub const KERNEL_TRANSFER: &str = "matrix_feynman_kac_transfer";
    pub const SDE: &str = "stochastic_path_sde";
    pub const BOHMIAN: &str = "noise_free_guided_paths";
    pub const CANONICAL: &str = "momentum_density_force_law";
    pub const CLASSICAL_LIMIT: &str = "classical_limit";
    pub const FRINGES: &str = "double_slit_fringes";
    pub const HYDROGEN: &str = "hydrogen_scaling";
    pub const STATIONARITY: &str = "localization_force_balance";
    pub const WIENER: &str = "wiener_scaling";
    pub const UNCERTAINTY: &str = "uncertainty_products";
    pub const ENTANGLED: &str = "antisymmetric_pair";
    pub const CHANNELS: &str = "channel_statistics";
}

pub(crate) struct Run<'a> {
    pub cfg: &'a ScenarioConfig,
    out: &'a Path,
    tags: BTreeSet<&'static str>,
    measurements: BTreeMap<String, Value>,
    checks: Vec<Check>,
    artifacts: Vec<String>,
}

impl<'a> Run<'a> {
    pub fn tag(&mut self, tags: &[&'static str]) {
        self.tags.extend(tags);
    }

    pub fn measure(&mut self, key: &str, value: impl Serialize) -> Result<(), CliError> {
        self.measurements.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Writes `name` into the output directory through a buffered writer.
    pub fn artifact<F>(&mut self, name: &str, write: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> dualpath_core::Result<()>,
    {
        let mut w = BufWriter::new(File::create(self.out.join(name))?);
        write(&mut w).map_err(|e| match e {
            dualpath_core::Error::Io(e) => CliError::Io(e),
            source => CliError::StageFailure { stage: "artifact", source },
        })?;
        w.flush()?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn json_artifact(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value)?;
        self.artifact(name, |w| Ok(writeln!(w, "{text}")?))
    }
}

/// Executes the scenario, writing artifacts and `report.json` into `out`.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path) -> Result<RunReport, CliError> {
    std::fs::create_dir_all(out)?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let mut run = Run {
        cfg,
        out,
        tags: BTreeSet::new(),
        measurements: BTreeMap::new(),
        checks: Vec::new(),
        artifacts: Vec::new(),
    };
    match &cfg.scenario {
        Scenario::FreeGaussian(p) => solver::free_gaussian(&mut run, p)?,
        Scenario::Harmonic(p) => solver::harmonic(&mut run, p)?,
        Scenario::PlaneWaveCalibration(p) => solver::plane_wave(&mut run, p)?,
        Scenario::DoubleSlit(p) => paths::double_slit(&mut run, p)?,
        Scenario::ClassicalLimit(p) => paths::classical_limit(&mut run, p)?,
        Scenario::Entanglement(p) => paths::entanglement(&mut run, p)?,
        Scenario::H2PlusChannel(p) => paths::h2plus(&mut run, p)?,
        Scenario::HydrogenScaling(p) => analysis::hydrogen(&mut run, p)?,
        Scenario::UncertaintyScaling(p) => analysis::uncertainty(&mut run, p)?,
        Scenario::KernelComparison(p) => analysis::kernel_comparison(&mut run, p)?,
    }
    let Run { tags, measurements, checks, mut artifacts, .. } = run;
    artifacts.push("report.json".into());
    let report = RunReport {
        scenario: cfg.scenario.name().to_string(),
        master_seed: cfg.master_seed,
        model_tags: tags.into_iter().map(String::from).collect(),
        config: serde_json::to_value(cfg)?,
        measurements,
        all_passed: checks.iter().all(|c| c.passed),
        checks,
        artifacts,
        timing: Some(RunTiming {
            started_unix_seconds: started,
            wall_seconds: clock.elapsed().as_secs_f64(),
            threads: rayon::current_num_threads(),
        }),
    };
    report.write(out)?;
    Ok(report)
}

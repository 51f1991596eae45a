use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dualpath_cli::config::{resolve, RawConfig};
use dualpath_cli::{run_scenario, CliError, ConfigIssue};

#[derive(Parser)]
#[command(name = "dualpath", version, about = "Run and validate dualpath scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and write its artifacts and report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output.directory` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed_override: Option<u64>,
        /// Worker threads for ensemble stages (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Parse and check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_CHECKS_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 2;

fn load(path: &PathBuf, seed_override: Option<u64>) -> Result<dualpath_cli::ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::ConfigInvalid(vec![ConfigIssue::new("", format!("cannot read {}: {e}", path.display()))]))?;
    let mut raw: RawConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::ConfigInvalid(vec![ConfigIssue::new("", format!("cannot parse config: {e}"))]))?;
    if seed_override.is_some() {
        raw.master_seed = seed_override;
    }
    resolve(raw)
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = load(&config, None)?;
            println!("{}: valid {} config (master_seed {})", config.display(), cfg.scenario.name(), cfg.master_seed);
            Ok(true)
        }
        Command::Run { config, out, seed_override, threads } => {
            let cfg = load(&config, seed_override)?;
            let out = out
                .or_else(|| cfg.output.directory.clone())
                .unwrap_or_else(|| PathBuf::from(format!("dualpath-out/{}", cfg.scenario.name())));
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = threads {
                pool = pool.num_threads(n);
            }
            let report = pool.build()?.install(|| run_scenario(&cfg, &out))?;
            for c in &report.checks {
                println!("{} {} = {:e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.measured);
            }
            println!("report: {}", out.join("report.json").display());
            Ok(report.all_passed)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECKS_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

//! Command-line front end for `rydyn`: INI configuration, batch commands, CSV
//! tables, key-value reports and SVG charts.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 I/O error, 4 solver error.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "rydyn", version, about = "Rydberg population dynamics in a magneto-optical trap")]
pub struct Cli {
    /// INI configuration file; defaults apply to anything it leaves out.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides [output] directory).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Random seed (overrides [run] seed).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Also write SVG charts.
    #[arg(long, global = true)]
    pub plot: bool,
    /// Worker threads for batch commands (overrides [run] jobs).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detuning scan of trap loss and cascade counts.
    Scan,
    /// Loss and probe counts against the stimulated-emission rate R3.
    ProbeScan,
    /// Pumped superradiant cascade and the transfer rate gamma.
    Cascade,
    /// Fit gamma to a probe-scan dataset.
    Fit {
        /// Dataset CSV (overrides [fit] dataset); its parameters live in `<file>.ini`.
        #[arg(long, value_name = "PATH")]
        dataset: Option<PathBuf>,
        /// auto, loss, loss-combined or counts (overrides [fit] mode).
        #[arg(long)]
        mode: Option<String>,
    },
    /// Computed rates and transfer rates next to the reference tables.
    Tables,
    /// Synthetic probe-scan datasets.
    Synth,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Scan => "scan",
            Command::ProbeScan => "probe_scan",
            Command::Cascade => "cascade",
            Command::Fit { .. } => "fit",
            Command::Tables => "tables",
            Command::Synth => "synth",
        }
    }
}

/// Applies command-line overrides to the loaded configuration.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::load(cli.config.as_deref())?;
    if let Some(out) = &cli.out {
        c.output.directory = out.clone();
    }
    if let Some(seed) = cli.seed {
        c.run.seed = seed;
    }
    if cli.plot {
        c.output.plot = true;
    }
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs: must be at least 1".into()));
        }
        c.run.jobs = jobs;
    }
    if let Command::Fit { dataset, mode } = &cli.command {
        if let Some(d) = dataset {
            c.fit.dataset = Some(d.clone());
        }
        if let Some(m) = mode {
            if m != "auto" {
                m.parse::<rydyn::estimation::FitMode>()
                    .map_err(|e| CliError::Config(format!("--mode: {e}")))?;
            }
            c.fit.mode = m.clone();
        }
    }
    Ok(c)
}

/// Runs one command and writes its outputs; returns the paths written.
pub fn execute(cli: &Cli) -> Result<(commands::Outcome, Vec<PathBuf>), CliError> {
    let config = resolve(cli)?;
    let outcome = match cli.command {
        Command::Scan => commands::scan::run(&config)?,
        Command::ProbeScan => commands::probe_scan::run(&config)?,
        Command::Cascade => commands::cascade::run(&config)?,
        Command::Fit { .. } => commands::fit::run(&config)?,
        Command::Tables => commands::tables::run(&config)?,
        Command::Synth => commands::synth::run(&config)?,
    };
    let written = outcome.write(&config, &format!("{}_report.ini", cli.command.name()))?;
    Ok((outcome, written))
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((outcome, written)) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for p in &written {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("rydyn: {e}");
            e.exit_code()
        }
    }
}

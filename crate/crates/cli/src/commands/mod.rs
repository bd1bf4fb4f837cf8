//! One module per verb. Each command computes an [`Outcome`] from a resolved
//! configuration; [`Outcome::write`] puts it on disk.

pub mod cascade;
pub mod fit;
pub mod probe_scan;
pub mod scan;
pub mod synth;
pub mod tables;

use std::f64::consts::TAU;
use std::path::PathBuf;

use rydyn::atomic::{Atom, NeighborWindow, RydbergLevel};
use rydyn::kinetics::{DarkCompartment, DetectionGeometry, ExcitationParams, KineticsParams};

use crate::config::{RunConfig, Spacing};
use crate::error::CliError;
use crate::output::{Report, Sink, Table};

/// Everything a command produces.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<(String, Table)>,
    pub report: Report,
    pub plots: Vec<(String, String)>,
    /// Extra files written verbatim (name, contents).
    pub files: Vec<(String, String)>,
    /// Short lines for the terminal.
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Writes tables, files, the report (`report_name`) and, when enabled, plots.
    pub fn write(&self, config: &RunConfig, report_name: &str) -> Result<Vec<PathBuf>, CliError> {
        let mut sink = Sink::new(&config.output.directory)?;
        for (name, t) in &self.tables {
            sink.table(name, t, config.run.seed)?;
        }
        for (name, text) in &self.files {
            sink.write(name, text)?;
        }
        sink.report(report_name, &self.report, config)?;
        if config.output.plot {
            for (name, svg) in &self.plots {
                sink.write(name, svg)?;
            }
        }
        Ok(sink.written)
    }
}

pub(crate) fn atom() -> Atom {
    Atom::rubidium87()
}

pub(crate) fn level(atom: &Atom, config: &RunConfig) -> Result<RydbergLevel, CliError> {
    atom.parse_level(&config.atomic.state)
        .map_err(|e| CliError::Config(format!("[atomic] state: {e}")))
}

/// A_r and A_BB for the configured level, computing those set to auto.
pub(crate) fn radiative_rates(config: &RunConfig) -> Result<(f64, f64), CliError> {
    let (a_r, a_bb) = (config.rates.a_r, config.rates.a_bb);
    if let (Some(a), Some(b)) = (a_r, a_bb) {
        return Ok((a, b));
    }
    let atom = atom();
    let lv = level(&atom, config)?;
    let rates = atom.level_rates(&lv, config.atomic.temperature, NeighborWindow::default())?;
    Ok((a_r.unwrap_or(rates.a_r), a_bb.unwrap_or(rates.a_bb)))
}

pub(crate) fn excitation(config: &RunConfig) -> ExcitationParams {
    let e = &config.excitation;
    let linewidth = TAU * e.linewidth_hz;
    match e.r2_peak {
        Some(r) => ExcitationParams::with_peak_rate(r, linewidth),
        None => ExcitationParams {
            rabi_lower: e.rabi_lower,
            rabi_upper: e.rabi_upper,
            intermediate_detuning: e.intermediate_detuning,
            linewidth,
            detuning: 0.0,
        },
    }
}

pub(crate) fn geometry(config: &RunConfig) -> DetectionGeometry {
    let d = &config.detection;
    DetectionGeometry {
        solid_angle: d.solid_angle,
        efficiency: d.efficiency,
        branching_rydberg: d.branching_rydberg,
        branching_6p: d.branching_6p,
    }
}

/// Kinetics parameters at the peak excitation rate, without probe.
pub(crate) fn kinetics(config: &RunConfig) -> Result<KineticsParams, CliError> {
    let (a_r, _) = radiative_rates(config)?;
    let r = &config.rates;
    Ok(KineticsParams {
        r2: excitation(config).peak_rate()?,
        r3: 0.0,
        a_r,
        a_s: r.a_s,
        gamma: r.gamma,
        gamma_r: r.gamma_r,
        gamma_s: r.gamma_s,
        load_rate: config.mot.load_rate,
        gamma_0: config.mot.gamma_0,
        dark: DarkCompartment {
            fraction: config.dark.fraction,
            exchange_rate: config.dark.exchange_rate,
        },
    })
}

pub(crate) fn probe_grid(config: &RunConfig) -> Vec<f64> {
    let p = &config.probe;
    let last = (p.points - 1) as f64;
    (0..p.points)
        .map(|i| {
            let x = i as f64 / last;
            match p.spacing {
                Spacing::Linear => p.r3_max * x,
                Spacing::Quadratic => p.r3_max * x * x,
            }
        })
        .collect()
}

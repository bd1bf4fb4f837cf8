//! Run configuration: sectioned key-value text with strict key checking.
//!
//! Every key has a default, so an empty file (or no file) is a valid 28D5/2
//! configuration. Keys documented as "or auto" accept the word `auto` to derive the
//! value from atomic data or from other keys. Sections whose name is `result` or
//! starts with `result.` are ignored, so a report written by any command can be fed
//! back as a configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ini::Ini;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub run: RunSection,
    pub atomic: AtomicSection,
    pub cloud: CloudSection,
    pub excitation: ExcitationSection,
    pub rates: RatesSection,
    pub dark: DarkSection,
    pub probe: ProbeSection,
    pub mot: MotSection,
    pub detection: DetectionSection,
    pub cascade: CascadeSection,
    pub fit: FitSection,
    pub synth: SynthSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub seed: u64,
    /// Worker threads for batch commands.
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicSection {
    /// Pumped level, e.g. `28D5/2`.
    pub state: String,
    /// Black-body temperature (K).
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudSection {
    /// Radius of the uniform sphere (m).
    pub radius: f64,
    /// Rydberg number density for the capture estimate (1/m^3).
    pub density: f64,
    /// Atom temperature for the capture estimate (K).
    pub atom_temperature: f64,
    /// Van der Waals coefficient (GHz um^6).
    pub c6_ghz_um6: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSection {
    /// Peak excitation rate (1/s); `auto` derives it from the Rabi frequencies.
    pub r2_peak: Option<f64>,
    /// Lower-leg Rabi frequency (rad/s).
    pub rabi_lower: f64,
    /// Upper-leg Rabi frequency (rad/s).
    pub rabi_upper: f64,
    /// Intermediate-level detuning (rad/s).
    pub intermediate_detuning: f64,
    /// Observed two-photon linewidth, FWHM (Hz).
    pub linewidth_hz: f64,
    /// Scan half-span (Hz).
    pub span_hz: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatesSection {
    /// Radiative rate of the excited level (1/s), or auto.
    pub a_r: Option<f64>,
    /// Mean radiative rate of the other Rydberg levels (1/s).
    pub a_s: f64,
    /// Black-body transfer rate of the excited level (1/s), or auto.
    pub a_bb: Option<f64>,
    /// Rydberg-Rydberg transfer rate gamma (1/s).
    pub gamma: f64,
    /// Direct trap loss of the excited level (1/s).
    pub gamma_r: f64,
    /// Trap loss of the other Rydberg levels (1/s).
    pub gamma_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DarkSection {
    /// Dark fraction f_d, at most 1/3.
    pub fraction: f64,
    /// Zeeman exchange rate (1/s).
    pub exchange_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSection {
    /// Largest stimulated-emission rate R3 (1/s).
    pub r3_max: f64,
    pub points: usize,
    /// `linear` or `quadratic` spacing from 0 to r3_max.
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotSection {
    /// Load rate (atoms/s).
    pub load_rate: f64,
    /// Background loss rate (1/s).
    pub gamma_0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSection {
    pub solid_angle: f64,
    pub efficiency: f64,
    pub branching_rydberg: f64,
    pub branching_6p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSection {
    /// Initial |n' - n| window.
    pub n_half_width: u32,
    pub l_max: u32,
    /// Widen the window until gamma settles.
    pub converge_window: bool,
    /// Relative gamma change that ends the widening.
    pub window_tolerance: f64,
    pub max_half_width: u32,
    /// Fixed pump into the level (1/s), or auto for the trap-coupled value.
    pub pump: Option<f64>,
    /// Excitation rate per ground atom (1/s), or auto for 110/s scaled as n*^-3 from 28D5/2.
    pub r2: Option<f64>,
    /// Length of the emitted time series (s).
    pub duration: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSection {
    /// Dataset CSV; its key-value sidecar is `<dataset>.ini`.
    pub dataset: Option<PathBuf>,
    /// `auto` (from the dataset), `loss`, `loss-combined` or `counts`.
    pub mode: String,
    pub fit_dark_fraction: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSection {
    /// `loss`, `counts` or `both`.
    pub observable: String,
    pub gamma: f64,
    pub gamma_s: f64,
    pub dark_fraction: f64,
    /// `none`, `gaussian` or `poisson`.
    pub noise: String,
    /// Relative sigma for gaussian noise.
    pub noise_level: f64,
    /// Exposure (s) for poisson noise.
    pub exposure: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub plot: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ex = rydyn::kinetics::ExcitationParams::with_peak_rate(110.0, std::f64::consts::TAU * 9e6);
        RunConfig {
            run: RunSection { seed: 0, jobs: 1 },
            atomic: AtomicSection {
                state: "28D5/2".into(),
                temperature: 300.0,
            },
            cloud: CloudSection {
                radius: 0.5e-3,
                density: 1e13,
                atom_temperature: 100e-6,
                c6_ghz_um6: 540.0,
            },
            excitation: ExcitationSection {
                r2_peak: Some(110.0),
                rabi_lower: ex.rabi_lower,
                rabi_upper: ex.rabi_upper,
                intermediate_detuning: ex.intermediate_detuning,
                linewidth_hz: 9e6,
                span_hz: 50e6,
                points: 201,
            },
            rates: RatesSection {
                a_r: Some(4.1e4),
                a_s: 3.1e4,
                a_bb: Some(2.6e4),
                gamma: 1.3e5,
                gamma_r: 0.0,
                gamma_s: 265.0,
            },
            dark: DarkSection {
                fraction: 0.0,
                exchange_rate: 5e6,
            },
            probe: ProbeSection {
                r3_max: 1e6,
                points: 41,
                spacing: Spacing::Quadratic,
            },
            mot: MotSection {
                load_rate: 5.7e7,
                gamma_0: 1.0,
            },
            detection: DetectionSection {
                solid_angle: 3e-3,
                efficiency: 0.034,
                branching_rydberg: 0.15,
                branching_6p: 0.31,
            },
            cascade: CascadeSection {
                n_half_width: 5,
                l_max: 4,
                converge_window: true,
                window_tolerance: 0.05,
                max_half_width: 20,
                pump: None,
                r2: None,
                duration: 1e-3,
                samples: 200,
            },
            fit: FitSection {
                dataset: None,
                mode: "auto".into(),
                fit_dark_fraction: false,
            },
            synth: SynthSection {
                observable: "both".into(),
                gamma: 1.3e5,
                gamma_s: 265.0,
                dark_fraction: 0.0,
                noise: "gaussian".into(),
                noise_level: 0.05,
                exposure: 1.0,
            },
            output: OutputSection {
                directory: PathBuf::from("."),
                plot: false,
            },
        }
    }
}

struct Section {
    name: &'static str,
    values: BTreeMap<String, (String, usize)>,
    used: Vec<String>,
}

fn bad(section: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("[{section}] {key}: {msg}"))
}

impl Section {
    fn raw(&mut self, key: &str) -> Option<String> {
        self.used.push(key.to_string());
        self.values.get(key).map(|(v, _)| v.trim().to_string())
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_f64(&v).ok_or_else(|| bad(self.name, key, format!("expected a number, got '{v}'"))),
        }
    }

    fn non_negative(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.f64(key, default)?;
        if v < 0.0 {
            return Err(bad(self.name, key, format!("must be non-negative, got {v}")));
        }
        Ok(v)
    }

    fn positive(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.f64(key, default)?;
        if v <= 0.0 {
            return Err(bad(self.name, key, format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    fn unit(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.f64(key, default)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(bad(self.name, key, format!("must lie in [0, 1], got {v}")));
        }
        Ok(v)
    }

    /// A non-negative number or `auto`.
    fn auto_f64(&mut self, key: &str, default: Option<f64>) -> Result<Option<f64>, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) if v.eq_ignore_ascii_case("auto") => Ok(None),
            Some(v) => match parse_f64(&v) {
                Some(x) if x >= 0.0 => Ok(Some(x)),
                _ => Err(bad(self.name, key, format!("expected a non-negative number or auto, got '{v}'"))),
            },
        }
    }

    fn integer<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T, CliError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| bad(self.name, key, format!("expected a non-negative integer, got '{v}'"))),
        }
    }

    fn count(&mut self, key: &str, default: usize, min: usize) -> Result<usize, CliError> {
        let v: usize = self.integer(key, default)?;
        if v < min {
            return Err(bad(self.name, key, format!("must be at least {min}, got {v}")));
        }
        Ok(v)
    }

    fn bool(&mut self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.raw(key).map(|v| v.to_ascii_lowercase()) {
            None => Ok(default),
            Some(v) => match v.as_str() {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => Err(bad(self.name, key, format!("expected true or false, got '{v}'"))),
            },
        }
    }

    fn choice(&mut self, key: &str, default: &str, allowed: &[&str]) -> Result<String, CliError> {
        let v = self.raw(key).unwrap_or_else(|| default.to_string()).to_ascii_lowercase();
        if !allowed.contains(&v.as_str()) {
            return Err(bad(self.name, key, format!("expected one of {}, got '{v}'", allowed.join(", "))));
        }
        Ok(v)
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or_else(|| default.to_string())
    }

    fn finish(self) -> Result<(), CliError> {
        for (k, (_, line)) in &self.values {
            if !self.used.contains(k) {
                return Err(CliError::Config(format!(
                    "[{}] {k}: unknown key (line {line})",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

const SECTIONS: [&str; 13] = [
    "run",
    "atomic",
    "cloud",
    "excitation",
    "rates",
    "dark",
    "probe",
    "mot",
    "detection",
    "cascade",
    "fit",
    "synth",
    "output",
];

/// Finds the line on which `key` first appears inside `[section]`.
fn line_of(text: &str, section: Option<&str>, key: &str) -> usize {
    let mut current: Option<String> = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            current = Some(name.trim().to_string());
        } else if current.as_deref() == section {
            if let Some((k, _)) = t.split_once('=') {
                if k.trim() == key {
                    return i + 1;
                }
            }
        }
    }
    0
}

impl RunConfig {
    /// Reads a configuration file; `None` gives the defaults.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", p.display())))?;
                Self::parse(&text).map_err(|e| match e {
                    CliError::Config(m) => CliError::Config(format!("{}: {m}", p.display())),
                    other => other,
                })
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(format!("syntax error: {e}")))?;
        let mut sections: BTreeMap<String, BTreeMap<String, (String, usize)>> = BTreeMap::new();
        for (name, props) in ini.iter() {
            let name = name.map(|s| s.trim().to_string());
            if let Some(n) = &name {
                if n == "result" || n.starts_with("result.") {
                    continue;
                }
            }
            let Some(n) = name.clone() else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(CliError::Config(format!(
                        "{k}: key outside any section (line {})",
                        line_of(text, None, k)
                    )));
                }
                continue;
            };
            if !SECTIONS.contains(&n.as_str()) {
                return Err(CliError::Config(format!("[{n}]: unknown section")));
            }
            let entry = sections.entry(n.clone()).or_default();
            for (k, v) in props.iter() {
                let line = line_of(text, Some(&n), k);
                if entry.insert(k.trim().to_string(), (v.to_string(), line)).is_some() {
                    return Err(CliError::Config(format!("[{n}] {k}: duplicate key (line {line})")));
                }
            }
        }
        let mut take = |name: &'static str| Section {
            name,
            values: sections.remove(name).unwrap_or_default(),
            used: Vec::new(),
        };
        let d = RunConfig::default();

        let mut s = take("run");
        let run = RunSection {
            seed: s.integer("seed", d.run.seed)?,
            jobs: s.count("jobs", d.run.jobs, 1)?,
        };
        s.finish()?;

        let mut s = take("atomic");
        let atomic = AtomicSection {
            state: s.string("state", &d.atomic.state),
            temperature: s.non_negative("temperature", d.atomic.temperature)?,
        };
        s.finish()?;

        let mut s = take("cloud");
        let cloud = CloudSection {
            radius: s.positive("radius", d.cloud.radius)?,
            density: s.non_negative("density", d.cloud.density)?,
            atom_temperature: s.positive("atom_temperature", d.cloud.atom_temperature)?,
            c6_ghz_um6: s.non_negative("c6_ghz_um6", d.cloud.c6_ghz_um6)?,
        };
        s.finish()?;

        let mut s = take("excitation");
        let excitation = ExcitationSection {
            r2_peak: s.auto_f64("r2_peak", d.excitation.r2_peak)?,
            rabi_lower: s.non_negative("rabi_lower", d.excitation.rabi_lower)?,
            rabi_upper: s.non_negative("rabi_upper", d.excitation.rabi_upper)?,
            intermediate_detuning: {
                let v = s.f64("intermediate_detuning", d.excitation.intermediate_detuning)?;
                if v == 0.0 {
                    return Err(bad("excitation", "intermediate_detuning", "must be non-zero"));
                }
                v
            },
            linewidth_hz: s.positive("linewidth_hz", d.excitation.linewidth_hz)?,
            span_hz: s.positive("span_hz", d.excitation.span_hz)?,
            points: s.count("points", d.excitation.points, 1)?,
        };
        s.finish()?;

        let mut s = take("rates");
        let rates = RatesSection {
            a_r: s.auto_f64("a_r", d.rates.a_r)?,
            a_s: s.non_negative("a_s", d.rates.a_s)?,
            a_bb: s.auto_f64("a_bb", d.rates.a_bb)?,
            gamma: s.non_negative("gamma", d.rates.gamma)?,
            gamma_r: s.non_negative("gamma_r", d.rates.gamma_r)?,
            gamma_s: s.non_negative("gamma_s", d.rates.gamma_s)?,
        };
        s.finish()?;

        let mut s = take("dark");
        let dark = DarkSection {
            fraction: {
                let f = s.f64("fraction", d.dark.fraction)?;
                if !(0.0..=1.0 / 3.0 + 1e-12).contains(&f) {
                    return Err(bad("dark", "fraction", format!("must lie in [0, 1/3], got {f}")));
                }
                f
            },
            exchange_rate: s.non_negative("exchange_rate", d.dark.exchange_rate)?,
        };
        s.finish()?;

        let mut s = take("probe");
        let probe = ProbeSection {
            r3_max: s.positive("r3_max", d.probe.r3_max)?,
            points: s.count("points", d.probe.points, 4)?,
            spacing: match s.choice("spacing", "quadratic", &["linear", "quadratic"])?.as_str() {
                "linear" => Spacing::Linear,
                _ => Spacing::Quadratic,
            },
        };
        s.finish()?;

        let mut s = take("mot");
        let mot = MotSection {
            load_rate: s.non_negative("load_rate", d.mot.load_rate)?,
            gamma_0: s.positive("gamma_0", d.mot.gamma_0)?,
        };
        s.finish()?;

        let mut s = take("detection");
        let detection = DetectionSection {
            solid_angle: s.unit("solid_angle", d.detection.solid_angle)?,
            efficiency: s.unit("efficiency", d.detection.efficiency)?,
            branching_rydberg: s.unit("branching_rydberg", d.detection.branching_rydberg)?,
            branching_6p: s.unit("branching_6p", d.detection.branching_6p)?,
        };
        s.finish()?;

        let mut s = take("cascade");
        let cascade = CascadeSection {
            n_half_width: s.integer("n_half_width", d.cascade.n_half_width)?,
            l_max: s.integer("l_max", d.cascade.l_max)?,
            converge_window: s.bool("converge_window", d.cascade.converge_window)?,
            window_tolerance: s.positive("window_tolerance", d.cascade.window_tolerance)?,
            max_half_width: s.integer("max_half_width", d.cascade.max_half_width)?,
            pump: s.auto_f64("pump", d.cascade.pump)?,
            r2: s.auto_f64("r2", d.cascade.r2)?,
            duration: s.positive("duration", d.cascade.duration)?,
            samples: s.count("samples", d.cascade.samples, 1)?,
        };
        s.finish()?;

        let mut s = take("fit");
        let fit = FitSection {
            dataset: s.raw("dataset").filter(|v| !v.is_empty() && v != "none").map(PathBuf::from),
            mode: s.choice("mode", &d.fit.mode, &["auto", "loss", "loss-combined", "counts"])?,
            fit_dark_fraction: s.bool("fit_dark_fraction", d.fit.fit_dark_fraction)?,
        };
        s.finish()?;

        let mut s = take("synth");
        let synth = SynthSection {
            observable: s.choice("observable", &d.synth.observable, &["loss", "counts", "both"])?,
            gamma: s.positive("gamma", d.synth.gamma)?,
            gamma_s: s.non_negative("gamma_s", d.synth.gamma_s)?,
            dark_fraction: {
                let f = s.f64("dark_fraction", d.synth.dark_fraction)?;
                if !(0.0..=1.0 / 3.0 + 1e-12).contains(&f) {
                    return Err(bad("synth", "dark_fraction", format!("must lie in [0, 1/3], got {f}")));
                }
                f
            },
            noise: s.choice("noise", &d.synth.noise, &["none", "gaussian", "poisson"])?,
            noise_level: s.positive("noise_level", d.synth.noise_level)?,
            exposure: s.positive("exposure", d.synth.exposure)?,
        };
        s.finish()?;

        let mut s = take("output");
        let output = OutputSection {
            directory: PathBuf::from(s.string("directory", ".")),
            plot: s.bool("plot", d.output.plot)?,
        };
        s.finish()?;

        Ok(RunConfig {
            run,
            atomic,
            cloud,
            excitation,
            rates,
            dark,
            probe,
            mot,
            detection,
            cascade,
            fit,
            synth,
            output,
        })
    }

    /// The fully resolved configuration as parseable text.
    pub fn to_ini(&self) -> String {
        fn auto(v: Option<f64>) -> String {
            v.map_or("auto".to_string(), num)
        }
        let mut out = String::new();
        let mut section = |name: &str, keys: Vec<(&str, String)>| {
            let _ = writeln!(out, "[{name}]");
            for (k, v) in keys {
                let _ = writeln!(out, "{k} = {v}");
            }
            out.push('\n');
        };
        section(
            "run",
            vec![("seed", self.run.seed.to_string()), ("jobs", self.run.jobs.to_string())],
        );
        section(
            "atomic",
            vec![
                ("state", self.atomic.state.clone()),
                ("temperature", num(self.atomic.temperature)),
            ],
        );
        let c = &self.cloud;
        section(
            "cloud",
            vec![
                ("radius", num(c.radius)),
                ("density", num(c.density)),
                ("atom_temperature", num(c.atom_temperature)),
                ("c6_ghz_um6", num(c.c6_ghz_um6)),
            ],
        );
        let e = &self.excitation;
        section(
            "excitation",
            vec![
                ("r2_peak", auto(e.r2_peak)),
                ("rabi_lower", num(e.rabi_lower)),
                ("rabi_upper", num(e.rabi_upper)),
                ("intermediate_detuning", num(e.intermediate_detuning)),
                ("linewidth_hz", num(e.linewidth_hz)),
                ("span_hz", num(e.span_hz)),
                ("points", e.points.to_string()),
            ],
        );
        let r = &self.rates;
        section(
            "rates",
            vec![
                ("a_r", auto(r.a_r)),
                ("a_s", num(r.a_s)),
                ("a_bb", auto(r.a_bb)),
                ("gamma", num(r.gamma)),
                ("gamma_r", num(r.gamma_r)),
                ("gamma_s", num(r.gamma_s)),
            ],
        );
        section(
            "dark",
            vec![
                ("fraction", num(self.dark.fraction)),
                ("exchange_rate", num(self.dark.exchange_rate)),
            ],
        );
        let p = &self.probe;
        section(
            "probe",
            vec![
                ("r3_max", num(p.r3_max)),
                ("points", p.points.to_string()),
                (
                    "spacing",
                    match p.spacing {
                        Spacing::Linear => "linear".into(),
                        Spacing::Quadratic => "quadratic".into(),
                    },
                ),
            ],
        );
        section(
            "mot",
            vec![("load_rate", num(self.mot.load_rate)), ("gamma_0", num(self.mot.gamma_0))],
        );
        let g = &self.detection;
        section(
            "detection",
            vec![
                ("solid_angle", num(g.solid_angle)),
                ("efficiency", num(g.efficiency)),
                ("branching_rydberg", num(g.branching_rydberg)),
                ("branching_6p", num(g.branching_6p)),
            ],
        );
        let k = &self.cascade;
        section(
            "cascade",
            vec![
                ("n_half_width", k.n_half_width.to_string()),
                ("l_max", k.l_max.to_string()),
                ("converge_window", k.converge_window.to_string()),
                ("window_tolerance", num(k.window_tolerance)),
                ("max_half_width", k.max_half_width.to_string()),
                ("pump", auto(k.pump)),
                ("r2", auto(k.r2)),
                ("duration", num(k.duration)),
                ("samples", k.samples.to_string()),
            ],
        );
        section(
            "fit",
            vec![
                (
                    "dataset",
                    self.fit
                        .dataset
                        .as_ref()
                        .map_or("none".to_string(), |p| p.display().to_string()),
                ),
                ("mode", self.fit.mode.clone()),
                ("fit_dark_fraction", self.fit.fit_dark_fraction.to_string()),
            ],
        );
        let y = &self.synth;
        section(
            "synth",
            vec![
                ("observable", y.observable.clone()),
                ("gamma", num(y.gamma)),
                ("gamma_s", num(y.gamma_s)),
                ("dark_fraction", num(y.dark_fraction)),
                ("noise", y.noise.clone()),
                ("noise_level", num(y.noise_level)),
                ("exposure", num(y.exposure)),
            ],
        );
        section(
            "output",
            vec![
                ("directory", self.output.directory.display().to_string()),
                ("plot", self.output.plot.to_string()),
            ],
        );
        out
    }
}

/// Shortest round-tripping scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_default() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::default();
        c.cascade.pump = Some(3.5e9);
        c.rates.a_r = None;
        c.fit.dataset = Some("data/scan.csv".into());
        c.probe.spacing = Spacing::Linear;
        assert_eq!(RunConfig::parse(&c.to_ini()).unwrap(), c);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = RunConfig::parse("[rates]\ngamma = 1e5\ngamm = 3\n").unwrap_err();
        let m = e.to_string();
        assert!(m.contains("[rates] gamm") && m.contains("line 3"), "{m}");
    }

    #[test]
    fn unknown_section_and_stray_keys() {
        assert!(RunConfig::parse("[nope]\na = 1\n").is_err());
        assert!(RunConfig::parse("a = 1\n").is_err());
    }

    #[test]
    fn result_sections_are_ignored() {
        let c = RunConfig::parse("[result]\ngamma = 5\n[result.table]\nx = 1\n").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn bad_values_are_named() {
        for (text, key) in [
            ("[rates]\ngamma = fast\n", "[rates] gamma"),
            ("[detection]\nefficiency = 2\n", "[detection] efficiency"),
            ("[dark]\nfraction = 0.5\n", "[dark] fraction"),
            ("[probe]\npoints = 2\n", "[probe] points"),
            ("[cascade]\nconverge_window = maybe\n", "[cascade] converge_window"),
        ] {
            let m = RunConfig::parse(text).unwrap_err().to_string();
            assert!(m.contains(key), "{m}");
        }
    }

    #[test]
    fn duplicate_keys_rejected() {
        assert!(RunConfig::parse("[mot]\ngamma_0 = 1\ngamma_0 = 2\n").is_err());
    }
}

use std::path::{Path, PathBuf};

use ini::Ini;
use rydyn::estimation::{fit_probe_scan, FitMode, FitOptions, FixedParams, Observable, ProbeScanDataset, Sample};

use super::Outcome;
use crate::config::{num, RunConfig};
use crate::error::{io_error, CliError};
use crate::output::Table;
use crate::plot::LineChart;

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".ini");
    PathBuf::from(s)
}

fn read_sidecar(path: &Path) -> Result<(Observable, FixedParams), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let bad = |m: String| CliError::Config(format!("{}: {m}", path.display()));
    let ini = Ini::load_from_str(&text).map_err(|e| bad(e.to_string()))?;
    let sec = ini
        .section(Some("dataset"))
        .ok_or_else(|| bad("missing [dataset] section".into()))?;
    for (k, _) in sec.iter() {
        if !["observable", "r2", "a_r", "a_s", "gamma_r", "exchange_rate"].contains(&k) {
            return Err(bad(format!("[dataset] {k}: unknown key")));
        }
    }
    let number = |k: &str, default: Option<f64>| -> Result<f64, CliError> {
        match sec.get(k) {
            Some(v) => v
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("[dataset] {k}: expected a number, got '{v}'"))),
            None => default.ok_or_else(|| bad(format!("[dataset] {k}: missing"))),
        }
    };
    let observable: Observable = sec
        .get("observable")
        .ok_or_else(|| bad("[dataset] observable: missing".into()))?
        .parse()
        .map_err(|e: String| bad(format!("[dataset] observable: {e}")))?;
    let fixed = FixedParams {
        r2: number("r2", None)?,
        a_r: number("a_r", None)?,
        a_s: number("a_s", None)?,
        gamma_r: number("gamma_r", Some(0.0))?,
        exchange_rate: number("exchange_rate", Some(0.0))?,
    };
    Ok((observable, fixed))
}

/// Reads a dataset CSV (`r3_per_s`, `observable`, optional `sigma`) and its sidecar.
pub fn read_dataset(path: &Path) -> Result<ProbeScanDataset, CliError> {
    let (observable, fixed) = read_sidecar(&sidecar_path(path))?;
    let file = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(file);
    let bad = |line: u64, m: &str| CliError::Config(format!("{} line {line}: {m}", path.display()));
    let headers = rdr.headers().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?.clone();
    let col = |names: &[&str]| headers.iter().position(|h| names.contains(&h));
    let r3_col = col(&["r3_per_s"]).ok_or_else(|| bad(1, "missing column r3_per_s"))?;
    let value_col = col(&["observable", "value"]).ok_or_else(|| bad(1, "missing column observable"))?;
    let sigma_col = col(&["sigma"]);
    let mut samples = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            bad(line, &e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<f64, CliError> {
            let v = rec.get(i).unwrap_or("");
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(line, &format!("{name}: expected a number, got '{v}'")))
        };
        let sigma = match sigma_col {
            Some(i) if !rec.get(i).unwrap_or("").is_empty() => Some(field(i, "sigma")?),
            _ => None,
        };
        samples.push(Sample {
            r3: field(r3_col, "r3_per_s")?,
            value: field(value_col, "observable")?,
            sigma,
        });
    }
    let d = ProbeScanDataset {
        observable,
        fixed,
        samples,
    };
    d.validate().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(d)
}

/// Fits gamma (and Gamma_s or an amplitude) to a probe-scan dataset.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let path = config
        .fit
        .dataset
        .as_ref()
        .ok_or_else(|| CliError::Config("[fit] dataset: no dataset given (set it or pass --dataset)".into()))?;
    let d = read_dataset(path)?;
    let mode = match config.fit.mode.as_str() {
        "auto" => FitMode::for_observable(d.observable),
        m => m.parse().map_err(|e: String| CliError::Config(format!("[fit] mode: {e}")))?,
    };
    let opts = FitOptions {
        fit_dark_fraction: config.fit.fit_dark_fraction,
        ..FitOptions::default()
    };
    let f = fit_probe_scan(&d, mode, opts).map_err(|e| CliError::from(e).context(&path.display().to_string()))?;

    let mut out = Outcome::default();
    let r = &mut out.report;
    r.put("", "command", "fit");
    r.put("", "dataset", path.display());
    r.put("", "observable", d.observable.as_str());
    r.put("", "mode", mode.as_str());
    r.put("", "samples", d.samples.len());
    for (i, name) in f.names.iter().enumerate() {
        r.put_num("", name, f.values[i]);
        r.put_num("", &format!("{name}_std_error"), f.std_error(i));
    }
    r.put_num("", "chi2", f.chi2);
    r.put("", "dof", f.dof);
    r.put("", "converged", f.converged);
    r.put("", "iterations", f.iterations);
    r.put("", "unit_weights", f.unit_weights);
    r.put("", "warnings", if f.warnings.is_empty() { "none".to_string() } else { f.warnings.join("; ") });
    for i in 0..f.names.len() {
        for j in 0..f.names.len() {
            r.put_num("covariance", &format!("{}__{}", f.names[i], f.names[j]), f.covariance[(i, j)]);
        }
    }

    let mut res = Table::new(&["r3_per_s", "observed", "model", "residual", "sigma"]);
    for s in &d.samples {
        let m = f.predict(&d, s.r3);
        res.push(vec![
            num(s.r3),
            num(s.value),
            num(m),
            num(s.value - m),
            s.sigma.map_or(String::new(), num),
        ]);
    }
    out.summary.push(format!(
        "gamma {:.4e} +- {:.2e} /s, {} {:.4e} +- {:.2e}{}",
        f.gamma(),
        f.std_error(0),
        f.names[1],
        f.second(),
        f.std_error(1),
        if f.converged { "" } else { " (NOT converged)" }
    ));
    for w in &f.warnings {
        out.summary.push(format!("warning: {w}"));
    }
    if config.output.plot {
        let r3_max = d.samples.iter().map(|s| s.r3).fold(0.0, f64::max);
        let curve = (0..=200).map(|i| {
            let x = r3_max * i as f64 / 200.0;
            (x, f.predict(&d, x))
        });
        let chart = LineChart::new("Probe-scan fit", "R3 (1/s)", d.observable.as_str())
            .add("data", d.samples.iter().map(|s| (s.r3, s.value)).collect())
            .add("fit", curve.collect());
        out.plots.push(("fit.svg".into(), chart.render()));
    }
    out.tables.push(("fit_residuals.csv".into(), res));
    Ok(out)
}

use rydyn::estimation::{synthesize_dataset, FixedParams, NoiseModel, Observable, ProbeScanDataset, ScanTruth};

use super::{excitation, geometry, probe_grid, radiative_rates, Outcome};
use crate::config::{num, RunConfig};
use crate::error::CliError;
use crate::output::Table;

pub(crate) fn fixed_params(config: &RunConfig) -> Result<FixedParams, CliError> {
    let (a_r, _) = radiative_rates(config)?;
    Ok(FixedParams {
        r2: excitation(config).peak_rate()?,
        a_r,
        a_s: config.rates.a_s,
        gamma_r: config.rates.gamma_r,
        exchange_rate: config.dark.exchange_rate,
    })
}

/// Dataset CSV with columns r3_per_s, observable, sigma.
pub fn dataset_table(d: &ProbeScanDataset) -> Table {
    let mut t = Table::new(&["r3_per_s", "observable", "sigma"]).comment(format!(
        "observable: {} ({})",
        d.observable.as_str(),
        match d.observable {
            Observable::Loss => "added trap loss, 1/s",
            Observable::Counts => "probe counts per ground atom, 1/s",
        }
    ));
    for s in &d.samples {
        t.push(vec![
            num(s.r3),
            num(s.value),
            s.sigma.map_or(String::new(), num),
        ]);
    }
    t
}

/// Sidecar with the fixed parameters and the observable tag.
pub fn sidecar(d: &ProbeScanDataset) -> String {
    let f = &d.fixed;
    format!(
        "[dataset]\nobservable = {}\nr2 = {}\na_r = {}\na_s = {}\ngamma_r = {}\nexchange_rate = {}\n",
        d.observable.as_str(),
        num(f.r2),
        num(f.a_r),
        num(f.a_s),
        num(f.gamma_r),
        num(f.exchange_rate)
    )
}

/// Synthetic probe-scan datasets from the `[synth]` truth.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let s = &config.synth;
    let truth = ScanTruth {
        fixed: fixed_params(config)?,
        gamma: s.gamma,
        gamma_s: s.gamma_s,
        dark_fraction: s.dark_fraction,
        geometry: geometry(config),
    };
    let noise = match s.noise.as_str() {
        "none" => NoiseModel::None,
        "gaussian" => NoiseModel::Gaussian { relative: s.noise_level },
        _ => NoiseModel::Poisson { exposure: s.exposure },
    };
    let observables: Vec<Observable> = match s.observable.as_str() {
        "loss" => vec![Observable::Loss],
        "counts" => vec![Observable::Counts],
        _ => vec![Observable::Loss, Observable::Counts],
    };
    let grid = probe_grid(config);
    let mut out = Outcome::default();
    out.report.put("", "command", "synth");
    for (k, obs) in observables.iter().enumerate() {
        // one stream per observable so the loss file does not depend on whether counts are also drawn
        let seed = config.run.seed.wrapping_add(match obs {
            Observable::Loss => 0,
            Observable::Counts => 1,
        });
        let d = synthesize_dataset(&truth, *obs, &grid, noise, seed)?;
        let name = format!("synth_{}.csv", obs.as_str());
        out.report.put("", &format!("dataset_{k}"), &name);
        out.report.put("", &format!("dataset_{k}_seed"), seed);
        out.files.push((format!("{name}.ini"), sidecar(&d)));
        out.tables.push((name.clone(), dataset_table(&d)));
        out.summary.push(format!("{name}: {} samples of {}", d.samples.len(), obs.as_str()));
    }
    Ok(out)
}

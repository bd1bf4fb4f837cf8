use rydyn::atomic::{LevelRates, NeighborWindow, RydbergLevel};
use rydyn::estimation::{capture_rate, electron_steady, CaptureParams};
use rydyn::kinetics::{cascade_count_rate, KineticsParams};
use rydyn::reference::{self, quoted, STATES};
use rydyn::superradiance::{superradiance_estimate, BasisConvergence, BasisWindow, TransferEstimate};

use super::{atom, cascade, geometry, Outcome};
use crate::config::{num, RunConfig};
use crate::error::CliError;
use crate::output::Table;

/// Electron production (1/s) and dissipation (1/s) used in the free-electron estimate.
const ELECTRON_PRODUCTION: f64 = 4e6;
const ELECTRON_DISSIPATION: f64 = 1e4;
const ELECTRON_QUOTED: f64 = 400.0;

struct StateRow {
    label: &'static str,
    level: RydbergLevel,
    rates: LevelRates,
    ionization: f64,
    transfer: TransferEstimate,
}

fn compute(config: &RunConfig, label: &'static str) -> Result<StateRow, CliError> {
    let atom = atom();
    let labelled = |e: rydyn::Error| CliError::from(e).context(label);
    let level = atom.parse_level(label).map_err(labelled)?;
    let t = config.atomic.temperature;
    let rates = atom.level_rates(&level, t, NeighborWindow::default()).map_err(labelled)?;
    let ionization = atom.ionization_rate(&level, t);
    let c = &config.cascade;
    let convergence = BasisConvergence {
        start: BasisWindow {
            n_half_width: c.n_half_width,
            l_max: c.l_max,
        },
        step: 3,
        max_half_width: c.max_half_width.max(c.n_half_width),
        tolerance: c.window_tolerance,
    };
    let cond = cascade::conditions(config, level.n_star);
    let transfer = if c.converge_window {
        rydyn::superradiance::converged_transfer(&atom, &level, &cond, convergence)
    } else {
        rydyn::superradiance::transfer_at_window(&atom, &level, &cond, convergence.start)
    }
    .map_err(|e| CliError::from(e).context(&format!("cascade for {label}")))?;
    Ok(StateRow {
        label,
        level,
        rates,
        ionization,
        transfer,
    })
}

/// Runs the four reference states on up to `jobs` threads, returned in state order.
fn compute_all(config: &RunConfig) -> Result<Vec<StateRow>, CliError> {
    let jobs = config.run.jobs.clamp(1, STATES.len());
    let mut slots: Vec<Option<Result<StateRow, CliError>>> = (0..STATES.len()).map(|_| None).collect();
    std::thread::scope(|s| {
        let chunks: Vec<_> = slots
            .chunks_mut(STATES.len().div_ceil(jobs))
            .enumerate()
            .map(|(k, chunk)| {
                let start = k * STATES.len().div_ceil(jobs);
                s.spawn(move || {
                    for (i, slot) in chunk.iter_mut().enumerate() {
                        *slot = Some(compute(config, STATES[start + i]));
                    }
                })
            })
            .collect();
        for h in chunks {
            h.join().expect("worker thread panicked");
        }
    });
    slots.into_iter().map(|s| s.expect("every state computed")).collect()
}

fn ratio(a: f64, b: f64) -> String {
    num(a / b)
}

/// Computed rates, transfer rates and ionization next to the reference tables.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let rows = compute_all(config)?;
    let mut out = Outcome::default();

    let mut rates = Table::new(&[
        "state",
        "n_star",
        "a_r_per_s",
        "a_r_reference_per_s",
        "a_r_ratio",
        "a_bb_per_s",
        "a_bb_reference_per_s",
        "a_bb_ratio",
        "a_s_reference_per_s",
        "gamma_s_reference_per_s",
        "citation",
    ])
    .comment(format!("radiative rates at {} K", config.atomic.temperature));
    let mut transfer = Table::new(&[
        "state",
        "gamma_per_s",
        "gamma_superradiant_per_s",
        "gamma_black_body_per_s",
        "gamma_spontaneous_escape_per_s",
        "gamma_calculated_reference_per_s",
        "ratio_to_calculated",
        "within_factor_2",
        "gamma_measured_reference_per_s",
        "ratio_to_measured",
        "r2_per_s",
        "n_g",
        "n_r",
        "n_half_width",
        "window_converged",
        "citation",
    ])
    .comment(format!(
        "cloud radius {} m, load rate {} /s, background loss {} /s",
        num(config.cloud.radius),
        num(config.mot.load_rate),
        num(config.mot.gamma_0)
    ));
    let mut ionization = Table::new(&[
        "state",
        "gamma_bbi_per_s",
        "gamma_bbi_reference_per_s",
        "gamma_bbi_ratio",
        "gamma_s_calculated_per_s",
        "gamma_s_calculated_reference_per_s",
        "gamma_s_ratio",
        "citation",
    ]);

    let mut within = 0;
    for row in &rows {
        let s = reference::summary(row.label).expect("reference state");
        let c = reference::comparison(row.label).expect("reference state");
        let i = reference::ionization(row.label).expect("reference state");
        rates.push(vec![
            row.label.into(),
            num(row.level.n_star),
            num(row.rates.a_r),
            num(s.a_r),
            ratio(row.rates.a_r, s.a_r),
            num(row.rates.a_bb),
            num(s.a_bb),
            ratio(row.rates.a_bb, s.a_bb),
            num(s.a_s),
            num(s.gamma_s),
            reference::TRANSFER_SUMMARY.into(),
        ]);
        let t = &row.transfer;
        let g = t.gamma();
        let ok = (0.5..=2.0).contains(&(g / c.gamma_calculated));
        within += ok as usize;
        transfer.push(vec![
            row.label.into(),
            num(g),
            num(t.transfer.superradiant),
            num(t.transfer.black_body),
            num(t.transfer.spontaneous_escape),
            num(c.gamma_calculated),
            ratio(g, c.gamma_calculated),
            ok.to_string(),
            num(c.gamma_measured),
            ratio(g, c.gamma_measured),
            num(t.r2),
            num(t.n_g),
            num(t.n_r),
            t.window.n_half_width.to_string(),
            t.window_converged.to_string(),
            reference::TRANSFER_COMPARISON.into(),
        ]);
        ionization.push(vec![
            row.label.into(),
            num(row.ionization),
            num(i.gamma_bbi),
            ratio(row.ionization, i.gamma_bbi),
            num(t.mean_ionization_other),
            num(i.gamma_s_calculated),
            ratio(t.mean_ionization_other, i.gamma_s_calculated),
            reference::IONIZATION_COMPARISON.into(),
        ]);
        out.summary.push(format!(
            "{}: gamma {:.3e} /s, {:.2}x of {:.1e}{}",
            row.label,
            g,
            g / c.gamma_calculated,
            c.gamma_calculated,
            if ok { "" } else { " (outside factor 2)" }
        ));
    }

    let estimates = single_line_estimates(config)?;
    let mut est_table = Table::new(&["quantity", "computed", "quoted", "ratio"]);
    for (name, computed, quoted) in &estimates {
        est_table.push(vec![name.to_string(), num(*computed), num(*quoted), ratio(*computed, *quoted)]);
    }

    let r = &mut out.report;
    r.put("", "command", "tables");
    r.put("", "states", STATES.join(" "));
    r.put("", "transfer_within_factor_2", format!("{within}/{}", rows.len()));
    for row in &rows {
        let key = row.label.replace('/', "_");
        r.put_num("transfer", &format!("{key}_gamma_per_s"), row.transfer.gamma());
        r.put_num(
            "transfer",
            &format!("{key}_ratio_to_calculated"),
            row.transfer.gamma() / reference::comparison(row.label).unwrap().gamma_calculated,
        );
    }
    for (name, computed, quoted) in &estimates {
        r.put_num("estimates", name, *computed);
        r.put_num("estimates", &format!("{name}_ratio"), computed / quoted);
    }

    out.tables.push(("table_rates.csv".into(), rates));
    out.tables.push(("table_transfer.csv".into(), transfer));
    out.tables.push(("table_ionization.csv".into(), ionization));
    out.tables.push(("table_estimates.csv".into(), est_table));
    Ok(out)
}

/// One-line order-of-magnitude estimates: (name, computed, quoted).
pub fn single_line_estimates(config: &RunConfig) -> Result<Vec<(&'static str, f64, f64)>, CliError> {
    let sr = superradiance_estimate(1e4, 50.0)?;
    let p = KineticsParams::reference_28d();
    let counts = cascade_count_rate(&p, &geometry(config), p.load_rate / p.gamma_0, 2.6e4)?;
    let capture = capture_rate(&CaptureParams {
        temperature: config.cloud.atom_temperature,
        ..CaptureParams::rubidium(config.cloud.density, config.cloud.c6_ghz_um6)
    })?;
    let electrons = electron_steady(ELECTRON_PRODUCTION, ELECTRON_DISSIPATION)?;
    Ok(vec![
        ("superradiant_rate_n50_per_s", sr, quoted::SUPERRADIANT_N50),
        ("cascade_count_rate_per_s", counts, quoted::CASCADE_COUNTS),
        ("capture_rate_per_s", capture, quoted::CAPTURE_RATE),
        ("free_electrons", electrons, ELECTRON_QUOTED),
    ])
}

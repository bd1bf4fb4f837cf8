use std::f64::consts::TAU;

use rydyn::kinetics::{scan, steady_state};

use super::{excitation, geometry, kinetics, radiative_rates, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Table;
use crate::plot::LineChart;

/// Two-photon detuning scan of trap loss and cascade counts.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let p = kinetics(config)?;
    let (_, a_bb) = radiative_rates(config)?;
    let ex = excitation(config);
    let e = &config.excitation;
    let hz: Vec<f64> = if e.points == 1 {
        vec![0.0]
    } else {
        (0..e.points)
            .map(|i| -e.span_hz + 2.0 * e.span_hz * i as f64 / (e.points - 1) as f64)
            .collect()
    };
    let rad: Vec<f64> = hz.iter().map(|f| TAU * f).collect();
    let points = scan(&p, &ex, &geometry(config), a_bb, &rad)?;

    let mut t = Table::new(&["detuning_hz", "r2_per_s", "loss_rate_per_s", "counts_per_s", "n_g"])
        .comment("loss: added trap loss rate; counts: cascade 420 nm count rate");
    for (f, s) in hz.iter().zip(&points) {
        t.push_numbers(&[*f, s.r2, s.loss, s.counts, s.n_g]);
    }
    let peak = points
        .iter()
        .zip(&hz)
        .max_by(|a, b| a.0.loss.total_cmp(&b.0.loss))
        .expect("grid is non-empty");
    let no_excitation = steady_state(&p.with_r2(0.0))?.n_g;

    let mut out = Outcome::default();
    let r = &mut out.report;
    r.put("", "command", "scan");
    r.put_num("", "peak_r2_per_s", ex.peak_rate()?);
    r.put_num("", "peak_detuning_hz", *peak.1);
    r.put_num("", "peak_loss_rate_per_s", peak.0.loss);
    r.put_num("", "peak_counts_per_s", peak.0.counts);
    r.put_num("", "n_g_at_peak", peak.0.n_g);
    r.put_num("", "n_g_without_excitation", no_excitation);
    r.put_num("", "a_bb_per_s", a_bb);
    out.summary.push(format!(
        "peak loss {:.3e} /s, peak counts {:.3e} /s at {:.3e} Hz",
        peak.0.loss, peak.0.counts, peak.1
    ));
    if config.output.plot {
        let loss: Vec<(f64, f64)> = hz.iter().zip(&points).map(|(f, s)| (f * 1e-6, s.loss)).collect();
        let counts: Vec<(f64, f64)> = hz.iter().zip(&points).map(|(f, s)| (f * 1e-6, s.counts)).collect();
        out.plots.push((
            "scan_loss.svg".into(),
            LineChart::new("Added trap loss", "detuning (MHz)", "loss rate (1/s)")
                .add("loss", loss)
                .render(),
        ));
        out.plots.push((
            "scan_counts.svg".into(),
            LineChart::new("Cascade counts", "detuning (MHz)", "counts (1/s)")
                .add("counts", counts)
                .render(),
        ));
    }
    out.tables.push(("scan.csv".into(), t));
    Ok(out)
}

use rydyn::kinetics::{probe_count_rate, steady_state, trap_loss_increase, DarkCompartment, KineticsParams};

use super::{geometry, kinetics, probe_grid, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Table;
use crate::plot::LineChart;

struct Curve {
    loss: Vec<f64>,
    loss_approx: Vec<f64>,
    counts: Vec<f64>,
}

fn curve(p: &KineticsParams, config: &RunConfig, grid: &[f64]) -> Result<Curve, CliError> {
    let g = geometry(config);
    let mut c = Curve {
        loss: Vec::new(),
        loss_approx: Vec::new(),
        counts: Vec::new(),
    };
    for &r3 in grid {
        let q = p.with_r3(r3);
        let ss = steady_state(&q)?;
        let loss = trap_loss_increase(&q)?;
        c.loss.push(loss.exact);
        c.loss_approx.push(loss.approximate);
        c.counts.push(probe_count_rate(&q, &g)? * ss.n_g);
    }
    Ok(c)
}

/// Probe-rate (R3) scan of trap loss and probe-induced counts.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let p = kinetics(config)?;
    let grid = probe_grid(config);
    let with = curve(&p, config, &grid)?;
    let dark = p.dark.is_enabled();
    let without = if dark {
        Some(curve(
            &KineticsParams {
                dark: DarkCompartment::default(),
                ..p
            },
            config,
            &grid,
        )?)
    } else {
        None
    };

    let mut header = vec!["r3_per_s", "loss_per_s", "loss_approx_per_s", "counts_per_s"];
    if dark {
        header.extend(["loss_no_dark_per_s", "counts_no_dark_per_s"]);
    }
    let mut t = Table::new(&header).comment("loss: exact steady-state trap loss; loss_approx: product form");
    for (i, r3) in grid.iter().enumerate() {
        let mut row = vec![*r3, with.loss[i], with.loss_approx[i], with.counts[i]];
        if let Some(w) = &without {
            row.extend([w.loss[i], w.counts[i]]);
        }
        t.push_numbers(&row);
    }

    let mut out = Outcome::default();
    let r = &mut out.report;
    r.put("", "command", "probe-scan");
    r.put_num("", "r2_per_s", p.r2);
    r.put_num("", "knee_r3_expected_per_s", p.a_r + p.gamma);
    r.put_num("", "loss_at_zero_probe_per_s", with.loss[0]);
    r.put_num("", "loss_at_max_probe_per_s", *with.loss.last().unwrap());
    // the high-R3 limit of the exact loss, from a probe rate far above every other rate
    let far = 1e6 * (p.a_r + p.gamma + p.dark.exchange_rate + grid.last().copied().unwrap_or(0.0));
    let asymptote = trap_loss_increase(&p.with_r3(far))?.exact;
    r.put_num("", "loss_asymptote_per_s", asymptote);
    if let Some(w) = &without {
        r.put_num("", "loss_no_dark_at_max_probe_per_s", *w.loss.last().unwrap());
        let p0 = KineticsParams {
            dark: DarkCompartment::default(),
            ..p
        };
        r.put_num("", "loss_no_dark_asymptote_per_s", trap_loss_increase(&p0.with_r3(far))?.exact);
    }
    out.summary.push(format!(
        "loss {:.3e} -> {:.3e} /s over R3 0 -> {:.3e} /s, asymptote {:.3e} /s",
        with.loss[0],
        with.loss.last().unwrap(),
        grid.last().unwrap(),
        asymptote
    ));

    if config.output.plot {
        let pts = |v: &[f64]| grid.iter().zip(v).map(|(x, y)| (*x, *y)).collect::<Vec<_>>();
        let mut loss = LineChart::new("Trap loss vs probe rate", "R3 (1/s)", "loss rate (1/s)").add("loss", pts(&with.loss));
        let mut counts =
            LineChart::new("Probe counts vs probe rate", "R3 (1/s)", "counts (1/s)").add("counts", pts(&with.counts));
        if let Some(w) = &without {
            loss = loss.add("no dark state", pts(&w.loss));
            counts = counts.add("no dark state", pts(&w.counts));
        }
        out.plots.push(("probe_scan_loss.svg".into(), loss.render()));
        out.plots.push(("probe_scan_counts.svg".into(), counts.render()));
    }
    out.tables.push(("probe_scan.csv".into(), t));
    Ok(out)
}

use rydyn::reference;
use rydyn::superradiance::{
    converged_transfer, evolve, transfer_at_window, BasisConvergence, BasisWindow, LevelPopulations, TransferEstimate,
    TrapConditions,
};

use super::{atom, level, Outcome};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Table;
use crate::plot::LineChart;

/// Operating point of the cascade as configured.
pub fn conditions(config: &RunConfig, n_star: f64) -> TrapConditions {
    let mut c = TrapConditions {
        load_rate: config.mot.load_rate,
        gamma_0: config.mot.gamma_0,
        radius: config.cloud.radius,
        temperature: config.atomic.temperature,
        pump: config.cascade.pump,
        ..TrapConditions::default()
    };
    if let Some(r2) = config.cascade.r2 {
        c.r2_reference = r2;
        c.n_star_reference = n_star;
    }
    c
}

/// Steady state and gamma for the configured level, window-converged if enabled.
pub fn estimate(config: &RunConfig) -> Result<TransferEstimate, CliError> {
    let atom = atom();
    let lv = level(&atom, config)?;
    let c = &config.cascade;
    let window = BasisWindow {
        n_half_width: c.n_half_width,
        l_max: c.l_max,
    };
    let cond = conditions(config, lv.n_star);
    let est = if c.converge_window {
        converged_transfer(
            &atom,
            &lv,
            &cond,
            BasisConvergence {
                start: window,
                step: 3,
                max_half_width: c.max_half_width.max(c.n_half_width),
                tolerance: c.window_tolerance,
            },
        )
    } else {
        transfer_at_window(&atom, &lv, &cond, window)
    };
    est.map_err(|e| CliError::from(e).context(&format!("cascade for {}", config.atomic.state)))
}

/// Pumped Dicke cascade: time series, steady state and transfer rate.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let est = estimate(config)?;
    let rates = &est.rates;
    let labels: Vec<String> = rates.labels().iter().map(|l| l.to_string()).collect();
    let c = &config.cascade;
    let series = evolve(&LevelPopulations::zeros(rates.len()), rates, est.pump, c.duration, c.samples)
        .map_err(|e| CliError::from(e).context("cascade time series"))?;

    let mut header: Vec<&str> = vec!["time_s"];
    header.extend(labels.iter().map(|s| s.as_str()));
    header.push("sink");
    let mut ts = Table::new(&header).comment(format!("populations after switching on a pump of {:e} atoms/s", est.pump));
    ts.push_numbers(&vec![0.0; rates.len() + 2]);
    for (t, p) in series.times.iter().zip(&series.populations) {
        let mut row = vec![*t];
        row.extend(&p.levels);
        row.push(p.sink);
        ts.push_numbers(&row);
    }

    let mut ss = Table::new(&["level", "population", "ionization_per_s"]);
    for ((l, n), s) in labels.iter().zip(&est.populations.levels).zip(rates.sink()) {
        ss.push(vec![l.clone(), crate::config::num(*n), crate::config::num(s.ionization)]);
    }

    let mut edges = Table::new(&[
        "upper",
        "lower",
        "gamma_el_per_s",
        "c_el",
        "a_el_per_s",
        "wavelength_m",
        "bb_down_per_s",
        "bb_up_per_s",
    ]);
    for e in rates.edges() {
        let mut row = vec![labels[e.upper].clone(), labels[e.lower].clone()];
        row.extend(
            [e.gamma, e.cooperativity, e.a_spont, e.wavelength, e.bb_down, e.bb_up]
                .iter()
                .map(|v| crate::config::num(*v)),
        );
        edges.push(row);
    }

    let mut out = Outcome::default();
    let r = &mut out.report;
    let t = &est.transfer;
    r.put("", "command", "cascade");
    r.put("", "state", &config.atomic.state);
    r.put_num("", "gamma_per_s", t.total());
    r.put_num("", "gamma_superradiant_per_s", t.superradiant);
    r.put_num("", "gamma_black_body_per_s", t.black_body);
    r.put_num("", "gamma_spontaneous_escape_per_s", t.spontaneous_escape);
    r.put_num("", "pump_per_s", est.pump);
    r.put_num("", "r2_per_s", est.r2);
    r.put_num("", "n_g", est.n_g);
    r.put_num("", "n_r", est.n_r);
    r.put_num("", "n_rydberg", est.n_rydberg);
    r.put_num("", "mean_ionization_other_per_s", est.mean_ionization_other);
    r.put("", "n_half_width", est.window.n_half_width);
    r.put("", "l_max", est.window.l_max);
    r.put("", "basis_size", est.basis_size);
    r.put("", "window_converged", est.window_converged);
    r.put(
        "",
        "window_history",
        est.window_history
            .iter()
            .map(|(w, g)| format!("{w}:{g:e}"))
            .collect::<Vec<_>>()
            .join(" "),
    );
    for (l, rate) in t.by_l() {
        r.put_num("by_l", &format!("l{l}_per_s"), rate);
    }
    if let Some(row) = reference::comparison(&config.atomic.state) {
        r.put("reference", "citation", reference::TRANSFER_COMPARISON);
        r.put_num("reference", "gamma_calculated_per_s", row.gamma_calculated);
        r.put_num("reference", "gamma_measured_per_s", row.gamma_measured);
        r.put_num("reference", "ratio_to_calculated", t.total() / row.gamma_calculated);
        r.put_num("reference", "ratio_to_measured", t.total() / row.gamma_measured);
    }
    out.summary.push(format!(
        "{}: gamma {:.3e} /s (superradiant {:.3e}, black-body {:.3e}, escape {:.3e}), N_r {:.3e}, N_g {:.3e}",
        config.atomic.state,
        t.total(),
        t.superradiant,
        t.black_body,
        t.spontaneous_escape,
        est.n_r,
        est.n_g
    ));

    if config.output.plot {
        let mut order: Vec<usize> = (0..rates.len()).collect();
        order.sort_by(|a, b| est.populations.levels[*b].total_cmp(&est.populations.levels[*a]));
        let mut chart = LineChart::new("Cascade populations", "time (s)", "atoms").log_y();
        for &i in order.iter().take(6) {
            let pts = series
                .times
                .iter()
                .zip(&series.populations)
                .map(|(t, p)| (*t, p.levels[i]))
                .collect();
            chart = chart.add(&labels[i], pts);
        }
        out.plots.push(("cascade.svg".into(), chart.render()));
    }
    out.tables.push(("cascade.csv".into(), ts));
    out.tables.push(("cascade_steady.csv".into(), ss));
    out.tables.push(("cascade_rates.csv".into(), edges));
    Ok(out)
}

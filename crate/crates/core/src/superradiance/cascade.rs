use nalgebra::{DMatrix, DVector};

use super::rates::RateMatrix;
use crate::atomic::StateLabel;
use crate::error::{domain, Error, Result};
use crate::ode::{OdeSystem, Sdirk4};

/// Populations of the basis levels (in basis order) and of the sink.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelPopulations {
    pub levels: Vec<f64>,
    pub sink: f64,
}

impl LevelPopulations {
    pub fn zeros(len: usize) -> Self {
        LevelPopulations {
            levels: vec![0.0; len],
            sink: 0.0,
        }
    }

    /// All atoms in level `index`.
    pub fn single(len: usize, index: usize, count: f64) -> Self {
        let mut p = Self::zeros(len);
        p.levels[index] = count;
        p
    }

    /// Sum over basis levels, sink excluded.
    pub fn rydberg_total(&self) -> f64 {
        self.levels.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.rydberg_total() + self.sink
    }

    fn to_state(&self) -> Vec<f64> {
        let mut y = self.levels.clone();
        y.push(self.sink);
        y
    }

    fn from_state(y: &[f64]) -> Self {
        let (levels, sink) = y.split_at(y.len() - 1);
        LevelPopulations {
            levels: levels.to_vec(),
            sink: sink[0],
        }
    }
}

fn check_len(p: &LevelPopulations, rates: &RateMatrix) -> Result<()> {
    if p.levels.len() != rates.len() {
        return domain(format!(
            "population vector has {} levels, rate matrix {}",
            p.levels.len(),
            rates.len()
        ));
    }
    Ok(())
}

fn check_pump(pump: f64) -> Result<()> {
    if !(pump >= 0.0) || !pump.is_finite() {
        return domain(format!("pump must be finite and non-negative, got {pump}"));
    }
    Ok(())
}

/// Time derivative over the state `y = [levels..., sink]`.
fn rhs(rates: &RateMatrix, pump: f64, y: &[f64], dy: &mut [f64]) {
    let n = rates.len();
    dy.fill(0.0);
    for e in rates.edges() {
        let (ne, nl) = (y[e.upper], y[e.lower]);
        let flux = e.gamma * ne * (nl + 1.0) + e.bb_down * ne - e.bb_up * nl;
        dy[e.upper] -= flux;
        dy[e.lower] += flux;
    }
    for (i, s) in rates.sink().iter().enumerate() {
        let out = s.total() * y[i];
        dy[i] -= out;
        dy[n] += out;
    }
    dy[rates.pumped()] += pump;
}

fn jacobian(rates: &RateMatrix, y: &[f64], jac: &mut DMatrix<f64>) {
    let n = rates.len();
    jac.fill(0.0);
    for e in rates.edges() {
        let (u, l) = (e.upper, e.lower);
        let d_upper = e.gamma * (y[l] + 1.0) + e.bb_down;
        let d_lower = e.gamma * y[u] - e.bb_up;
        jac[(u, u)] -= d_upper;
        jac[(l, u)] += d_upper;
        jac[(u, l)] -= d_lower;
        jac[(l, l)] += d_lower;
    }
    for (i, s) in rates.sink().iter().enumerate() {
        jac[(i, i)] -= s.total();
        jac[(n, i)] += s.total();
    }
}

/// Rate of change of the populations under pair emission, black-body transfer, sink
/// loss and a constant `pump` (atoms/s) into the pumped level.
///
/// For a pair (e, l) with e above l the downward flux is
/// `Gamma_el N_e (N_l + 1) + B_down N_e - B_up N_l`.
pub fn cascade_rhs(pops: &LevelPopulations, rates: &RateMatrix, pump: f64) -> Result<LevelPopulations> {
    check_len(pops, rates)?;
    check_pump(pump)?;
    if pops.levels.iter().chain([&pops.sink]).any(|v| !(*v >= 0.0)) {
        return domain("populations must be non-negative");
    }
    let y = pops.to_state();
    let mut dy = vec![0.0; y.len()];
    rhs(rates, pump, &y, &mut dy);
    Ok(LevelPopulations::from_state(&dy))
}

struct Cascade<'a> {
    rates: &'a RateMatrix,
    pump: f64,
}

impl OdeSystem for Cascade<'_> {
    fn dim(&self) -> usize {
        self.rates.len() + 1
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        rhs(self.rates, self.pump, y, dy)
    }

    fn jacobian(&self, _t: f64, y: &[f64], jac: &mut DMatrix<f64>) {
        jacobian(self.rates, y, jac)
    }
}

/// Sampled cascade evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSeries {
    pub times: Vec<f64>,
    pub populations: Vec<LevelPopulations>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Integrates the cascade from `initial` and samples it at `times` (s, ascending,
/// non-negative).
pub fn evolve_at(initial: &LevelPopulations, rates: &RateMatrix, pump: f64, times: &[f64]) -> Result<CascadeSeries> {
    check_len(initial, rates)?;
    check_pump(pump)?;
    if times.iter().any(|t| !(*t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return domain("sample times must be non-negative and ascending");
    }
    let y0 = initial.to_state();
    if y0.iter().any(|v| !(*v >= 0.0)) {
        return domain("populations must be non-negative");
    }
    let scale = initial.total().max(1.0);
    let solver = Sdirk4 {
        non_negative: true,
        ..Sdirk4::with_tolerances(1e-9, 1e-12 * scale)
    };
    let traj = solver
        .integrate(&Cascade { rates, pump }, 0.0, &y0, times)
        .map_err(|e| match e {
            Error::Integration { t, reason } => Error::Integration {
                t,
                reason: format!("cascade with {} levels: {reason}", rates.len()),
            },
            other => other,
        })?;
    Ok(CascadeSeries {
        populations: traj.states.iter().map(|y| LevelPopulations::from_state(y)).collect(),
        times: traj.times,
        accepted_steps: traj.accepted_steps,
        rejected_steps: traj.rejected_steps,
    })
}

/// Integrates the cascade over `duration` and samples `samples` evenly spaced times.
pub fn evolve(
    initial: &LevelPopulations,
    rates: &RateMatrix,
    pump: f64,
    duration: f64,
    samples: usize,
) -> Result<CascadeSeries> {
    if !(duration > 0.0) || !duration.is_finite() {
        return domain("duration must be positive");
    }
    let samples = samples.max(1);
    let times: Vec<f64> = (1..=samples).map(|i| duration * i as f64 / samples as f64).collect();
    evolve_at(initial, rates, pump, &times)
}

/// Newton iteration limits for [`steady_state_pumped`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateOptions {
    /// Newton iterations allowed per continuation stage.
    pub max_iterations: usize,
    /// Largest pump ratio between continuation stages.
    pub stage_ratio: f64,
    /// Converged when the residual 2-norm falls below this times the pump.
    pub tolerance: f64,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        SteadyStateOptions {
            max_iterations: 60,
            stage_ratio: 4.0,
            tolerance: 1e-10,
        }
    }
}

/// Residual and Jacobian restricted to the basis levels.
fn residual(rates: &RateMatrix, pump: f64, x: &[f64]) -> DVector<f64> {
    let mut y = x.to_vec();
    y.push(0.0);
    let mut dy = vec![0.0; y.len()];
    rhs(rates, pump, &y, &mut dy);
    DVector::from_row_slice(&dy[..x.len()])
}

fn basis_jacobian(rates: &RateMatrix, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut y = x.to_vec();
    y.push(0.0);
    let mut j = DMatrix::zeros(n + 1, n + 1);
    jacobian(rates, &y, &mut j);
    j.view((0, 0), (n, n)).into_owned()
}

/// Steady state of the populations when only black-body and single-atom rates act
/// (each `N_l + 1` replaced by 1), scaled to `pump`.
pub fn linear_steady_state(rates: &RateMatrix, pump: f64) -> Result<LevelPopulations> {
    check_pump(pump)?;
    let n = rates.len();
    let zero = vec![0.0; n];
    let j = basis_jacobian(rates, &zero);
    let mut b = DVector::zeros(n);
    b[rates.pumped()] = -pump;
    let x = j
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Convergence("linear cascade system is singular (no path to the sink)".into()))?;
    Ok(LevelPopulations {
        levels: x.iter().map(|v| v.max(0.0)).collect(),
        sink: 0.0,
    })
}

pub(super) fn newton(rates: &RateMatrix, pump: f64, mut x: Vec<f64>, opts: &SteadyStateOptions) -> Result<Vec<f64>> {
    let target = opts.tolerance * pump;
    let mut g = residual(rates, pump, &x);
    for _ in 0..opts.max_iterations {
        let norm = g.norm();
        if norm < target {
            return Ok(x);
        }
        let j = basis_jacobian(rates, &x);
        let Some(step) = j.lu().solve(&(-&g)) else {
            return Err(Error::Convergence("singular Jacobian in cascade Newton step".into()));
        };
        // fraction to the boundary keeps populations non-negative
        let mut alpha: f64 = 1.0;
        for (xi, di) in x.iter().zip(step.iter()) {
            if *di < 0.0 && *xi + di < 0.0 {
                alpha = alpha.min(0.95 * xi / -di);
            }
        }
        let mut accepted = false;
        for _ in 0..50 {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| (a + alpha * d).max(0.0)).collect();
            let gt = residual(rates, pump, &trial);
            if gt.norm() <= (1.0 - 1e-4 * alpha) * norm || gt.norm() < target {
                x = trial;
                g = gt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(Error::Convergence(format!(
                "cascade Newton line search stalled at residual {norm:.3e} (pump {pump:.3e})"
            )));
        }
    }
    if g.norm() < target {
        return Ok(x);
    }
    Err(Error::Convergence(format!(
        "cascade Newton did not converge in {} iterations: residual {:.3e}, pump {pump:.3e}",
        opts.max_iterations,
        g.norm()
    )))
}

/// Steady state of the pumped cascade, `d/dt = 0` for every basis level.
///
/// Damped Newton iteration seeded from [`linear_steady_state`] and continued in the
/// pump from the linear regime up to `pump`. The sink population is reported as 0;
/// in steady state it grows at the total sink outflow, which equals the pump.
pub fn steady_state_pumped(rates: &RateMatrix, pump: f64) -> Result<LevelPopulations> {
    steady_state_pumped_with(rates, pump, SteadyStateOptions::default())
}

pub fn steady_state_pumped_with(rates: &RateMatrix, pump: f64, opts: SteadyStateOptions) -> Result<LevelPopulations> {
    check_pump(pump)?;
    if pump == 0.0 {
        return Ok(LevelPopulations::zeros(rates.len()));
    }
    let unit = linear_steady_state(rates, 1.0)?;
    let peak = unit.levels.iter().copied().fold(0.0, f64::max);
    // start where every population is far below one
    let mut p = if peak > 0.0 { (1e-3 / peak).min(pump) } else { pump };
    let mut x: Vec<f64> = unit.levels.iter().map(|v| v * p).collect();
    x = newton(rates, p, x, &opts)?;
    let mut ratio = opts.stage_ratio.max(1.001);
    while p < pump {
        let next = (p * ratio).min(pump);
        let guess: Vec<f64> = x.iter().map(|v| v * next / p).collect();
        match newton(rates, next, guess, &opts) {
            Ok(y) => {
                x = y;
                p = next;
                ratio = (ratio * ratio).min(opts.stage_ratio.max(1.001));
            }
            Err(_) if ratio > 1.01 => ratio = ratio.sqrt(),
            Err(_) => return relax_then_polish(rates, pump, &opts),
        }
    }
    Ok(LevelPopulations {
        levels: x,
        sink: 0.0,
    })
}

/// Fallback for [`steady_state_pumped`]: integrate from empty levels until the
/// residual is small, then finish with Newton.
fn relax_then_polish(rates: &RateMatrix, pump: f64, opts: &SteadyStateOptions) -> Result<LevelPopulations> {
    let slowest = rates
        .sink()
        .iter()
        .map(|s| s.total())
        .filter(|r| *r > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !slowest.is_finite() {
        return Err(Error::Convergence("cascade has no sink".into()));
    }
    let mut state = LevelPopulations::zeros(rates.len());
    let mut span = 1.0 / slowest;
    for _ in 0..8 {
        let series = evolve(&state, rates, pump, span, 1)?;
        state = series.populations.into_iter().next_back().unwrap_or(state);
        state.sink = 0.0;
        if let Ok(x) = newton(rates, pump, state.levels.clone(), opts) {
            return Ok(LevelPopulations { levels: x, sink: 0.0 });
        }
        span *= 4.0;
    }
    Err(Error::Convergence(format!(
        "no steady state found for pump {pump:.3e}: Newton fails even after long relaxation"
    )))
}

/// Rate per atom out of the pumped level into other Rydberg levels (1/s).
#[derive(Debug, Clone, PartialEq)]
pub struct TransferRate {
    /// `sum_l Gamma_rl (N_l + 1)` over lower basis levels.
    pub superradiant: f64,
    /// Black-body transfer, both directions, in and out of the basis.
    pub black_body: f64,
    /// Single-atom spontaneous decay to Rydberg levels outside the basis.
    pub spontaneous_escape: f64,
    /// Per-destination rates for in-basis channels, cooperative plus black-body.
    pub channels: Vec<(StateLabel, f64)>,
}

impl TransferRate {
    pub fn total(&self) -> f64 {
        self.superradiant + self.black_body + self.spontaneous_escape
    }

    /// In-basis transfer summed by destination orbital angular momentum.
    pub fn by_l(&self) -> Vec<(u32, f64)> {
        let mut out: Vec<(u32, f64)> = Vec::new();
        for (s, r) in &self.channels {
            match out.iter_mut().find(|(l, _)| *l == s.l) {
                Some(e) => e.1 += r,
                None => out.push((s.l, *r)),
            }
        }
        out.sort_by_key(|e| e.0);
        out
    }
}

/// Effective transfer rate gamma out of the pumped level for populations `pops`.
pub fn effective_transfer_rate(pops: &LevelPopulations, rates: &RateMatrix) -> Result<TransferRate> {
    check_len(pops, rates)?;
    let r = rates.pumped();
    let labels = rates.labels();
    let sink = rates.sink()[r];
    let mut out = TransferRate {
        superradiant: 0.0,
        black_body: sink.escape_black_body,
        spontaneous_escape: sink.escape_spontaneous,
        channels: Vec::new(),
    };
    for e in rates.edges() {
        if e.upper == r {
            let sr = e.gamma * (pops.levels[e.lower] + 1.0);
            out.superradiant += sr;
            out.black_body += e.bb_down;
            out.channels.push((labels[e.lower], sr + e.bb_down));
        } else if e.lower == r {
            out.black_body += e.bb_up;
            out.channels.push((labels[e.upper], e.bb_up));
        }
    }
    Ok(out)
}

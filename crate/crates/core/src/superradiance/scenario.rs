use super::basis::{BasisWindow, LevelBasis};
use super::cascade::{effective_transfer_rate, steady_state_pumped, LevelPopulations, TransferRate};
use super::cooperativity::CloudGeometry;
use super::coupled::{self_consistent_steady_state, TrapLoading};
use super::rates::{build_rates, RateMatrix, RateOptions};
use crate::atomic::{Atom, RydbergLevel};
use crate::error::{domain, Result};

/// Operating point of a continuously excited trap, used to evaluate gamma for a
/// given Rydberg level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapConditions {
    /// Excitation rate per ground atom into the reference level (1/s).
    pub r2_reference: f64,
    /// Effective quantum number of the reference level. Other levels get
    /// `R2 = r2_reference (n*_ref / n*)^3`, the scaling of the upper-transition
    /// dipole moment squared.
    pub n_star_reference: f64,
    pub load_rate: f64,
    pub gamma_0: f64,
    pub radius: f64,
    pub temperature: f64,
    /// Relative tolerance of the trap / cascade fixed point.
    pub tolerance: f64,
    /// Fixed pump into the level (atoms/s). When set, the trap balance is skipped
    /// and `n_g` is reported as `pump / R2`.
    pub pump: Option<f64>,
}

impl Default for TrapConditions {
    /// 110/s into 28D5/2 of a 0.5 mm radius cloud loaded at 5.7e7 atoms/s with 1/s background loss.
    fn default() -> Self {
        TrapConditions {
            r2_reference: 110.0,
            n_star_reference: 26.6544,
            load_rate: 5.7e7,
            gamma_0: 1.0,
            radius: 0.5e-3,
            temperature: 300.0,
            tolerance: 1e-4,
            pump: None,
        }
    }
}

impl TrapConditions {
    pub fn r2_for(&self, level: &RydbergLevel) -> f64 {
        self.r2_reference * (self.n_star_reference / level.n_star).powi(3)
    }
}

/// How the level window grows until gamma stops changing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisConvergence {
    pub start: BasisWindow,
    /// Increase of `n_half_width` per round.
    pub step: u32,
    pub max_half_width: u32,
    /// Stop when gamma changes by less than this (relative).
    pub tolerance: f64,
}

impl Default for BasisConvergence {
    fn default() -> Self {
        BasisConvergence {
            start: BasisWindow::default(),
            step: 3,
            max_half_width: 20,
            tolerance: 0.05,
        }
    }
}

/// Transfer rate of one level at its self-consistent operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferEstimate {
    pub level: RydbergLevel,
    pub r2: f64,
    pub window: BasisWindow,
    pub basis_size: usize,
    /// True when the last window change moved gamma by less than the tolerance.
    pub window_converged: bool,
    /// Gamma for every window tried, in order.
    pub window_history: Vec<(u32, f64)>,
    pub n_g: f64,
    /// Population of the pumped level.
    pub n_r: f64,
    pub n_rydberg: f64,
    /// Population-weighted photoionization rate of the other Rydberg levels (1/s).
    pub mean_ionization_other: f64,
    pub transfer: TransferRate,
    /// Pump into the level at the operating point (atoms/s).
    pub pump: f64,
    pub rates: RateMatrix,
    pub populations: LevelPopulations,
}

impl TransferEstimate {
    pub fn gamma(&self) -> f64 {
        self.transfer.total()
    }
}

/// Evaluates gamma for `level` in a trap at `conditions` and the given window.
pub fn transfer_at_window(
    atom: &Atom,
    level: &RydbergLevel,
    conditions: &TrapConditions,
    window: BasisWindow,
) -> Result<TransferEstimate> {
    let geom = CloudGeometry::new(conditions.radius)?;
    let basis = LevelBasis::around(atom, level, window)?;
    let options = RateOptions {
        temperature: conditions.temperature,
        ..Default::default()
    };
    let rates = build_rates(atom, &basis, &geom, options)?;
    let r2 = conditions.r2_for(level);
    let (n_g, populations, transfer, mean_ionization_other) = match conditions.pump {
        Some(pump) => {
            let pops = steady_state_pumped(&rates, pump)?;
            let transfer = effective_transfer_rate(&pops, &rates)?;
            let r = rates.pumped();
            let (mut w, mut m) = (0.0, 0.0);
            for (i, (s, n)) in rates.sink().iter().zip(&pops.levels).enumerate() {
                if i != r {
                    w += s.ionization * n;
                    m += n;
                }
            }
            let n_g = if r2 > 0.0 { pump / r2 } else { f64::NAN };
            (n_g, pops, transfer, if m > 0.0 { w / m } else { 0.0 })
        }
        None => {
            let trap = TrapLoading {
                r2,
                load_rate: conditions.load_rate,
                gamma_0: conditions.gamma_0,
            };
            let state = self_consistent_steady_state(&rates, trap, conditions.tolerance)?;
            (state.n_g, state.populations, state.transfer, state.mean_ionization_other)
        }
    };
    let gamma = transfer.total();
    Ok(TransferEstimate {
        level: *level,
        r2,
        window,
        basis_size: rates.len(),
        window_converged: false,
        window_history: vec![(window.n_half_width, gamma)],
        n_g,
        n_r: populations.levels[rates.pumped()],
        n_rydberg: populations.rydberg_total(),
        mean_ionization_other,
        transfer,
        pump: conditions.pump.unwrap_or(r2 * n_g),
        rates,
        populations,
    })
}

/// Evaluates gamma, widening the level window until it settles.
pub fn converged_transfer(
    atom: &Atom,
    level: &RydbergLevel,
    conditions: &TrapConditions,
    convergence: BasisConvergence,
) -> Result<TransferEstimate> {
    if convergence.step == 0 || !(convergence.tolerance > 0.0) {
        return domain("basis convergence needs a positive step and tolerance");
    }
    let mut window = convergence.start;
    let mut best = transfer_at_window(atom, level, conditions, window)?;
    let mut history = best.window_history.clone();
    while window.n_half_width + convergence.step <= convergence.max_half_width {
        window.n_half_width += convergence.step;
        let next = transfer_at_window(atom, level, conditions, window)?;
        let change = (next.gamma() - best.gamma()).abs() / next.gamma().max(f64::MIN_POSITIVE);
        history.push((window.n_half_width, next.gamma()));
        best = next;
        if change < convergence.tolerance {
            best.window_converged = true;
            break;
        }
    }
    best.window_history = history;
    Ok(best)
}

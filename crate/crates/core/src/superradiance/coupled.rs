use super::cascade::{effective_transfer_rate, newton, steady_state_pumped, LevelPopulations, SteadyStateOptions, TransferRate};
use super::rates::RateMatrix;
use crate::error::{domain, Error, Result};

/// Ground-state trap feeding the cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapLoading {
    /// Excitation rate per ground atom R2 (1/s).
    pub r2: f64,
    /// Load rate L (atoms/s).
    pub load_rate: f64,
    /// Background loss Gamma_0 (1/s).
    pub gamma_0: f64,
}

/// Cascade steady state consistent with the ground-state population it drains.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState {
    pub n_g: f64,
    pub populations: LevelPopulations,
    pub transfer: TransferRate,
    /// Added trap loss per ground atom from photoionization (1/s).
    pub loss_per_ground: f64,
    /// Population-weighted photoionization rate of the non-pumped levels (1/s).
    pub mean_ionization_other: f64,
    pub iterations: usize,
}

/// Alternates between the cascade steady state at pump `R2 N_g` and the trap balance
/// `N_g = L / (Gamma_0 + Gamma)`, with Gamma the photoionization loss per ground atom,
/// until gamma and N_g change by less than `tolerance` (relative).
pub fn self_consistent_steady_state(rates: &RateMatrix, trap: TrapLoading, tolerance: f64) -> Result<CoupledState> {
    if !(trap.gamma_0 > 0.0) || !(trap.load_rate >= 0.0) || !(trap.r2 >= 0.0) {
        return domain("need Gamma_0 > 0, L >= 0 and R2 >= 0");
    }
    let ion: Vec<f64> = rates.sink().iter().map(|s| s.ionization).collect();
    let opts = SteadyStateOptions::default();
    let mut n_g = trap.load_rate / trap.gamma_0;
    let mut pops = steady_state_pumped(rates, trap.r2 * n_g)?;
    let mut gamma = effective_transfer_rate(&pops, rates)?.total();
    for it in 1..=100 {
        let lost: f64 = ion.iter().zip(&pops.levels).map(|(g, n)| g * n).sum();
        let loss_per_ground = if n_g > 0.0 { lost / n_g } else { 0.0 };
        let next_n_g = trap.load_rate / (trap.gamma_0 + loss_per_ground);
        let pump = trap.r2 * next_n_g;
        let guess: Vec<f64> = if n_g > 0.0 {
            pops.levels.iter().map(|v| v * next_n_g / n_g).collect()
        } else {
            pops.levels.clone()
        };
        pops = match newton(rates, pump, guess, &opts) {
            Ok(levels) => LevelPopulations { levels, sink: 0.0 },
            Err(_) => steady_state_pumped(rates, pump)?,
        };
        let transfer = effective_transfer_rate(&pops, rates)?;
        let change_gamma = (transfer.total() - gamma).abs() / transfer.total().max(f64::MIN_POSITIVE);
        let change_n = (next_n_g - n_g).abs() / next_n_g.max(f64::MIN_POSITIVE);
        gamma = transfer.total();
        n_g = next_n_g;
        if change_gamma < tolerance && change_n < tolerance {
            let r = rates.pumped();
            let (mut w, mut m) = (0.0, 0.0);
            for (i, (g, n)) in ion.iter().zip(&pops.levels).enumerate() {
                if i != r {
                    w += g * n;
                    m += n;
                }
            }
            let lost: f64 = ion.iter().zip(&pops.levels).map(|(g, n)| g * n).sum();
            return Ok(CoupledState {
                n_g,
                loss_per_ground: if n_g > 0.0 { lost / n_g } else { 0.0 },
                mean_ionization_other: if m > 0.0 { w / m } else { 0.0 },
                populations: pops,
                transfer,
                iterations: it,
            });
        }
    }
    Err(Error::Convergence("trap / cascade fixed point did not settle in 100 iterations".into()))
}

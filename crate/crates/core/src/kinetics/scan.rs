use super::excitation::{two_photon_rate, ExcitationParams};
use super::model::{cascade_count_rate, steady_state, trap_loss_increase, DetectionGeometry, KineticsParams};
use crate::error::{domain, Result};

/// One point of a frequency scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    /// Two-photon detuning (rad/s).
    pub detuning: f64,
    /// Excitation rate R2 at this detuning (1/s).
    pub r2: f64,
    /// Added trap loss Gamma_1 (1/s), exact steady-state form.
    pub loss: f64,
    /// Cascade count rate c6 (counts/s) at the steady ground-state population.
    pub counts: f64,
    /// Steady ground-state population.
    pub n_g: f64,
}

/// Sweeps the two-photon detuning over `detunings` (rad/s).
///
/// `p.r2` is replaced by the excitation rate at each detuning. Counts use the
/// ground-state population reduced by the excitation-induced loss and `a_bb` as the
/// non-detected decay rate of the excited state.
pub fn scan(
    p: &KineticsParams,
    excitation: &ExcitationParams,
    geometry: &DetectionGeometry,
    a_bb: f64,
    detunings: &[f64],
) -> Result<Vec<ScanPoint>> {
    if detunings.is_empty() {
        return domain("detuning grid is empty");
    }
    detunings
        .iter()
        .map(|&detuning| {
            let r2 = two_photon_rate(&excitation.at_detuning(detuning))?;
            let q = p.with_r2(r2);
            let ss = steady_state(&q)?;
            let loss = trap_loss_increase(&q)?.exact;
            let counts = cascade_count_rate(&q, geometry, ss.n_g, a_bb)?;
            Ok(ScanPoint {
                detuning,
                r2,
                loss,
                counts,
                n_g: ss.n_g,
            })
        })
        .collect()
}

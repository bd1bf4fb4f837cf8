use std::f64::consts::TAU;

use crate::error::{domain, Result};

/// Two-photon excitation through an off-resonant intermediate level.
///
/// All frequencies are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationParams {
    /// Single-photon Rabi frequency of the lower (780 nm) leg.
    pub rabi_lower: f64,
    /// Single-photon Rabi frequency of the upper (480 nm) leg.
    pub rabi_upper: f64,
    /// Detuning from the intermediate level.
    pub intermediate_detuning: f64,
    /// Observed full width at half maximum of the two-photon line.
    pub linewidth: f64,
    /// Laser detuning from two-photon resonance.
    pub detuning: f64,
}

impl ExcitationParams {
    /// Parameters whose peak excitation rate is `peak_rate` (1/s), with equal Rabi
    /// frequencies on both legs and a 500 MHz intermediate detuning.
    pub fn with_peak_rate(peak_rate: f64, linewidth: f64) -> Self {
        let intermediate_detuning = TAU * 500e6;
        let two_photon = (peak_rate.max(0.0) * linewidth).sqrt();
        let rabi = (4.0 * intermediate_detuning * two_photon).sqrt();
        ExcitationParams {
            rabi_lower: rabi,
            rabi_upper: rabi,
            intermediate_detuning,
            linewidth,
            detuning: 0.0,
        }
    }

    pub fn at_detuning(self, detuning: f64) -> Self {
        ExcitationParams { detuning, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.linewidth > 0.0) || !self.linewidth.is_finite() {
            return domain("excitation linewidth must be positive");
        }
        if self.intermediate_detuning == 0.0 || !self.intermediate_detuning.is_finite() {
            return domain("intermediate detuning must be non-zero");
        }
        Ok(())
    }

    /// Two-photon Rabi frequency eps_r eps_b / (4 delta_i).
    pub fn two_photon_rabi(&self) -> f64 {
        self.rabi_lower * self.rabi_upper / (4.0 * self.intermediate_detuning)
    }

    /// On-resonance excitation rate |eps_2|^2 / Delta (1/s).
    pub fn peak_rate(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.two_photon_rabi().powi(2) / self.linewidth)
    }
}

/// Unit-peak Lorentzian of full width `fwhm`.
pub fn lorentzian(detuning: f64, fwhm: f64) -> f64 {
    let x = 2.0 * detuning / fwhm;
    1.0 / (1.0 + x * x)
}

/// Per-ground-atom excitation rate R2 at the configured detuning (1/s).
pub fn two_photon_rate(p: &ExcitationParams) -> Result<f64> {
    Ok(p.peak_rate()? * lorentzian(p.detuning, p.linewidth))
}

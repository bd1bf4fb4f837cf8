use crate::atomic::CONSTANTS;
use crate::error::{domain, Result};

/// Which thermal speed stands in for `v` in the capture flux `eta v sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VelocityConvention {
    /// One-dimensional rms speed sqrt(kT / m).
    #[default]
    Rms1d,
    /// Three-dimensional rms speed sqrt(3 kT / m).
    Rms3d,
    /// Mean speed sqrt(8 kT / (pi m)).
    Mean,
}

impl VelocityConvention {
    pub fn speed(self, temperature: f64, mass: f64) -> f64 {
        let kt = CONSTANTS.k_b * temperature;
        match self {
            VelocityConvention::Rms1d => (kt / mass).sqrt(),
            VelocityConvention::Rms3d => (3.0 * kt / mass).sqrt(),
            VelocityConvention::Mean => (8.0 * kt / (std::f64::consts::PI * mass)).sqrt(),
        }
    }
}

/// Inputs of the Rydberg-Rydberg capture estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaptureParams {
    /// Rydberg number density (1/m^3).
    pub density: f64,
    /// Atom temperature (K).
    pub temperature: f64,
    /// Van der Waals coefficient C6 (J m^6).
    pub c6: f64,
    /// Atomic mass (kg).
    pub mass: f64,
    pub velocity: VelocityConvention,
}

impl CaptureParams {
    /// Rb-87 at 100 uK with the given density (1/m^3) and C6 (GHz um^6).
    pub fn rubidium(density: f64, c6_ghz_um6: f64) -> Self {
        CaptureParams {
            density,
            temperature: 100e-6,
            c6: c6_from_ghz_um6(c6_ghz_um6),
            mass: CONSTANTS.m_rb87,
            velocity: VelocityConvention::default(),
        }
    }
}

/// Converts C6 from GHz um^6 (C6 / h in frequency units) to J m^6.
pub fn c6_from_ghz_um6(c6: f64) -> f64 {
    c6 * 1e9 * CONSTANTS.h() * 1e-36
}

/// Capture rate `eta v pi (C6 / kT)^(1/3)` (1/s): the flux of Rydberg atoms through
/// the disc inside which the van der Waals energy exceeds kT.
pub fn capture_rate(p: &CaptureParams) -> Result<f64> {
    if !(p.density >= 0.0) || !(p.temperature > 0.0) || !(p.c6 >= 0.0) || !(p.mass > 0.0) {
        return domain("capture estimate needs density, C6 >= 0 and temperature, mass > 0");
    }
    let kt = CONSTANTS.k_b * p.temperature;
    let sigma = std::f64::consts::PI * (p.c6 / kt).cbrt();
    Ok(p.density * p.velocity.speed(p.temperature, p.mass) * sigma)
}

/// Boltzmann factor `exp(-dE / kT)` for an energy barrier `delta_e` (J).
pub fn boltzmann_suppression(delta_e: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return domain("temperature must be positive");
    }
    Ok((-delta_e / (CONSTANTS.k_b * temperature)).exp())
}

/// Mean free-electron number when electrons appear at `production` (1/s) and
/// leave at `dissipation` (1/s per electron).
pub fn electron_steady(production: f64, dissipation: f64) -> Result<f64> {
    if !(dissipation > 0.0) {
        return domain("dissipation rate must be positive");
    }
    if !(production >= 0.0) {
        return domain("production rate must be non-negative");
    }
    Ok(production / dissipation)
}

//! CODATA 2018 physical constants in SI units.

/// Fixed set of physical constants used throughout the crate.
///
/// All fields are SI. The set is immutable; obtain it with
/// [`PhysicalConstants::codata2018`] or the [`CONSTANTS`] static.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Fine-structure constant.
    pub alpha: f64,
    /// Rydberg energy for infinite nuclear mass (J).
    pub rydberg_energy: f64,
    /// Speed of light (m/s).
    pub c: f64,
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    /// Elementary charge (C).
    pub e: f64,
    /// Electron mass (kg).
    pub m_e: f64,
    /// Bohr radius (m).
    pub a0: f64,
    /// Mass of a rubidium-87 atom (kg).
    pub m_rb87: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants::codata2018();

impl PhysicalConstants {
    pub const fn codata2018() -> Self {
        PhysicalConstants {
            alpha: 7.297_352_569_3e-3,
            rydberg_energy: 2.179_872_361_103_5e-18,
            c: 299_792_458.0,
            hbar: 1.054_571_817e-34,
            k_b: 1.380_649e-23,
            e: 1.602_176_634e-19,
            m_e: 9.109_383_701_5e-31,
            a0: 5.291_772_109_03e-11,
            m_rb87: 86.909_180_531 * 1.660_539_066_60e-27,
        }
    }

    /// Planck constant h = 2 pi hbar (J s).
    pub fn h(&self) -> f64 {
        std::f64::consts::TAU * self.hbar
    }

    /// Hartree energy, twice the Rydberg energy (J).
    pub fn hartree(&self) -> f64 {
        2.0 * self.rydberg_energy
    }

    /// Classical electron radius e^2 / (4 pi eps0 m_e c^2) (m).
    ///
    /// Uses the identity r_e = alpha^2 a0.
    pub fn classical_electron_radius(&self) -> f64 {
        self.alpha * self.alpha * self.a0
    }

    /// Rydberg energy corrected for the finite mass of a nucleus of mass `m_core` (J).
    pub fn reduced_rydberg(&self, m_core: f64) -> f64 {
        self.rydberg_energy / (1.0 + self.m_e / m_core)
    }

    /// alpha^3 Ry / hbar: the natural rate scale of Rydberg radiative processes (1/s).
    pub fn alpha3_rydberg_rate(&self) -> f64 {
        self.alpha.powi(3) * self.rydberg_energy / self.hbar
    }

    /// Atomic unit of time hbar / E_h (s).
    pub fn atomic_time(&self) -> f64 {
        self.hbar / self.hartree()
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata2018()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants_are_consistent() {
        let k = CONSTANTS;
        // r_e from its SI definition with eps0 = e^2 / (2 alpha h c)
        let eps0 = k.e * k.e / (2.0 * k.alpha * k.h() * k.c);
        let r_e = k.e * k.e / (4.0 * std::f64::consts::PI * eps0 * k.m_e * k.c * k.c);
        assert!((r_e / k.classical_electron_radius() - 1.0).abs() < 1e-8);
        // Ry = alpha^2 m_e c^2 / 2
        let ry = 0.5 * k.alpha * k.alpha * k.m_e * k.c * k.c;
        assert!((ry / k.rydberg_energy - 1.0).abs() < 1e-8);
    }

    #[test]
    fn alpha_cubed_rydberg_rate_scale() {
        let rate = CONSTANTS.alpha3_rydberg_rate();
        assert!((rate / 8.03e9 - 1.0).abs() < 0.01, "{rate}");
    }
}

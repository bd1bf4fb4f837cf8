use crate::atomic::constants::PhysicalConstants;
use crate::atomic::level::RydbergLevel;

/// Mean photon occupation of a thermal mode, `1 / (exp(hbar w / k T) - 1)`.
///
/// Zero at T = 0.
pub fn planck_occupation(omega: f64, temperature: f64, k: &PhysicalConstants) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = k.hbar * omega / (k.k_b * temperature);
    1.0 / x.exp_m1()
}

/// An electric-dipole transition between two fine-structure levels, ordered
/// upper -> lower in energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub upper: RydbergLevel,
    pub lower: RydbergLevel,
    /// Angular frequency (rad/s), always positive.
    pub omega: f64,
    /// Vacuum wavelength (m).
    pub wavelength: f64,
    /// Radial integral `<upper| r |lower>` (Bohr radii), sign dropped.
    pub radial_integral: f64,
    /// Line strength summed over sublevels (e^2 a0^2).
    pub line_strength: f64,
    /// Absorption oscillator strength lower -> upper.
    pub f_abs: f64,
    /// Spontaneous emission rate upper -> lower (1/s).
    pub a_spont: f64,
    /// Thermal photon occupation at the transition frequency.
    pub occupation: f64,
    /// Temperature used for `occupation` (K).
    pub temperature: f64,
}

impl Transition {
    /// Wavenumber 2 pi / lambda (1/m).
    pub fn wavenumber(&self) -> f64 {
        std::f64::consts::TAU / self.wavelength
    }

    /// Emission oscillator strength upper -> lower (negative).
    pub fn f_emit(&self) -> f64 {
        -self.lower.degeneracy() / self.upper.degeneracy() * self.f_abs
    }

    /// Black-body stimulated emission rate upper -> lower, `A n` (1/s).
    pub fn stimulated_emission_rate(&self) -> f64 {
        self.a_spont * self.occupation
    }

    /// Black-body absorption rate lower -> upper, `A n g_u / g_l` (1/s).
    pub fn absorption_rate(&self) -> f64 {
        self.a_spont * self.occupation * self.upper.degeneracy() / self.lower.degeneracy()
    }
}

/// Spontaneous rate from an absorption oscillator strength:
///
/// ```text
/// A = (2 e^2 w^2 / m c^3) (g_lower / g_upper) f_abs      (Gaussian units)
///   = (2 r_e w^2 / c) (g_lower / g_upper) f_abs          (SI)
/// ```
pub fn einstein_a_from_f(omega: f64, g_lower: f64, g_upper: f64, f_abs: f64, k: &PhysicalConstants) -> f64 {
    2.0 * k.classical_electron_radius() * omega * omega / k.c * (g_lower / g_upper) * f_abs
}

/// Absorption oscillator strength from a line strength in atomic units:
/// `f = (2/3) w S / g_lower` with w in Hartree.
pub fn f_abs_from_line_strength(omega: f64, line_strength: f64, g_lower: f64, k: &PhysicalConstants) -> f64 {
    let omega_au = omega * k.atomic_time();
    2.0 / 3.0 * omega_au * line_strength / g_lower
}

/// Spontaneous rate directly from a line strength in atomic units:
/// `A = 4 w^3 S / (3 c^3 g_upper)`.
pub fn einstein_a_from_line_strength(omega: f64, line_strength: f64, g_upper: f64, k: &PhysicalConstants) -> f64 {
    let omega_au = omega * k.atomic_time();
    let c_au = 1.0 / k.alpha;
    4.0 * omega_au.powi(3) * line_strength / (3.0 * c_au.powi(3) * g_upper) / k.atomic_time()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::constants::CONSTANTS;

    #[test]
    fn occupation_matches_planck_and_rayleigh_jeans() {
        let k = CONSTANTS;
        let t = 300.0;
        for omega in [1e9, 1e11, 1e13, 1e14] {
            let x: f64 = k.hbar * omega / (k.k_b * t);
            let want = 1.0 / (x.exp() - 1.0);
            let got = planck_occupation(omega, t, &k);
            // the naive form loses ~eps / x to cancellation
            assert!((got / want - 1.0).abs() < 4.0 * f64::EPSILON / x + 1e-14);
        }
        // hbar w / kT < 1e-3 => n ~ kT / hbar w within 0.1 %
        let omega = 1e-4 * k.k_b * t / k.hbar;
        let rj = k.k_b * t / (k.hbar * omega);
        assert!((planck_occupation(omega, t, &k) / rj - 1.0).abs() < 1e-3);
        assert_eq!(planck_occupation(1e12, 0.0, &k), 0.0);
    }

    #[test]
    fn a_from_f_and_from_line_strength_agree() {
        let k = CONSTANTS;
        let (omega, s, gl, gu) = (2.3e12, 1.7e5, 4.0, 6.0);
        let f = f_abs_from_line_strength(omega, s, gl, &k);
        let a1 = einstein_a_from_f(omega, gl, gu, f, &k);
        let a2 = einstein_a_from_line_strength(omega, s, gu, &k);
        // equal up to the consistency of the CODATA set
        assert!((a1 / a2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hydrogen_lyman_alpha_from_tabulated_f() {
        // f(1s -> 2p) = 0.4162, omega = (3/4) Ry / hbar
        let k = CONSTANTS;
        let omega = 0.75 * k.rydberg_energy / k.hbar;
        let a = einstein_a_from_f(omega, 2.0, 6.0, 0.4162, &k);
        assert!((a / 6.27e8 - 1.0).abs() < 0.01, "{a}");
    }
}

use crate::error::{domain, Result};

/// Population that Zeeman precession moves into magnetic sublevels the probe
/// polarization cannot address.
///
/// The excited-state population is split into an addressable and a dark
/// compartment. A fraction `fraction` of fresh excitation lands in the dark
/// compartment and the two exchange at `exchange_rate`, weighted so that without
/// the probe the dark share relaxes to `fraction`. The probe acts on the
/// addressable compartment only.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DarkCompartment {
    /// Dark capacity f_d, at most 1/3.
    pub fraction: f64,
    /// Zeeman exchange rate kappa_Z (1/s).
    pub exchange_rate: f64,
}

impl DarkCompartment {
    pub const MAX_FRACTION: f64 = 1.0 / 3.0;

    pub fn is_enabled(&self) -> bool {
        self.fraction > 0.0
    }
}

/// Rates of the ground / excited-Rydberg / other-Rydberg model. All in 1/s except
/// the load rate (atoms/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticsParams {
    /// Two-photon excitation rate per ground atom, R2.
    pub r2: f64,
    /// Probe stimulated-emission rate, R3.
    pub r3: f64,
    /// Spontaneous decay of the excited Rydberg state to low-lying levels, A_r.
    pub a_r: f64,
    /// Effective radiative rate of the other Rydberg states, A_s.
    pub a_s: f64,
    /// Transfer rate from the excited state to other Rydberg states, gamma.
    pub gamma: f64,
    /// Trap loss directly from the excited state, Gamma_r.
    pub gamma_r: f64,
    /// Trap loss from the other Rydberg states, Gamma_s.
    pub gamma_s: f64,
    /// MOT loading rate L (atoms/s).
    pub load_rate: f64,
    /// Background MOT loss rate Gamma_0.
    pub gamma_0: f64,
    pub dark: DarkCompartment,
}

impl KineticsParams {
    /// The 28D5/2 rate set: transfer, radiative and loss rates from probe-scan fits,
    /// a 110/s peak excitation rate, no probe, and a MOT of 5.7e7 atoms with a 1/s
    /// background loss.
    pub fn reference_28d() -> Self {
        KineticsParams {
            r2: 110.0,
            r3: 0.0,
            a_r: 4.1e4,
            a_s: 3.1e4,
            gamma: 1.3e5,
            gamma_r: 0.0,
            gamma_s: 265.0,
            load_rate: 5.7e7,
            gamma_0: 1.0,
            dark: DarkCompartment::default(),
        }
    }

    pub fn with_r3(self, r3: f64) -> Self {
        KineticsParams { r3, ..self }
    }

    pub fn with_r2(self, r2: f64) -> Self {
        KineticsParams { r2, ..self }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let rates = [
            ("r2", self.r2),
            ("r3", self.r3),
            ("a_r", self.a_r),
            ("a_s", self.a_s),
            ("gamma", self.gamma),
            ("gamma_r", self.gamma_r),
            ("gamma_s", self.gamma_s),
            ("load_rate", self.load_rate),
            ("gamma_0", self.gamma_0),
            ("dark exchange rate", self.dark.exchange_rate),
        ];
        for (name, v) in rates {
            if !(v >= 0.0) || !v.is_finite() {
                return domain(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        let f = self.dark.fraction;
        if !(0.0..=DarkCompartment::MAX_FRACTION + 1e-15).contains(&f) {
            return domain(format!("dark fraction must lie in [0, 1/3], got {f}"));
        }
        if self.a_s + self.gamma_s <= 0.0 {
            return domain("A_s + Gamma_s must be positive");
        }
        if self.a_r + self.r3 + self.gamma + self.gamma_r <= 0.0 {
            return domain("A_r + R3 + gamma + Gamma_r must be positive");
        }
        Ok(())
    }

    /// Steady excited-state populations (addressable, dark) per ground atom.
    ///
    /// With `exact == false` the direct loss Gamma_r is dropped from the decay
    /// denominators, as in the product-form loss expression.
    pub(crate) fn excited_per_ground(&self, exact: bool) -> (f64, f64) {
        let f = self.dark.fraction;
        let k = self.dark.exchange_rate;
        let loss = if exact { self.gamma_r } else { 0.0 };
        let out_a = self.a_r + self.r3 + self.gamma + loss + k * f;
        let out_d = self.a_r + self.gamma + loss + k * (1.0 - f);
        let det = out_a * out_d - k * k * f * (1.0 - f);
        let a = self.r2 * ((1.0 - f) * out_d + k * f * (1.0 - f)) / det;
        let d = self.r2 * (f * out_a + k * f * (1.0 - f)) / det;
        (a, d)
    }
}

/// Steady populations (atoms).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SteadyState {
    pub n_g: f64,
    /// Excited Rydberg state, both compartments.
    pub n_r: f64,
    pub n_s: f64,
    /// Part of `n_r` in the dark compartment.
    pub n_dark: f64,
}

impl SteadyState {
    pub fn total(&self) -> f64 {
        self.n_g + self.n_r + self.n_s
    }
}

/// Closed-form steady state of the rate equations.
pub fn steady_state(p: &KineticsParams) -> Result<SteadyState> {
    p.validate()?;
    let (a, d) = p.excited_per_ground(true);
    let s = p.gamma * (a + d) / (p.gamma_s + p.a_s);
    let loss = p.gamma_r * (a + d) + p.gamma_s * s;
    let total_loss = p.gamma_0 + loss;
    if total_loss <= 0.0 {
        if p.load_rate == 0.0 {
            return Ok(SteadyState::default());
        }
        return domain("no loss channel: the trap population grows without bound");
    }
    let n_g = p.load_rate / total_loss;
    Ok(SteadyState {
        n_g,
        n_r: n_g * (a + d),
        n_s: n_g * s,
        n_dark: n_g * d,
    })
}

/// Added trap-loss rate from Rydberg excitation, in two forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRate {
    /// Product form
    /// `R2 gamma / (A_r + R3 + gamma) * (Gamma_s / A_s + Gamma_r / gamma)`,
    /// valid when the loss rates are small against the radiative rates.
    pub approximate: f64,
    /// Loss per ground atom from the exact steady state,
    /// `(Gamma_r N_r + Gamma_s N_s) / N_g`.
    pub exact: f64,
}

/// Increase of the trap loss rate caused by the Rydberg excitation.
///
/// The product form is evaluated as `R2 (gamma Gamma_s / A_s + Gamma_r) / (A_r + R3 + gamma)`,
/// which stays finite for gamma = 0.
pub fn trap_loss_increase(p: &KineticsParams) -> Result<LossRate> {
    p.validate()?;
    if p.a_s <= 0.0 {
        return domain("the product-form loss needs A_s > 0");
    }
    let (a, d) = p.excited_per_ground(false);
    let approximate = (p.gamma * p.gamma_s / p.a_s + p.gamma_r) * (a + d);
    let (a, d) = p.excited_per_ground(true);
    let s = p.gamma * (a + d) / (p.gamma_s + p.a_s);
    let exact = p.gamma_r * (a + d) + p.gamma_s * s;
    Ok(LossRate { approximate, exact })
}

/// Photon collection and branching for 420 nm detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionGeometry {
    /// Collected solid-angle fraction.
    pub solid_angle: f64,
    /// Detector quantum efficiency.
    pub efficiency: f64,
    /// Branching ratio Rydberg -> 6P3/2.
    pub branching_rydberg: f64,
    /// Branching ratio 6P3/2 -> 5S1/2.
    pub branching_6p: f64,
}

impl Default for DetectionGeometry {
    /// The reference apparatus: Omega = 3e-3, 3.4 % efficiency, b_r = 0.15, b_6 = 0.31.
    fn default() -> Self {
        DetectionGeometry {
            solid_angle: 3e-3,
            efficiency: 0.034,
            branching_rydberg: 0.15,
            branching_6p: 0.31,
        }
    }
}

impl DetectionGeometry {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("solid angle", self.solid_angle),
            ("efficiency", self.efficiency),
            ("Rydberg branching", self.branching_rydberg),
            ("6P branching", self.branching_6p),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return domain(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        Ok(())
    }

    /// Overall detection factor Omega eta b_r b_6.
    pub fn factor(&self) -> f64 {
        self.solid_angle * self.efficiency * self.branching_rydberg * self.branching_6p
    }

    /// Detection factor for probe-induced photons, which reach 6P3/2 directly.
    pub fn probe_factor(&self) -> f64 {
        self.solid_angle * self.efficiency * self.branching_6p
    }
}

/// Probe-induced 420 nm count rate per ground atom, I3 / N_g (1/s).
///
/// Without the dark compartment this is
/// `R3 R2 Omega eta b_r b_6 / (A_r + R3 + gamma)`.
pub fn probe_count_rate(p: &KineticsParams, g: &DetectionGeometry) -> Result<f64> {
    p.validate()?;
    g.validate()?;
    let (a, _) = p.excited_per_ground(false);
    Ok(p.r3 * a * g.factor())
}

/// Spontaneous-cascade count rate c6 for `n_g` ground atoms (counts/s):
/// `R2 N_g b_r b_6 eta Omega A_r / (A_r + A_BB)`.
///
/// `a_bb` is the rate that removes atoms from the excited state without a detected
/// cascade photon. Passing black-body transfer gives the single-atom expectation;
/// passing the model transfer rate gamma gives the self-consistent prediction.
pub fn cascade_count_rate(p: &KineticsParams, g: &DetectionGeometry, n_g: f64, a_bb: f64) -> Result<f64> {
    g.validate()?;
    if !(p.a_r + a_bb > 0.0) || a_bb < 0.0 || p.a_r < 0.0 {
        return domain("A_r + A_BB must be positive");
    }
    if !(n_g >= 0.0) {
        return domain("ground-state atom number must be non-negative");
    }
    Ok(p.r2 * n_g * g.factor() * p.a_r / (p.a_r + a_bb))
}

/// Added loss rate inferred from MOT fluorescence: `Gamma_0 (N_g0 / N_g - 1)`.
pub fn loss_from_fluorescence(n_g0: f64, n_g: f64, gamma_0: f64) -> Result<f64> {
    if !(n_g > 0.0) || !(n_g0 > 0.0) {
        return domain("atom numbers must be positive");
    }
    if !(gamma_0 >= 0.0) {
        return domain("background loss must be non-negative");
    }
    Ok(gamma_0 * (n_g0 / n_g - 1.0))
}

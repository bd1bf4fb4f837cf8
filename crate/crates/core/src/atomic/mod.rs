//! Rubidium level structure, dipole transition data and single-atom rates.
//!
//! [`Atom`] bundles a [`QuantumDefectTable`] with the physical constants and
//! answers three questions: where is a level ([`Atom::level`]), how strongly are two
//! levels coupled ([`Atom::transition`]) and how fast does a level decay, absorb or
//! ionize in a thermal radiation field ([`Atom::level_rates`]).

pub mod angular;
pub mod constants;
pub mod defects;
pub mod level;
pub mod radial;
pub mod transition;

use std::collections::HashMap;

pub use constants::{PhysicalConstants, CONSTANTS};
pub use defects::{DefectSeries, IonizationEntry, QuantumDefectTable};
pub use level::{RydbergLevel, StateLabel};
pub use radial::RadialWavefunction;
pub use transition::{planck_occupation, Transition};

use crate::error::{domain, Error, Result};

/// Room temperature, used wherever black-body radiation enters and no
/// temperature is given (K).
pub const DEFAULT_TEMPERATURE: f64 = 300.0;

/// Levels with n at or below this are treated as terminal: decay into them counts
/// as return to the ground state on kinetic timescales.
pub const TERMINAL_N: u32 = 12;

/// Neighbour window for the black-body transfer sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborWindow {
    /// Initial half-width in n.
    pub initial: u32,
    /// Increment applied while the sum is still moving.
    pub step: u32,
    /// Largest half-width tried before giving up.
    pub max: u32,
    /// Relative change below which the sum counts as converged.
    pub tolerance: f64,
}

impl Default for NeighborWindow {
    fn default() -> Self {
        NeighborWindow {
            initial: 15,
            step: 5,
            max: 60,
            tolerance: 0.01,
        }
    }
}

/// Decay, transfer and ionization rates of one level in a thermal field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRates {
    /// Spontaneous decay to terminal (n <= 12) levels (1/s).
    pub a_r: f64,
    /// Black-body transfer to neighbouring Rydberg levels, up and down (1/s).
    pub a_bb: f64,
    /// Black-body photoionization rate (1/s).
    pub gamma_bbi: f64,
    pub temperature: f64,
    /// Half-width in n at which `a_bb` converged.
    pub window: u32,
}

/// Scratch cache of radial wavefunctions, local to one computation.
#[derive(Default)]
pub(crate) struct WavefunctionCache {
    map: HashMap<StateLabel, RadialWavefunction>,
}

impl WavefunctionCache {
    pub(crate) fn get(&mut self, atom: &Atom, level: &RydbergLevel) -> &RadialWavefunction {
        self.map
            .entry(level.state)
            .or_insert_with(|| atom.wavefunction(level))
    }

    pub(crate) fn radial_integral(&mut self, atom: &Atom, a: &RydbergLevel, b: &RydbergLevel) -> f64 {
        self.get(atom, a);
        self.get(atom, b);
        let wa = &self.map[&a.state];
        let wb = &self.map[&b.state];
        wa.radial_integral(wb).abs()
    }
}

/// An atomic species: quantum-defect data plus physical constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub table: QuantumDefectTable,
    pub constants: PhysicalConstants,
}

impl Atom {
    pub fn new(table: QuantumDefectTable) -> Self {
        Atom {
            table,
            constants: CONSTANTS,
        }
    }

    /// Rubidium-87 with the bundled quantum defects.
    pub fn rubidium87() -> Self {
        Self::new(QuantumDefectTable::rubidium87())
    }

    /// Hydrogen with an infinitely heavy nucleus.
    pub fn hydrogen() -> Self {
        Self::new(QuantumDefectTable::hydrogenic())
    }

    /// Rydberg energy of this species, corrected for the core mass (J).
    pub fn rydberg_energy(&self) -> f64 {
        match self.table.core_mass {
            Some(m) => self.constants.reduced_rydberg(m),
            None => self.constants.rydberg_energy,
        }
    }

    /// Level (n, l, j) with j given doubled. Fails for unphysical quantum numbers or n
    /// below the lowest bound level of the series.
    pub fn level(&self, n: u32, l: u32, two_j: u32) -> Result<RydbergLevel> {
        self.level_of(StateLabel::new(n, l, two_j))
    }

    pub fn level_of(&self, state: StateLabel) -> Result<RydbergLevel> {
        if !state.is_well_formed() {
            return domain(format!(
                "invalid quantum numbers n={} l={} j={}/2",
                state.n, state.l, state.two_j
            ));
        }
        let lowest = self.table.lowest_n(state.l);
        if state.n < lowest {
            return domain(format!(
                "{state}: n must be at least {lowest} for this series of {}",
                self.table.species
            ));
        }
        let n_star = state.n as f64 - self.table.defect(state.n, state.l, state.two_j);
        Ok(RydbergLevel {
            state,
            n_star,
            energy: -self.rydberg_energy() / (n_star * n_star),
        })
    }

    /// Parses a label such as `28D5/2` and returns the level.
    pub fn parse_level(&self, label: &str) -> Result<RydbergLevel> {
        let state: StateLabel = label
            .parse()
            .map_err(|e: level::ParseStateError| Error::Domain(e.to_string()))?;
        self.level_of(state)
    }

    pub fn wavefunction(&self, level: &RydbergLevel) -> RadialWavefunction {
        RadialWavefunction::coulomb(level.n_star, level.l(), self.table.core_radius)
    }

    /// Dipole transition from `upper` down to `lower` in a field at `temperature` (K).
    pub fn transition(&self, upper: &RydbergLevel, lower: &RydbergLevel, temperature: f64) -> Result<Transition> {
        let mut cache = WavefunctionCache::default();
        self.transition_cached(upper, lower, temperature, &mut cache)
    }

    pub(crate) fn transition_cached(
        &self,
        upper: &RydbergLevel,
        lower: &RydbergLevel,
        temperature: f64,
        cache: &mut WavefunctionCache,
    ) -> Result<Transition> {
        let (lu, ll) = (upper.l(), lower.l());
        let dj = upper.two_j().abs_diff(lower.two_j());
        if lu.abs_diff(ll) != 1 || dj > 2 {
            return Err(Error::SelectionRule(format!(
                "{upper} -> {lower} is not electric-dipole allowed"
            )));
        }
        if temperature < 0.0 {
            return domain("temperature must be non-negative");
        }
        let de = upper.energy - lower.energy;
        if de.abs() <= f64::EPSILON * upper.energy.abs() {
            return domain(format!("{upper} and {lower} are degenerate"));
        }
        if de < 0.0 {
            return domain(format!("{upper} lies below {lower}; pass the pair upper first"));
        }
        let k = &self.constants;
        let omega = de / k.hbar;
        let radial = cache.radial_integral(self, upper, lower);
        let s = angular::line_strength_factor(lu, upper.two_j(), ll, lower.two_j()) * radial * radial;
        let (gu, gl) = (upper.degeneracy(), lower.degeneracy());
        let f_abs = transition::f_abs_from_line_strength(omega, s, gl, k);
        Ok(Transition {
            upper: *upper,
            lower: *lower,
            omega,
            wavelength: std::f64::consts::TAU * k.c / omega,
            radial_integral: radial,
            line_strength: s,
            f_abs,
            a_spont: transition::einstein_a_from_f(omega, gl, gu, f_abs, k),
            occupation: planck_occupation(omega, temperature, k),
            temperature,
        })
    }

    /// All dipole partners (n', l +/- 1, j') of `level` with n' in `n_range`, skipping
    /// levels that do not exist and levels degenerate with `level`.
    pub fn dipole_partners(
        &self,
        level: &RydbergLevel,
        n_range: std::ops::RangeInclusive<u32>,
    ) -> Vec<RydbergLevel> {
        let mut out = Vec::new();
        let l = level.l();
        let l_partners = [l.checked_sub(1), Some(l + 1)];
        for lp in l_partners.into_iter().flatten() {
            for two_jp in [(2 * lp).saturating_sub(1), 2 * lp + 1] {
                if two_jp == 0 || two_jp.abs_diff(level.two_j()) > 2 {
                    continue;
                }
                for np in n_range.clone() {
                    if let Ok(p) = self.level(np, lp, two_jp) {
                        if (p.energy - level.energy).abs() > f64::EPSILON * level.energy.abs() {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    /// Transition between two levels in whichever order is energetically downward.
    pub(crate) fn ordered_transition(
        &self,
        a: &RydbergLevel,
        b: &RydbergLevel,
        temperature: f64,
        cache: &mut WavefunctionCache,
    ) -> Result<Transition> {
        if a.energy > b.energy {
            self.transition_cached(a, b, temperature, cache)
        } else {
            self.transition_cached(b, a, temperature, cache)
        }
    }

    /// Spontaneous decay rate of `level` into terminal levels (n <= [`TERMINAL_N`]).
    pub fn terminal_decay_rate(&self, level: &RydbergLevel) -> f64 {
        let mut cache = WavefunctionCache::default();
        self.terminal_decay_rate_cached(level, &mut cache)
    }

    pub(crate) fn terminal_decay_rate_cached(&self, level: &RydbergLevel, cache: &mut WavefunctionCache) -> f64 {
        let top = TERMINAL_N.min(level.n());
        self.dipole_partners(level, 1..=top)
            .iter()
            .filter(|p| p.energy < level.energy)
            .filter_map(|p| self.transition_cached(level, p, 0.0, cache).ok())
            .map(|t| t.a_spont)
            .sum()
    }

    /// Black-body transfer rate to Rydberg neighbours (n' > [`TERMINAL_N`]) with
    /// |n' - n| <= `half_width`.
    pub(crate) fn black_body_transfer_cached(
        &self,
        level: &RydbergLevel,
        temperature: f64,
        half_width: u32,
        cache: &mut WavefunctionCache,
    ) -> f64 {
        if temperature <= 0.0 {
            return 0.0;
        }
        let lo = (TERMINAL_N + 1).max(level.n().saturating_sub(half_width));
        let hi = level.n() + half_width;
        self.dipole_partners(level, lo..=hi)
            .iter()
            .filter_map(|p| {
                let t = self.ordered_transition(level, p, temperature, cache).ok()?;
                Some(if p.energy < level.energy {
                    t.stimulated_emission_rate()
                } else {
                    t.absorption_rate()
                })
            })
            .sum()
    }

    /// Spontaneous, black-body transfer and black-body ionization rates of `level`.
    pub fn level_rates(&self, level: &RydbergLevel, temperature: f64, window: NeighborWindow) -> Result<LevelRates> {
        if temperature < 0.0 {
            return domain("temperature must be non-negative");
        }
        let mut cache = WavefunctionCache::default();
        let a_r = self.terminal_decay_rate_cached(level, &mut cache);
        let mut width = window.initial;
        let mut a_bb = self.black_body_transfer_cached(level, temperature, width, &mut cache);
        if a_bb > 0.0 {
            loop {
                let next = width + window.step.max(1);
                if next > window.max {
                    return Err(Error::Convergence(format!(
                        "black-body transfer sum for {level} still moving at |dn| = {width}"
                    )));
                }
                let wider = self.black_body_transfer_cached(level, temperature, next, &mut cache);
                let change = (wider - a_bb).abs() / wider;
                a_bb = wider;
                width = next;
                if change < window.tolerance {
                    break;
                }
            }
        }
        Ok(LevelRates {
            a_r,
            a_bb,
            gamma_bbi: self.ionization_rate(level, temperature),
            temperature,
            window: width,
        })
    }

    /// Black-body ionization rate of `level` at `temperature` (1/s).
    ///
    /// Tabulated states at their tabulated temperature return the stored value
    /// exactly. Other states use the tabulated rates of the nearest orbital series,
    /// interpolated linearly in n* on the scaled quantity `rate * n*^2` and held
    /// constant in that quantity outside the tabulated range. Other temperatures
    /// rescale by the thermal occupation at the binding energy. This is an
    /// approximation, good to tens of percent near the tabulated states.
    pub fn ionization_rate(&self, level: &RydbergLevel, temperature: f64) -> f64 {
        if temperature <= 0.0 {
            return 0.0;
        }
        let entries = self.table.ionization_entries();
        if entries.is_empty() {
            return 0.0;
        }
        if let Some(e) = entries
            .iter()
            .find(|e| e.state == level.state && (e.temperature - temperature).abs() < 1e-9)
        {
            return e.rate;
        }
        let l = level.l();
        let best_dl = entries.iter().map(|e| e.state.l.abs_diff(l)).min().unwrap_or(0);
        // among equally distant series prefer the higher l
        let series_l = entries
            .iter()
            .filter(|e| e.state.l.abs_diff(l) == best_dl)
            .map(|e| e.state.l)
            .max()
            .unwrap_or(l);
        let mut points: Vec<(f64, f64, f64)> = entries
            .iter()
            .filter(|e| e.state.l == series_l)
            .filter_map(|e| {
                let lv = self.level_of(e.state).ok()?;
                Some((lv.n_star, e.rate * lv.n_star * lv.n_star, e.temperature))
            })
            .collect();
        if points.is_empty() {
            return 0.0;
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let x = level.n_star;
        let (scaled, t_ref) = if x <= points[0].0 {
            (points[0].1, points[0].2)
        } else if x >= points[points.len() - 1].0 {
            let p = points[points.len() - 1];
            (p.1, p.2)
        } else {
            let i = points.iter().position(|p| p.0 >= x).unwrap();
            let (a, b) = (points[i - 1], points[i]);
            let w = (x - a.0) / (b.0 - a.0);
            (a.1 + w * (b.1 - a.1), a.2 + w * (b.2 - a.2))
        };
        let omega_ion = -level.energy / self.constants.hbar;
        let k = &self.constants;
        let thermal = planck_occupation(omega_ion, temperature, k) / planck_occupation(omega_ion, t_ref, k);
        scaled / (x * x) * thermal
    }
}

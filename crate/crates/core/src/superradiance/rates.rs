use crate::atomic::{Atom, RydbergLevel, StateLabel, WavefunctionCache, TERMINAL_N};
use crate::error::{domain, Result};

use super::basis::LevelBasis;
use super::cooperativity::CloudGeometry;

/// Dipole coupling between two basis levels, `upper` above `lower` in energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub upper: usize,
    pub lower: usize,
    /// Single-atom spontaneous rate A (1/s).
    pub a_spont: f64,
    /// Cooperativity C in [0, 1].
    pub cooperativity: f64,
    /// Pair rate Gamma = C A (1/s).
    pub gamma: f64,
    /// Black-body stimulated emission per upper-level atom (1/s).
    pub bb_down: f64,
    /// Black-body absorption per lower-level atom (1/s).
    pub bb_up: f64,
    /// Transition wavelength (m).
    pub wavelength: f64,
}

/// Linear loss of one basis level into the sink, split by mechanism (1/s).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SinkRates {
    /// Spontaneous decay to terminal levels.
    pub terminal: f64,
    /// Spontaneous decay to Rydberg levels outside the basis.
    pub escape_spontaneous: f64,
    /// Black-body transfer to Rydberg levels outside the basis.
    pub escape_black_body: f64,
    /// Black-body photoionization.
    pub ionization: f64,
}

impl SinkRates {
    pub fn total(&self) -> f64 {
        self.terminal + self.escape_spontaneous + self.escape_black_body + self.ionization
    }
}

/// Options for [`build_rates`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    /// Temperature of the radiation field (K).
    pub temperature: f64,
    /// Half-width in n of the neighbour search for black-body escape out of the basis.
    pub escape_window: u32,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions {
            temperature: crate::atomic::DEFAULT_TEMPERATURE,
            escape_window: 15,
        }
    }
}

/// Pair rates and sink rates of a cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    labels: Vec<StateLabel>,
    pumped: usize,
    edges: Vec<Edge>,
    sink: Vec<SinkRates>,
}

impl RateMatrix {
    /// Rate matrix from explicit edges, for model studies.
    pub fn from_parts(labels: Vec<StateLabel>, pumped: usize, edges: Vec<Edge>, sink: Vec<SinkRates>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return domain("rate matrix needs at least one level");
        }
        if pumped >= n || sink.len() != n {
            return domain("pumped index or sink list does not match the level list");
        }
        for e in &edges {
            if e.upper >= n || e.lower >= n || e.upper == e.lower {
                return domain(format!("edge {} -> {} is out of range", e.upper, e.lower));
            }
            let rates = [e.a_spont, e.gamma, e.bb_down, e.bb_up];
            if rates.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) || !(0.0..=1.0).contains(&e.cooperativity) {
                return domain("edge rates must be finite and non-negative");
            }
        }
        if sink.iter().any(|s| !(s.total() >= 0.0)) {
            return domain("sink rates must be non-negative");
        }
        Ok(RateMatrix {
            labels,
            pumped,
            edges,
            sink,
        })
    }

    /// Two levels coupled by a pair rate `gamma` with no black-body field and no sink.
    pub fn two_level(gamma: f64) -> Result<Self> {
        let labels = vec![StateLabel::new(2, 0, 1), StateLabel::new(2, 1, 1)];
        let edge = Edge {
            upper: 1,
            lower: 0,
            a_spont: gamma,
            cooperativity: 1.0,
            gamma,
            bb_down: 0.0,
            bb_up: 0.0,
            wavelength: f64::INFINITY,
        };
        Self::from_parts(labels, 1, vec![edge], vec![SinkRates::default(); 2])
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn pumped(&self) -> usize {
        self.pumped
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sink(&self) -> &[SinkRates] {
        &self.sink
    }
}

/// Builds the cascade rates for `basis` in a cloud of geometry `geom`.
///
/// In-basis pairs get `Gamma = C(kR) A`. Decay and black-body transfer to levels
/// outside the basis, spontaneous decay to terminal levels and photoionization are
/// linear losses into the sink; their photons are not counted as cooperative.
pub fn build_rates(atom: &Atom, basis: &LevelBasis, geom: &CloudGeometry, options: RateOptions) -> Result<RateMatrix> {
    if basis.is_empty() {
        return domain("cascade basis is empty");
    }
    if !(options.temperature >= 0.0) {
        return domain("temperature must be non-negative");
    }
    let t = options.temperature;
    let levels = basis.levels();
    let mut cache = WavefunctionCache::default();
    let mut edges = Vec::new();
    let mut sink = vec![SinkRates::default(); levels.len()];
    let n_max = levels.iter().map(RydbergLevel::n).max().unwrap_or(0);

    for (i, level) in levels.iter().enumerate() {
        let s = &mut sink[i];
        s.terminal = atom.terminal_decay_rate_cached(level, &mut cache);
        s.ionization = atom.ionization_rate(level, t);
        let top = (level.n() + options.escape_window).max(n_max);
        for p in atom.dipole_partners(level, (TERMINAL_N + 1)..=top) {
            let below = p.energy < level.energy;
            match basis.index_of(&p.state) {
                Some(j) => {
                    // each in-basis pair once, from its upper end
                    if !below {
                        continue;
                    }
                    let tr = atom.transition_cached(level, &p, t, &mut cache)?;
                    let c = geom.cooperativity(tr.wavenumber());
                    edges.push(Edge {
                        upper: i,
                        lower: j,
                        a_spont: tr.a_spont,
                        cooperativity: c,
                        gamma: c * tr.a_spont,
                        bb_down: tr.stimulated_emission_rate(),
                        bb_up: tr.absorption_rate(),
                        wavelength: tr.wavelength,
                    });
                }
                None => {
                    let tr = atom.ordered_transition(level, &p, t, &mut cache)?;
                    if below {
                        s.escape_spontaneous += tr.a_spont;
                        s.escape_black_body += tr.stimulated_emission_rate();
                    } else if p.n().abs_diff(level.n()) <= options.escape_window {
                        s.escape_black_body += tr.absorption_rate();
                    }
                }
            }
        }
    }
    edges.sort_by_key(|e| (e.upper, e.lower));
    RateMatrix::from_parts(
        levels.iter().map(|l| l.state).collect(),
        basis.pumped(),
        edges,
        sink,
    )
}

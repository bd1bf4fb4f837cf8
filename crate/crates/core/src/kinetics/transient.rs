use nalgebra::DMatrix;

use super::model::{KineticsParams, SteadyState};
use crate::error::{domain, Result};
use crate::ode::{OdeSystem, Sdirk4};

/// State vector layout: ground, addressable excited, dark excited, other Rydberg.
struct ThreeState<'a>(&'a KineticsParams);

impl ThreeState<'_> {
    fn matrix(&self) -> [[f64; 4]; 4] {
        let p = self.0;
        let f = p.dark.fraction;
        let k = p.dark.exchange_rate;
        let decay = p.a_r + p.gamma + p.gamma_r;
        [
            [-(p.gamma_0 + p.r2), p.a_r + p.r3, p.a_r, p.a_s],
            [p.r2 * (1.0 - f), -(decay + p.r3 + k * f), k * (1.0 - f), 0.0],
            [p.r2 * f, k * f, -(decay + k * (1.0 - f)), 0.0],
            [0.0, p.gamma, p.gamma, -(p.gamma_s + p.a_s)],
        ]
    }
}

impl OdeSystem for ThreeState<'_> {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let m = self.matrix();
        for (i, row) in m.iter().enumerate() {
            dy[i] = row.iter().zip(y).map(|(a, b)| a * b).sum();
        }
        dy[0] += self.0.load_rate;
    }

    fn jacobian(&self, _t: f64, _y: &[f64], jac: &mut DMatrix<f64>) {
        for (i, row) in self.matrix().iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                jac[(i, j)] = *v;
            }
        }
    }
}

/// Sampled populations from [`transient`].
#[derive(Debug, Clone, PartialEq)]
pub struct Transient {
    pub times: Vec<f64>,
    pub states: Vec<SteadyState>,
}

impl Transient {
    pub fn last(&self) -> Option<&SteadyState> {
        self.states.last()
    }
}

/// Integrates the rate equations from `initial` and samples `samples` evenly spaced
/// times over `(0, duration]`.
///
/// The initial dark population is taken from `initial.n_dark` and must not exceed
/// `initial.n_r`.
pub fn transient(p: &KineticsParams, initial: &SteadyState, duration: f64, samples: usize) -> Result<Transient> {
    p.validate()?;
    if !(duration > 0.0) || !duration.is_finite() {
        return domain("duration must be positive");
    }
    let s = initial;
    if [s.n_g, s.n_r, s.n_s, s.n_dark].iter().any(|v| !(*v >= 0.0)) || s.n_dark > s.n_r {
        return domain("initial populations must be non-negative with n_dark <= n_r");
    }
    let y0 = [s.n_g, s.n_r - s.n_dark, s.n_dark, s.n_s];
    let samples = samples.max(1);
    let times: Vec<f64> = (1..=samples).map(|i| duration * i as f64 / samples as f64).collect();
    let scale = y0.iter().copied().fold(p.load_rate / (p.gamma_0 + 1e-300), f64::max).max(1.0);
    let solver = Sdirk4 {
        non_negative: true,
        ..Sdirk4::with_tolerances(1e-10, 1e-14 * scale)
    };
    let traj = solver.integrate(&ThreeState(p), 0.0, &y0, &times)?;
    let states = traj
        .states
        .iter()
        .map(|y| SteadyState {
            n_g: y[0],
            n_r: y[1] + y[2],
            n_s: y[3],
            n_dark: y[2],
        })
        .collect();
    Ok(Transient {
        times: traj.times,
        states,
    })
}

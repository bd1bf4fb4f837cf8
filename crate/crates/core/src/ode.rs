//! Adaptive stiff ODE integration.
//!
//! An L-stable, stiffly accurate singly diagonally implicit Runge-Kutta method of
//! order 4 with an embedded order-3 error estimate (the five-stage SDIRK tableau
//! with gamma = 1/4 from Hairer & Wanner, *Solving ODEs II*, sec. IV.6). Stage
//! equations are solved with simplified Newton iterations on a dense Jacobian, so
//! the method suits the small rate-equation systems of this crate: a few states for
//! trap kinetics, a hundred or so for radiative cascades.
//!
//! Every stage update lies in the range of `f`, so linear invariants of the system
//! (total population, for instance) are preserved to rounding.
//!
//! The embedded error estimate is passed through `(I - h gamma J)^-1` before the
//! norm is taken, which keeps decayed stiff modes from forcing tiny steps. With
//! `non_negative` set, a step that drives a component below `-atol` is rejected and
//! retried with a smaller step.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A first-order system `y' = f(t, y)` with a dense Jacobian.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
    fn jacobian(&self, t: f64, y: &[f64], jac: &mut DMatrix<f64>);
}

const GAMMA: f64 = 0.25;
const C: [f64; 5] = [0.25, 0.75, 11.0 / 20.0, 0.5, 1.0];
const A: [[f64; 5]; 5] = [
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [0.5, 0.25, 0.0, 0.0, 0.0],
    [17.0 / 50.0, -1.0 / 25.0, 0.25, 0.0, 0.0],
    [371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.25, 0.0],
    [25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25],
];
const B_HAT: [f64; 5] = [59.0 / 48.0, -17.0 / 96.0, 225.0 / 32.0, -85.0 / 12.0, 0.0];

/// Step-size control and safeguards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sdirk4 {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; chosen from the Jacobian scale when `None`.
    pub initial_step: Option<f64>,
    pub min_step: f64,
    pub max_steps: usize,
    /// Reject steps that drive any component below `-atol`.
    pub non_negative: bool,
}

impl Default for Sdirk4 {
    fn default() -> Self {
        Sdirk4 {
            rtol: 1e-9,
            atol: 1e-12,
            initial_step: None,
            min_step: 1e-18,
            max_steps: 1_000_000,
            non_negative: false,
        }
    }
}

/// Solution samples at the requested output times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

impl Sdirk4 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Sdirk4 {
            rtol,
            atol,
            ..Default::default()
        }
    }

    fn weights(&self, y: &[f64], z: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(z)
            .map(|(a, b)| self.atol + self.rtol * a.abs().max(b.abs()))
            .collect()
    }

    /// Integrates from `(t0, y0)` and records the state at each time in `outputs`
    /// (ascending, all >= `t0`).
    pub fn integrate<S: OdeSystem>(&self, sys: &S, t0: f64, y0: &[f64], outputs: &[f64]) -> Result<Trajectory> {
        let n = sys.dim();
        assert_eq!(y0.len(), n, "initial state has wrong dimension");
        let mut traj = Trajectory {
            times: Vec::with_capacity(outputs.len()),
            states: Vec::with_capacity(outputs.len()),
            accepted_steps: 0,
            rejected_steps: 0,
        };
        let mut t = t0;
        let mut y = y0.to_vec();
        let mut jac = DMatrix::<f64>::zeros(n, n);
        let mut h = match self.initial_step {
            Some(h) => h,
            None => {
                sys.jacobian(t, &y, &mut jac);
                let scale = jac.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let span = outputs.last().copied().unwrap_or(t0) - t0;
                if scale > 0.0 {
                    (1e-3 / scale).min(span.max(f64::MIN_POSITIVE))
                } else {
                    span.max(f64::MIN_POSITIVE) * 1e-3
                }
            }
        };

        let mut k: Vec<DVector<f64>> = vec![DVector::zeros(n); 5];
        let mut f_buf = vec![0.0; n];
        let mut stage_y = vec![0.0; n];

        for &t_out in outputs {
            if t_out < t {
                return Err(Error::Integration {
                    t,
                    reason: format!("output time {t_out} precedes current time"),
                });
            }
            while t < t_out {
                if traj.accepted_steps + traj.rejected_steps >= self.max_steps {
                    return Err(Error::Integration {
                        t,
                        reason: format!("exceeded {} steps", self.max_steps),
                    });
                }
                let remaining = t_out - t;
                let last = h >= remaining;
                let h_try = if last { remaining } else { h };
                if h_try < self.min_step && !last {
                    return Err(Error::Integration {
                        t,
                        reason: format!("step size {h_try:.3e} underflowed"),
                    });
                }

                sys.jacobian(t, &y, &mut jac);
                let w = DMatrix::<f64>::identity(n, n) - &jac * (h_try * GAMMA);
                let lu = w.lu();
                let mut ok = true;

                for i in 0..5 {
                    let mut base = DVector::from_column_slice(&y);
                    for (j, kj) in k.iter().enumerate().take(i) {
                        if A[i][j] != 0.0 {
                            base.axpy(h_try * A[i][j], kj, 1.0);
                        }
                    }
                    let ti = t + C[i] * h_try;
                    // predictor: explicit slope at the stage base
                    sys.rhs(ti, base.as_slice(), &mut f_buf);
                    let mut ki = DVector::from_column_slice(&f_buf);
                    let wts = self.weights(&y, base.as_slice());
                    let mut converged = false;
                    let mut prev_norm = f64::INFINITY;
                    for _iter in 0..12 {
                        for (s, (b, kv)) in stage_y.iter_mut().zip(base.iter().zip(ki.iter())) {
                            *s = b + h_try * GAMMA * kv;
                        }
                        sys.rhs(ti, &stage_y, &mut f_buf);
                        let resid = DVector::from_iterator(n, ki.iter().zip(&f_buf).map(|(a, b)| b - a));
                        let delta = match lu.solve(&resid) {
                            Some(d) => d,
                            None => break,
                        };
                        ki += &delta;
                        let norm = (delta
                            .iter()
                            .zip(&wts)
                            .map(|(d, w)| (h_try * d / w).powi(2))
                            .sum::<f64>()
                            / n as f64)
                            .sqrt();
                        if !norm.is_finite() || norm > 2.0 * prev_norm && _iter > 1 {
                            break;
                        }
                        if norm < 1e-3 {
                            converged = true;
                            break;
                        }
                        prev_norm = norm;
                    }
                    if !converged {
                        ok = false;
                        break;
                    }
                    k[i] = ki;
                }

                let mut accept = false;
                let mut factor = 0.25;
                if ok {
                    let mut y_new = DVector::from_column_slice(&y);
                    let mut err = DVector::<f64>::zeros(n);
                    for i in 0..5 {
                        y_new.axpy(h_try * A[4][i], &k[i], 1.0);
                        err.axpy(h_try * (A[4][i] - B_HAT[i]), &k[i], 1.0);
                    }
                    // filter the estimate through (I - h gamma J)^-1 so stiff, already
                    // damped components do not throttle the step
                    let err = lu.solve(&err).unwrap_or(err);
                    let wts = self.weights(&y, y_new.as_slice());
                    let err_norm = (err
                        .iter()
                        .zip(&wts)
                        .map(|(e, w)| (e / w).powi(2))
                        .sum::<f64>()
                        / n as f64)
                        .sqrt();
                    let negative = self.non_negative && y_new.iter().any(|v| *v < -self.atol);
                    if err_norm <= 1.0 && !negative && y_new.iter().all(|v| v.is_finite()) {
                        accept = true;
                        t = if last { t_out } else { t + h_try };
                        y.copy_from_slice(y_new.as_slice());
                        if self.non_negative {
                            y.iter_mut().for_each(|v| *v = v.max(0.0));
                        }
                        traj.accepted_steps += 1;
                        factor = (0.9 * err_norm.max(1e-10).powf(-0.25)).clamp(0.2, 5.0);
                    } else if negative {
                        factor = 0.5;
                    } else {
                        factor = (0.9 * err_norm.powf(-0.25)).clamp(0.1, 0.9);
                    }
                }
                if !accept {
                    traj.rejected_steps += 1;
                }
                // keep the controller's step when only clipped to hit an output time
                h = if accept && last { h.max(h_try * factor) } else { h_try * factor };
            }
            traj.times.push(t_out);
            traj.states.push(y.clone());
        }
        Ok(traj)
    }
}

/// Logarithmically spaced output times from `t_first` to `t_last`.
pub fn log_times(t_first: f64, t_last: f64, count: usize) -> Vec<f64> {
    assert!(t_first > 0.0 && t_last > t_first && count >= 2);
    let (a, b) = (t_first.ln(), t_last.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Evenly spaced output times in `(t0, t0 + duration]`.
pub fn linear_times(t0: f64, duration: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| t0 + duration * i as f64 / count as f64).collect()
}

//! Radial wavefunctions in the Coulomb approximation.
//!
//! The radial equation is solved in the scaled coordinate `x = sqrt(r)` with
//! `u(r) = r R(r) = x^(1/2) X(x)`, which turns it into
//!
//! ```text
//! X''(x) = [ (2l + 1/2)(2l + 3/2) / x^2 - 8 + 4 x^2 / n*^2 ] X(x)
//! ```
//!
//! for a pure Coulomb potential at the quantum-defect energy `-1 / (2 n*^2)` (atomic
//! units). The uniform x-grid puts most points near the core where the wavefunction
//! oscillates fastest. Integration runs inward with Numerov's method from well
//! outside the outer turning point and stops at the core radius or, inside the inner
//! turning point, where the irregular solution starts to take over. For integer
//! n* the result is the exact hydrogen wavefunction.

/// Grid spacing in x = sqrt(r / a0).
pub const STEP: f64 = 0.01;

/// A normalised radial wavefunction sampled on `x_k = k * STEP`, k = `first..first+len`.
#[derive(Debug, Clone)]
pub struct RadialWavefunction {
    first: usize,
    values: Vec<f64>,
}

impl RadialWavefunction {
    /// Solves for the level with effective quantum number `n_star` and orbital `l`.
    ///
    /// `core_radius` (Bohr radii) bounds the inward integration; pass 0 for hydrogen.
    pub fn coulomb(n_star: f64, l: u32, core_radius: f64) -> Self {
        let lf = l as f64;
        let centrifugal = (2.0 * lf + 0.5) * (2.0 * lf + 1.5);
        let inv_n2 = 1.0 / (n_star * n_star);
        let g = |k: usize| {
            let x = k as f64 * STEP;
            centrifugal / (x * x) - 8.0 + 4.0 * x * x * inv_n2
        };

        let r_out = 2.0 * n_star * (n_star + 15.0);
        let k_out = (r_out.sqrt() / STEP).ceil() as usize + 1;
        let k_floor = ((core_radius.max(0.0).sqrt() / STEP).ceil() as usize).max(1);

        let disc = 1.0 - lf * (lf + 1.0) * inv_n2;
        let r_inner_tp = if disc > 0.0 {
            n_star * n_star * (1.0 - disc.sqrt())
        } else {
            n_star * n_star
        };
        let k_inner_tp = (r_inner_tp.sqrt() / STEP) as usize;

        let h2 = STEP * STEP / 12.0;
        let mut rev = Vec::with_capacity(k_out);
        let g_out = g(k_out).max(0.0);
        rev.push(1e-10);
        rev.push(1e-10 * (1.0 + STEP * g_out.sqrt()));
        let mut k = k_out - 1;
        while k > k_floor {
            let n = rev.len();
            let (x_k, x_kp1) = (rev[n - 1], rev[n - 2]);
            let x_km1 = (2.0 * (1.0 + 5.0 * h2 * g(k)) * x_k - (1.0 - h2 * g(k + 1)) * x_kp1)
                / (1.0 - h2 * g(k - 1));
            if k - 1 < k_inner_tp && x_km1.abs() > x_k.abs() {
                break;
            }
            rev.push(x_km1);
            k -= 1;
        }
        let first = k_out + 1 - rev.len();
        rev.reverse();
        let mut wf = RadialWavefunction { first, values: rev };
        let norm = wf.moment(&wf, 1).sqrt();
        wf.values.iter_mut().for_each(|v| *v /= norm);
        wf
    }

    /// Smallest radius sampled (Bohr radii).
    pub fn inner_radius(&self) -> f64 {
        let x = self.first as f64 * STEP;
        x * x
    }

    pub fn outer_radius(&self) -> f64 {
        let x = (self.first + self.values.len() - 1) as f64 * STEP;
        x * x
    }

    /// `<self| r^(p-1) |other>` in the scaled variables: `2 int X1 X2 x^(2p) dx`.
    ///
    /// p = 1 gives the overlap, p = 2 the dipole radial integral.
    fn moment(&self, other: &RadialWavefunction, p: i32) -> f64 {
        let lo = self.first.max(other.first);
        let hi = (self.first + self.values.len()).min(other.first + other.values.len());
        if lo >= hi {
            return 0.0;
        }
        let a = &self.values[lo - self.first..hi - self.first];
        let b = &other.values[lo - other.first..hi - other.first];
        let sum: f64 = a
            .iter()
            .zip(b)
            .enumerate()
            .map(|(i, (u, v))| {
                let x = (lo + i) as f64 * STEP;
                u * v * x.powi(2 * p)
            })
            .sum();
        2.0 * sum * STEP
    }

    /// Radial dipole integral `int R1 R2 r^3 dr` (Bohr radii).
    pub fn radial_integral(&self, other: &RadialWavefunction) -> f64 {
        self.moment(other, 2)
    }

    /// Expectation value of r (Bohr radii).
    pub fn mean_radius(&self) -> f64 {
        self.moment(self, 2)
    }
}

use std::f64::consts::PI;

use crate::atomic::CONSTANTS;
use crate::error::{domain, Result};

/// Uniformly filled spherical cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudGeometry {
    /// Radius R (m).
    pub radius: f64,
}

impl Default for CloudGeometry {
    /// A 0.5 mm radius, i.e. a trap about 1 mm across.
    ///
    /// Cooperative rates depend steeply on this value through `kR`; it is the
    /// dominant sensitivity of the cascade model.
    fn default() -> Self {
        CloudGeometry { radius: 0.5e-3 }
    }
}

impl CloudGeometry {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return domain(format!("cloud radius must be positive, got {radius}"));
        }
        Ok(CloudGeometry { radius })
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3)
    }

    /// Cooperativity of emission at wavenumber `k` (1/m) from this cloud.
    pub fn cooperativity(&self, k: f64) -> f64 {
        cooperativity(k * self.radius)
    }
}

/// `sin x - x cos x` without cancellation for small `x`.
fn sin_minus_x_cos(x: f64) -> f64 {
    if x >= 1.0 {
        return x.sin() - x * x.cos();
    }
    // sum_k (-1)^(k+1) 2k x^(2k+1) / (2k+1)!
    let x2 = x * x;
    let mut term = x * x2 / 6.0; // x^3 / 3!
    let mut sum = 0.0;
    for k in 1..30u32 {
        let c = 2.0 * k as f64 * term;
        sum += c;
        if c.abs() < 1e-18 * sum.abs() {
            break;
        }
        let k2 = 2.0 * k as f64;
        term *= -x2 / ((k2 + 2.0) * (k2 + 3.0));
    }
    sum
}

/// Cooperativity of a uniform sphere, `9 (sin x - x cos x)^2 / x^6` with `x = kR`.
///
/// Equals 1 at `x = 0` and falls to 0 for `x >> 1`. Below `x = 1e-3` the series
/// `1 - x^2/5 + 3 x^4/175` is used.
pub fn cooperativity(kr: f64) -> f64 {
    let x = kr.abs();
    if x < 1e-3 {
        let x2 = x * x;
        return 1.0 - x2 / 5.0 + 3.0 * x2 * x2 / 175.0;
    }
    let s = sin_minus_x_cos(x) / (x * x * x);
    (9.0 * s * s).min(1.0)
}

/// Order-of-magnitude superradiant decay rate of `n_atoms` atoms in level `n`:
/// `4 N alpha^3 Ry / (3 n^5 hbar)` (1/s).
pub fn superradiance_estimate(n_atoms: f64, n: f64) -> Result<f64> {
    if !(n_atoms >= 1.0) || !(n >= 1.0) {
        return domain("need at least one atom and n >= 1");
    }
    Ok(4.0 * n_atoms / (3.0 * n.powi(5)) * CONSTANTS.alpha3_rydberg_rate())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits() {
        assert_eq!(cooperativity(0.0), 1.0);
        assert!(cooperativity(1e4) < 1e-10);
        for i in 0..2000 {
            let c = cooperativity(i as f64 * 0.01);
            assert!((0.0..=1.0).contains(&c));
        }
    }

    #[test]
    fn branches_join() {
        // the closed form is accurate to ~1e-13 at x = 0.3 and above
        for x in [1e-3f64, 0.3, 0.99, 1.0, 1.01] {
            let s = x * x * x;
            let direct = 9.0 * ((x.sin() - x * x.cos()) / s).powi(2);
            let tol = if x < 0.1 { 1e-8 } else { 1e-12 };
            assert!((cooperativity(x) - direct).abs() < tol, "{x}");
        }
        let x = 1e-3f64;
        let series = 1.0 - x * x / 5.0 + 3.0 * x.powi(4) / 175.0;
        assert!((cooperativity(x * (1.0 - 1e-12)) - series).abs() < 1e-15);
        assert!((cooperativity(x) - series).abs() < 1e-15);
    }

    #[test]
    fn estimate_scalings() {
        let big = superradiance_estimate(1e4, 50.0).unwrap();
        let one = superradiance_estimate(1.0, 50.0).unwrap();
        assert!((big / one - 1e4).abs() < 1e-9);
        let low = superradiance_estimate(1e4, 28.0).unwrap();
        assert!((low / big - (50.0f64 / 28.0).powi(5)).abs() < 1e-9);
        assert!(superradiance_estimate(0.0, 50.0).is_err());
    }

    #[test]
    fn volume() {
        let g = CloudGeometry::new(1.0).unwrap();
        assert!((g.volume() - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!(CloudGeometry::new(0.0).is_err());
    }
}

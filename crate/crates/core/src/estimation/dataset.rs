use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{domain, Result};
use crate::kinetics::{probe_count_rate, trap_loss_increase, DarkCompartment, DetectionGeometry, KineticsParams};

/// What a probe-scan sample measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Added trap loss rate Gamma(R3) (1/s).
    Loss,
    /// Probe-induced 420 nm counts per ground atom I3(R3) / N_g (1/s).
    Counts,
}

impl Observable {
    pub fn as_str(self) -> &'static str {
        match self {
            Observable::Loss => "loss",
            Observable::Counts => "counts",
        }
    }
}

impl std::str::FromStr for Observable {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "loss" => Ok(Observable::Loss),
            "counts" => Ok(Observable::Counts),
            other => Err(format!("unknown observable '{other}' (expected loss or counts)")),
        }
    }
}

/// Rates held fixed in a probe-scan fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams {
    /// Excitation rate R2 (1/s).
    pub r2: f64,
    /// Excited-state radiative rate A_r (1/s).
    pub a_r: f64,
    /// Mean radiative rate of other Rydberg states A_s (1/s).
    pub a_s: f64,
    /// Direct loss from the excited state Gamma_r (1/s), usually pinned to 0.
    pub gamma_r: f64,
    /// Zeeman exchange rate used when the dark fraction is fitted (1/s).
    pub exchange_rate: f64,
}

impl FixedParams {
    /// The 28D5/2 inputs.
    pub fn reference_28d() -> Self {
        let p = KineticsParams::reference_28d();
        FixedParams {
            r2: p.r2,
            a_r: p.a_r,
            a_s: p.a_s,
            gamma_r: 0.0,
            exchange_rate: 5e6,
        }
    }
}

/// One probe-scan sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Probe stimulated-emission rate R3 (1/s).
    pub r3: f64,
    pub value: f64,
    /// One-sigma uncertainty; `None` when the data carry none.
    pub sigma: Option<f64>,
}

/// Observable versus probe strength, with the rates held fixed in the fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeScanDataset {
    pub observable: Observable,
    pub fixed: FixedParams,
    pub samples: Vec<Sample>,
}

impl ProbeScanDataset {
    /// Checks the invariants: at least four samples, non-negative and not all equal
    /// R3, positive uncertainties where given.
    pub fn validate(&self) -> Result<()> {
        if self.samples.len() < 4 {
            return domain(format!("a probe scan needs at least 4 samples, got {}", self.samples.len()));
        }
        for (i, s) in self.samples.iter().enumerate() {
            if !(s.r3 >= 0.0) || !s.r3.is_finite() || !s.value.is_finite() {
                return domain(format!("sample {i}: R3 must be finite and non-negative"));
            }
            if let Some(sig) = s.sigma {
                if !(sig > 0.0) || !sig.is_finite() {
                    return domain(format!("sample {i}: uncertainty must be positive"));
                }
            }
        }
        let first = self.samples[0].r3;
        if self.samples.iter().all(|s| s.r3 == first) {
            return domain("degenerate design: all R3 values are equal");
        }
        let f = &self.fixed;
        if !(f.r2 > 0.0) || !(f.a_r >= 0.0) || !(f.a_s > 0.0) || !(f.gamma_r >= 0.0) || !(f.exchange_rate >= 0.0) {
            return domain("fixed parameters need R2, A_s > 0 and A_r, Gamma_r, kappa >= 0");
        }
        Ok(())
    }

    /// True when every sample carries an uncertainty.
    pub fn has_uncertainties(&self) -> bool {
        self.samples.iter().all(|s| s.sigma.is_some())
    }
}

/// Parameters that generate a synthetic probe scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanTruth {
    pub fixed: FixedParams,
    /// Transfer rate gamma (1/s).
    pub gamma: f64,
    /// Loss rate of other Rydberg states Gamma_s (1/s).
    pub gamma_s: f64,
    /// Dark fraction f_d.
    pub dark_fraction: f64,
    pub geometry: DetectionGeometry,
}

impl ScanTruth {
    pub fn kinetics(&self, r3: f64) -> KineticsParams {
        KineticsParams {
            r2: self.fixed.r2,
            r3,
            a_r: self.fixed.a_r,
            a_s: self.fixed.a_s,
            gamma: self.gamma,
            gamma_r: self.fixed.gamma_r,
            gamma_s: self.gamma_s,
            load_rate: 0.0,
            gamma_0: 1.0,
            dark: DarkCompartment {
                fraction: self.dark_fraction,
                exchange_rate: self.fixed.exchange_rate,
            },
        }
    }

    /// Noise-free observable at probe rate `r3`.
    pub fn model(&self, observable: Observable, r3: f64) -> Result<f64> {
        let p = self.kinetics(r3);
        match observable {
            Observable::Loss => Ok(trap_loss_increase(&p)?.exact),
            Observable::Counts => probe_count_rate(&p, &self.geometry),
        }
    }
}

/// Noise added by [`synthesize_dataset`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    None,
    /// Normal noise with standard deviation `relative * |value|`.
    Gaussian { relative: f64 },
    /// Counting noise: `value * exposure` events are drawn from a Poisson
    /// distribution and divided by `exposure` again.
    Poisson { exposure: f64 },
}

/// Synthetic probe scan on `grid`, deterministic for a given `seed`.
///
/// Noise-free samples carry no uncertainty; noisy ones carry the generating sigma
/// (for Poisson noise, the square root of the drawn count, at least one).
pub fn synthesize_dataset(
    truth: &ScanTruth,
    observable: Observable,
    grid: &[f64],
    noise: NoiseModel,
    seed: u64,
) -> Result<ProbeScanDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(grid.len());
    for &r3 in grid {
        let mean = truth.model(observable, r3)?;
        let sample = match noise {
            NoiseModel::None => Sample {
                r3,
                value: mean,
                sigma: None,
            },
            NoiseModel::Gaussian { relative } => {
                if !(relative > 0.0) {
                    return domain("relative noise level must be positive");
                }
                let sigma = relative * mean.abs();
                let value = if sigma > 0.0 {
                    Normal::new(mean, sigma).map_err(|e| crate::Error::Domain(e.to_string()))?.sample(&mut rng)
                } else {
                    mean
                };
                Sample {
                    r3,
                    value,
                    sigma: Some(sigma.max(f64::MIN_POSITIVE)),
                }
            }
            NoiseModel::Poisson { exposure } => {
                if !(exposure > 0.0) {
                    return domain("exposure must be positive");
                }
                let lambda = mean * exposure;
                let k = if lambda > 0.0 {
                    Poisson::new(lambda).map_err(|e| crate::Error::Domain(e.to_string()))?.sample(&mut rng)
                } else {
                    0.0
                };
                Sample {
                    r3,
                    value: k / exposure,
                    sigma: Some(k.max(1.0).sqrt() / exposure),
                }
            }
        };
        samples.push(sample);
    }
    let d = ProbeScanDataset {
        observable,
        fixed: truth.fixed,
        samples,
    };
    d.validate()?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth() -> ScanTruth {
        ScanTruth {
            fixed: FixedParams::reference_28d(),
            gamma: 1.3e5,
            gamma_s: 265.0,
            dark_fraction: 0.0,
            geometry: DetectionGeometry::default(),
        }
    }

    fn grid() -> Vec<f64> {
        (0..12).map(|i| 2e4 * i as f64 * i as f64).collect()
    }

    #[test]
    fn noiseless_equals_model() {
        let t = truth();
        let d = synthesize_dataset(&t, Observable::Loss, &grid(), NoiseModel::None, 1).unwrap();
        for s in &d.samples {
            assert_eq!(s.value, t.model(Observable::Loss, s.r3).unwrap());
        }
    }

    #[test]
    fn seeded_determinism() {
        let n = NoiseModel::Gaussian { relative: 0.05 };
        let a = synthesize_dataset(&truth(), Observable::Counts, &grid(), n, 9).unwrap();
        let b = synthesize_dataset(&truth(), Observable::Counts, &grid(), n, 9).unwrap();
        let c = synthesize_dataset(&truth(), Observable::Counts, &grid(), n, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn poisson_spread() {
        // relative spread of a Poisson variable is 1 / sqrt(mean)
        let t = truth();
        let r3 = 3e5;
        let mean = t.model(Observable::Counts, r3).unwrap();
        let exposure = 1e4 / mean;
        let draws: Vec<f64> = (0..1000)
            .map(|seed| {
                let d = synthesize_dataset(&t, Observable::Counts, &[r3, 0.0, 1.0, 2.0], NoiseModel::Poisson { exposure }, seed)
                    .unwrap();
                d.samples[0].value * exposure
            })
            .collect();
        let m = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        let ratio = (var.sqrt() / m) * m.sqrt();
        assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn invariants_enforced() {
        let t = truth();
        assert!(synthesize_dataset(&t, Observable::Loss, &[1.0, 2.0, 3.0], NoiseModel::None, 0).is_err());
        assert!(synthesize_dataset(&t, Observable::Loss, &[5.0; 6], NoiseModel::None, 0).is_err());
        assert!(synthesize_dataset(&t, Observable::Loss, &[-1.0, 0.0, 1.0, 2.0], NoiseModel::None, 0).is_err());
    }
}

//! Parameter inference from probe scans, and back-of-envelope estimates.
//!
//! A probe scan records the trap loss or the probe-induced count rate as the
//! stimulated-emission rate R3 is stepped. Both curves saturate once R3 exceeds the
//! natural outflow `A_r + gamma` of the excited state, so the position of the knee
//! measures the transfer rate gamma.
//!
//! ```
//! use rydyn::estimation::*;
//! use rydyn::kinetics::DetectionGeometry;
//!
//! let truth = ScanTruth {
//!     fixed: FixedParams::reference_28d(),
//!     gamma: 1.3e5,
//!     gamma_s: 265.0,
//!     dark_fraction: 0.0,
//!     geometry: DetectionGeometry::default(),
//! };
//! let grid: Vec<f64> = (0..10).map(|i| 5e4 * i as f64).collect();
//! let data = synthesize_dataset(&truth, Observable::Loss, &grid, NoiseModel::None, 7)?;
//! let fit = fit_loss_curve(&data)?;
//! assert!((fit.gamma() / 1.3e5 - 1.0).abs() < 1e-6);
//! # Ok::<(), rydyn::Error>(())
//! ```

mod dataset;
mod estimates;
mod fit;

pub use dataset::{synthesize_dataset, FixedParams, NoiseModel, Observable, ProbeScanDataset, Sample, ScanTruth};
pub use estimates::{
    boltzmann_suppression, c6_from_ghz_um6, capture_rate, electron_steady, CaptureParams, VelocityConvention,
};
pub use fit::{fit_count_curve, fit_loss_curve, fit_probe_scan, FitMode, FitOptions, FitResult};

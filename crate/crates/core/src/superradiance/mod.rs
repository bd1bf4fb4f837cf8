//! Cooperative (Dicke) emission cascade among Rydberg levels.
//!
//! Atoms pumped into one level radiate to dipole-coupled lower levels at the pair
//! rate `Gamma_el N_e (N_l + 1)`, where `Gamma_el = C_el A_el` and `C_el` is the
//! cooperativity of a uniform spherical cloud. Black-body radiation adds linear
//! transfer in both directions. Everything that leaves the level basis, whether by
//! decay to low-lying levels, by transfer to distant Rydberg levels or by
//! photoionization, ends in a sink.
//!
//! ```
//! use rydyn::superradiance::{cascade_rhs, LevelPopulations, RateMatrix};
//!
//! // N inverted atoms in a small cloud start radiating at Gamma per atom
//! let rates = RateMatrix::two_level(2.0)?;
//! let start = LevelPopulations { levels: vec![0.0, 100.0], sink: 0.0 };
//! let d = cascade_rhs(&start, &rates, 0.0)?;
//! assert_eq!(d.levels[1], -200.0);
//! # Ok::<(), rydyn::Error>(())
//! ```

mod basis;
mod cascade;
mod cooperativity;
mod coupled;
mod rates;
mod scenario;

pub use basis::{BasisWindow, LevelBasis};
pub use cascade::{
    cascade_rhs, effective_transfer_rate, evolve, evolve_at, linear_steady_state, steady_state_pumped,
    steady_state_pumped_with, CascadeSeries, LevelPopulations, SteadyStateOptions, TransferRate,
};
pub use cooperativity::{cooperativity, superradiance_estimate, CloudGeometry};
pub use coupled::{self_consistent_steady_state, CoupledState, TrapLoading};
pub use rates::{build_rates, Edge, RateMatrix, RateOptions, SinkRates};
pub use scenario::{converged_transfer, transfer_at_window, BasisConvergence, TransferEstimate, TrapConditions};

//! Population dynamics of weakly excited ultracold Rydberg gases.
//!
//! The crate is organised along the physics:
//!
//! - [`atomic`]: rubidium level structure from quantum defects, dipole matrix
//!   elements from Numerov integration, spontaneous, black-body and ionization rates.
//! - [`kinetics`]: the three-state ground / excited-Rydberg / other-Rydberg rate
//!   model of a magneto-optical trap under continuous two-photon excitation, with
//!   closed-form steady states, an ODE oracle, trap-loss and photon-count observables.
//! - [`superradiance`]: a multi-level Dicke cascade with geometric cooperativity
//!   that predicts the Rydberg-to-Rydberg transfer rate.
//! - [`estimation`]: least-squares fits of probe-intensity scans and
//!   order-of-magnitude estimates (collision capture, free electrons).
//! - [`reference`]: published reference values the simulations are compared against.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod error;
pub mod estimation;
pub mod kinetics;
pub mod ode;
pub mod reference;
pub mod superradiance;

pub use error::{Error, Result};

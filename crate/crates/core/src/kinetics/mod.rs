//! Ground / excited-Rydberg / other-Rydberg trap kinetics.
//!
//! Ground atoms are loaded into the trap at rate `L` and lost at `Gamma_0`. The
//! excitation lasers promote them to the excited Rydberg state at `R2`; from there
//! atoms decay back (`A_r`), are stimulated back by the probe (`R3`), are lost
//! directly (`Gamma_r`), or transfer to other Rydberg states (`gamma`). Those decay
//! back at `A_s` or are lost at `Gamma_s`.
//!
//! ```
//! use rydyn::kinetics::{steady_state, trap_loss_increase, KineticsParams};
//!
//! let p = KineticsParams::reference_28d();
//! let ss = steady_state(&p)?;
//! let loss = trap_loss_increase(&p)?;
//! assert!((ss.n_g - p.load_rate / (p.gamma_0 + loss.exact)).abs() < 1e-6 * ss.n_g);
//! # Ok::<(), rydyn::Error>(())
//! ```

mod excitation;
mod model;
mod scan;
mod transient;

pub use excitation::{lorentzian, two_photon_rate, ExcitationParams};
pub use model::{
    cascade_count_rate, loss_from_fluorescence, probe_count_rate, steady_state, trap_loss_increase, DarkCompartment,
    DetectionGeometry, KineticsParams, LossRate, SteadyState,
};
pub use scan::{scan, ScanPoint};
pub use transient::{transient, Transient};

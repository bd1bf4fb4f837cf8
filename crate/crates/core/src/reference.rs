//! Published measurements and calculations for the four benchmark levels.
//!
//! These are immutable lookup values. Every row carries a [`Citation`] tag that
//! reports copy into their output so compared numbers stay traceable.

/// Short tag naming the table a value comes from.
pub type Citation = &'static str;

pub const TRANSFER_SUMMARY: Citation = "ref:transfer-summary";
pub const TRANSFER_COMPARISON: Citation = "ref:transfer-comparison";
pub const IONIZATION_COMPARISON: Citation = "ref:ionization-comparison";

/// The benchmark levels, in the order used by every table below.
pub const STATES: [&str; 4] = ["28D5/2", "43D5/2", "58D5/2", "30S1/2"];

/// Measured transfer rates and the rate inputs used in the fits (1/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub state: &'static str,
    pub gamma_counts: f64,
    pub gamma_loss: f64,
    pub a_bb: f64,
    pub a_r: f64,
    pub a_s: f64,
    pub gamma_s: f64,
}

pub const SUMMARY: [SummaryRow; 4] = [
    SummaryRow {
        state: "28D5/2",
        gamma_counts: 1.2e5,
        gamma_loss: 1.3e5,
        a_bb: 2.6e4,
        a_r: 4.1e4,
        a_s: 3.1e4,
        gamma_s: 265.0,
    },
    SummaryRow {
        state: "43D5/2",
        gamma_counts: 7.4e4,
        gamma_loss: 7.2e4,
        a_bb: 1.1e4,
        a_r: 1.1e4,
        a_s: 2.0e4,
        gamma_s: 602.0,
    },
    SummaryRow {
        state: "58D5/2",
        gamma_counts: 2.6e4,
        gamma_loss: 2.0e4,
        a_bb: 6.1e3,
        a_r: 4.8e3,
        a_s: 7.4e3,
        gamma_s: 433.0,
    },
    SummaryRow {
        state: "30S1/2",
        gamma_counts: 3.9e5,
        gamma_loss: 5.0e5,
        a_bb: 2.3e4,
        a_r: 4.4e4,
        a_s: 3.3e4,
        gamma_s: 83.0,
    },
];

/// Cascade-model prediction next to the measured transfer rate (1/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub state: &'static str,
    pub gamma_calculated: f64,
    pub gamma_measured: f64,
}

pub const COMPARISON: [ComparisonRow; 4] = [
    ComparisonRow {
        state: "28D5/2",
        gamma_calculated: 1.7e5,
        gamma_measured: 1.3e5,
    },
    ComparisonRow {
        state: "43D5/2",
        gamma_calculated: 2.4e5,
        gamma_measured: 7.4e4,
    },
    ComparisonRow {
        state: "58D5/2",
        gamma_calculated: 1.2e5,
        gamma_measured: 2.0e4,
    },
    ComparisonRow {
        state: "30S1/2",
        gamma_calculated: 2.2e5,
        gamma_measured: 5.0e5,
    },
];

/// Trap loss of the other Rydberg levels, as inferred and as expected from
/// black-body ionization of the pumped level (1/s, 300 K).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonizationRow {
    pub state: &'static str,
    pub gamma_s_calculated: f64,
    pub gamma_bbi: f64,
}

pub const IONIZATION: [IonizationRow; 4] = [
    IonizationRow {
        state: "28D5/2",
        gamma_s_calculated: 212.0,
        gamma_bbi: 322.0,
    },
    IonizationRow {
        state: "43D5/2",
        gamma_s_calculated: 470.0,
        gamma_bbi: 720.0,
    },
    IonizationRow {
        state: "58D5/2",
        gamma_s_calculated: 329.0,
        gamma_bbi: 457.0,
    },
    IonizationRow {
        state: "30S1/2",
        gamma_s_calculated: 77.0,
        gamma_bbi: 265.0,
    },
];

/// Single-line quotes used as checks elsewhere.
pub mod quoted {
    /// Peak excitation rate into 28D (1/s).
    pub const R2_PEAK: f64 = 110.0;
    /// Expected cascade count rate for 28D (counts/s).
    pub const CASCADE_COUNTS: f64 = 18_000.0;
    /// Observed share of the expected cascade count rate.
    pub const CASCADE_OBSERVED_SHARE: f64 = 0.55;
    /// Collision capture rate at 1e7 cm^-3 for n = 43 (1/s).
    pub const CAPTURE_RATE: f64 = 200.0;
    /// Superradiant rate for 1e4 atoms at n = 50 (1/s).
    pub const SUPERRADIANT_N50: f64 = 3e5;
    /// Peak trap loss on the two-photon resonance (1/s).
    pub const PEAK_LOSS: f64 = 0.2;
    /// Nearest-neighbour wavelengths (m).
    pub const WAVELENGTH_30S_29P: f64 = 0.17e-2;
    pub const WAVELENGTH_58D_59P: f64 = 2.8e-2;
}

pub fn summary(state: &str) -> Option<&'static SummaryRow> {
    SUMMARY.iter().find(|r| r.state == state)
}

pub fn comparison(state: &str) -> Option<&'static ComparisonRow> {
    COMPARISON.iter().find(|r| r.state == state)
}

pub fn ionization(state: &str) -> Option<&'static IonizationRow> {
    IONIZATION.iter().find(|r| r.state == state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::Atom;

    #[test]
    fn tables_share_state_order() {
        for (i, s) in STATES.iter().enumerate() {
            assert_eq!(SUMMARY[i].state, *s);
            assert_eq!(COMPARISON[i].state, *s);
            assert_eq!(IONIZATION[i].state, *s);
        }
    }

    #[test]
    fn ionization_matches_atomic_data() {
        let rb = Atom::rubidium87();
        for row in IONIZATION {
            let level = rb.parse_level(row.state).unwrap();
            assert_eq!(rb.ionization_rate(&level, 300.0), row.gamma_bbi);
        }
    }
}

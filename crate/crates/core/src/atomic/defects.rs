//! Quantum-defect tables and the plain-text atomic data format.
//!
//! The bundled rubidium-87 table lives in `data/rb87.dat` and is compiled into the
//! crate; [`QuantumDefectTable::parse`] reads the same format from any string, so the
//! constants can be swapped without touching code.

use std::collections::BTreeMap;

use crate::atomic::level::{parse_l_letter, parse_series, StateLabel};
use crate::error::{Error, Result};

const RB87_DATA: &str = include_str!("../../data/rb87.dat");

/// Leading defect and its n-dependence for one (l, j) series.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectSeries {
    pub delta0: f64,
    pub delta2: f64,
    pub source: String,
}

impl DefectSeries {
    /// delta(n) = delta0 + delta2 / (n - delta0)^2
    pub fn at(&self, n: u32) -> f64 {
        let m = n as f64 - self.delta0;
        self.delta0 + self.delta2 / (m * m)
    }
}

/// Tabulated black-body ionization rate for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct IonizationEntry {
    pub state: StateLabel,
    pub rate: f64,
    pub temperature: f64,
    pub source: String,
}

/// Per-species spectroscopic data: quantum defects, lowest physical n per series,
/// core size and tabulated black-body ionization rates.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumDefectTable {
    pub species: String,
    /// Nuclear-plus-core mass (kg); `None` for an infinitely heavy core.
    pub core_mass: Option<f64>,
    /// Inner cut-off for radial integration (Bohr radii).
    pub core_radius: f64,
    defects: BTreeMap<(u32, u32), DefectSeries>,
    lowest_n: BTreeMap<u32, u32>,
    ionization: Vec<IonizationEntry>,
}

/// Largest orbital momentum that may carry a non-zero defect.
pub const MAX_PENETRATING_L: u32 = 3;

impl QuantumDefectTable {
    /// The bundled rubidium-87 table.
    pub fn rubidium87() -> Self {
        Self::parse(RB87_DATA).expect("bundled rubidium data parses")
    }

    /// A hydrogen-like table: every defect zero, infinite core mass, no core.
    pub fn hydrogenic() -> Self {
        QuantumDefectTable {
            species: "H(inf)".to_string(),
            core_mass: None,
            core_radius: 0.0,
            defects: BTreeMap::new(),
            lowest_n: BTreeMap::new(),
            ionization: Vec::new(),
        }
    }

    /// Copy of this table with every quantum defect set to zero, keeping the rest.
    pub fn without_defects(&self) -> Self {
        let mut t = self.clone();
        t.defects.clear();
        t
    }

    /// Parses the plain-text record format described in `data/rb87.dat`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = QuantumDefectTable::hydrogenic();
        table.species.clear();
        let u = 1.660_539_066_60e-27;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: &str| Error::Data {
                line: line_no,
                reason: format!("{reason}: `{line}`"),
            };
            let tok: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| err("bad number"));
            match tok[0] {
                "species" if tok.len() == 5 => {
                    table.species = tok[1].to_string();
                    table.core_mass = Some(num(tok[2])? * u);
                    table.core_radius = num(tok[3])?;
                }
                "lowest" if tok.len() == 4 => {
                    let l = parse_l_letter(tok[1]).ok_or_else(|| err("bad orbital letter"))?;
                    let n = tok[2].parse::<u32>().map_err(|_| err("bad n"))?;
                    table.lowest_n.insert(l, n);
                }
                "defect" if tok.len() == 5 => {
                    let (l, two_j) = parse_series(tok[1]).ok_or_else(|| err("bad series"))?;
                    if l > MAX_PENETRATING_L {
                        return Err(err("defects are only tabulated for l <= 3"));
                    }
                    table.defects.insert(
                        (l, two_j),
                        DefectSeries {
                            delta0: num(tok[2])?,
                            delta2: num(tok[3])?,
                            source: tok[4].to_string(),
                        },
                    );
                }
                "bbi" if tok.len() == 5 => {
                    let state: StateLabel = tok[1].parse().map_err(|_| err("bad state label"))?;
                    table.ionization.push(IonizationEntry {
                        state,
                        rate: num(tok[2])?,
                        temperature: num(tok[3])?,
                        source: tok[4].to_string(),
                    });
                }
                _ => return Err(err("unrecognised record")),
            }
        }
        if table.species.is_empty() {
            return Err(Error::Data {
                line: 0,
                reason: "missing species record".into(),
            });
        }
        Ok(table)
    }

    /// Quantum defect of the (n, l, j) level. Zero for l > 3 and for untabulated series.
    pub fn defect(&self, n: u32, l: u32, two_j: u32) -> f64 {
        if l > MAX_PENETRATING_L {
            return 0.0;
        }
        self.defects.get(&(l, two_j)).map_or(0.0, |s| s.at(n))
    }

    pub fn series(&self, l: u32, two_j: u32) -> Option<&DefectSeries> {
        self.defects.get(&(l, two_j))
    }

    /// Lowest physical principal quantum number of the l series.
    pub fn lowest_n(&self, l: u32) -> u32 {
        self.lowest_n.get(&l).copied().unwrap_or(l + 1).max(l + 1)
    }

    pub fn ionization_entries(&self) -> &[IonizationEntry] {
        &self.ionization
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_covers_required_series() {
        let t = QuantumDefectTable::rubidium87();
        for (l, tj) in [(0, 1), (1, 1), (1, 3), (2, 3), (2, 5), (3, 5), (3, 7)] {
            assert!(t.series(l, tj).is_some(), "missing l={l} 2j={tj}");
        }
        assert_eq!(t.defect(40, 4, 7), 0.0);
        assert_eq!(t.defect(40, 5, 11), 0.0);
        assert_eq!(t.ionization_entries().len(), 4);
    }

    #[test]
    fn defects_decrease_with_l() {
        let t = QuantumDefectTable::rubidium87();
        let d = |l: u32| t.series(l, 2 * l + 1).unwrap().delta0;
        assert!(d(0) > d(1) && d(1) > d(2) && d(2) > d(3) && d(3) > 0.0);
    }

    #[test]
    fn rejects_malformed_records() {
        let bad = "species X 1.0 1.0 src\ndefect Q1/2 1 2 src\n";
        match QuantumDefectTable::parse(bad) {
            Err(Error::Data { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(QuantumDefectTable::parse("defect S1/2 1 0 x\n").is_err());
    }
}

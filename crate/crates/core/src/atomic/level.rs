use std::fmt;
use std::str::FromStr;

/// Spectroscopic letters for l = 0, 1, 2, ...
const L_LETTERS: &[u8] = b"SPDFGHIKLMNOQRTUV";

pub(crate) fn parse_l_letter(s: &str) -> Option<u32> {
    let mut chars = s.chars();
    let c = chars.next()?.to_ascii_uppercase();
    if chars.next().is_some() {
        return None;
    }
    L_LETTERS.iter().position(|&b| b as char == c).map(|p| p as u32)
}

pub(crate) fn l_letter(l: u32) -> char {
    L_LETTERS.get(l as usize).map_or('?', |&b| b as char)
}

/// Parses a series tag such as `D5/2` into (l, 2j).
pub(crate) fn parse_series(s: &str) -> Option<(u32, u32)> {
    let l = parse_l_letter(s.get(..1)?)?;
    let rest = s.get(1..)?;
    let two_j = rest.strip_suffix("/2")?.parse::<u32>().ok()?;
    Some((l, two_j))
}

/// Quantum numbers (n, l, j) of a fine-structure level, with j stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateLabel {
    pub n: u32,
    pub l: u32,
    pub two_j: u32,
}

impl StateLabel {
    pub const fn new(n: u32, l: u32, two_j: u32) -> Self {
        StateLabel { n, l, two_j }
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Statistical weight 2j + 1.
    pub fn degeneracy(&self) -> f64 {
        (self.two_j + 1) as f64
    }

    /// Whether j is one of l +/- 1/2 and l < n.
    pub fn is_well_formed(&self) -> bool {
        self.l < self.n
            && self.two_j % 2 == 1
            && (self.two_j + 1 == 2 * self.l || self.two_j == 2 * self.l + 1)
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}/2", self.n, l_letter(self.l), self.two_j)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseStateError(pub String);

impl fmt::Display for ParseStateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse state label `{}` (expected e.g. 28D5/2)", self.0)
    }
}

impl std::error::Error for ParseStateError {}

impl FromStr for StateLabel {
    type Err = ParseStateError;

    /// Accepts `28D5/2`, `30S1/2`, and the short forms `28D` (taken as j = l + 1/2)
    /// and `30S`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseStateError(s.to_string());
        let s_trim = s.trim();
        let digits = s_trim.chars().take_while(|c| c.is_ascii_digit()).count();
        let n: u32 = s_trim[..digits].parse().map_err(|_| bad())?;
        let rest = &s_trim[digits..];
        let label = if rest.len() == 1 {
            let l = parse_l_letter(rest).ok_or_else(bad)?;
            StateLabel::new(n, l, 2 * l + 1)
        } else {
            let (l, two_j) = parse_series(rest).ok_or_else(bad)?;
            StateLabel::new(n, l, two_j)
        };
        if label.is_well_formed() {
            Ok(label)
        } else {
            Err(bad())
        }
    }
}

/// A bound level with its quantum-defect energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RydbergLevel {
    pub state: StateLabel,
    /// Effective principal quantum number n* = n - delta.
    pub n_star: f64,
    /// Binding energy -Ry / n*^2 (J).
    pub energy: f64,
}

impl RydbergLevel {
    pub fn n(&self) -> u32 {
        self.state.n
    }
    pub fn l(&self) -> u32 {
        self.state.l
    }
    pub fn two_j(&self) -> u32 {
        self.state.two_j
    }
    pub fn degeneracy(&self) -> f64 {
        self.state.degeneracy()
    }
}

impl fmt::Display for RydbergLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.state.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for s in ["28D5/2", "30S1/2", "59P3/2", "27F7/2", "40G9/2"] {
            let l: StateLabel = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
        }
        assert_eq!("28D".parse::<StateLabel>().unwrap(), StateLabel::new(28, 2, 5));
        assert_eq!("30s".parse::<StateLabel>().unwrap(), StateLabel::new(30, 0, 1));
    }

    #[test]
    fn rejects_bad_labels() {
        for s in ["D5/2", "28D9/2", "2F5/2", "28X1/2", "28S3/2", ""] {
            assert!(s.parse::<StateLabel>().is_err(), "{s}");
        }
    }
}

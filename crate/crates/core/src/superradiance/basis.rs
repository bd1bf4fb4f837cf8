use std::collections::HashMap;

use crate::atomic::{Atom, RydbergLevel, StateLabel, TERMINAL_N};
use crate::error::{domain, Result};

/// Which levels around the pumped state take part in the cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisWindow {
    /// Largest |n' - n| kept.
    pub n_half_width: u32,
    /// Largest orbital angular momentum kept.
    pub l_max: u32,
}

impl Default for BasisWindow {
    fn default() -> Self {
        BasisWindow {
            n_half_width: 5,
            l_max: 4,
        }
    }
}

/// Energy-ordered cascade levels. Everything outside the basis is lumped into a
/// single sink.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelBasis {
    levels: Vec<RydbergLevel>,
    pumped: usize,
    index: HashMap<StateLabel, usize>,
}

impl LevelBasis {
    /// All bound levels with |n' - n| within the window, n' above the terminal
    /// range, l' <= l_max and either j'.
    pub fn around(atom: &Atom, pumped: &RydbergLevel, window: BasisWindow) -> Result<Self> {
        let n = pumped.n();
        let lo = n.saturating_sub(window.n_half_width).max(TERMINAL_N + 1);
        let hi = n + window.n_half_width;
        let mut levels = Vec::new();
        for np in lo..=hi {
            for l in 0..=window.l_max.min(np - 1) {
                for two_j in [(2 * l).saturating_sub(1), 2 * l + 1] {
                    if two_j == 0 {
                        continue;
                    }
                    if let Ok(level) = atom.level(np, l, two_j) {
                        levels.push(level);
                    }
                }
            }
        }
        if !levels.iter().any(|l| l.state == pumped.state) {
            levels.push(*pumped);
        }
        Self::from_levels(levels, pumped.state)
    }

    /// Basis from an explicit level list.
    pub fn from_levels(mut levels: Vec<RydbergLevel>, pumped: StateLabel) -> Result<Self> {
        if levels.is_empty() {
            return domain("cascade basis is empty");
        }
        levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        levels.dedup_by_key(|l| l.state);
        let index: HashMap<_, _> = levels.iter().enumerate().map(|(i, l)| (l.state, i)).collect();
        let Some(&p) = index.get(&pumped) else {
            return domain(format!("pumped level {pumped} is not in the basis"));
        };
        Ok(LevelBasis {
            levels,
            pumped: p,
            index,
        })
    }

    pub fn levels(&self) -> &[RydbergLevel] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Index of the pumped level.
    pub fn pumped(&self) -> usize {
        self.pumped
    }

    pub fn index_of(&self, state: &StateLabel) -> Option<usize> {
        self.index.get(state).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_window_around_28d() {
        let rb = Atom::rubidium87();
        let r = rb.parse_level("28D5/2").unwrap();
        let b = LevelBasis::around(&rb, &r, BasisWindow::default()).unwrap();
        // 11 n values, S has one j, P..G two
        assert_eq!(b.len(), 11 * 9);
        assert_eq!(b.levels()[b.pumped()].state, r.state);
        assert!(b.levels().windows(2).all(|w| w[0].energy <= w[1].energy));
    }

    #[test]
    fn window_clipped_above_terminal_levels() {
        let rb = Atom::rubidium87();
        let r = rb.parse_level("15S1/2").unwrap();
        let b = LevelBasis::around(&rb, &r, BasisWindow::default()).unwrap();
        assert!(b.levels().iter().all(|l| l.n() > TERMINAL_N));
    }

    #[test]
    fn pumped_level_required() {
        let rb = Atom::rubidium87();
        let a = rb.parse_level("28D5/2").unwrap();
        let b = rb.parse_level("29P3/2").unwrap();
        assert!(LevelBasis::from_levels(vec![a], b.state).is_err());
        assert!(LevelBasis::from_levels(vec![], a.state).is_err());
    }
}

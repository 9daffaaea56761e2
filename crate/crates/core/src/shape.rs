//! Problem geometry: mode count, per-mode level count, measured pairs, and
//! the N-inary codec between occupation patterns and flat indices.
//!
//! Mode 0 is the most-significant N-inary digit, so lexicographic order on
//! patterns coincides with numeric order on flat indices. Modes are numbered
//! from 0 everywhere.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// An unordered coincidence measurement of two distinct modes, stored ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModePair {
    pub first: usize,
    pub second: usize,
}

impl ModePair {
    pub fn new(first: usize, second: usize) -> Result<Self> {
        if first >= second {
            return Err(Error::InvalidShape(format!(
                "pair ({first}, {second}) must be strictly increasing"
            )));
        }
        Ok(Self { first, second })
    }
}

/// The index space of joint photon-count outcomes: `modes` output modes,
/// each resolving `levels` distinct counts (0 through `levels - 1`), plus
/// the list of mode pairs whose coincidence statistics are measured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemShape {
    modes: usize,
    levels: usize,
    pairs: Vec<ModePair>,
    /// place[m] = levels^(modes - 1 - m), the digit weight of mode m.
    place: Vec<u64>,
}

impl ProblemShape {
    /// Validates and builds a shape. The full index space must fit in `u64`
    /// (dimension at most 2^64), every pair must name two distinct in-range
    /// modes, and pairs must be distinct.
    pub fn new(modes: usize, levels: usize, pairs: Vec<ModePair>) -> Result<Self> {
        if modes < 1 {
            return Err(Error::InvalidShape("modes must be at least 1".into()));
        }
        if levels < 2 {
            return Err(Error::InvalidShape("levels must be at least 2".into()));
        }
        let dimension = (levels as u128)
            .checked_pow(modes as u32)
            .filter(|&d| d <= (1u128 << 64))
            .ok_or_else(|| {
                Error::InvalidShape(format!(
                    "index space {levels}^{modes} does not fit in 64-bit indices"
                ))
            })?;
        let _ = dimension;
        for pair in &pairs {
            if pair.first >= pair.second || pair.second >= modes {
                return Err(Error::InvalidShape(format!(
                    "pair ({}, {}) out of range for {} modes",
                    pair.first, pair.second, modes
                )));
            }
        }
        let mut seen = pairs.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidShape("duplicate mode pair".into()));
        }
        let mut place = vec![1u64; modes];
        for m in (0..modes.saturating_sub(1)).rev() {
            place[m] = place[m + 1].saturating_mul(levels as u64);
        }
        Ok(Self { modes, levels, pairs, place })
    }

    /// The nearest-neighbor chain (0,1), (1,2), ..., (M-2, M-1).
    pub fn chain(modes: usize, levels: usize) -> Result<Self> {
        let pairs = (0..modes.saturating_sub(1))
            .map(|m| ModePair { first: m, second: m + 1 })
            .collect();
        Self::new(modes, levels, pairs)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn pairs(&self) -> &[ModePair] {
        &self.pairs
    }

    /// Size of the joint index space, levels^modes.
    pub fn dimension(&self) -> u128 {
        (self.levels as u128).pow(self.modes as u32)
    }

    /// Number of stacked marginal entries, |pairs| * levels^2.
    pub fn measurement_count(&self) -> usize {
        self.pairs.len() * self.levels * self.levels
    }

    /// True when the pair list covers exactly the nearest-neighbor chain,
    /// in any order.
    pub fn is_chain(&self) -> bool {
        if self.pairs.len() != self.modes - 1 {
            return false;
        }
        let mut seen = vec![false; self.modes.saturating_sub(1)];
        for pair in &self.pairs {
            if pair.second != pair.first + 1 {
                return false;
            }
            seen[pair.first] = true;
        }
        seen.iter().all(|&s| s)
    }

    /// Flat index of a pattern: sum of counts[m] * levels^(M-1-m).
    pub fn encode(&self, pattern: &OccupationPattern) -> Result<u64> {
        if pattern.counts.len() != self.modes {
            return Err(Error::InvalidPattern(format!(
                "pattern has {} entries, shape has {} modes",
                pattern.counts.len(),
                self.modes
            )));
        }
        let mut flat = 0u64;
        for &count in &pattern.counts {
            if count >= self.levels {
                return Err(Error::InvalidPattern(format!(
                    "occupation {count} exceeds maximum level {}",
                    self.levels - 1
                )));
            }
            flat = flat.wrapping_mul(self.levels as u64).wrapping_add(count as u64);
        }
        Ok(flat)
    }

    /// Inverse of [`encode`](Self::encode).
    pub fn decode(&self, flat: u64) -> Result<OccupationPattern> {
        self.check_index(flat)?;
        let mut counts = vec![0usize; self.modes];
        let mut rest = flat;
        for m in (0..self.modes).rev() {
            counts[m] = (rest % self.levels as u64) as usize;
            rest /= self.levels as u64;
        }
        Ok(OccupationPattern { counts })
    }

    /// Single N-inary digit of `flat` at `mode`, without materializing the
    /// whole pattern.
    pub fn digit(&self, flat: u64, mode: usize) -> usize {
        ((flat / self.place[mode]) % self.levels as u64) as usize
    }

    /// The digits of `flat` at both members of `pair`: the unique marginal
    /// bin of that pair whose operator row is 1 at column `flat`.
    pub fn digits_at(&self, flat: u64, pair: ModePair) -> (usize, usize) {
        (self.digit(flat, pair.first), self.digit(flat, pair.second))
    }

    pub fn check_index(&self, flat: u64) -> Result<()> {
        if (flat as u128) >= self.dimension() {
            return Err(Error::IndexOutOfRange { index: flat, dimension: self.dimension() });
        }
        Ok(())
    }
}

/// Photon counts per output mode, one entry per mode, each below `levels`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OccupationPattern {
    counts: Vec<usize>,
}

impl OccupationPattern {
    pub fn new(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    pub fn zeros(modes: usize) -> Self {
        Self { counts: vec![0; modes] }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total_photons(&self) -> usize {
        self.counts.iter().sum()
    }
}

impl From<Vec<usize>> for OccupationPattern {
    fn from(counts: Vec<usize>) -> Self {
        Self { counts }
    }
}

impl fmt::Display for OccupationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.iter().all(|&c| c < 10) {
            for c in &self.counts {
                write!(f, "{c}")?;
            }
            Ok(())
        } else {
            let joined: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
            write!(f, "{}", joined.join(","))
        }
    }
}

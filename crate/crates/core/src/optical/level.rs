use std::fmt;

use super::OpticalError;

/// A light power level as an exact fraction of the source power.
///
/// Only the four levels reachable by full and half coupling are legal:
/// 0, 1/4, 1/2 and 1. Internally the level is stored in quarters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(u8);

impl Level {
    pub const ZERO: Level = Level(0);
    pub const QUARTER: Level = Level(1);
    pub const HALF: Level = Level(2);
    pub const FULL: Level = Level(4);

    /// Builds a level from `numerator / denominator`, rejecting anything
    /// outside {0, 1/4, 1/2, 1}.
    pub fn from_ratio(numerator: u32, denominator: u32) -> Result<Level, OpticalError> {
        if denominator == 0 || !(4 * numerator).is_multiple_of(denominator) {
            return Err(OpticalError::IllegalLevel(numerator, denominator));
        }
        match (4 * numerator) / denominator {
            q @ (0 | 1 | 2 | 4) => Ok(Level(q as u8)),
            _ => Err(OpticalError::IllegalLevel(numerator, denominator)),
        }
    }

    pub fn quarters(self) -> u8 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 4.0
    }

    /// Half of this level. Halving 1/4 would leave the legal set.
    pub fn halved(self) -> Result<Level, OpticalError> {
        match self.0 {
            0 => Ok(Level(0)),
            2 => Ok(Level(1)),
            4 => Ok(Level(2)),
            _ => Err(OpticalError::IllegalLevel(u32::from(self.0), 8)),
        }
    }

    /// True iff `self > threshold`, where the threshold is given in quarters
    /// of the source power (so 3 means 3/4).
    pub fn exceeds_quarters(self, threshold_quarters: u8) -> bool {
        self.0 > threshold_quarters
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => f.write_str("0"),
            1 => f.write_str("¼"),
            2 => f.write_str("½"),
            _ => f.write_str("1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LightSymbolStream {
    pub wavelength_id: u32,
    levels: Vec<Level>,
}

impl LightSymbolStream {
    pub fn new(wavelength_id: u32, levels: Vec<Level>) -> Self {
        LightSymbolStream {
            wavelength_id,
            levels,
        }
    }

    /// Unmodulated source light of `len` symbols.
    pub fn full(wavelength_id: u32, len: usize) -> Self {
        Self::new(wavelength_id, vec![Level::FULL; len])
    }

    /// Parses notation like `"½½11½"` or `"¼0½0¼"`.
    pub fn parse(wavelength_id: u32, s: &str) -> Result<Self, OpticalError> {
        let levels = s
            .chars()
            .map(|c| match c {
                '0' => Ok(Level::ZERO),
                '¼' => Ok(Level::QUARTER),
                '½' => Ok(Level::HALF),
                '1' => Ok(Level::FULL),
                other => Err(OpticalError::BadNotation(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(wavelength_id, levels))
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

impl fmt::Display for LightSymbolStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.levels {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

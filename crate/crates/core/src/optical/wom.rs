//! Two-write WOM code carrying 2 data bits in 3 write-once cells.
//!
//! First-generation codewords have weight at most one; a second write of
//! different data sets the complement of the new data's first-generation
//! codeword, which always covers the cells already set. This lets two
//! transmitters modulate the same light one after the other: the second one
//! can only remove power, never restore it.

use std::fmt;

use super::OpticalError;

/// Two bits of user data, `0..=3`, written MSB first (`0b10` is "10").
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dibit(u8);

impl Dibit {
    pub fn new(value: u8) -> Result<Dibit, OpticalError> {
        if value > 3 {
            return Err(OpticalError::DibitRange(value));
        }
        Ok(Dibit(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Dibit> {
        (0..4).map(Dibit)
    }
}

impl fmt::Display for Dibit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02b}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generation {
    Gen1,
    Gen2,
}

/// Three code cells, MSB first: `0b010` is the codeword "010".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WomCode(u8);

impl WomCode {
    pub fn from_cells(cells: u8) -> Result<WomCode, OpticalError> {
        if cells > 0b111 {
            return Err(OpticalError::InvalidCodeword(cells));
        }
        Ok(WomCode(cells))
    }

    /// Builds a codeword from three detected bits.
    pub fn from_bits(bits: &[bool]) -> Result<WomCode, OpticalError> {
        if bits.len() != 3 {
            return Err(OpticalError::CodewordLength(bits.len()));
        }
        Ok(WomCode(
            bits.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b)),
        ))
    }

    pub fn cells(self) -> u8 {
        self.0
    }

    pub fn bits(self) -> [bool; 3] {
        [self.0 & 0b100 != 0, self.0 & 0b010 != 0, self.0 & 0b001 != 0]
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn generation(self) -> Generation {
        if self.weight() <= 1 {
            Generation::Gen1
        } else {
            Generation::Gen2
        }
    }

    /// True iff every cell set in `earlier` is also set in `self`.
    pub fn covers(self, earlier: WomCode) -> bool {
        self.0 & earlier.0 == earlier.0
    }
}

impl fmt::Display for WomCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:03b}", self.0)
    }
}

const FIRST: [u8; 4] = [0b000, 0b001, 0b010, 0b100];

pub fn wom_first_write(data: Dibit) -> WomCode {
    WomCode(FIRST[data.0 as usize])
}

/// Second write over a first-generation codeword.
pub fn wom_second_write(code: WomCode, data: Dibit) -> Result<WomCode, OpticalError> {
    if code.generation() != Generation::Gen1 {
        return Err(OpticalError::NotFirstGeneration(code.0));
    }
    let (current, _) = wom_decode(code)?;
    if current == data {
        return Ok(code);
    }
    Ok(WomCode(!FIRST[data.0 as usize] & 0b111))
}

pub fn wom_decode(code: WomCode) -> Result<(Dibit, Generation), OpticalError> {
    let generation = code.generation();
    let pattern = match generation {
        Generation::Gen1 => code.0,
        Generation::Gen2 => !code.0 & 0b111,
    };
    FIRST
        .iter()
        .position(|&c| c == pattern)
        .map(|i| (Dibit(i as u8), generation))
        .ok_or(OpticalError::InvalidCodeword(code.0))
}

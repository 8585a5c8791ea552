//! Address layout: how byte addresses map onto controllers, device pairs,
//! DRAM frames and XPoint lines in each operating mode.

use serde::{Deserialize, Serialize};

use super::ControllerError;
use crate::platform::Mode;

/// Geometry shared by every mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    pub controllers: u64,
    pub pairs_per_controller: u64,
    pub dram_pages_per_device: u64,
    pub banks: u64,
    pub page_bytes: u64,
    pub line_bytes: u64,
    /// XPoint:DRAM capacity ratio.
    pub ratio: u64,
}

impl Geometry {
    pub fn validate(&self, mode: Mode) -> Result<(), ControllerError> {
        let bad = |m: &'static str| Err(ControllerError::Geometry(m));
        if self.controllers == 0 || self.pairs_per_controller == 0 || self.banks == 0 {
            return bad("controllers, pairs and banks must be positive");
        }
        if self.dram_pages_per_device == 0 {
            return bad("each DRAM device needs at least one page");
        }
        if self.line_bytes == 0 || !self.page_bytes.is_multiple_of(self.line_bytes) {
            return bad("page size must be a multiple of the line size");
        }
        if self.ratio == 0 {
            return bad("capacity ratio must be positive");
        }
        if mode == Mode::TwoLevel {
            tag_bits(self.ratio)?;
        }
        Ok(())
    }

    pub fn lines_per_page(&self) -> u64 {
        self.page_bytes / self.line_bytes
    }

    pub fn dram_devices(&self) -> u64 {
        self.controllers * self.pairs_per_controller
    }

    pub fn dram_pages(&self) -> u64 {
        self.dram_devices() * self.dram_pages_per_device
    }

    pub fn dram_lines(&self) -> u64 {
        self.dram_pages() * self.lines_per_page()
    }

    pub fn dram_lines_per_device(&self) -> u64 {
        self.dram_pages_per_device * self.lines_per_page()
    }

    /// Bytes addressable by software in `mode`.
    pub fn capacity(&self, mode: Mode) -> u64 {
        let dram = self.dram_pages() * self.page_bytes;
        match mode {
            Mode::Planar => dram * (self.ratio + 1),
            Mode::TwoLevel => dram * self.ratio,
        }
    }

    /// XPoint lines held by one device.
    pub fn xpoint_lines_per_device(&self) -> u64 {
        self.dram_lines_per_device() * self.ratio
    }

    /// (bank, row) of DRAM page `frame` within one device.
    pub fn bank_row(&self, frame: u64) -> (usize, u64) {
        ((frame % self.banks) as usize, frame / self.banks)
    }
}

/// Tag width for a power-of-two ratio between 8 and 64.
pub fn tag_bits(ratio: u64) -> Result<u32, ControllerError> {
    if !ratio.is_power_of_two() || !(8..=64).contains(&ratio) {
        return Err(ControllerError::Ratio(ratio));
    }
    Ok(ratio.trailing_zeros())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decoded {
    Planar { group: u64, slot: u64, offset: u64 },
    TwoLevel { index: u64, tag: u64, offset: u64 },
}

pub fn decode_address(geo: &Geometry, addr: u64, mode: Mode) -> Result<Decoded, ControllerError> {
    let capacity = geo.capacity(mode);
    if addr >= capacity {
        return Err(ControllerError::OutOfRange { addr, capacity });
    }
    Ok(match mode {
        Mode::Planar => {
            let page = addr / geo.page_bytes;
            let groups = geo.dram_pages();
            Decoded::Planar {
                group: page % groups,
                slot: page / groups,
                offset: addr % geo.page_bytes,
            }
        }
        Mode::TwoLevel => {
            let line = addr / geo.line_bytes;
            let n = geo.dram_lines();
            Decoded::TwoLevel {
                index: line % n,
                tag: line / n,
                offset: addr % geo.line_bytes,
            }
        }
    })
}

/// Where a unit (a planar group or a two-level index) lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Placement {
    pub controller: usize,
    pub pair: usize,
    /// DRAM page frame (planar) or DRAM line (two-level) within the device.
    pub local: u64,
}

/// Interleaves unit `u` across controllers, then pairs.
pub fn place(geo: &Geometry, u: u64) -> Placement {
    let c = u % geo.controllers;
    let rest = u / geo.controllers;
    Placement {
        controller: c as usize,
        pair: (rest % geo.pairs_per_controller) as usize,
        local: rest / geo.pairs_per_controller,
    }
}

/// XPoint frame for planar slot frame `f` (1..=ratio) of DRAM frame `local`.
pub fn planar_xpoint_frame(geo: &Geometry, local: u64, f: u64) -> u64 {
    local * geo.ratio + (f - 1)
}

/// XPoint line holding two-level line (`local` DRAM line, `tag`).
pub fn two_level_xpoint_line(geo: &Geometry, local: u64, tag: u64) -> u64 {
    tag * geo.dram_lines_per_device() + local
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo(ratio: u64) -> Geometry {
        Geometry {
            controllers: 6,
            pairs_per_controller: 2,
            dram_pages_per_device: 48,
            banks: 8,
            page_bytes: 4096,
            line_bytes: 128,
            ratio,
        }
    }

    #[test]
    fn two_level_fields() {
        let g = geo(8);
        let dram = g.dram_pages() * g.page_bytes;
        assert_eq!(
            decode_address(&g, 0, Mode::TwoLevel).unwrap(),
            Decoded::TwoLevel { index: 0, tag: 0, offset: 0 }
        );
        assert_eq!(
            decode_address(&g, dram, Mode::TwoLevel).unwrap(),
            Decoded::TwoLevel { index: 0, tag: 1, offset: 0 }
        );
        let g64 = geo(64);
        let last = g64.capacity(Mode::TwoLevel) - 1;
        match decode_address(&g64, last, Mode::TwoLevel).unwrap() {
            Decoded::TwoLevel { tag, .. } => assert_eq!(tag, 63),
            d => panic!("{d:?}"),
        }
        assert_eq!(tag_bits(64).unwrap(), 6);
        assert_eq!(tag_bits(8).unwrap(), 3);
        assert!(tag_bits(12).is_err());
        assert!(decode_address(&g64, last + 1, Mode::TwoLevel).is_err());
    }

    #[test]
    fn reference_split() {
        // 12 GB DRAM behind a 1:8 ratio
        let gb = 1u64 << 30;
        let g = Geometry {
            dram_pages_per_device: gb / 4096,
            ..geo(8)
        };
        let dram = 12 * gb;
        assert_eq!(g.dram_pages() * g.page_bytes, dram);
        assert_eq!(g.capacity(Mode::Planar), 108 * gb);
        assert_eq!(
            decode_address(&g, dram, Mode::TwoLevel).unwrap(),
            Decoded::TwoLevel { index: 0, tag: 1, offset: 0 }
        );
    }

    #[test]
    fn planar_groups_interleave() {
        let g = geo(8);
        let groups = g.dram_pages();
        assert_eq!(
            decode_address(&g, groups * 4096 + 5, Mode::Planar).unwrap(),
            Decoded::Planar { group: 0, slot: 1, offset: 5 }
        );
        assert!(decode_address(&g, g.capacity(Mode::Planar), Mode::Planar).is_err());
    }

    #[test]
    fn placement_is_a_bijection() {
        let g = geo(8);
        let mut seen = std::collections::HashSet::new();
        for u in 0..g.dram_pages() {
            let p = place(&g, u);
            assert!(p.local < g.dram_pages_per_device);
            assert!(seen.insert(p));
        }
    }
}

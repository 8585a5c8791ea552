//! MRR placement for one DRAM/XPoint pair and its controller.
//!
//! The general layout carries eleven transmitter rings (T1..T11) and eleven
//! receiver rings (R1..R11). Each ring has a fixed owner. The planar and
//! two-level layouts keep only the rings their functions use.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LayoutMode {
    Planar,
    TwoLevel,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Owner {
    Mc,
    Dram,
    Xpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    T(u8),
    R(u8),
}

/// Owner of every ring in the general layout.
pub const GENERAL: [(Ring, Owner); 22] = [
    (Ring::T(1), Owner::Dram),
    (Ring::T(2), Owner::Xpoint),
    (Ring::T(3), Owner::Mc),
    (Ring::T(4), Owner::Dram),
    (Ring::T(5), Owner::Dram),
    (Ring::T(6), Owner::Dram),
    (Ring::T(7), Owner::Xpoint),
    (Ring::T(8), Owner::Xpoint),
    (Ring::T(9), Owner::Mc),
    (Ring::T(10), Owner::Dram),
    (Ring::T(11), Owner::Xpoint),
    (Ring::R(1), Owner::Dram),
    (Ring::R(2), Owner::Xpoint),
    (Ring::R(3), Owner::Xpoint),
    (Ring::R(4), Owner::Dram),
    (Ring::R(5), Owner::Xpoint),
    (Ring::R(6), Owner::Dram),
    (Ring::R(7), Owner::Dram),
    (Ring::R(8), Owner::Mc),
    (Ring::R(9), Owner::Dram),
    (Ring::R(10), Owner::Xpoint),
    (Ring::R(11), Owner::Xpoint),
];

/// Conventional links: MC, DRAM and XPoint each with one plain transmitter
/// and receiver.
const CONVENTIONAL: [Ring; 6] = [
    Ring::T(3),
    Ring::R(8),
    Ring::T(5),
    Ring::R(6),
    Ring::T(7),
    Ring::R(5),
];

/// Planar swaps need the half-coupled transmitters.
const PLANAR_EXTRA: [Ring; 3] = [Ring::T(4), Ring::T(6), Ring::T(8)];

/// Two-level snarf and reverse-write need the half-coupled receivers.
const TWO_LEVEL_EXTRA: [Ring; 6] = [
    Ring::R(1),
    Ring::R(2),
    Ring::R(3),
    Ring::R(4),
    Ring::R(7),
    Ring::R(11),
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceRings {
    pub transmitters: u32,
    pub receivers: u32,
}

impl DeviceRings {
    pub fn total(&self) -> u32 {
        self.transmitters + self.receivers
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MrrLayout {
    pub mc: DeviceRings,
    pub dram: DeviceRings,
    pub xpoint: DeviceRings,
}

impl MrrLayout {
    pub fn total(&self) -> u32 {
        self.mc.total() + self.dram.total() + self.xpoint.total()
    }
}

pub fn rings(mode: LayoutMode) -> Vec<Ring> {
    match mode {
        LayoutMode::General => GENERAL.iter().map(|(r, _)| *r).collect(),
        LayoutMode::Planar => CONVENTIONAL.iter().chain(&PLANAR_EXTRA).copied().collect(),
        LayoutMode::TwoLevel => CONVENTIONAL.iter().chain(&TWO_LEVEL_EXTRA).copied().collect(),
    }
}

pub fn owner(ring: Ring) -> Owner {
    GENERAL
        .iter()
        .find(|(r, _)| *r == ring)
        .map(|(_, o)| *o)
        .expect("every ring is in the general layout")
}

pub fn mrr_layout(mode: LayoutMode) -> MrrLayout {
    let mut out = MrrLayout::default();
    for ring in rings(mode) {
        let dev = match owner(ring) {
            Owner::Mc => &mut out.mc,
            Owner::Dram => &mut out.dram,
            Owner::Xpoint => &mut out.xpoint,
        };
        match ring {
            Ring::T(_) => dev.transmitters += 1,
            Ring::R(_) => dev.receivers += 1,
        }
    }
    out
}

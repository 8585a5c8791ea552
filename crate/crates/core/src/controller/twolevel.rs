//! Two-level mode: DRAM as a direct-mapped cache of XPoint with the valid,
//! dirty and tag bits stored beside each line's ECC.

use serde::{Deserialize, Serialize};

use super::address::tag_bits;
use super::ControllerError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheLineMeta {
    pub valid: bool,
    pub dirty: bool,
    pub tag: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lookup {
    Hit,
    /// Miss; carries the victim when it must be written back.
    Miss { dirty_victim_tag: Option<u8> },
}

#[derive(Clone, Debug)]
pub struct TwoLevelCache {
    tag_bits: u32,
    meta: Vec<CacheLineMeta>,
    pub lookups: u64,
    pub hits: u64,
}

impl TwoLevelCache {
    pub fn new(lines: u64, ratio: u64) -> Result<Self, ControllerError> {
        Ok(TwoLevelCache {
            tag_bits: tag_bits(ratio)?,
            meta: vec![CacheLineMeta::default(); lines as usize],
            lookups: 0,
            hits: 0,
        })
    }

    pub fn tag_bits(&self) -> u32 {
        self.tag_bits
    }

    pub fn meta(&self, index: u64) -> CacheLineMeta {
        self.meta[index as usize]
    }

    /// Compares `tag` with the metadata read alongside the line.
    pub fn lookup(&mut self, index: u64, tag: u64) -> Lookup {
        self.lookups += 1;
        let m = self.meta[index as usize];
        if m.valid && u64::from(m.tag) == tag {
            self.hits += 1;
            return Lookup::Hit;
        }
        Lookup::Miss {
            dirty_victim_tag: (m.valid && m.dirty).then_some(m.tag),
        }
    }

    /// Installs `tag` at `index`.
    pub fn fill(&mut self, index: u64, tag: u64, dirty: bool) {
        debug_assert!(tag < 1 << self.tag_bits);
        self.meta[index as usize] = CacheLineMeta {
            valid: true,
            dirty,
            tag: tag as u8,
        };
    }

    pub fn mark_dirty(&mut self, index: u64) {
        self.meta[index as usize].dirty = true;
    }
}

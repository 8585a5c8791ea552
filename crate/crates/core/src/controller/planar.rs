//! Planar mode: each group pairs one DRAM page frame with `ratio` XPoint
//! frames; hot XPoint pages are swapped into the DRAM frame.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Frame 0 is the DRAM frame; frames 1..=ratio are XPoint frames.
pub type Frame = u16;
pub const DRAM_FRAME: Frame = 0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarGroup {
    pub group_id: u64,
    /// frame_of[slot] for each of the group's `ratio + 1` pages.
    frame_of: Vec<Frame>,
    counters: Vec<u32>,
    epoch: u64,
}

impl PlanarGroup {
    pub fn new(group_id: u64, ratio: u64) -> Self {
        let n = (ratio + 1) as usize;
        PlanarGroup {
            group_id,
            frame_of: (0..n as Frame).collect(),
            counters: vec![0; n],
            epoch: 0,
        }
    }

    pub fn frame(&self, slot: u64) -> Frame {
        self.frame_of[slot as usize]
    }

    /// Slot whose page currently owns the DRAM frame.
    pub fn dram_resident(&self) -> u64 {
        self.frame_of
            .iter()
            .position(|&f| f == DRAM_FRAME)
            .expect("one page is always in DRAM") as u64
    }

    pub fn counter(&self, slot: u64) -> u32 {
        self.counters[slot as usize]
    }

    fn decay_to(&mut self, epoch: u64) {
        if epoch > self.epoch {
            let shift = (epoch - self.epoch).min(31) as u32;
            for c in &mut self.counters {
                *c >>= shift;
            }
            self.epoch = epoch;
        }
    }
}

/// A swap chosen by the hotness policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapDecision {
    pub group: u64,
    /// Page moving into DRAM.
    pub hot_slot: u64,
    /// Page leaving DRAM.
    pub cold_slot: u64,
    /// XPoint frame the two pages trade with the DRAM frame.
    pub xpoint_frame: Frame,
}

#[derive(Clone, Debug)]
pub struct PlanarTable {
    ratio: u64,
    hot_threshold: u32,
    epoch_ns: u64,
    groups: HashMap<u64, PlanarGroup>,
}

impl PlanarTable {
    pub fn new(ratio: u64, hot_threshold: u32, epoch_ns: u64) -> Self {
        PlanarTable {
            ratio,
            hot_threshold: hot_threshold.max(1),
            epoch_ns: epoch_ns.max(1),
            groups: HashMap::new(),
        }
    }

    pub fn group(&self, group: u64) -> Option<&PlanarGroup> {
        self.groups.get(&group)
    }

    pub fn frame(&self, group: u64, slot: u64) -> Frame {
        self.groups
            .get(&group)
            .map_or(slot as Frame, |g| g.frame(slot))
    }

    /// Counts an access at trace time `t_ns`. Returns a swap when the page
    /// sits in XPoint and its counter reaches the threshold; the residency
    /// change takes effect immediately.
    pub fn record_access(&mut self, group: u64, slot: u64, t_ns: u64) -> Option<SwapDecision> {
        let ratio = self.ratio;
        let g = self
            .groups
            .entry(group)
            .or_insert_with(|| PlanarGroup::new(group, ratio));
        g.decay_to(t_ns / self.epoch_ns);
        let s = slot as usize;
        g.counters[s] = (g.counters[s] + 1).min(2 * self.hot_threshold);
        let xf = g.frame_of[s];
        if xf == DRAM_FRAME || g.counters[s] < self.hot_threshold {
            return None;
        }
        let cold = g.dram_resident();
        g.frame_of[s] = DRAM_FRAME;
        g.frame_of[cold as usize] = xf;
        g.counters[s] = 0;
        Some(SwapDecision {
            group,
            hot_slot: slot,
            cold_slot: cold,
            xpoint_frame: xf,
        })
    }
}

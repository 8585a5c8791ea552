//! Passive capture of MC-to-DRAM transactions by the XPoint controller.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommandKind {
    Read,
    Write,
    Act,
    Pre,
    Swap,
}

/// A transaction as it appears on the channel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelTransaction {
    pub kind: CommandKind,
    pub address: u64,
    pub data: Vec<u64>,
    /// Carried opaquely.
    pub ecc: u64,
    pub tag: u32,
}

pub type CapturedTransaction = ChannelTransaction;

#[derive(Clone, Debug, Default)]
pub struct SnarfUnit {
    active: bool,
    pub captured: u64,
}

impl SnarfUnit {
    pub fn new(active: bool) -> Self {
        SnarfUnit { active, captured: 0 }
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    pub fn set_active(&mut self, on: bool) {
        self.active = on;
    }

    /// Copies `tx` if the half-coupled receiver is enabled. The observed
    /// transfer is not consumed or delayed.
    pub fn observe(&mut self, tx: &ChannelTransaction) -> Option<CapturedTransaction> {
        if !self.active {
            return None;
        }
        self.captured += 1;
        Some(tx.clone())
    }
}

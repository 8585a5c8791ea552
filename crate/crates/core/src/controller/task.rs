//! Migration tasks and the address/bank locks used for conflict detection.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::platform::Platform;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskKind {
    /// The controller reads both pages and writes them back over its own
    /// channel (on the Oracle, over the dedicated migration channel).
    BaselineCopy,
    /// As the baseline, but XPoint snarfs the DRAM read leg.
    AutoRw,
    /// Delegated to the XPoint controller with a SWAP command.
    Swap,
    /// XPoint-initiated DRAM fill snarfed by the controller.
    ReverseWrite,
}

impl TaskKind {
    /// The migration mechanism a platform uses for planar swaps.
    pub fn planar_swap(platform: Platform) -> TaskKind {
        if platform.supports_swap() {
            TaskKind::Swap
        } else if platform.supports_auto_rw() {
            TaskKind::AutoRw
        } else {
            TaskKind::BaselineCopy
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskState {
    Pending,
    Active,
    Done,
}

/// Where a task or request touches memory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Footprint {
    pub controller: usize,
    pub pair: usize,
    /// DRAM bank touched, if any.
    pub bank: Option<usize>,
    /// Byte-address ranges.
    pub ranges: Vec<Range<u64>>,
}

impl Footprint {
    fn same_device(&self, other: &Footprint) -> bool {
        self.controller == other.controller && self.pair == other.pair
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MigrationTask {
    pub id: u64,
    pub kind: TaskKind,
    pub state: TaskState,
    pub group: u64,
    /// Page moving into DRAM and page moving out, as byte ranges.
    pub lock: Footprint,
    pub size: u64,
    /// XPoint frame traded with the DRAM frame.
    pub xpoint_frame: u64,
    pub dram_frame: u64,
    pub enqueued_at: crate::sim::SimTime,
}

fn intersects(a: &Range<u64>, b: &Range<u64>) -> bool {
    a.start < b.end && b.start < a.end
}

/// A request conflicts with a task when their address ranges meet (while
/// the task is queued or running), or when it needs the DRAM bank of a
/// running task.
pub fn conflicts(req: &Footprint, task: &MigrationTask) -> bool {
    if task.state == TaskState::Done {
        return false;
    }
    let addr = req
        .ranges
        .iter()
        .any(|r| task.lock.ranges.iter().any(|t| intersects(r, t)));
    let bank = task.state == TaskState::Active
        && req.same_device(&task.lock)
        && req.bank.is_some()
        && req.bank == task.lock.bank;
    addr || bank
}

pub fn detect_conflict<'a>(
    req: &Footprint,
    tasks: impl IntoIterator<Item = &'a MigrationTask>,
) -> bool {
    tasks.into_iter().any(|t| conflicts(req, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::SimTime;
    use proptest::prelude::*;

    fn page0() -> Vec<Range<u64>> {
        std::iter::once(0..4096).collect()
    }

    fn task(state: TaskState, bank: usize, ranges: Vec<Range<u64>>) -> MigrationTask {
        MigrationTask {
            id: 0,
            kind: TaskKind::Swap,
            state,
            group: 0,
            lock: Footprint { controller: 0, pair: 0, bank: Some(bank), ranges },
            size: 4096,
            xpoint_frame: 0,
            dram_frame: 0,
            enqueued_at: SimTime::ZERO,
        }
    }

    fn req(bank: Option<usize>, r: Range<u64>) -> Footprint {
        Footprint { controller: 0, pair: 0, bank, ranges: vec![r] }
    }

    #[test]
    fn bank_and_address() {
        let t = task(TaskState::Active, 3, page0());
        assert!(conflicts(&req(Some(3), 1 << 20..(1 << 20) + 128), &t));
        assert!(!conflicts(&req(Some(4), 1 << 20..(1 << 20) + 128), &t));
        assert!(conflicts(&req(None, 128..256), &t));
        let pending = task(TaskState::Pending, 3, page0());
        assert!(!conflicts(&req(Some(3), 8192..8320), &pending));
        assert!(conflicts(&req(Some(3), 0..128), &pending));
        let done = task(TaskState::Done, 3, page0());
        assert!(!conflicts(&req(Some(3), 0..128), &done));
        let other_dev = Footprint { pair: 1, ..req(Some(3), 8192..8320) };
        assert!(!conflicts(&other_dev, &t));
        assert_eq!(TaskKind::planar_swap(Platform::OhmBase), TaskKind::BaselineCopy);
        assert_eq!(TaskKind::planar_swap(Platform::AutoRw), TaskKind::AutoRw);
        assert_eq!(TaskKind::planar_swap(Platform::OhmBw), TaskKind::Swap);
    }

    proptest! {
        #[test]
        fn address_conflicts_match_brute_force(
            locks in proptest::collection::vec((0u64..200, 1u64..40), 1..5),
            r in (0u64..240, 1u64..40),
        ) {
            let ranges: Vec<Range<u64>> = locks.iter().map(|&(s, l)| s..s + l).collect();
            let t = task(TaskState::Pending, 0, ranges.clone());
            let q = req(None, r.0..r.0 + r.1);
            let brute = (r.0..r.0 + r.1).any(|a| ranges.iter().any(|x| x.contains(&a)));
            prop_assert_eq!(detect_conflict(&q, [&t]), brute);
        }
    }
}

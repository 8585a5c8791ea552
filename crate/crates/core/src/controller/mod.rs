//! Memory controllers: request scheduling, the planar and two-level modes,
//! conflict detection and the migration functions.

pub mod address;
pub mod planar;
pub mod sched;
pub mod system;
pub mod task;
pub mod twolevel;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ChannelError;
use crate::devices::DeviceError;
use crate::sim::SimTime;

pub use address::{decode_address, Decoded, Geometry};
pub use planar::{PlanarGroup, PlanarTable, SwapDecision};
pub use sched::{schedule, Action};
pub use system::{simulate, HandshakeStep, RunStats, SimOptions};
pub use task::{detect_conflict, MigrationTask, TaskKind};
pub use twolevel::{CacheLineMeta, TwoLevelCache};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControllerError {
    #[error("invalid geometry: {0}")]
    Geometry(&'static str),
    #[error("capacity ratio {0} needs a power of two between 8 and 64")]
    Ratio(u64),
    #[error("address {addr:#x} beyond capacity {capacity:#x}")]
    OutOfRange { addr: u64, capacity: u64 },
    #[error(transparent)]
    Device(#[from] DeviceError),
    #[error(transparent)]
    Capability(#[from] ChannelError),
    #[error("{0}")]
    Invalid(String),
}

impl ControllerError {
    pub fn is_protocol_violation(&self) -> bool {
        matches!(self, ControllerError::Device(DeviceError::Protocol(_)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RequestKind {
    Read,
    Write,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemRequest {
    pub id: u64,
    pub kind: RequestKind,
    pub address: u64,
    pub size: u64,
    pub issue_time: SimTime,
    pub controller_id: Option<usize>,
    pub completion_time: Option<SimTime>,
}

impl MemRequest {
    pub fn new(id: u64, kind: RequestKind, address: u64, size: u64, issue_time: SimTime) -> Self {
        MemRequest {
            id,
            kind,
            address,
            size,
            issue_time,
            controller_id: None,
            completion_time: None,
        }
    }
}

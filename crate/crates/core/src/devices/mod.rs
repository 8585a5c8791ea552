//! DRAM and XPoint device models and the XPoint controller logic.

pub mod ddrseq;
pub mod dram;
pub mod snarf;
pub mod startgap;
pub mod xpoint;

use thiserror::Error;

use crate::sim::SimTime;

pub use ddrseq::{ddr_seq_generate, SwapTask};
pub use dram::{BankState, DramBank, DramCommand, DramDevice, DramTiming};
pub use snarf::{CapturedTransaction, ChannelTransaction, CommandKind, SnarfUnit};
pub use startgap::StartGap;
pub use xpoint::{XpointConfig, XpointDevice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeviceError {
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("buffer full, retry at {retry_at}")]
    BufferFull { retry_at: SimTime },
    #[error("line {line} out of range ({lines} lines)")]
    OutOfRange { line: u64, lines: u64 },
    #[error("invalid device configuration: {0}")]
    Config(&'static str),
}

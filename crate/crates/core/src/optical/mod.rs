//! Light-level arithmetic, the WOM codec, power budget and BER model.

pub mod ber;
pub mod level;
pub mod modulate;
pub mod power;
pub mod wom;

use thiserror::Error;

pub use ber::{reference_operating_points, BerModel, OperatingPoint};
pub use level::{Level, LightSymbolStream};
pub use modulate::{fc_detect, hc_detect, modulate, MrrMode, Scheme, Threshold};
pub use power::{received_power, OpticalPowerModel, RouteComponent};
pub use wom::{wom_decode, wom_first_write, wom_second_write, Dibit, Generation, WomCode};

#[derive(Debug, Error, PartialEq)]
pub enum OpticalError {
    #[error("illegal light level {0}/{1}")]
    IllegalLevel(u32, u32),
    #[error("unknown light-level symbol {0:?}")]
    BadNotation(char),
    #[error("bad detection threshold {0}/{1}")]
    BadThreshold(u32, u32),
    #[error("stream has {symbols} symbols but {bits} bits were supplied")]
    LengthMismatch { symbols: usize, bits: usize },
    #[error("2-bit data out of range: {0}")]
    DibitRange(u8),
    #[error("invalid WOM codeword {0:#05b}")]
    InvalidCodeword(u8),
    #[error("WOM codeword needs 3 cells, got {0}")]
    CodewordLength(usize),
    #[error("second write requires a first-generation codeword, got {0:03b}")]
    NotFirstGeneration(u8),
    #[error("level fraction {0} outside [0, 1]")]
    LevelFraction(f64),
    #[error("received power must be positive, got {0} mW")]
    NonPositivePower(f64),
    #[error("invalid BER model A={a}, k={k}")]
    BadBerModel { a: f64, k: f64 },
    #[error("BER calibration failed: {0}")]
    Calibration(&'static str),
    #[error("invalid optical power model: {0}")]
    BadPowerModel(&'static str),
}

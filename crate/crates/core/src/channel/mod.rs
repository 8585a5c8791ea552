//! The shared optical channel: virtual channels, arbitration, serialized
//! transfers, dual routes and MRR layouts.

pub mod dual;
pub mod layout;
pub mod link;
pub mod vc;

use thiserror::Error;

use crate::platform::Platform;

pub use dual::{establish_dual_route, DualRoute, Function};
pub use layout::{mrr_layout, LayoutMode, MrrLayout};
pub use link::{common_slot, transmit_to_register, ChannelTiming, Multiplexing, RegisterBuffer, RouteTimeline, Traffic, Transfer};
pub use vc::{divide_channels, Arbiter, DeviceId, VirtualChannel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChannelError {
    #[error("{wavelengths} wavelengths cannot be split evenly across {controllers} controllers")]
    Indivisible { wavelengths: u32, controllers: u32 },
    #[error("arbitration with no requesters")]
    NoRequesters,
    #[error("device {0} is not attached to this channel")]
    UnknownDevice(u32),
    #[error("payload of {bytes} B exceeds the {capacity} B register")]
    PayloadTooLarge { bytes: u64, capacity: u64 },
    #[error("platform {platform} does not support {}", function.name())]
    Unsupported { platform: Platform, function: Function },
}

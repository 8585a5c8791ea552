pub mod channel;
pub mod config;
pub mod controller;
pub mod devices;
pub mod experiment;
pub mod metrics;
pub mod optical;
pub mod platform;
pub mod sim;
pub mod workload;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/light.md")]
    mod light {}
    #[doc = include_str!("../../../book/src/channel.md")]
    mod channel {}
    #[doc = include_str!("../../../book/src/devices.md")]
    mod devices {}
    #[doc = include_str!("../../../book/src/controller.md")]
    mod controller {}
    #[doc = include_str!("../../../book/src/running.md")]
    mod running {}
}

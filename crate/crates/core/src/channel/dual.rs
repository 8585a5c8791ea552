//! Dual routes: a data route (MC to device A) and a memory route (device A to
//! device B) sharing the wavelengths of one virtual channel.

use serde::{Deserialize, Serialize};

use super::link::Multiplexing;
use super::vc::DeviceId;
use super::ChannelError;
use crate::optical::{MrrMode, OpticalPowerModel};
use crate::platform::Platform;
use crate::sim::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Function {
    /// XPoint snarfs MC-to-DRAM traffic through half-coupled receivers.
    AutoRw,
    /// Device-to-device page exchange driven by a single SWAP command.
    Swap,
    /// The MC monitors an XPoint-to-DRAM fill on its way through.
    ReverseWrite,
}

impl Function {
    pub fn name(self) -> &'static str {
        match self {
            Function::AutoRw => "auto-rw",
            Function::Swap => "swap",
            Function::ReverseWrite => "reverse-write",
        }
    }
}

/// One MRR switched into a new mode for the lifetime of a dual route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeChange {
    pub device: DeviceId,
    pub from: MrrMode,
    pub to: MrrMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualRoute {
    pub vc: u32,
    pub data_route: (DeviceId, DeviceId),
    pub memory_route: (DeviceId, DeviceId),
    pub multiplexing: Multiplexing,
    pub active_function: Function,
    pub mode_changes: Vec<ModeChange>,
    /// Time before the route can carry data; MRRs retune in parallel.
    pub setup_latency: SimTime,
    pub setup_energy_fj: f64,
}

impl DualRoute {
    /// Data-route bit rate relative to the VC's nominal rate.
    pub fn data_route_rate(&self) -> f64 {
        match self.multiplexing {
            Multiplexing::Wom => 2.0 / 3.0,
            _ => 1.0,
        }
    }

    pub fn memory_route_rate(&self) -> f64 {
        1.0
    }
}

/// Sets up a dual route on `vc`. `mc` is the controller endpoint, `dev_a`
/// the device on the data route and `dev_b` the far end of the memory route.
pub fn establish_dual_route(
    vc: u32,
    mc: DeviceId,
    dev_a: DeviceId,
    dev_b: DeviceId,
    function: Function,
    platform: Platform,
    power: &OpticalPowerModel,
) -> Result<DualRoute, ChannelError> {
    let supported = match function {
        Function::AutoRw => platform.supports_auto_rw(),
        Function::Swap => platform.supports_swap(),
        Function::ReverseWrite => platform.supports_reverse_write(),
    };
    if !supported {
        return Err(ChannelError::Unsupported { platform, function });
    }
    let multiplexing = match (function, platform) {
        (Function::Swap, Platform::OhmWom) => Multiplexing::Wom,
        (Function::Swap, Platform::OhmBw) => Multiplexing::HalfCoupledBandwidth,
        _ => Multiplexing::None,
    };
    let hc = |device| ModeChange {
        device,
        from: MrrMode::NonCoupled,
        to: MrrMode::HalfCoupled,
    };
    let mode_changes = match function {
        // receiver on the snarfing device
        Function::AutoRw => vec![hc(dev_b)],
        Function::Swap => match multiplexing {
            // the second writer modulates on top of the first
            Multiplexing::Wom => vec![hc(dev_b)],
            // both senders share the light at half coupling
            _ => vec![hc(dev_a), hc(dev_b)],
        },
        // MC-side monitor receiver
        Function::ReverseWrite => vec![hc(mc)],
    };
    let mut setup_latency = SimTime::ZERO;
    let mut setup_energy_fj = 0.0;
    for c in &mode_changes {
        let (t, e) = power.tuning_cost(c.from, c.to);
        setup_latency = setup_latency.max(t);
        setup_energy_fj += e;
    }
    Ok(DualRoute {
        vc,
        data_route: (mc, dev_a),
        memory_route: (dev_a, dev_b),
        multiplexing,
        active_function: function,
        mode_changes,
        setup_latency,
        setup_energy_fj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn route(f: Function, p: Platform) -> Result<DualRoute, ChannelError> {
        establish_dual_route(0, 100, 1, 2, f, p, &OpticalPowerModel::default())
    }

    #[test]
    fn swap_multiplexing_per_platform() {
        let wom = route(Function::Swap, Platform::OhmWom).unwrap();
        assert_eq!(wom.multiplexing, Multiplexing::Wom);
        assert!((wom.data_route_rate() - 2.0 / 3.0).abs() < 1e-12);
        let bw = route(Function::Swap, Platform::OhmBw).unwrap();
        assert_eq!(bw.multiplexing, Multiplexing::HalfCoupledBandwidth);
        assert_eq!(bw.data_route_rate(), 1.0);
        assert_eq!(bw.memory_route_rate(), 1.0);
        assert_eq!(bw.setup_latency, SimTime::ps(500));
    }

    #[test]
    fn capability_errors() {
        for p in [Platform::Origin, Platform::Hetero, Platform::OhmBase, Platform::Oracle] {
            for f in [Function::AutoRw, Function::Swap, Function::ReverseWrite] {
                assert!(route(f, p).is_err(), "{p} {f:?}");
            }
        }
        assert!(route(Function::AutoRw, Platform::AutoRw).is_ok());
        assert!(route(Function::Swap, Platform::AutoRw).is_err());
        assert!(route(Function::ReverseWrite, Platform::AutoRw).is_err());
    }

    #[test]
    fn routes_share_device_a() {
        let r = route(Function::AutoRw, Platform::OhmWom).unwrap();
        assert_eq!(r.data_route, (100, 1));
        assert_eq!(r.memory_route, (1, 2));
        assert_eq!(r.multiplexing, Multiplexing::None);
    }
}

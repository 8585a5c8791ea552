//! Component cost of a memory platform: MRRs, memory devices and the laser.
//!
//! MRR inventories are stored for the 24-device reference build and scale
//! per device. Memory prices are per device for each mode's DRAM/XPoint
//! part; a build of `n` devices keeps the mode's DRAM:XPoint split.

use serde::{Deserialize, Serialize};

use crate::platform::{Mode, Platform};

pub const REFERENCE_DEVICES: u64 = 24;
pub const VCSEL_USD: f64 = 100.0;
/// Fabrication cost per MRR, from three dollars per 2,112 rings.
pub const MRR_USD: f64 = 3.0 / 2112.0;

/// (modulators, detectors) in the reference build.
fn reference_inventory(platform: Platform, mode: Mode) -> (u64, u64) {
    // dual-route platforms add half-coupled detectors; only the
    // half-coupled transmitter platform adds modulators
    let (base, bw) = match mode {
        Mode::Planar => ((2112, 2112), (2176, 3136)),
        Mode::TwoLevel => ((2368, 2368), (2368, 4928)),
    };
    match platform {
        Platform::Origin | Platform::Hetero => (0, 0),
        Platform::OhmBase | Platform::Oracle => base,
        Platform::AutoRw | Platform::OhmWom => (base.0, bw.1),
        Platform::OhmBw => bw,
    }
}

/// (DRAM devices, XPoint devices, DRAM $/device, XPoint $/device) of the
/// priced memory builds.
fn memory_build(mode: Mode) -> (u64, u64, f64, f64) {
    match mode {
        Mode::Planar => (12, 12, 140.0 / 12.0, 125.0 / 12.0),
        Mode::TwoLevel => (6, 12, 70.0 / 6.0, 499.0 / 12.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub devices: u64,
    pub modulators: u64,
    pub detectors: u64,
    pub mrr_usd: f64,
    pub dram_usd: f64,
    pub xpoint_usd: f64,
    pub vcsel_usd: f64,
}

impl CostEstimate {
    pub fn total_usd(&self) -> f64 {
        self.mrr_usd + self.dram_usd + self.xpoint_usd + self.vcsel_usd
    }
}

fn scale(count: u64, devices: u64) -> u64 {
    (count * devices + REFERENCE_DEVICES / 2) / REFERENCE_DEVICES
}

pub fn cost_estimate(platform: Platform, mode: Mode, devices: u64) -> CostEstimate {
    let (m, d) = reference_inventory(platform, mode);
    let (modulators, detectors) = (scale(m, devices), scale(d, devices));
    let (nd, nx, pd, px) = memory_build(mode);
    let dram = (devices * nd + (nd + nx) / 2) / (nd + nx);
    let xpoint = if platform == Platform::Origin { 0 } else { devices - dram };
    let dram = if platform == Platform::Origin { devices } else { dram };
    CostEstimate {
        devices,
        modulators,
        detectors,
        mrr_usd: (modulators + detectors) as f64 * MRR_USD,
        dram_usd: dram as f64 * pd,
        xpoint_usd: xpoint as f64 * px,
        vcsel_usd: if platform.is_optical() { VCSEL_USD } else { 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_devices_is_laser_only() {
        let c = cost_estimate(Platform::OhmBw, Mode::Planar, 0);
        assert_eq!((c.modulators, c.detectors), (0, 0));
        assert_eq!(c.total_usd(), VCSEL_USD);
        assert_eq!(cost_estimate(Platform::Hetero, Mode::Planar, 0).total_usd(), 0.0);
    }

    #[test]
    fn bw_carries_more_rings() {
        for mode in [Mode::Planar, Mode::TwoLevel] {
            let b = cost_estimate(Platform::OhmBase, mode, 24);
            let w = cost_estimate(Platform::OhmBw, mode, 24);
            assert!(w.modulators + w.detectors > b.modulators + b.detectors);
            assert!(w.mrr_usd > b.mrr_usd);
        }
    }

    #[test]
    fn planar_reference_memory() {
        let c = cost_estimate(Platform::OhmBase, Mode::Planar, 24);
        assert!((c.dram_usd - 140.0).abs() < 1e-9);
        assert!((c.xpoint_usd - 125.0).abs() < 1e-9);
    }
}

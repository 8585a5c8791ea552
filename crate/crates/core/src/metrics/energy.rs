//! Energy accounting for one finished run.

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::controller::system::RouteStats;
use crate::controller::RunStats;
use crate::platform::Platform;

/// Joules per component.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub dram_static: f64,
    pub dram_dynamic: f64,
    pub xpoint: f64,
    pub laser: f64,
    pub tuning: f64,
    pub electrical_dma: f64,
}

impl EnergyLedger {
    pub fn optical(&self) -> f64 {
        self.laser + self.tuning
    }

    pub fn total(&self) -> f64 {
        self.dram_static + self.dram_dynamic + self.xpoint + self.laser + self.tuning + self.electrical_dma
    }
}

fn light_bits(routes: &[RouteStats]) -> u64 {
    routes.iter().map(|r| r.light_bits).sum()
}

fn carried_bits(routes: &[RouteStats]) -> u64 {
    routes.iter().map(|r| r.effective_bits + r.migration_bits).sum()
}

/// Wavelengths the laser keeps lit. The dedicated migration channel of
/// the oracle platform is a second full set.
pub fn lit_wavelengths(cfg: &SimConfig, platform: Platform) -> u32 {
    match platform {
        p if !p.is_optical() => 0,
        p if p.has_dedicated_migration_channel() => 2 * cfg.wavelengths,
        _ => cfg.wavelengths,
    }
}

pub fn energy_account(cfg: &SimConfig, platform: Platform, stats: &RunStats) -> EnergyLedger {
    let secs = stats.run_time.as_ps() as f64 * 1e-12;
    let dram_devices = f64::from(cfg.controllers * cfg.pairs_per_controller);
    let dram_bits = (stats.dram_bytes_read + stats.dram_bytes_written) as f64 * 8.0;
    let mut e = EnergyLedger {
        dram_static: cfg.dram_static_w * dram_devices * secs,
        dram_dynamic: cfg.dram_dynamic_pj_per_bit * 1e-12 * dram_bits,
        xpoint: (cfg.xpoint_read_nj * stats.xpoint_media_reads as f64
            + cfg.xpoint_write_nj * stats.xpoint_media_writes as f64)
            * 1e-9,
        ..EnergyLedger::default()
    };
    if platform.is_optical() {
        let watts = cfg.laser_mw_per_wavelength * 1e-3 * platform.laser_multiplier();
        e.laser = watts * f64::from(lit_wavelengths(cfg, platform)) * secs;
        let bits = light_bits(&stats.data_routes)
            + light_bits(&stats.memory_routes)
            + light_bits(&stats.dedicated_routes);
        e.tuning = cfg.tuning_fj_per_bit * 1e-15 * bits as f64;
    } else {
        let bits = carried_bits(&stats.data_routes);
        e.electrical_dma = cfg.electrical_energy_factor * cfg.tuning_fj_per_bit * 1e-15 * bits as f64;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::SimTime;

    fn idle(run_ns: u64) -> RunStats {
        RunStats {
            run_time: SimTime::ns(run_ns),
            ..RunStats::default()
        }
    }

    #[test]
    fn static_scales_with_time() {
        let cfg = SimConfig::default();
        let a = energy_account(&cfg, Platform::OhmBase, &idle(1000));
        let b = energy_account(&cfg, Platform::OhmBase, &idle(2000));
        assert!((b.dram_static - 2.0 * a.dram_static).abs() < 1e-18);
        assert_eq!(a.dram_dynamic, 0.0);
        assert_eq!(b.xpoint, 0.0);
        assert_eq!(b.tuning, 0.0);
    }

    #[test]
    fn laser_multipliers() {
        let cfg = SimConfig::default();
        let s = idle(1000);
        let base = energy_account(&cfg, Platform::OhmBase, &s).laser;
        let bw = energy_account(&cfg, Platform::OhmBw, &s).laser;
        let wom = energy_account(&cfg, Platform::OhmWom, &s).laser;
        assert!((bw / base - 4.0).abs() < 1e-12);
        assert!((wom / base - 2.0).abs() < 1e-12);
        assert_eq!(energy_account(&cfg, Platform::Hetero, &s).laser, 0.0);
    }

    #[test]
    fn dma_is_ten_times_tuning_per_bit() {
        let cfg = SimConfig::default();
        let route = RouteStats {
            effective_bits: 1000,
            light_bits: 1000,
            ..RouteStats::default()
        };
        let mut s = idle(0);
        s.data_routes = vec![route];
        let h = energy_account(&cfg, Platform::Hetero, &s);
        let o = energy_account(&cfg, Platform::OhmBase, &s);
        assert!((h.electrical_dma / o.tuning - 10.0).abs() < 1e-12);
        assert_eq!(h.total(), h.electrical_dma);
    }
}

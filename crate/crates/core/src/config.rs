//! Run configuration: a flat TOML table of system, device, power and
//! policy parameters. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ChannelTiming;
use crate::controller::address::Geometry;
use crate::devices::{DramTiming, XpointConfig};
use crate::optical::OpticalPowerModel;
use crate::platform::Mode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    // optical channel
    pub wavelengths: u32,
    pub controllers: u32,
    pub frequency_ghz: u32,
    pub serdes_ps: u64,
    pub propagation_ps: u64,
    pub register_bytes: u64,
    // electrical channel
    pub electrical_width_bits: u32,
    pub electrical_frequency_mhz: u64,

    // topology
    pub pairs_per_controller: u32,
    pub banks: u32,
    pub dram_bytes_per_device: u64,
    pub page_bytes: u64,
    pub line_bytes: u64,
    pub planar_ratio: u64,
    pub two_level_ratio: u64,

    // DRAM
    pub t_rcd_ns: u64,
    pub t_rp_ns: u64,
    pub t_cl_ns: u64,
    pub t_rrd_ns: u64,
    pub dram_burst_bytes_per_ns: u64,

    // XPoint
    pub xpoint_read_ns: u64,
    pub xpoint_write_ns: u64,
    pub xpoint_read_buffer: usize,
    pub xpoint_write_buffer: usize,
    pub startgap_psi: u64,
    pub xpoint_media_ports: usize,

    // controller policy
    pub hot_threshold: u32,
    pub hot_epoch_ns: u64,
    pub max_inflight: usize,
    pub write_high_watermark: usize,
    pub migration_patience_ns: u64,
    pub command_bits: u64,
    pub sideband_ps: u64,
    /// Requests the front end may have outstanding at once.
    pub max_outstanding: usize,

    // power and energy
    pub laser_mw_per_wavelength: f64,
    pub tuning_fj_per_bit: f64,
    pub filter_drop_db: f64,
    pub waveguide_db_per_cm: f64,
    pub splitter_db: f64,
    pub detector_db: f64,
    pub modulator_db: f64,
    pub mrr_tuning_ps: u64,
    pub hc_tuning_ps: u64,
    pub dram_static_w: f64,
    pub dram_dynamic_pj_per_bit: f64,
    pub xpoint_read_nj: f64,
    pub xpoint_write_nj: f64,
    pub electrical_energy_factor: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        let power = OpticalPowerModel::default();
        SimConfig {
            wavelengths: 96,
            controllers: 6,
            frequency_ghz: 30,
            serdes_ps: 1_000,
            propagation_ps: 100,
            register_bytes: 16 * 1024,
            electrical_width_bits: 32,
            electrical_frequency_mhz: 15_000,

            pairs_per_controller: 2,
            banks: 8,
            dram_bytes_per_device: 192 * 1024,
            page_bytes: 4096,
            line_bytes: 128,
            planar_ratio: 8,
            two_level_ratio: 64,

            t_rcd_ns: 25,
            t_rp_ns: 10,
            t_cl_ns: 11,
            t_rrd_ns: 5,
            dram_burst_bytes_per_ns: 64,

            xpoint_read_ns: 190,
            xpoint_write_ns: 763,
            xpoint_read_buffer: 16,
            xpoint_write_buffer: 16,
            startgap_psi: 100,
            xpoint_media_ports: 16,

            hot_threshold: 8,
            hot_epoch_ns: 100_000,
            max_inflight: 64,
            write_high_watermark: 24,
            migration_patience_ns: 1_000,
            command_bits: 64,
            sideband_ps: 1_000,
            max_outstanding: 256,

            laser_mw_per_wavelength: power.laser_power_mw_per_wavelength,
            tuning_fj_per_bit: power.mrr_tuning_energy_fj_per_bit,
            filter_drop_db: power.filter_drop_db,
            waveguide_db_per_cm: power.waveguide_loss_db_per_cm,
            splitter_db: power.splitter_loss_db,
            detector_db: power.detector_loss_db,
            modulator_db: power.modulator_loss_db,
            mrr_tuning_ps: power.tuning_time_normal_ps,
            hc_tuning_ps: power.tuning_time_fine_ps,
            dram_static_w: 1.0,
            dram_dynamic_pj_per_bit: 20.0,
            xpoint_read_nj: 2.0,
            xpoint_write_nj: 10.0,
            electrical_energy_factor: 10.0,
        }
    }
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<SimConfig, ConfigError> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<SimConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        SimConfig::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.controllers == 0 || !self.wavelengths.is_multiple_of(self.controllers) {
            return bad("wavelengths must divide evenly across controllers");
        }
        if self.frequency_ghz == 0 || self.electrical_frequency_mhz == 0 || self.electrical_width_bits == 0 {
            return bad("channel frequency and width must be positive");
        }
        if self.page_bytes == 0 || !self.dram_bytes_per_device.is_multiple_of(self.page_bytes) {
            return bad("dram_bytes_per_device must be a multiple of page_bytes");
        }
        if self.xpoint_media_ports == 0 {
            return bad("xpoint_media_ports must be positive");
        }
        if self.max_inflight == 0 || self.max_outstanding == 0 {
            return bad("max_inflight and max_outstanding must be positive");
        }
        if self.register_bytes < self.page_bytes {
            return bad("register_bytes must hold one page");
        }
        for m in [Mode::Planar, Mode::TwoLevel] {
            self.geometry(m)
                .validate(m)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        self.power_model()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let nonneg = [
            self.dram_static_w,
            self.dram_dynamic_pj_per_bit,
            self.xpoint_read_nj,
            self.xpoint_write_nj,
            self.electrical_energy_factor,
        ];
        if nonneg.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return bad("energy constants must be finite and non-negative");
        }
        Ok(())
    }

    pub fn geometry(&self, mode: Mode) -> Geometry {
        Geometry {
            controllers: u64::from(self.controllers),
            pairs_per_controller: u64::from(self.pairs_per_controller),
            dram_pages_per_device: self.dram_bytes_per_device / self.page_bytes.max(1),
            banks: u64::from(self.banks),
            page_bytes: self.page_bytes,
            line_bytes: self.line_bytes,
            ratio: match mode {
                Mode::Planar => self.planar_ratio,
                Mode::TwoLevel => self.two_level_ratio,
            },
        }
    }

    pub fn vc_width_bits(&self) -> u32 {
        self.wavelengths / self.controllers
    }

    pub fn optical_timing(&self) -> ChannelTiming {
        ChannelTiming {
            width_bits: self.vc_width_bits(),
            frequency_mhz: u64::from(self.frequency_ghz) * 1000,
            serdes_ps: self.serdes_ps,
            propagation_ps: self.propagation_ps,
        }
    }

    pub fn electrical_timing(&self) -> ChannelTiming {
        ChannelTiming {
            width_bits: self.electrical_width_bits,
            frequency_mhz: self.electrical_frequency_mhz,
            serdes_ps: 0,
            propagation_ps: 0,
        }
    }

    pub fn dram_timing(&self) -> DramTiming {
        DramTiming {
            t_rcd_ns: self.t_rcd_ns,
            t_rp_ns: self.t_rp_ns,
            t_cl_ns: self.t_cl_ns,
            t_rrd_ns: self.t_rrd_ns,
            burst_bytes_per_ns: self.dram_burst_bytes_per_ns,
        }
    }

    pub fn xpoint_config(&self) -> XpointConfig {
        XpointConfig {
            read_latency_ns: self.xpoint_read_ns,
            write_latency_ns: self.xpoint_write_ns,
            read_buffer_entries: self.xpoint_read_buffer,
            write_buffer_entries: self.xpoint_write_buffer,
            psi: self.startgap_psi,
            media_ports: self.xpoint_media_ports,
        }
    }

    pub fn power_model(&self) -> OpticalPowerModel {
        OpticalPowerModel {
            mrr_tuning_energy_fj_per_bit: self.tuning_fj_per_bit,
            filter_drop_db: self.filter_drop_db,
            waveguide_loss_db_per_cm: self.waveguide_db_per_cm,
            splitter_loss_db: self.splitter_db,
            detector_loss_db: self.detector_db,
            modulator_loss_db: self.modulator_db,
            laser_power_mw_per_wavelength: self.laser_mw_per_wavelength,
            tuning_time_normal_ps: self.mrr_tuning_ps,
            tuning_time_fine_ps: self.hc_tuning_ps,
        }
    }
}

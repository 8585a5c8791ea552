use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The memory-system configurations compared by the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Platform {
    /// DRAM-only memory on electrical channels; every access is a DRAM access.
    Origin,
    /// Heterogeneous memory on electrical channels, controller-driven copies.
    Hetero,
    /// Heterogeneous memory on the optical channel, controller-driven copies.
    OhmBase,
    /// Adds XPoint-side snarfing of DRAM reads (auto-read/write).
    AutoRw,
    /// Dual routes with WOM-coded swaps plus reverse-write.
    OhmWom,
    /// Dual routes with half-coupled transmitters plus reverse-write.
    OhmBw,
    /// Migration runs on a dedicated channel of its own.
    Oracle,
}

impl Platform {
    pub const ALL: [Platform; 7] = [
        Platform::Origin,
        Platform::Hetero,
        Platform::OhmBase,
        Platform::AutoRw,
        Platform::OhmWom,
        Platform::OhmBw,
        Platform::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Platform::Origin => "origin",
            Platform::Hetero => "hetero",
            Platform::OhmBase => "ohm-base",
            Platform::AutoRw => "auto-rw",
            Platform::OhmWom => "ohm-wom",
            Platform::OhmBw => "ohm-bw",
            Platform::Oracle => "oracle",
        }
    }

    pub fn is_optical(self) -> bool {
        !matches!(self, Platform::Origin | Platform::Hetero)
    }

    pub fn has_xpoint(self) -> bool {
        self != Platform::Origin
    }

    /// XPoint controller snarfs MC-to-DRAM traffic.
    pub fn supports_auto_rw(self) -> bool {
        matches!(self, Platform::AutoRw | Platform::OhmWom | Platform::OhmBw)
    }

    /// SWAP-CMD and the XPoint-side DDR sequence generator.
    pub fn supports_swap(self) -> bool {
        matches!(self, Platform::OhmWom | Platform::OhmBw)
    }

    /// MC-side DDR monitor for reverse writes.
    pub fn supports_reverse_write(self) -> bool {
        matches!(self, Platform::OhmWom | Platform::OhmBw)
    }

    pub fn has_dedicated_migration_channel(self) -> bool {
        self == Platform::Oracle
    }

    /// Laser power multiplier needed to keep the dual-route detectors reliable.
    pub fn laser_multiplier(self) -> f64 {
        match self {
            Platform::AutoRw | Platform::OhmWom => 2.0,
            Platform::OhmBw => 4.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Platform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Platform::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| format!("unknown platform {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// DRAM and XPoint form one flat space; hot pages are swapped in.
    Planar,
    /// DRAM is a direct-mapped inclusive cache in front of XPoint.
    TwoLevel,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Planar => "planar",
            Mode::TwoLevel => "two-level",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "planar" => Ok(Mode::Planar),
            "two-level" | "twolevel" => Ok(Mode::TwoLevel),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

//! Run reports and their JSON/CSV forms.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cost::{cost_estimate, CostEstimate, REFERENCE_DEVICES};
use super::energy::{energy_account, EnergyLedger};
use crate::config::SimConfig;
use crate::controller::system::RouteStats;
use crate::controller::RunStats;
use crate::optical::{reference_operating_points, BerModel, OperatingPoint};
use crate::platform::{Mode, Platform};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub schema_version: u32,
    pub platform: Platform,
    pub mode: Mode,
    pub workload: String,
    pub seed: u64,
    pub requests: u64,
    pub run_time_ps: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LatencySummary {
    pub avg_ns: f64,
    pub p50_ns: f64,
    pub p95_ns: f64,
    pub p99_ns: f64,
    pub max_ns: f64,
}

impl LatencySummary {
    pub fn from_ps(samples: &[u64]) -> Self {
        if samples.is_empty() {
            return LatencySummary::default();
        }
        let mut s = samples.to_vec();
        s.sort_unstable();
        // nearest rank
        let pick = |q: f64| {
            let rank = ((q * s.len() as f64).ceil() as usize).clamp(1, s.len());
            s[rank - 1] as f64 / 1000.0
        };
        LatencySummary {
            avg_ns: s.iter().sum::<u64>() as f64 / s.len() as f64 / 1000.0,
            p50_ns: pick(0.50),
            p95_ns: pick(0.95),
            p99_ns: pick(0.99),
            max_ns: *s.last().expect("non-empty") as f64 / 1000.0,
        }
    }
}

/// Time split of one virtual channel's data route. The three parts add up
/// to `total_ps`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcUsage {
    pub vc: u32,
    pub effective_ps: u64,
    pub wasted_ps: u64,
    pub idle_ps: u64,
    pub total_ps: u64,
}

impl VcUsage {
    pub fn new(vc: u32, route: &RouteStats, run_ps: u64) -> Self {
        let busy = route.effective_ps + route.migration_ps;
        let total_ps = run_ps.max(busy);
        VcUsage {
            vc,
            effective_ps: route.effective_ps,
            wasted_ps: route.migration_ps,
            idle_ps: total_ps - busy,
            total_ps,
        }
    }

    fn frac(&self, part: u64) -> f64 {
        if self.total_ps == 0 {
            0.0
        } else {
            part as f64 / self.total_ps as f64
        }
    }

    pub fn effective(&self) -> f64 {
        self.frac(self.effective_ps)
    }

    pub fn wasted(&self) -> f64 {
        self.frac(self.wasted_ps)
    }

    pub fn idle(&self) -> f64 {
        self.frac(self.idle_ps)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionBer {
    pub function: String,
    pub received_mw: f64,
    pub ber: f64,
}

/// Receiver operating points a platform runs, at its own laser multiplier.
pub fn function_points(platform: Platform) -> Vec<OperatingPoint> {
    let refs = reference_operating_points();
    let get = |name: &str| {
        refs.iter()
            .find(|p| p.name == name)
            .cloned()
            .expect("reference point exists")
    };
    let at = |mut p: OperatingPoint, name: &str| {
        p.name = name.into();
        p.laser_multiplier = platform.laser_multiplier();
        p.measured_ber = None;
        p
    };
    let mut out = Vec::new();
    if !platform.is_optical() {
        return out;
    }
    out.push(at(get("baseline"), "link"));
    if platform.supports_auto_rw() {
        out.push(at(get("wom-auto-rw"), "auto-rw"));
    }
    match platform {
        Platform::OhmWom => out.push(at(get("wom-swap"), "swap")),
        Platform::OhmBw => out.push(at(get("bw-swap"), "swap")),
        _ => {}
    }
    out
}

pub fn platform_ber(cfg: &SimConfig, platform: Platform) -> Vec<FunctionBer> {
    let power = cfg.power_model();
    let model = BerModel::calibrate(&power, &reference_operating_points())
        .map(|(m, _)| m)
        .unwrap_or_default();
    function_points(platform)
        .into_iter()
        .map(|p| {
            let received_mw = p.received_mw(&power);
            FunctionBer {
                function: p.name,
                received_mw,
                ber: model.ber(received_mw).expect("received power is positive"),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub meta: RunMeta,
    pub latency: LatencySummary,
    /// Requests completed per microsecond of simulated time. Stands in for
    /// IPC, which needs a core model.
    pub throughput_req_per_us: f64,
    pub effective_bw: f64,
    pub wasted_bw: f64,
    pub idle_bw: f64,
    pub vc_usage: Vec<VcUsage>,
    /// Migration bits carried on data routes.
    pub data_route_migration_bits: u64,
    pub memory_route_migration_bits: u64,
    pub swaps: u64,
    pub reverse_writes: u64,
    pub dirty_evictions: u64,
    pub energy: EnergyLedger,
    pub energy_total_j: f64,
    pub ber: Vec<FunctionBer>,
    pub cost: CostEstimate,
    pub cost_total_usd: f64,
}

impl MetricsReport {
    pub fn build(
        cfg: &SimConfig,
        platform: Platform,
        mode: Mode,
        workload: &str,
        seed: u64,
        stats: &RunStats,
    ) -> Self {
        let run_ps = stats.run_time.as_ps();
        let vc_usage: Vec<VcUsage> = stats
            .data_routes
            .iter()
            .enumerate()
            .map(|(i, r)| VcUsage::new(i as u32, r, run_ps))
            .collect();
        let total: u64 = vc_usage.iter().map(|v| v.total_ps).sum();
        let share = |f: fn(&VcUsage) -> u64| {
            if total == 0 {
                0.0
            } else {
                vc_usage.iter().map(f).sum::<u64>() as f64 / total as f64
            }
        };
        let energy = energy_account(cfg, platform, stats);
        let cost = cost_estimate(platform, mode, REFERENCE_DEVICES);
        let n = stats.requests.len() as u64;
        MetricsReport {
            meta: RunMeta {
                schema_version: SCHEMA_VERSION,
                platform,
                mode,
                workload: workload.to_string(),
                seed,
                requests: n,
                run_time_ps: run_ps,
            },
            latency: LatencySummary::from_ps(&stats.latencies_ps),
            throughput_req_per_us: if run_ps == 0 { 0.0 } else { n as f64 / (run_ps as f64 * 1e-6) },
            effective_bw: share(|v| v.effective_ps),
            wasted_bw: share(|v| v.wasted_ps),
            idle_bw: share(|v| v.idle_ps),
            vc_usage,
            data_route_migration_bits: stats.data_routes.iter().map(|r| r.migration_bits).sum(),
            memory_route_migration_bits: stats.memory_routes.iter().map(|r| r.migration_bits).sum(),
            swaps: stats.swaps_done,
            reverse_writes: stats.reverse_writes,
            dirty_evictions: stats.dirty_evictions,
            energy_total_j: energy.total(),
            energy,
            ber: platform_ber(cfg, platform),
            cost_total_usd: cost.total_usd(),
            cost,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// `metric,value` rows in a fixed order.
    pub fn rows(&self) -> Vec<(String, String)> {
        let m = &self.meta;
        let mut r: Vec<(String, String)> = vec![
            ("schema_version".into(), m.schema_version.to_string()),
            ("platform".into(), m.platform.to_string()),
            ("mode".into(), m.mode.to_string()),
            ("workload".into(), m.workload.clone()),
            ("seed".into(), m.seed.to_string()),
            ("requests".into(), m.requests.to_string()),
            ("run_time_ps".into(), m.run_time_ps.to_string()),
        ];
        let l = &self.latency;
        for (k, v) in [
            ("latency_avg_ns", l.avg_ns),
            ("latency_p50_ns", l.p50_ns),
            ("latency_p95_ns", l.p95_ns),
            ("latency_p99_ns", l.p99_ns),
            ("latency_max_ns", l.max_ns),
            ("throughput_req_per_us", self.throughput_req_per_us),
            ("effective_bw", self.effective_bw),
            ("wasted_bw", self.wasted_bw),
            ("idle_bw", self.idle_bw),
        ] {
            r.push((k.into(), v.to_string()));
        }
        for v in &self.vc_usage {
            r.push((format!("vc{}_effective_ps", v.vc), v.effective_ps.to_string()));
            r.push((format!("vc{}_wasted_ps", v.vc), v.wasted_ps.to_string()));
            r.push((format!("vc{}_idle_ps", v.vc), v.idle_ps.to_string()));
        }
        for (k, v) in [
            ("data_route_migration_bits", self.data_route_migration_bits),
            ("memory_route_migration_bits", self.memory_route_migration_bits),
            ("swaps", self.swaps),
            ("reverse_writes", self.reverse_writes),
            ("dirty_evictions", self.dirty_evictions),
        ] {
            r.push((k.into(), v.to_string()));
        }
        let e = &self.energy;
        for (k, v) in [
            ("energy_dram_static_j", e.dram_static),
            ("energy_dram_dynamic_j", e.dram_dynamic),
            ("energy_xpoint_j", e.xpoint),
            ("energy_laser_j", e.laser),
            ("energy_tuning_j", e.tuning),
            ("energy_electrical_dma_j", e.electrical_dma),
            ("energy_total_j", self.energy_total_j),
        ] {
            r.push((k.into(), v.to_string()));
        }
        for b in &self.ber {
            r.push((format!("ber_{}", b.function), b.ber.to_string()));
        }
        let c = &self.cost;
        r.push(("cost_modulators".into(), c.modulators.to_string()));
        r.push(("cost_detectors".into(), c.detectors.to_string()));
        r.push(("cost_total_usd".into(), self.cost_total_usd.to_string()));
        r
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        for (k, v) in self.rows() {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn write(&self, path: &Path, format: Format) -> io::Result<()> {
        std::fs::write(path, self.render(format))
    }
}

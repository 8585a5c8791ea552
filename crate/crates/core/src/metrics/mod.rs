//! Run metrics: latency, channel usage, energy, reliability and cost.

pub mod cost;
pub mod energy;
pub mod report;

pub use cost::{cost_estimate, CostEstimate};
pub use energy::{energy_account, EnergyLedger};
pub use report::{platform_ber, Format, FunctionBer, LatencySummary, MetricsReport, VcUsage};

//! One run end to end, and parallel sweeps over platform x mode x workload.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, SimConfig};
use crate::controller::{simulate, ControllerError, MemRequest, SimOptions};
use crate::metrics::{Format, MetricsReport};
use crate::platform::{Mode, Platform};
use crate::workload::{gen_synthetic, parse_trace, SyntheticWorkloadSpec, TraceError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("workload: {0}")]
    Workload(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("{platform} ({mode}): {source}")]
    Sim {
        platform: Platform,
        mode: Mode,
        source: ControllerError,
    },
}

impl ExperimentError {
    pub fn is_protocol_violation(&self) -> bool {
        matches!(self, ExperimentError::Sim { source, .. } if source.is_protocol_violation())
    }
}

#[derive(Clone, Debug)]
pub enum Workload {
    Synthetic(SyntheticWorkloadSpec),
    Trace(PathBuf),
    Requests { name: String, requests: Vec<MemRequest> },
}

impl Workload {
    pub fn name(&self) -> String {
        match self {
            Workload::Synthetic(s) => s.name.clone(),
            Workload::Trace(p) => p.display().to_string(),
            Workload::Requests { name, .. } => name.clone(),
        }
    }

    pub fn requests(&self, line_bytes: u64) -> Result<Vec<MemRequest>, ExperimentError> {
        match self {
            Workload::Synthetic(s) => Ok(gen_synthetic(s)),
            Workload::Trace(p) => {
                let f = std::fs::File::open(p).map_err(|e| ExperimentError::Workload(format!("{}: {e}", p.display())))?;
                Ok(parse_trace(std::io::BufReader::new(f), line_bytes)?)
            }
            Workload::Requests { requests, .. } => Ok(requests.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub platform: Platform,
    pub mode: Mode,
    pub workload: Workload,
    /// Replaces the synthetic generator's seed when set.
    pub seed: Option<u64>,
}

pub fn run_experiment(cfg: &SimConfig, exp: &Experiment) -> Result<MetricsReport, ExperimentError> {
    let mut workload = exp.workload.clone();
    if let (Workload::Synthetic(spec), Some(seed)) = (&mut workload, exp.seed) {
        spec.seed = seed;
    }
    let seed = match &workload {
        Workload::Synthetic(s) => s.seed,
        _ => exp.seed.unwrap_or(0),
    };
    let requests = workload.requests(cfg.line_bytes)?;
    let stats = simulate(cfg, exp.platform, exp.mode, &requests, &SimOptions::default()).map_err(|source| {
        ExperimentError::Sim {
            platform: exp.platform,
            mode: exp.mode,
            source,
        }
    })?;
    Ok(MetricsReport::build(cfg, exp.platform, exp.mode, &workload.name(), seed, &stats))
}

/// A sweep description. Workloads are synthetic spec strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Matrix {
    pub platforms: Vec<Platform>,
    pub modes: Vec<Mode>,
    pub workloads: Vec<String>,
    #[serde(default)]
    pub seeds: Vec<u64>,
    /// Run configuration, relative to the matrix file.
    #[serde(default)]
    pub config: Option<PathBuf>,
    /// Report directory, relative to the matrix file.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Json
}

impl Matrix {
    pub fn load(path: &Path) -> Result<Matrix, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()).into())
    }

    /// Runs in matrix order: workload, then seed, then mode, then platform.
    pub fn experiments(&self) -> Result<Vec<Experiment>, ExperimentError> {
        let seeds: Vec<Option<u64>> = if self.seeds.is_empty() {
            vec![None]
        } else {
            self.seeds.iter().copied().map(Some).collect()
        };
        let mut out = Vec::new();
        for w in &self.workloads {
            let spec: SyntheticWorkloadSpec = w.parse().map_err(ExperimentError::Workload)?;
            for &seed in &seeds {
                for &mode in &self.modes {
                    for &platform in &self.platforms {
                        out.push(Experiment {
                            platform,
                            mode,
                            workload: Workload::Synthetic(spec.clone()),
                            seed,
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Runs every experiment on the rayon pool; results keep input order.
pub fn sweep(cfg: &SimConfig, exps: &[Experiment]) -> Vec<Result<MetricsReport, ExperimentError>> {
    exps.par_iter().map(|e| run_experiment(cfg, e)).collect()
}

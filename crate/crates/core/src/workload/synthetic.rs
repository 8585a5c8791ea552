//! Seeded synthetic request streams with Zipf page popularity.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::controller::{MemRequest, RequestKind};
use crate::sim::SimTime;

/// Abstract instructions retired per ns. Together with `apki_proxy` this
/// sets the offered request rate; it only scales intensity.
pub const INSTRUCTIONS_PER_NS: f64 = 5.0;

const PAGE_BYTES: u64 = 4096;
const ACCESS_BYTES: u64 = 128;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticWorkloadSpec {
    pub name: String,
    /// Requests per 1000 abstract instructions.
    pub apki_proxy: f64,
    pub read_ratio: f64,
    pub footprint_bytes: u64,
    /// Zipf exponent of page popularity.
    pub zipf_exponent: f64,
    pub request_count: u64,
    pub seed: u64,
    /// The popularity ranking is reshuffled this many times over the run.
    pub phases: u32,
}

impl Default for SyntheticWorkloadSpec {
    fn default() -> Self {
        SyntheticWorkloadSpec {
            name: "synthetic".into(),
            apki_proxy: 100.0,
            read_ratio: 0.9,
            footprint_bytes: 8 << 20,
            zipf_exponent: 0.8,
            request_count: 20_000,
            seed: 1,
            phases: 1,
        }
    }
}

/// (name, apki, read ratio, zipf exponent, phases)
pub const BUNDLED: [(&str, f64, f64, f64, u32); 5] = [
    ("pagerank", 599.0, 0.99, 0.9, 1),
    ("GRAMS", 266.0, 0.6, 0.8, 32),
    ("betw", 193.0, 0.99, 0.9, 1),
    ("sssp", 103.0, 0.98, 0.9, 1),
    ("FDTD", 86.0, 0.7, 0.6, 1),
];

/// A bundled workload by name (case-insensitive).
pub fn bundled(name: &str) -> Option<SyntheticWorkloadSpec> {
    BUNDLED
        .iter()
        .enumerate()
        .find(|(_, b)| b.0.eq_ignore_ascii_case(name))
        .map(|(i, &(name, apki, read_ratio, zipf, phases))| SyntheticWorkloadSpec {
            name: name.into(),
            seed: i as u64 + 1,
            apki_proxy: apki,
            read_ratio,
            zipf_exponent: zipf,
            phases,
            ..SyntheticWorkloadSpec::default()
        })
}

impl SyntheticWorkloadSpec {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.apki_proxy > 0.0 && self.apki_proxy.is_finite()) {
            return Err("apki_proxy must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.read_ratio) {
            return Err("read_ratio must lie in [0, 1]".into());
        }
        if self.footprint_bytes < PAGE_BYTES {
            return Err(format!("footprint_bytes must be at least {PAGE_BYTES}"));
        }
        if !(self.zipf_exponent >= 0.0 && self.zipf_exponent.is_finite()) {
            return Err("zipf_exponent must be non-negative".into());
        }
        if self.phases == 0 {
            return Err("phases must be at least 1".into());
        }
        Ok(())
    }

    pub fn pages(&self) -> u64 {
        self.footprint_bytes / PAGE_BYTES
    }
}

/// Accepts a bundled name, optionally followed by overrides, or plain
/// overrides: `pagerank`, `GRAMS,request_count=5000`, `read_ratio=0.5,seed=3`.
impl FromStr for SyntheticWorkloadSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut spec = SyntheticWorkloadSpec::default();
        for (i, part) in s.split(',').map(str::trim).filter(|p| !p.is_empty()).enumerate() {
            let Some((k, v)) = part.split_once('=') else {
                match bundled(part) {
                    Some(b) if i == 0 => {
                        spec = b;
                        continue;
                    }
                    _ => return Err(format!("unknown workload {part:?}")),
                }
            };
            let (k, v) = (k.trim(), v.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|_| format!("bad value for {k}: {v:?}"));
            let int = |v: &str| v.parse::<u64>().map_err(|_| format!("bad value for {k}: {v:?}"));
            match k {
                "name" => spec.name = v.into(),
                "apki_proxy" | "apki" => spec.apki_proxy = num(v)?,
                "read_ratio" => spec.read_ratio = num(v)?,
                "footprint_bytes" => spec.footprint_bytes = int(v)?,
                "zipf_exponent" | "zipf" => spec.zipf_exponent = num(v)?,
                "request_count" | "requests" => spec.request_count = int(v)?,
                "seed" => spec.seed = int(v)?,
                "phases" => spec.phases = int(v)? as u32,
                _ => return Err(format!("unknown workload key {k:?}")),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Generates the request stream. Deterministic per seed.
///
/// # Panics
/// If the spec does not validate.
pub fn gen_synthetic(spec: &SyntheticWorkloadSpec) -> Vec<MemRequest> {
    spec.validate().expect("valid workload spec");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pages = spec.pages();
    let zipf = Zipf::new(pages as f64, spec.zipf_exponent).expect("valid zipf parameters");
    let mut rank_to_page: Vec<u64> = (0..pages).collect();
    rank_to_page.shuffle(&mut rng);
    let per_phase = spec.request_count.div_ceil(u64::from(spec.phases)).max(1);
    let ns_per_request = 1000.0 / (spec.apki_proxy * INSTRUCTIONS_PER_NS);
    let lines = PAGE_BYTES / ACCESS_BYTES;
    let mut out = Vec::with_capacity(spec.request_count as usize);
    for i in 0..spec.request_count {
        if i > 0 && i % per_phase == 0 {
            rank_to_page.shuffle(&mut rng);
        }
        let rank = (zipf.sample(&mut rng) as u64).clamp(1, pages) - 1;
        let page = rank_to_page[rank as usize];
        let addr = page * PAGE_BYTES + rng.random_range(0..lines) * ACCESS_BYTES;
        let kind = if rng.random::<f64>() < spec.read_ratio {
            RequestKind::Read
        } else {
            RequestKind::Write
        };
        let t = (i as f64 * ns_per_request).floor() as u64;
        out.push(MemRequest::new(i, kind, addr, ACCESS_BYTES, SimTime::ns(t)));
    }
    out
}

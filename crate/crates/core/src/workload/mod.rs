//! Request streams: trace files and seeded synthetic generators.

mod synthetic;
mod trace;

pub use synthetic::{bundled, gen_synthetic, SyntheticWorkloadSpec, BUNDLED, INSTRUCTIONS_PER_NS};
pub use trace::{emit_trace, parse_trace, TraceError};

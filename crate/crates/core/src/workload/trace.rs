//! Plain-text traces, one request per line:
//! `<time_ns> <R|W> <hex_addr> <size_bytes>`.
//!
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::io::BufRead;

use thiserror::Error;

use crate::controller::{MemRequest, RequestKind};
use crate::sim::SimTime;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: time {time} ns is earlier than the previous record")]
    Unsorted { line: usize, time: u64 },
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
}

fn bad(line: usize, msg: impl Into<String>) -> TraceError {
    TraceError::Malformed { line, msg: msg.into() }
}

/// Parses a trace. `granule` is the access size every request must be a
/// multiple of.
pub fn parse_trace(input: impl BufRead, granule: u64) -> Result<Vec<MemRequest>, TraceError> {
    let mut out = Vec::new();
    let mut last = 0u64;
    for (i, text) in input.lines().enumerate() {
        let text = text?;
        let line = i + 1;
        let t = text.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let [time, kind, addr, size] = fields[..] else {
            return Err(bad(line, format!("expected 4 fields, found {}", fields.len())));
        };
        let time: u64 = time.parse().map_err(|_| bad(line, format!("bad time {time:?}")))?;
        let kind = match kind {
            "R" | "r" => RequestKind::Read,
            "W" | "w" => RequestKind::Write,
            _ => return Err(bad(line, format!("kind must be R or W, found {kind:?}"))),
        };
        let hex = addr
            .strip_prefix("0x")
            .or_else(|| addr.strip_prefix("0X"))
            .unwrap_or(addr);
        let address = u64::from_str_radix(hex, 16).map_err(|_| bad(line, format!("bad hex address {addr:?}")))?;
        let size: i64 = size.parse().map_err(|_| bad(line, format!("bad size {size:?}")))?;
        if size <= 0 {
            return Err(bad(line, format!("size must be positive, found {size}")));
        }
        let size = size as u64;
        if granule > 0 && !size.is_multiple_of(granule) {
            return Err(bad(line, format!("size {size} is not a multiple of {granule}")));
        }
        if time < last {
            return Err(TraceError::Unsorted { line, time });
        }
        last = time;
        out.push(MemRequest::new(out.len() as u64, kind, address, size, SimTime::ns(time)));
    }
    Ok(out)
}

/// Writes requests in trace format. Issue times are truncated to whole ns.
pub fn emit_trace(requests: &[MemRequest]) -> String {
    let mut s = String::new();
    for r in requests {
        let k = match r.kind {
            RequestKind::Read => 'R',
            RequestKind::Write => 'W',
        };
        let _ = writeln!(s, "{} {} {:#x} {}", r.issue_time.as_ps() / 1000, k, r.address, r.size);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Vec<MemRequest>, TraceError> {
        parse_trace(s.as_bytes(), 128)
    }

    #[test]
    fn single_record() {
        let r = parse("100 R 0x1000 128\n").unwrap();
        assert_eq!(r, vec![MemRequest::new(0, RequestKind::Read, 0x1000, 128, SimTime::ns(100))]);
        assert!(parse("").unwrap().is_empty());
        assert_eq!(parse("# hdr\n\n5 W 80 256").unwrap()[0].address, 0x80);
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("1 R 0x0 128\n0 R 0x0 128", 2),
            ("1 R 0xzz 128", 1),
            ("1 R 0x0 128\n2 R 0x0 0", 2),
            ("1 R 0x0 -128", 1),
            ("1 X 0x0 128", 1),
            ("1 R 0x0", 1),
            ("1 R 0x0 100", 1),
        ];
        for (text, want) in cases {
            let line = match parse(text).unwrap_err() {
                TraceError::Malformed { line, .. } | TraceError::Unsorted { line, .. } => line,
                e => panic!("{e}"),
            };
            assert_eq!(line, want, "{text:?}");
        }
    }

    #[test]
    fn round_trip() {
        let text = "0 R 0x0 128\n3 W 0x1f80 128\n3 R 0xabc000 512\n";
        assert_eq!(emit_trace(&parse(text).unwrap()), text);
    }
}

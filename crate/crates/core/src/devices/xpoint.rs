//! XPoint device: asymmetric media latencies, bounded read and persistent
//! write buffers, Start-Gap translation and versioned line contents.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::startgap::StartGap;
use super::DeviceError;
use crate::sim::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct XpointConfig {
    pub read_latency_ns: u64,
    pub write_latency_ns: u64,
    pub read_buffer_entries: usize,
    pub write_buffer_entries: usize,
    pub psi: u64,
    /// Independent media ports, each serving one read and one write at a
    /// time.
    pub media_ports: usize,
}

impl Default for XpointConfig {
    fn default() -> Self {
        XpointConfig {
            read_latency_ns: 190,
            write_latency_ns: 763,
            read_buffer_entries: 16,
            write_buffer_entries: 16,
            psi: 100,
            media_ports: 1,
        }
    }
}

/// A read accepted by the device. `ready` is when the DDR-T ready signal
/// rises; values are those durable when the media access began.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XpointRead {
    pub media_start: SimTime,
    pub ready: SimTime,
    pub values: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XpointWrite {
    pub media_start: SimTime,
    pub durable: SimTime,
}

#[derive(Clone, Debug)]
pub struct XpointDevice {
    pub config: XpointConfig,
    read_port_free: Vec<SimTime>,
    write_engine_free: Vec<SimTime>,
    /// Release times of occupied buffer entries.
    read_buffer: VecDeque<SimTime>,
    write_buffer: VecDeque<SimTime>,
    startgap: StartGap,
    /// Per physical line: (durable_at, value), oldest first.
    media: HashMap<u64, VecDeque<(SimTime, u64)>>,
    wear: HashMap<u64, u64>,
    pub media_reads: u64,
    pub media_writes: u64,
    pub lines_read: u64,
    pub lines_written: u64,
}

impl XpointDevice {
    pub fn new(config: XpointConfig, lines: u64) -> Result<Self, DeviceError> {
        if config.read_buffer_entries == 0 || config.write_buffer_entries == 0 {
            return Err(DeviceError::Config("XPoint buffers need at least one entry"));
        }
        if config.media_ports == 0 {
            return Err(DeviceError::Config("XPoint needs at least one media port"));
        }
        Ok(XpointDevice {
            config,
            read_port_free: vec![SimTime::ZERO; config.media_ports],
            write_engine_free: vec![SimTime::ZERO; config.media_ports],
            read_buffer: VecDeque::new(),
            write_buffer: VecDeque::new(),
            startgap: StartGap::new(lines.max(1), config.psi)?,
            media: HashMap::new(),
            wear: HashMap::new(),
            media_reads: 0,
            media_writes: 0,
            lines_read: 0,
            lines_written: 0,
        })
    }

    pub fn read_latency(&self) -> SimTime {
        SimTime::ns(self.config.read_latency_ns)
    }

    pub fn write_latency(&self) -> SimTime {
        SimTime::ns(self.config.write_latency_ns)
    }

    pub fn startgap(&self) -> &StartGap {
        &self.startgap
    }

    fn admit(buf: &mut VecDeque<SimTime>, cap: usize, now: SimTime) -> Result<(), DeviceError> {
        buf.retain(|&r| r > now);
        if buf.len() >= cap {
            let retry_at = *buf.iter().min().expect("full buffer");
            return Err(DeviceError::BufferFull { retry_at });
        }
        Ok(())
    }

    fn check(buf: &VecDeque<SimTime>, cap: usize, now: SimTime) -> Result<(), DeviceError> {
        let live = buf.iter().filter(|&&r| r > now);
        if live.clone().count() >= cap {
            let retry_at = live.min().copied().expect("full buffer");
            return Err(DeviceError::BufferFull { retry_at });
        }
        Ok(())
    }

    /// Whether a read issued at `now` would be accepted.
    pub fn check_read(&self, now: SimTime) -> Result<(), DeviceError> {
        Self::check(&self.read_buffer, self.config.read_buffer_entries, now)
    }

    pub fn check_write(&self, now: SimTime) -> Result<(), DeviceError> {
        Self::check(&self.write_buffer, self.config.write_buffer_entries, now)
    }

    pub fn read_buffer_len(&self, now: SimTime) -> usize {
        self.read_buffer.iter().filter(|&&r| r > now).count()
    }

    pub fn write_buffer_len(&self, now: SimTime) -> usize {
        self.write_buffer.iter().filter(|&&r| r > now).count()
    }

    fn earliest(ports: &[SimTime]) -> (usize, SimTime) {
        ports
            .iter()
            .copied()
            .enumerate()
            .min_by_key(|&(i, t)| (t, i))
            .expect("at least one port")
    }

    /// Time the first write engine becomes free.
    pub fn write_engine_free(&self) -> SimTime {
        Self::earliest(&self.write_engine_free).1
    }

    /// Predicted ready time of a read accepted at `now`.
    pub fn read_ready_estimate(&self, now: SimTime) -> SimTime {
        now.max(Self::earliest(&self.read_port_free).1) + self.read_latency()
    }

    /// One media read of `lines` (logical line numbers).
    pub fn read(&mut self, now: SimTime, lines: &[u64]) -> Result<XpointRead, DeviceError> {
        Self::admit(&mut self.read_buffer, self.config.read_buffer_entries, now)?;
        let (port, free) = Self::earliest(&self.read_port_free);
        let media_start = now.max(free);
        let ready = media_start + self.read_latency();
        self.read_port_free[port] = ready;
        let mut values = Vec::with_capacity(lines.len());
        for &l in lines {
            let p = self.startgap.translate(l)?;
            values.push(self.value_at(p, media_start));
        }
        self.read_buffer.push_back(ready);
        self.media_reads += 1;
        self.lines_read += lines.len() as u64;
        Ok(XpointRead {
            media_start,
            ready,
            values,
        })
    }

    /// One media write of `(logical line, value)` pairs.
    pub fn write(&mut self, now: SimTime, lines: &[(u64, u64)]) -> Result<XpointWrite, DeviceError> {
        Self::admit(&mut self.write_buffer, self.config.write_buffer_entries, now)?;
        let (engine, free) = Self::earliest(&self.write_engine_free);
        let media_start = now.max(free);
        let durable = media_start + self.write_latency();
        self.write_engine_free[engine] = durable;
        for &(l, v) in lines {
            let p = self.startgap.translate(l)?;
            self.store(p, durable, v, now);
            if let Some(mv) = self.startgap.record_write() {
                // the gap copy lands with the write that triggered it
                if let Some(hist) = self.media.remove(&mv.from) {
                    self.media.insert(mv.to, hist);
                }
                *self.wear.entry(mv.to).or_default() += 1;
            }
        }
        self.write_buffer.push_back(durable);
        self.media_writes += 1;
        self.lines_written += lines.len() as u64;
        Ok(XpointWrite {
            media_start,
            durable,
        })
    }

    fn store(&mut self, phys: u64, durable: SimTime, value: u64, now: SimTime) {
        *self.wear.entry(phys).or_default() += 1;
        let hist = self.media.entry(phys).or_default();
        // keep one entry already durable at `now` plus anything pending
        while hist.len() >= 2 && hist[1].0 <= now {
            hist.pop_front();
        }
        hist.push_back((durable, value));
    }

    fn value_at(&self, phys: u64, t: SimTime) -> u64 {
        self.media
            .get(&phys)
            .and_then(|h| h.iter().rev().find(|(d, _)| *d <= t))
            .map_or(0, |(_, v)| *v)
    }

    /// Functional read of the latest value, ignoring timing.
    pub fn peek(&self, line: u64) -> Result<u64, DeviceError> {
        let p = self.startgap.translate(line)?;
        Ok(self
            .media
            .get(&p)
            .and_then(|h| h.back())
            .map_or(0, |(_, v)| *v))
    }

    /// Time by which every write accepted so far to `line` is durable.
    pub fn durable_bound(&self, line: u64) -> SimTime {
        self.startgap
            .translate(line)
            .ok()
            .and_then(|p| self.media.get(&p))
            .and_then(|h| h.back())
            .map_or(SimTime::ZERO, |(d, _)| *d)
    }

    pub fn max_line_wear(&self) -> u64 {
        self.wear.values().copied().max().unwrap_or(0)
    }
}

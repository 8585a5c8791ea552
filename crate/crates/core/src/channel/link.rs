//! Serialized transfer timing, route occupancy bookkeeping and the 16 KB
//! device-side register.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::ChannelError;
use crate::sim::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Multiplexing {
    None,
    /// Two data bits per three light bits on the data route.
    Wom,
    /// Half-coupled transmitters: full rate on both routes.
    HalfCoupledBandwidth,
}

/// Physical parameters of one channel (a VC, or an electrical channel).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelTiming {
    pub width_bits: u32,
    pub frequency_mhz: u64,
    pub serdes_ps: u64,
    pub propagation_ps: u64,
}

impl ChannelTiming {
    /// One 16-bit, 30 GHz virtual channel with 1 ns SerDes and 100 ps flight.
    pub fn optical_vc() -> Self {
        ChannelTiming {
            width_bits: 16,
            frequency_mhz: 30_000,
            serdes_ps: 1_000,
            propagation_ps: 100,
        }
    }

    /// One 32-bit, 15 GHz electrical channel.
    pub fn electrical() -> Self {
        ChannelTiming {
            width_bits: 32,
            frequency_mhz: 15_000,
            serdes_ps: 0,
            propagation_ps: 0,
        }
    }

    /// Light bits needed to carry `payload_bits` under `mux`.
    pub fn line_bits(payload_bits: u64, mux: Multiplexing) -> u64 {
        match mux {
            Multiplexing::Wom => payload_bits.div_ceil(2) * 3,
            _ => payload_bits,
        }
    }

    pub fn cycles(&self, payload_bits: u64, mux: Multiplexing) -> u64 {
        Self::line_bits(payload_bits, mux).div_ceil(u64::from(self.width_bits))
    }

    /// Time the route is occupied while serializing the payload.
    pub fn occupancy(&self, payload_bits: u64, mux: Multiplexing) -> SimTime {
        SimTime::ps((self.cycles(payload_bits, mux) * 1_000_000).div_ceil(self.frequency_mhz))
    }

    /// Fixed per-transfer latency outside the occupancy window.
    pub fn overhead(&self) -> SimTime {
        SimTime::ps(self.serdes_ps + self.propagation_ps)
    }

    /// Nominal goodput in bits per second.
    pub fn nominal_bps(&self) -> f64 {
        f64::from(self.width_bits) * self.frequency_mhz as f64 * 1e6
    }
}

/// A completed reservation on a route.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transfer {
    pub start: SimTime,
    /// End of route occupancy.
    pub occupied_until: SimTime,
    /// Payload available at the receiver.
    pub arrival: SimTime,
    pub payload_bits: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Traffic {
    /// Demand requests, commands and their data.
    Effective,
    /// Data migration between DRAM and XPoint.
    Migration,
}

/// Reservation calendar of one route with utilization counters. Transfers
/// take the earliest gap that fits, so a transfer booked for later does not
/// hold up shorter ones that fit before it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RouteTimeline {
    /// start ps -> end ps, non-overlapping.
    busy: BTreeMap<u64, u64>,
    pub effective_ps: u64,
    pub migration_ps: u64,
    pub effective_bits: u64,
    pub migration_bits: u64,
    pub light_bits: u64,
    /// Data-route occupancy and payload carried under WOM multiplexing.
    pub wom_ps: u64,
    pub wom_bits: u64,
}

impl RouteTimeline {
    /// End of the last reservation.
    pub fn busy_until(&self) -> SimTime {
        self.busy
            .last_key_value()
            .map_or(SimTime::ZERO, |(_, &e)| SimTime::ps(e))
    }

    /// Earliest start not before `earliest` with `len` free time.
    pub fn find_slot(&self, earliest: SimTime, len: SimTime) -> SimTime {
        let mut t = earliest.as_ps();
        let len = len.as_ps();
        if let Some((_, &e)) = self.busy.range(..=t).next_back() {
            t = t.max(e);
        }
        for (&s, &e) in self.busy.range(t..) {
            if s >= t + len {
                break;
            }
            t = t.max(e);
        }
        SimTime::ps(t)
    }

    /// True if any reservation intersects `[start, end)`.
    pub fn overlaps(&self, start: SimTime, end: SimTime) -> bool {
        let (s, e) = (start.as_ps(), end.as_ps());
        if let Some((_, &pe)) = self.busy.range(..=s).next_back() {
            if pe > s {
                return true;
            }
        }
        self.busy.range(s..e).next().is_some()
    }

    /// Books `[start, start + len)`; the slot must be free.
    fn book(&mut self, start: SimTime, len: SimTime) {
        if len.as_ps() > 0 {
            debug_assert!(!self.overlaps(start, start + len));
            self.busy.insert(start.as_ps(), (start + len).as_ps());
        }
    }

    /// Reserves the route for `payload_bits` in the first gap at or after
    /// `earliest`.
    pub fn transmit(
        &mut self,
        timing: &ChannelTiming,
        earliest: SimTime,
        payload_bits: u64,
        mux: Multiplexing,
        traffic: Traffic,
    ) -> Transfer {
        let occ = timing.occupancy(payload_bits, mux);
        let start = self.find_slot(earliest, occ);
        self.transmit_at(timing, start, payload_bits, mux, traffic)
    }

    /// Reserves the route starting exactly at `start`, which must be free.
    pub fn transmit_at(
        &mut self,
        timing: &ChannelTiming,
        start: SimTime,
        payload_bits: u64,
        mux: Multiplexing,
        traffic: Traffic,
    ) -> Transfer {
        let occ = timing.occupancy(payload_bits, mux);
        self.book(start, occ);
        let occupied_until = start + occ;
        match traffic {
            Traffic::Effective => {
                self.effective_ps += occ.as_ps();
                self.effective_bits += payload_bits;
            }
            Traffic::Migration => {
                self.migration_ps += occ.as_ps();
                self.migration_bits += payload_bits;
            }
        }
        if mux == Multiplexing::Wom {
            self.wom_ps += occ.as_ps();
            self.wom_bits += payload_bits;
        }
        self.light_bits += ChannelTiming::line_bits(payload_bits, mux);
        Transfer {
            start,
            occupied_until,
            arrival: occupied_until + timing.overhead(),
            payload_bits,
        }
    }

    pub fn busy_ps(&self) -> u64 {
        self.effective_ps + self.migration_ps
    }

    /// Forgets reservations that ended at or before `now`.
    pub fn prune(&mut self, now: SimTime) {
        let now = now.as_ps();
        while let Some((&s, &e)) = self.busy.first_key_value() {
            if e > now {
                break;
            }
            self.busy.remove(&s);
        }
    }
}

/// Earliest start at or after `earliest` at which all `routes` are free for
/// `len`.
pub fn common_slot(routes: &[&RouteTimeline], earliest: SimTime, len: SimTime) -> SimTime {
    let mut t = earliest;
    loop {
        let next = routes.iter().fold(t, |acc, r| r.find_slot(acc, len));
        if next == t {
            return t;
        }
        t = next;
    }
}

/// The device-side register between the SerDes and the memory device.
/// Bytes stay in the register from arrival until the device drains them.
#[derive(Clone, Debug)]
pub struct RegisterBuffer {
    capacity: u64,
    /// (arrival, drain, bytes)
    held: VecDeque<(SimTime, SimTime, u64)>,
}

impl RegisterBuffer {
    pub const DEFAULT_BYTES: u64 = 16 * 1024;

    pub fn new(capacity: u64) -> Self {
        RegisterBuffer {
            capacity,
            held: VecDeque::new(),
        }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn occupancy_at(&self, t: SimTime) -> u64 {
        self.held
            .iter()
            .filter(|(a, d, _)| *a <= t && *d > t)
            .map(|(_, _, b)| b)
            .sum()
    }

    /// Earliest time at or after `earliest` when `bytes` fit.
    pub fn space_at(&self, earliest: SimTime, bytes: u64) -> Result<SimTime, ChannelError> {
        if bytes > self.capacity {
            return Err(ChannelError::PayloadTooLarge {
                bytes,
                capacity: self.capacity,
            });
        }
        let mut drains: Vec<(SimTime, u64)> = self
            .held
            .iter()
            .filter(|(_, d, _)| *d > earliest)
            .map(|&(_, d, b)| (d, b))
            .collect();
        drains.sort_unstable();
        let mut used: u64 = drains.iter().map(|(_, b)| b).sum();
        let mut t = earliest;
        for (d, b) in drains {
            if used + bytes <= self.capacity {
                break;
            }
            used -= b;
            t = d;
        }
        Ok(t)
    }

    /// Records `bytes` held from `arrival` until `drain`.
    pub fn hold(&mut self, bytes: u64, arrival: SimTime, drain: SimTime) {
        self.held.push_back((arrival, drain, bytes));
    }

    pub fn prune(&mut self, now: SimTime) {
        self.held.retain(|(_, d, _)| *d > now);
    }
}

/// Sends `payload_bits` to a device register: stalls the sender until the
/// register has room, then reserves the route. The payload is held in the
/// register until `drain_after` past its arrival.
#[allow(clippy::too_many_arguments)]
pub fn transmit_to_register(
    route: &mut RouteTimeline,
    timing: &ChannelTiming,
    register: &mut RegisterBuffer,
    earliest: SimTime,
    payload_bits: u64,
    mux: Multiplexing,
    traffic: Traffic,
    drain_after: SimTime,
) -> Result<Transfer, ChannelError> {
    let bytes = payload_bits.div_ceil(8);
    let mut start = earliest;
    let occ = timing.occupancy(payload_bits, mux);
    loop {
        let candidate = route.find_slot(start, occ);
        let arrival_guess = candidate + occ + timing.overhead();
        let ok_at = register.space_at(arrival_guess, bytes)?;
        if ok_at == arrival_guess {
            start = candidate;
            break;
        }
        start = candidate + (ok_at - arrival_guess);
    }
    let t = route.transmit_at(timing, start, payload_bits, mux, traffic);
    register.hold(bytes, t.arrival, t.arrival + drain_after);
    Ok(t)
}

//! Deterministic discrete-event engine.
//!
//! Time is an integer count of picoseconds. Events with equal fire time are
//! delivered in the order they were scheduled, so a run is a pure function
//! of its inputs.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;
use std::ops::{Add, AddAssign, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Simulation time in picoseconds.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub const fn ps(ps: u64) -> Self {
        SimTime(ps)
    }

    pub const fn ns(ns: u64) -> Self {
        SimTime(ns * 1_000)
    }

    pub const fn us(us: u64) -> Self {
        SimTime(us * 1_000_000)
    }

    pub const fn as_ps(self) -> u64 {
        self.0
    }

    pub fn as_ns_f64(self) -> f64 {
        self.0 as f64 / 1_000.0
    }

    pub fn saturating_sub(self, other: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(other.0))
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl AddAssign for SimTime {
    fn add_assign(&mut self, rhs: SimTime) {
        self.0 += rhs.0;
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ps", self.0)
    }
}

/// Handle returned by [`Engine::schedule`], used for cancellation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EventHandle(u64);

#[derive(Debug)]
pub struct Event<P> {
    pub fire_time: SimTime,
    pub sequence: u64,
    pub payload: P,
}

impl<P> PartialEq for Event<P> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_time == other.fire_time && self.sequence == other.sequence
    }
}

impl<P> Eq for Event<P> {}

impl<P> PartialOrd for Event<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Event<P> {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        (other.fire_time, other.sequence).cmp(&(self.fire_time, self.sequence))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("event scheduled in the past: fire time {fire} < clock {now}")]
    InThePast { fire: SimTime, now: SimTime },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub events_fired: u64,
    pub last_fire_time: Option<SimTime>,
}

/// The event queue and simulation clock.
pub struct Engine<P> {
    now: SimTime,
    next_sequence: u64,
    queue: BinaryHeap<Event<P>>,
    pending: HashSet<u64>,
}

impl<P> Default for Engine<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> Engine<P> {
    pub fn new() -> Self {
        Engine {
            now: SimTime::ZERO,
            next_sequence: 0,
            queue: BinaryHeap::new(),
            pending: HashSet::new(),
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    pub fn schedule(&mut self, fire_time: SimTime, payload: P) -> Result<EventHandle, ScheduleError> {
        if fire_time < self.now {
            return Err(ScheduleError::InThePast {
                fire: fire_time,
                now: self.now,
            });
        }
        let sequence = self.next_sequence;
        self.next_sequence += 1;
        self.queue.push(Event {
            fire_time,
            sequence,
            payload,
        });
        self.pending.insert(sequence);
        Ok(EventHandle(sequence))
    }

    /// Returns true iff the event had not fired yet (and now never will).
    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        self.pending.remove(&handle.0)
    }

    /// Pops the next live event with `fire_time <= limit`, advancing the clock.
    pub fn pop_due(&mut self, limit: SimTime) -> Option<Event<P>> {
        while let Some(top) = self.queue.peek() {
            if top.fire_time > limit {
                return None;
            }
            let ev = self.queue.pop().expect("peeked");
            if self.pending.remove(&ev.sequence) {
                self.now = ev.fire_time;
                return Some(ev);
            }
        }
        None
    }

    /// Delivers every event with `fire_time <= limit` to `handler`, in
    /// (time, sequence) order. The handler may schedule further events.
    pub fn run_until<F>(&mut self, limit: SimTime, mut handler: F) -> RunSummary
    where
        F: FnMut(&mut Engine<P>, Event<P>),
    {
        let mut summary = RunSummary::default();
        while let Some(ev) = self.pop_due(limit) {
            summary.events_fired += 1;
            summary.last_fire_time = Some(ev.fire_time);
            handler(self, ev);
        }
        if limit != SimTime::MAX && limit > self.now {
            self.now = limit;
        }
        summary
    }

    /// Runs until the queue is empty.
    pub fn run<F>(&mut self, handler: F) -> RunSummary
    where
        F: FnMut(&mut Engine<P>, Event<P>),
    {
        self.run_until(SimTime::MAX, handler)
    }
}

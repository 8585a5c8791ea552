//! DRAM banks with an ACT/PRE/RD/WR timing state machine.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::DeviceError;
use crate::sim::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DramTiming {
    pub t_rcd_ns: u64,
    pub t_rp_ns: u64,
    pub t_cl_ns: u64,
    pub t_rrd_ns: u64,
    /// Device-internal data rate for column bursts.
    pub burst_bytes_per_ns: u64,
}

impl Default for DramTiming {
    fn default() -> Self {
        DramTiming {
            t_rcd_ns: 25,
            t_rp_ns: 10,
            t_cl_ns: 11,
            t_rrd_ns: 5,
            burst_bytes_per_ns: 64,
        }
    }
}

impl DramTiming {
    pub fn t_rcd(&self) -> SimTime {
        SimTime::ns(self.t_rcd_ns)
    }
    pub fn t_rp(&self) -> SimTime {
        SimTime::ns(self.t_rp_ns)
    }
    pub fn t_cl(&self) -> SimTime {
        SimTime::ns(self.t_cl_ns)
    }
    pub fn t_rrd(&self) -> SimTime {
        SimTime::ns(self.t_rrd_ns)
    }
    pub fn burst(&self, bytes: u64) -> SimTime {
        SimTime::ps((bytes * 1000).div_ceil(self.burst_bytes_per_ns.max(1)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DramCommand {
    Act,
    Pre,
    Rd,
    Wr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BankState {
    Precharged,
    Activated,
}

/// Result of a legal command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Issued {
    /// First data beat for column commands; the state change for ACT/PRE.
    pub first_data: SimTime,
    /// Last data beat for column commands.
    pub done: SimTime,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DramBank {
    pub state: BankState,
    pub open_row: Option<u64>,
    last_act: Option<SimTime>,
    last_pre: Option<SimTime>,
    /// Next column command may issue once the previous burst has started.
    next_column: SimTime,
    /// Data of the last column command completes.
    data_done: SimTime,
}

impl Default for DramBank {
    fn default() -> Self {
        DramBank {
            state: BankState::Precharged,
            open_row: None,
            last_act: None,
            last_pre: None,
            next_column: SimTime::ZERO,
            data_done: SimTime::ZERO,
        }
    }
}

impl DramBank {
    /// Earliest legal time for `cmd` given bank-local constraints, or an
    /// error if the command is illegal in the current state.
    pub fn earliest(
        &self,
        t: &DramTiming,
        cmd: DramCommand,
        row: u64,
    ) -> Result<SimTime, DeviceError> {
        match (cmd, self.state) {
            (DramCommand::Act, BankState::Precharged) => {
                Ok(self.last_pre.map_or(SimTime::ZERO, |p| p + t.t_rp()))
            }
            (DramCommand::Pre, BankState::Activated) => Ok(self.data_done),
            (DramCommand::Rd | DramCommand::Wr, BankState::Activated) => {
                if self.open_row != Some(row) {
                    return Err(DeviceError::Protocol(format!(
                        "{cmd:?} to row {row} but row {:?} is open",
                        self.open_row
                    )));
                }
                let act = self.last_act.expect("activated bank has an ACT");
                Ok((act + t.t_rcd()).max(self.next_column))
            }
            (cmd, state) => Err(DeviceError::Protocol(format!("{cmd:?} while {state:?}"))),
        }
    }

    pub fn issue(
        &mut self,
        t: &DramTiming,
        cmd: DramCommand,
        row: u64,
        bytes: u64,
        at: SimTime,
    ) -> Result<Issued, DeviceError> {
        let earliest = self.earliest(t, cmd, row)?;
        if at < earliest {
            return Err(DeviceError::Protocol(format!(
                "{cmd:?} at {at} violates timing (earliest {earliest})"
            )));
        }
        Ok(match cmd {
            DramCommand::Act => {
                self.state = BankState::Activated;
                self.open_row = Some(row);
                self.last_act = Some(at);
                Issued { first_data: at, done: at }
            }
            DramCommand::Pre => {
                self.state = BankState::Precharged;
                self.open_row = None;
                self.last_pre = Some(at);
                Issued { first_data: at, done: at }
            }
            DramCommand::Rd | DramCommand::Wr => {
                let first = at + t.t_cl();
                let done = first + t.burst(bytes);
                self.next_column = at + t.burst(bytes);
                self.data_done = self.data_done.max(done);
                Issued { first_data: first, done }
            }
        })
    }
}

/// Outcome of a row-managed access: the commands issued and when.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Access {
    pub commands: Vec<(DramCommand, SimTime)>,
    pub first_data: SimTime,
    pub done: SimTime,
    pub row_hit: bool,
}

/// One DRAM device: banks, the cross-bank ACT spacing and line contents.
#[derive(Clone, Debug)]
pub struct DramDevice {
    pub timing: DramTiming,
    banks: Vec<DramBank>,
    /// ACT issue times on any bank, ascending.
    acts: VecDeque<SimTime>,
    data: HashMap<u64, u64>,
    pub bytes_read: u64,
    pub bytes_written: u64,
    pub activates: u64,
}

impl DramDevice {
    pub fn new(timing: DramTiming, n_banks: usize) -> Self {
        DramDevice {
            timing,
            banks: vec![DramBank::default(); n_banks.max(1)],
            acts: VecDeque::new(),
            data: HashMap::new(),
            bytes_read: 0,
            bytes_written: 0,
            activates: 0,
        }
    }

    pub fn n_banks(&self) -> usize {
        self.banks.len()
    }

    pub fn bank(&self, b: usize) -> &DramBank {
        &self.banks[b]
    }

    pub fn earliest(&self, bank: usize, cmd: DramCommand, row: u64) -> Result<SimTime, DeviceError> {
        let e = self.banks[bank].earliest(&self.timing, cmd, row)?;
        Ok(if cmd == DramCommand::Act { self.act_slot(e) } else { e })
    }

    /// First time at or after `t` that keeps tRRD from every booked ACT.
    fn act_slot(&self, mut t: SimTime) -> SimTime {
        let rrd = self.timing.t_rrd();
        for &a in &self.acts {
            if a >= t + rrd {
                break;
            }
            if a + rrd > t {
                t = a + rrd;
            }
        }
        t
    }

    fn act_allowed(&self, at: SimTime) -> bool {
        let rrd = self.timing.t_rrd();
        self.acts.iter().all(|&a| a + rrd <= at || at + rrd <= a)
    }

    /// Issues one command; column commands move `bytes`.
    pub fn issue(
        &mut self,
        bank: usize,
        cmd: DramCommand,
        row: u64,
        bytes: u64,
        at: SimTime,
    ) -> Result<Issued, DeviceError> {
        let e = self.banks[bank].earliest(&self.timing, cmd, row)?;
        if at < e || (cmd == DramCommand::Act && !self.act_allowed(at)) {
            return Err(DeviceError::Protocol(format!(
                "{cmd:?} on bank {bank} at {at} violates timing (earliest {e})"
            )));
        }
        let r = self.banks[bank].issue(&self.timing, cmd, row, bytes, at)?;
        match cmd {
            DramCommand::Act => {
                let pos = self.acts.partition_point(|&a| a <= at);
                self.acts.insert(pos, at);
                self.activates += 1;
            }
            DramCommand::Rd => self.bytes_read += bytes,
            DramCommand::Wr => self.bytes_written += bytes,
            DramCommand::Pre => {}
        }
        Ok(r)
    }

    /// Issues `cmd` at the earliest legal time not before `not_before`.
    pub fn issue_asap(
        &mut self,
        bank: usize,
        cmd: DramCommand,
        row: u64,
        bytes: u64,
        not_before: SimTime,
    ) -> Result<(SimTime, Issued), DeviceError> {
        let e = self.banks[bank].earliest(&self.timing, cmd, row)?.max(not_before);
        let at = if cmd == DramCommand::Act { self.act_slot(e) } else { e };
        Ok((at, self.issue(bank, cmd, row, bytes, at)?))
    }

    /// Opens `row` if needed (PRE and ACT) and issues one column command.
    pub fn access(
        &mut self,
        bank: usize,
        row: u64,
        write: bool,
        bytes: u64,
        not_before: SimTime,
    ) -> Result<Access, DeviceError> {
        let mut commands = Vec::new();
        let b = &self.banks[bank];
        let row_hit = b.state == BankState::Activated && b.open_row == Some(row);
        let mut t = not_before;
        if !row_hit {
            if self.banks[bank].state == BankState::Activated {
                let (at, _) = self.issue_asap(bank, DramCommand::Pre, row, 0, t)?;
                commands.push((DramCommand::Pre, at));
                t = at;
            }
            let (at, _) = self.issue_asap(bank, DramCommand::Act, row, 0, t)?;
            commands.push((DramCommand::Act, at));
            t = at;
        }
        let cmd = if write { DramCommand::Wr } else { DramCommand::Rd };
        let (at, r) = self.issue_asap(bank, cmd, row, bytes, t)?;
        commands.push((cmd, at));
        Ok(Access {
            commands,
            first_data: r.first_data,
            done: r.done,
            row_hit,
        })
    }

    /// First-data time a read of `row` would see if issued now, without
    /// changing any state.
    pub fn estimate(&self, bank: usize, row: u64, not_before: SimTime) -> SimTime {
        let t = &self.timing;
        let b = &self.banks[bank];
        if b.state == BankState::Activated && b.open_row == Some(row) {
            let rd = b
                .earliest(t, DramCommand::Rd, row)
                .unwrap_or(SimTime::MAX)
                .max(not_before);
            return rd + t.t_cl();
        }
        let mut act = not_before;
        match b.state {
            BankState::Activated => act = act.max(b.data_done) + t.t_rp(),
            BankState::Precharged => {
                if let Some(p) = b.last_pre {
                    act = act.max(p + t.t_rp());
                }
            }
        }
        self.act_slot(act) + t.t_rcd() + t.t_cl()
    }

    /// Drops ACT history that can no longer constrain a command at or
    /// after `now`.
    pub fn prune(&mut self, now: SimTime) {
        let rrd = self.timing.t_rrd();
        while self.acts.front().is_some_and(|&a| a + rrd <= now) {
            self.acts.pop_front();
        }
    }

    pub fn row_open(&self, bank: usize, row: u64) -> bool {
        self.banks[bank].open_row == Some(row)
    }

    pub fn read_line(&self, frame_line: u64) -> u64 {
        self.data.get(&frame_line).copied().unwrap_or(0)
    }

    pub fn write_line(&mut self, frame_line: u64, value: u64) {
        self.data.insert(frame_line, value);
    }
}

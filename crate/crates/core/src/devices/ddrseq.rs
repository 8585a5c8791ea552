//! XPoint-side DDR sequence generator: once the controller has preset a
//! DRAM bank, reads the old DRAM lines out and writes the XPoint lines in.

use super::dram::{BankState, DramBank, DramCommand, DramDevice};
use super::DeviceError;
use crate::sim::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapTask {
    pub bank: usize,
    pub row: u64,
    pub lines: u32,
    pub line_bytes: u64,
}

pub fn ddr_seq_generate(task: &SwapTask, bank: &DramBank) -> Result<Vec<DramCommand>, DeviceError> {
    if task.lines == 0 {
        return Ok(Vec::new());
    }
    if bank.state != BankState::Activated || bank.open_row != Some(task.row) {
        return Err(DeviceError::Protocol(format!(
            "swap on bank {} row {} but bank is {:?} with row {:?}",
            task.bank, task.row, bank.state, bank.open_row
        )));
    }
    let n = task.lines as usize;
    let mut seq = vec![DramCommand::Rd; n];
    seq.extend(std::iter::repeat_n(DramCommand::Wr, n));
    Ok(seq)
}

/// Issue times of the generated column commands.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Replay {
    /// Data of each RD, in order.
    pub reads: Vec<(SimTime, SimTime)>,
    pub writes: Vec<(SimTime, SimTime)>,
}

impl Replay {
    pub fn first_read_data(&self) -> Option<SimTime> {
        self.reads.first().map(|r| r.0)
    }
    pub fn end(&self) -> Option<SimTime> {
        self.writes.last().or(self.reads.last()).map(|r| r.1)
    }
}

/// Issues `seq` against `dram` as early as timing allows. `write_ready[i]`
/// holds the earliest time the data of the i-th WR is on hand.
pub fn replay(
    dram: &mut DramDevice,
    task: &SwapTask,
    seq: &[DramCommand],
    not_before: SimTime,
    write_ready: &dyn Fn(usize) -> SimTime,
) -> Result<Replay, DeviceError> {
    let mut out = Replay::default();
    let mut t = not_before;
    for &cmd in seq {
        let nb = match cmd {
            DramCommand::Wr => t.max(write_ready(out.writes.len())),
            _ => t,
        };
        let (at, r) = dram.issue_asap(task.bank, cmd, task.row, task.line_bytes, nb)?;
        t = at;
        match cmd {
            DramCommand::Rd => out.reads.push((r.first_data, r.done)),
            DramCommand::Wr => out.writes.push((r.first_data, r.done)),
            _ => {}
        }
    }
    Ok(out)
}

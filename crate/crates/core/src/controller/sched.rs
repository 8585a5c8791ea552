//! FR-FCFS request selection with demand-read priority and background
//! migration launches.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub id: u64,
    /// Arrival order; lower is older.
    pub seq: u64,
    pub row_hit: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReadyTask {
    pub id: u64,
    /// Waited past the patience limit.
    pub overdue: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Queues<'a> {
    /// Issuable reads (no hazard or conflict).
    pub reads: &'a [Candidate],
    pub writes: &'a [Candidate],
    /// Writes queued, eligible or not.
    pub writes_queued: usize,
    pub write_high_watermark: usize,
    pub task: Option<ReadyTask>,
    /// Launch migrations alongside background writes.
    pub launch_with_writes: bool,
    /// Request slots are free.
    pub can_issue: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Read(u64),
    Write(u64),
    Launch(u64),
    Idle,
}

/// Row hits first, then oldest.
pub fn fr_fcfs(c: &[Candidate]) -> Option<&Candidate> {
    c.iter().min_by_key(|c| (!c.row_hit, c.seq))
}

pub fn schedule(q: &Queues<'_>) -> Action {
    if let Some(t) = q.task {
        if t.overdue {
            return Action::Launch(t.id);
        }
    }
    let write_drain = q.writes_queued > q.write_high_watermark;
    if q.can_issue && write_drain {
        if let Some(w) = fr_fcfs(q.writes) {
            return Action::Write(w.id);
        }
    }
    if let Some(t) = q.task {
        if q.launch_with_writes && q.writes_queued > 0 {
            return Action::Launch(t.id);
        }
    }
    if q.can_issue {
        if let Some(r) = fr_fcfs(q.reads) {
            return Action::Read(r.id);
        }
    }
    if let Some(t) = q.task {
        if q.reads.is_empty() {
            return Action::Launch(t.id);
        }
    }
    if q.can_issue {
        if let Some(w) = fr_fcfs(q.writes) {
            return Action::Write(w.id);
        }
    }
    Action::Idle
}

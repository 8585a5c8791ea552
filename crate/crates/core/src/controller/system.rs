//! Event-driven run of all controllers, their channels and devices for one
//! platform and mode.
//!
//! Operations book time on shared resources (route calendars, DRAM banks,
//! XPoint ports) when they are issued, and the engine fires an event when
//! each request, fill or migration finishes. Data values move when an
//! operation is issued; locks and per-line ordering keep that equivalent
//! to moving them at their booked times.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::address::{place, planar_xpoint_frame, two_level_xpoint_line, Decoded, Geometry};
use super::planar::{PlanarTable, SwapDecision, DRAM_FRAME};
use super::sched::{self, Action, Candidate, Queues, ReadyTask};
use super::task::{detect_conflict, Footprint, MigrationTask, TaskKind, TaskState};
use super::twolevel::{Lookup, TwoLevelCache};
use super::{decode_address, ControllerError, MemRequest, RequestKind};
use crate::channel::{
    common_slot, establish_dual_route, Arbiter, ChannelTiming, Function, Multiplexing,
    RouteTimeline, Traffic, Transfer,
};
use crate::config::SimConfig;
use crate::devices::ddrseq::{ddr_seq_generate, replay, SwapTask};
use crate::devices::{
    BankState, ChannelTransaction, CommandKind, DeviceError, DramCommand, DramDevice, SnarfUnit,
    XpointDevice,
};
use crate::platform::{Mode, Platform};
use crate::sim::{Engine, Event, SimTime};

/// 1 command byte, 8-byte DRAM address, 8-byte XPoint address, 4-byte size.
pub const SWAP_CMD_BITS: u64 = (1 + 8 + 8 + 4) * 8;

#[derive(Clone, Debug, Default)]
pub struct SimOptions {
    /// Keep the per-swap handshake steps in the stats.
    pub record_handshakes: bool,
    /// Keep every value a read returned and the final contents of every
    /// written line.
    pub record_values: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HandshakeStep {
    Preset,
    SwapCmd,
    MigrationRead,
    MigrationWrite,
    Ready,
    Confirm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandshakeEvent {
    pub task: u64,
    pub step: HandshakeStep,
    pub time: SimTime,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteStats {
    pub effective_ps: u64,
    pub migration_ps: u64,
    pub effective_bits: u64,
    pub migration_bits: u64,
    pub light_bits: u64,
    pub wom_ps: u64,
    pub wom_bits: u64,
}

impl From<&RouteTimeline> for RouteStats {
    fn from(r: &RouteTimeline) -> Self {
        RouteStats {
            effective_ps: r.effective_ps,
            migration_ps: r.migration_ps,
            effective_bits: r.effective_bits,
            migration_bits: r.migration_bits,
            light_bits: r.light_bits,
            wom_ps: r.wom_ps,
            wom_bits: r.wom_bits,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub run_time: SimTime,
    /// Requests with completion times filled in, in input order.
    pub requests: Vec<MemRequest>,
    /// Completion minus admission, per request.
    pub latencies_ps: Vec<u64>,
    pub reads_checked: u64,
    pub read_mismatches: u64,
    pub lines_checked: u64,
    pub image_mismatches: u64,
    pub inclusion_violations: u64,
    pub data_routes: Vec<RouteStats>,
    pub memory_routes: Vec<RouteStats>,
    pub dedicated_routes: Vec<RouteStats>,
    pub dram_bytes_read: u64,
    pub dram_bytes_written: u64,
    pub dram_activates: u64,
    pub xpoint_media_reads: u64,
    pub xpoint_media_writes: u64,
    pub xpoint_lines_read: u64,
    pub xpoint_lines_written: u64,
    pub xpoint_max_line_wear: u64,
    pub swaps_enqueued: u64,
    pub swaps_done: u64,
    pub served_dram: u64,
    pub served_xpoint: u64,
    /// Sum over migrations of launch minus enqueue.
    pub migration_wait_ps: u64,
    /// Sum over migrations of done minus launch.
    pub migration_busy_ps: u64,
    pub two_level_lookups: u64,
    pub two_level_hits: u64,
    /// DRAM accesses made by two-level hits before they were served.
    pub hit_dram_accesses: u64,
    pub dirty_evictions: u64,
    pub reverse_writes: u64,
    pub snarfed_transfers: u64,
    pub arbitration_violations: u64,
    pub handshakes: Vec<HandshakeEvent>,
    /// (request id, line address, value) per line read, in completion
    /// order. Written values count up from 1 in request order.
    pub read_values: Vec<(u64, u64, u64)>,
    /// (line address, value) for every written line, ascending.
    pub final_image: Vec<(u64, u64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ev {
    Admit,
    TryIssue(usize),
    XpReady(usize),
    Complete(usize),
    TaskDone(usize),
    Unlock(usize, u64),
}

struct Pair {
    dram: DramDevice,
    xpoint: XpointDevice,
    snarf: SnarfUnit,
}

struct Mc {
    pairs: Vec<Pair>,
    reads: Vec<usize>,
    writes: Vec<usize>,
    inflight: usize,
    data: RouteTimeline,
    memory: RouteTimeline,
    dedicated: RouteTimeline,
    frozen_until: SimTime,
    open_tasks: Vec<usize>,
    /// Hazard key -> pieces in arrival order.
    hazards: HashMap<u64, VecDeque<usize>>,
    inflight_pages: HashMap<u64, u32>,
    locked_index: HashSet<u64>,
    arbiter: Arbiter,
    try_at: Option<SimTime>,
}

/// A line-sized part of a request.
#[derive(Clone, Debug)]
struct Piece {
    req: usize,
    write: bool,
    addr: u64,
    value: u64,
    expected: u64,
    seq: u64,
    mc: usize,
    pair: usize,
    key: u64,
    /// Planar group, two-level index or page.
    unit: u64,
    /// Planar slot or two-level tag.
    slot: u64,
    /// DRAM page frame (planar, origin) or DRAM line (two-level).
    local: u64,
    line_in_page: u64,
    page: u64,
    retry_at: SimTime,
}

struct ReqState {
    admitted: SimTime,
    left: usize,
    done: Option<SimTime>,
    controller: usize,
}

struct TaskRec {
    task: MigrationTask,
    mc: usize,
    pair: usize,
    hot_page: u64,
    cold_page: u64,
    bank: usize,
    row: u64,
}

enum Target {
    Dram,
    Xpoint(u64),
}

struct Sim<'a> {
    cfg: &'a SimConfig,
    platform: Platform,
    mode: Mode,
    geo: Geometry,
    data_timing: ChannelTiming,
    vc_timing: ChannelTiming,
    mcs: Vec<Mc>,
    pieces: Vec<Piece>,
    reqs: Vec<ReqState>,
    records: &'a [MemRequest],
    next_record: usize,
    outstanding: usize,
    admit_pending: bool,
    planar: Option<PlanarTable>,
    cache: Option<TwoLevelCache>,
    tasks: Vec<TaskRec>,
    reference: HashMap<u64, u64>,
    next_value: u64,
    next_seq: u64,
    stats: RunStats,
    opts: SimOptions,
    error: Option<ControllerError>,
}

type Eng = Engine<Ev>;

/// Runs `requests` (sorted by issue time) on `platform` in `mode`.
pub fn simulate(
    cfg: &SimConfig,
    platform: Platform,
    mode: Mode,
    requests: &[MemRequest],
    opts: &SimOptions,
) -> Result<RunStats, ControllerError> {
    cfg.validate()
        .map_err(|e| ControllerError::Invalid(e.to_string()))?;
    if requests.windows(2).any(|w| w[1].issue_time < w[0].issue_time) {
        return Err(ControllerError::Invalid("requests must be sorted by issue time".into()));
    }
    let mut sim = Sim::new(cfg, platform, mode, requests, opts.clone())?;
    let mut engine: Eng = Engine::new();
    if !requests.is_empty() {
        sim.schedule(&mut engine, requests[0].issue_time, Ev::Admit);
        sim.admit_pending = true;
    }
    let summary = engine.run(|eng, ev| sim.handle(eng, ev));
    if let Some(e) = sim.error.take() {
        return Err(e);
    }
    if sim.next_record < requests.len() || sim.outstanding > 0 {
        return Err(ControllerError::Invalid("run ended with requests outstanding".into()));
    }
    sim.finish(summary.last_fire_time.unwrap_or(SimTime::ZERO))
}

impl<'a> Sim<'a> {
    fn new(
        cfg: &'a SimConfig,
        platform: Platform,
        mode: Mode,
        records: &'a [MemRequest],
        opts: SimOptions,
    ) -> Result<Self, ControllerError> {
        let geo = cfg.geometry(mode);
        geo.validate(mode)?;
        let data_timing = if platform.is_optical() {
            cfg.optical_timing()
        } else {
            cfg.electrical_timing()
        };
        let xp_lines = geo.xpoint_lines_per_device();
        let mut mcs = Vec::new();
        for _ in 0..geo.controllers {
            let mut pairs = Vec::new();
            for _ in 0..geo.pairs_per_controller {
                pairs.push(Pair {
                    dram: DramDevice::new(cfg.dram_timing(), geo.banks as usize),
                    xpoint: XpointDevice::new(cfg.xpoint_config(), xp_lines)?,
                    snarf: SnarfUnit::new(platform.supports_auto_rw()),
                });
            }
            let devices = (0..2 * geo.pairs_per_controller as u32).collect();
            mcs.push(Mc {
                pairs,
                reads: Vec::new(),
                writes: Vec::new(),
                inflight: 0,
                data: RouteTimeline::default(),
                memory: RouteTimeline::default(),
                dedicated: RouteTimeline::default(),
                frozen_until: SimTime::ZERO,
                open_tasks: Vec::new(),
                hazards: HashMap::new(),
                inflight_pages: HashMap::new(),
                locked_index: HashSet::new(),
                arbiter: Arbiter::new(devices),
                try_at: None,
            });
        }
        let planar = (mode == Mode::Planar && platform != Platform::Origin)
            .then(|| PlanarTable::new(geo.ratio, cfg.hot_threshold, cfg.hot_epoch_ns));
        let cache = if mode == Mode::TwoLevel && platform != Platform::Origin {
            Some(TwoLevelCache::new(geo.dram_lines(), geo.ratio)?)
        } else {
            None
        };
        Ok(Sim {
            cfg,
            platform,
            mode,
            geo,
            data_timing,
            vc_timing: cfg.optical_timing(),
            mcs,
            pieces: Vec::new(),
            reqs: Vec::new(),
            records,
            next_record: 0,
            outstanding: 0,
            admit_pending: false,
            planar,
            cache,
            tasks: Vec::new(),
            reference: HashMap::new(),
            next_value: 1,
            next_seq: 0,
            stats: RunStats::default(),
            opts,
            error: None,
        })
    }

    fn schedule(&mut self, eng: &mut Eng, at: SimTime, ev: Ev) {
        if let Err(e) = eng.schedule(at, ev) {
            self.error
                .get_or_insert(ControllerError::Invalid(format!("scheduling failed: {e}")));
        }
    }

    fn schedule_try(&mut self, eng: &mut Eng, mc: usize, at: SimTime) {
        if let Some(t) = self.mcs[mc].try_at {
            if t <= at && t >= eng.now() {
                return;
            }
        }
        self.mcs[mc].try_at = Some(at);
        self.schedule(eng, at, Ev::TryIssue(mc));
    }

    fn handle(&mut self, eng: &mut Eng, ev: Event<Ev>) {
        if self.error.is_some() {
            return;
        }
        let now = ev.fire_time;
        let r = match ev.payload {
            Ev::Admit => self.admit(eng, now),
            Ev::TryIssue(mc) => {
                if self.mcs[mc].try_at == Some(now) {
                    self.mcs[mc].try_at = None;
                }
                self.try_issue(eng, mc, now)
            }
            Ev::XpReady(pid) => self.fill_phase(eng, pid, now),
            Ev::Complete(pid) => {
                self.complete(eng, pid, now);
                Ok(())
            }
            Ev::TaskDone(tid) => {
                let mc = self.tasks[tid].mc;
                self.tasks[tid].task.state = TaskState::Done;
                self.mcs[mc].open_tasks.retain(|&t| t != tid);
                self.stats.swaps_done += 1;
                self.schedule_try(eng, mc, now);
                Ok(())
            }
            Ev::Unlock(mc, index) => {
                self.mcs[mc].locked_index.remove(&index);
                self.schedule_try(eng, mc, now);
                Ok(())
            }
        };
        if let Err(e) = r {
            self.error = Some(e);
        }
    }

    // ---- front end ----

    fn admit(&mut self, eng: &mut Eng, now: SimTime) -> Result<(), ControllerError> {
        self.admit_pending = false;
        while self.next_record < self.records.len() && self.outstanding < self.cfg.max_outstanding {
            let at = self.records[self.next_record].issue_time;
            if at > now {
                self.admit_pending = true;
                self.schedule(eng, at, Ev::Admit);
                return Ok(());
            }
            self.admit_request(eng, self.next_record, now)?;
            self.next_record += 1;
        }
        Ok(())
    }

    fn admit_request(&mut self, eng: &mut Eng, idx: usize, now: SimTime) -> Result<(), ControllerError> {
        let r = &self.records[idx];
        let capacity = self.geo.capacity(self.mode);
        if r.size == 0 || r.address.checked_add(r.size).is_none_or(|end| end > capacity) {
            return Err(ControllerError::OutOfRange {
                addr: r.address.saturating_add(r.size),
                capacity,
            });
        }
        let lb = self.geo.line_bytes;
        let first = r.address / lb;
        let last = (r.address + r.size - 1) / lb;
        let req_idx = self.reqs.len();
        self.reqs.push(ReqState {
            admitted: now,
            left: (last - first + 1) as usize,
            done: None,
            controller: 0,
        });
        self.outstanding += 1;
        let trace_ns = r.issue_time.as_ps() / 1000;
        let write = r.kind == RequestKind::Write;
        let mut mcs_touched = BTreeSet::new();
        for line in first..=last {
            let addr = line * lb;
            let pid = self.pieces.len();
            let mut piece = Piece {
                req: req_idx,
                write,
                addr,
                value: 0,
                expected: 0,
                seq: self.next_seq,
                mc: 0,
                pair: 0,
                key: line,
                unit: 0,
                slot: 0,
                local: 0,
                line_in_page: (addr % self.geo.page_bytes) / lb,
                page: addr / self.geo.page_bytes,
                retry_at: SimTime::ZERO,
            };
            self.next_seq += 1;
            if self.platform == Platform::Origin {
                let p = place(&self.geo, piece.page);
                piece.mc = p.controller;
                piece.pair = p.pair;
                piece.local = p.local;
                piece.unit = piece.page;
            } else {
                match decode_address(&self.geo, addr, self.mode)? {
                    Decoded::Planar { group, slot, .. } => {
                        let p = place(&self.geo, group);
                        piece.mc = p.controller;
                        piece.pair = p.pair;
                        piece.local = p.local;
                        piece.unit = group;
                        piece.slot = slot;
                        let table = self.planar.as_mut().expect("planar table");
                        if let Some(d) = table.record_access(group, slot, trace_ns) {
                            self.enqueue_swap(d, p.controller, p.pair, p.local, now);
                        }
                    }
                    Decoded::TwoLevel { index, tag, .. } => {
                        let p = place(&self.geo, index);
                        piece.mc = p.controller;
                        piece.pair = p.pair;
                        piece.local = p.local;
                        piece.unit = index;
                        piece.slot = tag;
                        piece.key = index;
                    }
                }
            }
            if write {
                piece.value = self.next_value;
                self.next_value += 1;
                self.reference.insert(line, piece.value);
            } else {
                piece.expected = self.reference.get(&line).copied().unwrap_or(0);
            }
            let mc = &mut self.mcs[piece.mc];
            if write {
                mc.writes.push(pid);
            } else {
                mc.reads.push(pid);
            }
            mc.hazards.entry(piece.key).or_default().push_back(pid);
            mcs_touched.insert(piece.mc);
            self.pieces.push(piece);
        }
        self.reqs[req_idx].controller = self.pieces[self.pieces.len() - 1].mc;
        for mc in mcs_touched {
            self.schedule_try(eng, mc, now);
        }
        Ok(())
    }

    fn enqueue_swap(&mut self, d: SwapDecision, mc: usize, pair: usize, local: u64, now: SimTime) {
        let g = self.geo.dram_pages();
        let pb = self.geo.page_bytes;
        let hot_page = d.hot_slot * g + d.group;
        let cold_page = d.cold_slot * g + d.group;
        let (bank, row) = self.geo.bank_row(local);
        let tid = self.tasks.len();
        self.tasks.push(TaskRec {
            task: MigrationTask {
                id: tid as u64,
                kind: TaskKind::planar_swap(self.platform),
                state: TaskState::Pending,
                group: d.group,
                lock: Footprint {
                    controller: mc,
                    pair,
                    bank: Some(bank),
                    ranges: vec![hot_page * pb..(hot_page + 1) * pb, cold_page * pb..(cold_page + 1) * pb],
                },
                size: pb,
                xpoint_frame: planar_xpoint_frame(&self.geo, local, u64::from(d.xpoint_frame)),
                dram_frame: local,
                enqueued_at: now,
            },
            mc,
            pair,
            hot_page,
            cold_page,
            bank,
            row,
        });
        self.mcs[mc].open_tasks.push(tid);
        self.stats.swaps_enqueued += 1;
    }

    // ---- scheduling ----

    fn target(&self, p: &Piece) -> Target {
        match &self.planar {
            Some(t) => {
                let f = t.frame(p.unit, p.slot);
                if f == DRAM_FRAME {
                    Target::Dram
                } else {
                    Target::Xpoint(planar_xpoint_frame(&self.geo, p.local, u64::from(f)))
                }
            }
            None => Target::Dram,
        }
    }

    /// DRAM bank and row a piece touches first.
    fn dram_bank_row(&self, p: &Piece) -> (usize, u64) {
        match self.mode {
            Mode::TwoLevel if self.cache.is_some() => {
                self.geo.bank_row(p.local / self.geo.lines_per_page())
            }
            _ => self.geo.bank_row(p.local),
        }
    }

    fn eligible(&self, pid: usize, now: SimTime) -> Option<Candidate> {
        let p = &self.pieces[pid];
        let mc = &self.mcs[p.mc];
        if mc.hazards.get(&p.key).and_then(|q| q.front()) != Some(&pid) || p.retry_at > now {
            return None;
        }
        let on_dram = matches!(self.target(p), Target::Dram);
        let (bank, row) = self.dram_bank_row(p);
        if self.planar.is_some() {
            let fp = Footprint {
                controller: p.mc,
                pair: p.pair,
                bank: on_dram.then_some(bank),
                ranges: std::iter::once(p.addr..p.addr + self.geo.line_bytes).collect(),
            };
            if detect_conflict(&fp, mc.open_tasks.iter().map(|&t| &self.tasks[t].task)) {
                return None;
            }
        }
        if self.cache.is_some() && mc.locked_index.contains(&p.unit) {
            return None;
        }
        Some(Candidate {
            id: pid as u64,
            seq: p.seq,
            row_hit: on_dram && mc.pairs[p.pair].dram.row_open(bank, row),
        })
    }

    fn ready_task(&mut self, eng: &mut Eng, mc: usize, now: SimTime) -> Option<ReadyTask> {
        let m = &self.mcs[mc];
        let mut retry = None;
        let mut found = None;
        for (i, &tid) in m.open_tasks.iter().enumerate() {
            let t = &self.tasks[tid];
            if t.task.state != TaskState::Pending {
                continue;
            }
            let earlier_same_group = m.open_tasks[..i]
                .iter()
                .any(|&o| self.tasks[o].task.group == t.task.group);
            let busy_pages = [t.hot_page, t.cold_page]
                .iter()
                .any(|pg| m.inflight_pages.get(pg).copied().unwrap_or(0) > 0);
            let bank_busy = m.open_tasks.iter().any(|&o| {
                let ot = &self.tasks[o];
                ot.task.state == TaskState::Active && ot.pair == t.pair && ot.bank == t.bank
            });
            if earlier_same_group || busy_pages || bank_busy {
                continue;
            }
            let xp = &m.pairs[t.pair].xpoint;
            if let Err(DeviceError::BufferFull { retry_at }) =
                xp.check_read(now).and_then(|_| xp.check_write(now))
            {
                retry = Some(retry_at);
                continue;
            }
            let patience = SimTime::ns(self.cfg.migration_patience_ns);
            found = Some(ReadyTask {
                id: tid as u64,
                overdue: now.saturating_sub(t.task.enqueued_at) >= patience,
            });
            break;
        }
        if found.is_none() {
            if let Some(t) = retry {
                self.schedule_try(eng, mc, t.max(now));
            }
        }
        found
    }

    fn try_issue(&mut self, eng: &mut Eng, mc: usize, now: SimTime) -> Result<(), ControllerError> {
        for dev in &mut self.mcs[mc].pairs {
            dev.dram.prune(now);
        }
        let m = &mut self.mcs[mc];
        m.data.prune(now);
        m.memory.prune(now);
        m.dedicated.prune(now);
        loop {
            let frozen = self.mcs[mc].frozen_until;
            if now < frozen {
                self.schedule_try(eng, mc, frozen);
                return Ok(());
            }
            let reads: Vec<Candidate> = self.mcs[mc]
                .reads
                .iter()
                .filter_map(|&p| self.eligible(p, now))
                .collect();
            let writes: Vec<Candidate> = self.mcs[mc]
                .writes
                .iter()
                .filter_map(|&p| self.eligible(p, now))
                .collect();
            let task = self.ready_task(eng, mc, now);
            let m = &self.mcs[mc];
            let q = Queues {
                reads: &reads,
                writes: &writes,
                writes_queued: m.writes.len(),
                write_high_watermark: self.cfg.write_high_watermark,
                task,
                launch_with_writes: self.platform.supports_swap()
                    || self.platform.has_dedicated_migration_channel(),
                can_issue: m.inflight < self.cfg.max_inflight,
            };
            match sched::schedule(&q) {
                Action::Read(pid) | Action::Write(pid) => {
                    let pid = pid as usize;
                    if let Some(retry) = self.issue(eng, pid, now)? {
                        self.pieces[pid].retry_at = retry;
                        self.schedule_try(eng, mc, retry);
                    }
                }
                Action::Launch(tid) => self.launch(eng, tid as usize, now)?,
                Action::Idle => return Ok(()),
            }
        }
    }

    // ---- channel helpers ----

    fn grant(&mut self, mc: usize, device: u32) {
        if !self.platform.is_optical() {
            return;
        }
        let arb = &mut self.mcs[mc].arbiter;
        let one: BTreeSet<u32> = [device].into();
        if arb.arbitrate(&one).is_err() || arb.enabled_count() != 1 {
            self.stats.arbitration_violations += 1;
        }
    }

    fn dram_dev(pair: usize) -> u32 {
        2 * pair as u32
    }

    fn xp_dev(pair: usize) -> u32 {
        2 * pair as u32 + 1
    }

    /// Books a data-route transfer. On WOM platforms a transfer that
    /// overlaps a running swap is carried at the WOM rate.
    fn tx_data(&mut self, mc: usize, earliest: SimTime, bits: u64, traffic: Traffic, device: u32) -> Transfer {
        self.grant(mc, device);
        let timing = self.data_timing;
        let m = &mut self.mcs[mc];
        let occ = timing.occupancy(bits, Multiplexing::None);
        let start = m.data.find_slot(earliest, occ);
        let wom_window = self.platform == Platform::OhmWom
            && self.mode == Mode::Planar
            && m.memory.overlaps(start, start + occ.max(SimTime::ps(1)));
        if wom_window {
            let occ = timing.occupancy(bits, Multiplexing::Wom);
            let start = m.data.find_slot(earliest, occ);
            m.data.transmit_at(&timing, start, bits, Multiplexing::Wom, traffic)
        } else {
            m.data.transmit_at(&timing, start, bits, Multiplexing::None, traffic)
        }
    }

    /// Ready goes to the controller on the sideband, the controller sends
    /// SEND, then the data comes back.
    fn xp_fetch(&mut self, mc: usize, pair: usize, ready: SimTime, bits: u64, traffic: Traffic) -> Transfer {
        let c = self.tx_data(mc, ready + self.sideband(), self.cfg.command_bits, traffic, Self::xp_dev(pair));
        self.tx_data(mc, c.arrival, bits, traffic, Self::xp_dev(pair))
    }

    fn sideband(&self) -> SimTime {
        SimTime::ps(self.cfg.sideband_ps)
    }

    // ---- request issue ----

    /// Issues a piece. Returns a retry time when an XPoint buffer is full.
    fn issue(&mut self, eng: &mut Eng, pid: usize, now: SimTime) -> Result<Option<SimTime>, ControllerError> {
        let p = self.pieces[pid].clone();
        if let Some(retry) = self.xpoint_precheck(&p, now) {
            return Ok(Some(retry));
        }
        let m = &mut self.mcs[p.mc];
        if p.write {
            m.writes.retain(|&x| x != pid);
        } else {
            m.reads.retain(|&x| x != pid);
        }
        m.inflight += 1;
        *m.inflight_pages.entry(p.page).or_default() += 1;
        if self.cache.is_some() {
            self.issue_two_level(eng, pid, now)?;
        } else {
            let done = self.issue_flat(pid, now)?;
            self.schedule(eng, done, Ev::Complete(pid));
        }
        Ok(None)
    }

    fn xpoint_precheck(&self, p: &Piece, now: SimTime) -> Option<SimTime> {
        let xp = &self.mcs[p.mc].pairs[p.pair].xpoint;
        let check = if let Some(cache) = &self.cache {
            let meta = cache.meta(p.unit);
            let hit = meta.valid && u64::from(meta.tag) == p.slot;
            let mut r = Ok(());
            if !hit && meta.valid && meta.dirty {
                r = xp.check_write(now);
            }
            if !hit && !p.write {
                r = r.and_then(|_| xp.check_read(now));
            }
            r
        } else {
            match (self.target(p), p.write) {
                (Target::Dram, _) => Ok(()),
                (Target::Xpoint(_), false) => xp.check_read(now),
                (Target::Xpoint(_), true) => xp.check_write(now),
            }
        };
        match check {
            Err(DeviceError::BufferFull { retry_at }) => Some(retry_at.max(now + SimTime::ps(1))),
            _ => None,
        }
    }

    /// Planar and DRAM-only accesses. Returns the completion time.
    fn issue_flat(&mut self, pid: usize, now: SimTime) -> Result<SimTime, ControllerError> {
        let p = self.pieces[pid].clone();
        let cmd_bits = self.cfg.command_bits;
        let line_bits = self.geo.line_bytes * 8;
        let lpp = self.geo.lines_per_page();
        let sb = self.sideband();
        let (bank, row) = self.geo.bank_row(p.local);
        if matches!(self.target(&p), Target::Dram) {
            self.stats.served_dram += 1;
        } else {
            self.stats.served_xpoint += 1;
        }
        match (self.target(&p), p.write) {
            (Target::Dram, false) => {
                let dline = p.local * lpp + p.line_in_page;
                let c = self.tx_data(p.mc, now, cmd_bits, Traffic::Effective, Self::dram_dev(p.pair));
                let dram = &mut self.mcs[p.mc].pairs[p.pair].dram;
                let acc = dram.access(bank, row, false, self.geo.line_bytes, c.arrival)?;
                let value = dram.read_line(dline);
                self.pieces[pid].value = value;
                let d = self.tx_data(p.mc, acc.first_data, line_bits, Traffic::Effective, Self::dram_dev(p.pair));
                Ok(d.arrival)
            }
            (Target::Dram, true) => {
                let dline = p.local * lpp + p.line_in_page;
                let c = self.tx_data(p.mc, now, cmd_bits + line_bits, Traffic::Effective, Self::dram_dev(p.pair));
                let dram = &mut self.mcs[p.mc].pairs[p.pair].dram;
                let acc = dram.access(bank, row, true, self.geo.line_bytes, c.arrival)?;
                dram.write_line(dline, p.value);
                Ok(acc.done)
            }
            (Target::Xpoint(frame), false) => {
                let xline = frame * lpp + p.line_in_page;
                let c = self.tx_data(p.mc, now, cmd_bits, Traffic::Effective, Self::xp_dev(p.pair));
                let xp = &mut self.mcs[p.mc].pairs[p.pair].xpoint;
                let nb = c.arrival.max(xp.durable_bound(xline));
                let r = xp.read(nb, &[xline])?;
                self.pieces[pid].value = r.values[0];
                let d = self.xp_fetch(p.mc, p.pair, r.ready, line_bits, Traffic::Effective);
                Ok(d.arrival)
            }
            (Target::Xpoint(frame), true) => {
                let xline = frame * lpp + p.line_in_page;
                let c = self.tx_data(p.mc, now, cmd_bits + line_bits, Traffic::Effective, Self::xp_dev(p.pair));
                let xp = &mut self.mcs[p.mc].pairs[p.pair].xpoint;
                xp.write(c.arrival, &[(xline, p.value)])?;
                Ok(c.arrival + sb)
            }
        }
    }

    fn snarf(&mut self, mc: usize, pair: usize, kind: CommandKind, address: u64, data: Vec<u64>) -> bool {
        let tx = ChannelTransaction {
            kind,
            address,
            data,
            ecc: 0,
            tag: 0,
        };
        let got = self.mcs[mc].pairs[pair].snarf.observe(&tx).is_some();
        if got {
            self.stats.snarfed_transfers += 1;
        }
        got
    }

    fn issue_two_level(&mut self, eng: &mut Eng, pid: usize, now: SimTime) -> Result<(), ControllerError> {
        let p = self.pieces[pid].clone();
        let cmd_bits = self.cfg.command_bits;
        let lb = self.geo.line_bytes;
        let line_bits = lb * 8;
        let (bank, row) = self.dram_bank_row(&p);
        let (mc, pair) = (p.mc, p.pair);
        let lookup = self.cache.as_mut().expect("two-level").lookup(p.unit, p.slot);

        // tag check: one DRAM access returns the line and its metadata
        let c = self.tx_data(mc, now, cmd_bits, Traffic::Effective, Self::dram_dev(pair));
        let acc = self.mcs[mc].pairs[pair].dram.access(bank, row, false, lb, c.arrival)?;
        let chk = self.tx_data(mc, acc.first_data, line_bits, Traffic::Effective, Self::dram_dev(pair));
        let t_check = chk.arrival;
        let current = self.mcs[mc].pairs[pair].dram.read_line(p.local);

        let victim_tag = match lookup {
            Lookup::Hit => {
                self.stats.hit_dram_accesses += 1;
                if p.write {
                    let w = self.tx_data(mc, t_check, cmd_bits + line_bits, Traffic::Effective, Self::dram_dev(pair));
                    let dram = &mut self.mcs[mc].pairs[pair].dram;
                    let a2 = dram.access(bank, row, true, lb, w.arrival)?;
                    dram.write_line(p.local, p.value);
                    self.cache.as_mut().expect("two-level").mark_dirty(p.unit);
                    self.schedule(eng, a2.done, Ev::Complete(pid));
                } else {
                    self.pieces[pid].value = current;
                    self.schedule(eng, t_check, Ev::Complete(pid));
                }
                return Ok(());
            }
            Lookup::Miss { dirty_victim_tag } => dirty_victim_tag,
        };

        if let Some(vtag) = victim_tag {
            self.stats.dirty_evictions += 1;
            let vline = two_level_xpoint_line(&self.geo, p.local, u64::from(vtag));
            let write_at = match self.platform {
                Platform::AutoRw | Platform::OhmWom | Platform::OhmBw => {
                    // XPoint captured the tag-check read on its way past
                    self.snarf(mc, pair, CommandKind::Read, p.addr, vec![current]);
                    t_check
                }
                Platform::Oracle => {
                    let vc = self.vc_timing;
                    let t = self.mcs[mc].dedicated.transmit(&vc, acc.first_data, line_bits, Multiplexing::None, Traffic::Migration);
                    t.arrival
                }
                _ => {
                    let t = self.tx_data(mc, t_check, cmd_bits + line_bits, Traffic::Migration, Self::xp_dev(pair));
                    t.arrival
                }
            };
            self.mcs[mc].pairs[pair].xpoint.write(write_at, &[(vline, current)])?;
        }

        let xline = two_level_xpoint_line(&self.geo, p.local, p.slot);
        if p.write {
            // full-line write: allocate without fetching
            let w = self.tx_data(mc, t_check, cmd_bits + line_bits, Traffic::Effective, Self::dram_dev(pair));
            let dram = &mut self.mcs[mc].pairs[pair].dram;
            let a2 = dram.access(bank, row, true, lb, w.arrival)?;
            dram.write_line(p.local, p.value);
            self.cache.as_mut().expect("two-level").fill(p.unit, p.slot, true);
            self.schedule(eng, a2.done, Ev::Complete(pid));
            return Ok(());
        }

        let c2 = self.tx_data(mc, t_check, cmd_bits, Traffic::Effective, Self::xp_dev(pair));
        let xp = &mut self.mcs[mc].pairs[pair].xpoint;
        let nb = c2.arrival.max(xp.durable_bound(xline));
        let r = xp.read(nb, &[xline])?;
        let value = r.values[0];
        self.pieces[pid].value = value;
        self.mcs[mc].pairs[pair].dram.write_line(p.local, value);
        self.cache.as_mut().expect("two-level").fill(p.unit, p.slot, false);
        self.mcs[mc].locked_index.insert(p.unit);
        self.schedule(eng, r.ready, Ev::XpReady(pid));
        Ok(())
    }

    /// Second half of a two-level read miss: XPoint has raised ready.
    fn fill_phase(&mut self, eng: &mut Eng, pid: usize, now: SimTime) -> Result<(), ControllerError> {
        let p = self.pieces[pid].clone();
        let (mc, pair) = (p.mc, p.pair);
        let lb = self.geo.line_bytes;
        let line_bits = lb * 8;
        let cmd_bits = self.cfg.command_bits;
        let (bank, row) = self.dram_bank_row(&p);
        let sb = self.sideband();
        let vc = self.vc_timing;
        let (served, fill_at) = if self.platform.supports_reverse_write() {
            let route = establish_dual_route(
                mc as u32,
                u32::MAX,
                Self::xp_dev(pair),
                Self::dram_dev(pair),
                Function::ReverseWrite,
                self.platform,
                &self.cfg.power_model(),
            )?;
            // ready reaches the MC, the MC stops issuing and confirms; the
            // monitor ring was tuned while the media read ran
            let start_after = now + sb + sb;
            debug_assert!(route.setup_latency <= SimTime::ns(self.cfg.xpoint_read_ns));
            self.grant(mc, Self::xp_dev(pair));
            let m = &mut self.mcs[mc];
            let len = vc.occupancy(line_bits, route.multiplexing);
            let start = common_slot(&[&m.data, &m.memory], start_after, len);
            let d = m.data.transmit_at(&vc, start, line_bits, route.multiplexing, Traffic::Effective);
            let f = m.memory.transmit_at(&vc, start, line_bits, route.multiplexing, Traffic::Migration);
            m.frozen_until = m.frozen_until.max(d.arrival);
            self.stats.reverse_writes += 1;
            self.snarf(mc, pair, CommandKind::Write, p.addr, vec![p.value]);
            (d.arrival, f.arrival)
        } else if self.platform.has_dedicated_migration_channel() {
            let d = self.xp_fetch(mc, pair, now, line_bits, Traffic::Effective);
            let f = self.mcs[mc].dedicated.transmit(&vc, now + sb, line_bits, Multiplexing::None, Traffic::Migration);
            (d.arrival, f.arrival)
        } else {
            let d = self.xp_fetch(mc, pair, now, line_bits, Traffic::Effective);
            let f = self.tx_data(mc, d.arrival, cmd_bits + line_bits, Traffic::Migration, Self::dram_dev(pair));
            (d.arrival, f.arrival)
        };
        let acc = self.mcs[mc].pairs[pair].dram.access(bank, row, true, lb, fill_at)?;
        self.schedule(eng, served, Ev::Complete(pid));
        self.schedule(eng, acc.done.max(served), Ev::Unlock(mc, p.unit));
        Ok(())
    }

    fn complete(&mut self, eng: &mut Eng, pid: usize, now: SimTime) {
        let p = &self.pieces[pid];
        let (mc, key, page, req) = (p.mc, p.key, p.page, p.req);
        if !p.write {
            self.stats.reads_checked += 1;
            if self.opts.record_values {
                self.stats.read_values.push((self.records[req].id, p.addr, p.value));
            }
            if p.value != p.expected {
                self.stats.read_mismatches += 1;
            }
        }
        let m = &mut self.mcs[mc];
        m.inflight -= 1;
        if let Some(q) = m.hazards.get_mut(&key) {
            debug_assert_eq!(q.front(), Some(&pid));
            q.pop_front();
            if q.is_empty() {
                m.hazards.remove(&key);
            }
        }
        if let Some(c) = m.inflight_pages.get_mut(&page) {
            *c -= 1;
            if *c == 0 {
                m.inflight_pages.remove(&page);
            }
        }
        let r = &mut self.reqs[req];
        r.left -= 1;
        if r.left == 0 {
            self.outstanding -= 1;
            r.done = Some(now);
            if !self.admit_pending && self.next_record < self.records.len() {
                self.admit_pending = true;
                let at = self.records[self.next_record].issue_time.max(now);
                self.schedule(eng, at, Ev::Admit);
            }
        }
        self.schedule_try(eng, mc, now);
    }

    // ---- migrations ----

    fn record(&mut self, task: usize, step: HandshakeStep, time: SimTime) {
        if self.opts.record_handshakes {
            self.stats.handshakes.push(HandshakeEvent {
                task: task as u64,
                step,
                time,
            });
        }
    }

    fn launch(&mut self, eng: &mut Eng, tid: usize, now: SimTime) -> Result<(), ControllerError> {
        self.tasks[tid].task.state = TaskState::Active;
        let t = &self.tasks[tid];
        let (mc, pair, bank, row, kind) = (t.mc, t.pair, t.bank, t.row, t.task.kind);
        let lpp = self.geo.lines_per_page();
        let dlines: Vec<u64> = (0..lpp).map(|k| t.task.dram_frame * lpp + k).collect();
        let xlines: Vec<u64> = (0..lpp).map(|k| t.task.xpoint_frame * lpp + k).collect();
        let addr = t.hot_page * self.geo.page_bytes;
        let d_vals: Vec<u64> = {
            let dram = &self.mcs[mc].pairs[pair].dram;
            dlines.iter().map(|&l| dram.read_line(l)).collect()
        };
        let pb = self.geo.page_bytes;
        let page_bits = pb * 8;
        let cmd_bits = self.cfg.command_bits;
        let sb = self.sideband();
        let vc = self.vc_timing;
        let (dd, xd) = (Self::dram_dev(pair), Self::xp_dev(pair));
        let durable = |xp: &XpointDevice| {
            xlines
                .iter()
                .map(|&l| xp.durable_bound(l))
                .max()
                .unwrap_or(SimTime::ZERO)
        };

        let (x_vals, done) = match kind {
            TaskKind::BaselineCopy if self.platform.has_dedicated_migration_channel() => {
                // commands on the data route, pages on the dedicated channel
                let c1 = self.tx_data(mc, now, cmd_bits, Traffic::Migration, dd);
                let c2 = self.tx_data(mc, now, cmd_bits, Traffic::Migration, xd);
                let m = &mut self.mcs[mc];
                let a = m.pairs[pair].dram.access(bank, row, false, pb, c1.arrival)?;
                let l1 = m.dedicated.transmit(&vc, a.first_data, page_bits, Multiplexing::None, Traffic::Migration);
                let xp = &mut m.pairs[pair].xpoint;
                let r = xp.read(c2.arrival.max(durable(xp)), &xlines)?;
                let l2 = m.dedicated.transmit(&vc, r.ready, page_bits, Multiplexing::None, Traffic::Migration);
                let w = m.pairs[pair].dram.access(bank, row, true, pb, l2.arrival)?;
                let pairs: Vec<(u64, u64)> = xlines.iter().copied().zip(d_vals.iter().copied()).collect();
                m.pairs[pair].xpoint.write(l1.arrival, &pairs)?;
                (r.values, w.done.max(l1.arrival + sb))
            }
            TaskKind::BaselineCopy | TaskKind::AutoRw => {
                let c1 = self.tx_data(mc, now, cmd_bits, Traffic::Migration, dd);
                let a = self.mcs[mc].pairs[pair].dram.access(bank, row, false, pb, c1.arrival)?;
                let l1 = self.tx_data(mc, a.first_data, page_bits, Traffic::Migration, dd);
                let snarfed = kind == TaskKind::AutoRw
                    && self.snarf(mc, pair, CommandKind::Read, addr, d_vals.clone());
                let c2 = self.tx_data(mc, now, cmd_bits, Traffic::Migration, xd);
                let xp = &mut self.mcs[mc].pairs[pair].xpoint;
                let r = xp.read(c2.arrival.max(durable(xp)), &xlines)?;
                let l2 = self.xp_fetch(mc, pair, r.ready, page_bits, Traffic::Migration);
                let l3 = self.tx_data(mc, l2.arrival, cmd_bits + page_bits, Traffic::Migration, dd);
                let w = self.mcs[mc].pairs[pair].dram.access(bank, row, true, pb, l3.arrival)?;
                let xp_at = if snarfed {
                    l1.arrival
                } else {
                    self.tx_data(mc, l1.arrival, cmd_bits + page_bits, Traffic::Migration, xd)
                        .arrival
                };
                let pairs: Vec<(u64, u64)> = xlines.iter().copied().zip(d_vals.iter().copied()).collect();
                self.mcs[mc].pairs[pair].xpoint.write(xp_at, &pairs)?;
                (r.values, w.done.max(xp_at + sb))
            }
            TaskKind::Swap => {
                let route = establish_dual_route(
                    mc as u32,
                    u32::MAX,
                    xd,
                    dd,
                    Function::Swap,
                    self.platform,
                    &self.cfg.power_model(),
                )?;
                let mux = route.multiplexing;
                // the controller presets the bank, then hands over
                let p = self.tx_data(mc, now, cmd_bits, Traffic::Migration, dd);
                let dram = &mut self.mcs[mc].pairs[pair].dram;
                let mut t_open = p.arrival;
                if !dram.row_open(bank, row) {
                    if dram.bank(bank).state == BankState::Activated {
                        t_open = dram.issue_asap(bank, DramCommand::Pre, row, 0, t_open)?.0;
                    }
                    t_open = dram.issue_asap(bank, DramCommand::Act, row, 0, t_open)?.0;
                }
                self.record(tid, HandshakeStep::Preset, t_open);
                let s = self.tx_data(mc, p.arrival, SWAP_CMD_BITS, Traffic::Migration, xd);
                self.record(tid, HandshakeStep::SwapCmd, s.arrival);
                let start = s.arrival + route.setup_latency;
                let task = SwapTask {
                    bank,
                    row,
                    lines: lpp as u32,
                    line_bytes: self.geo.line_bytes,
                };
                let m = &mut self.mcs[mc];
                let seq = ddr_seq_generate(&task, m.pairs[pair].dram.bank(bank))?;
                let xp = &mut m.pairs[pair].xpoint;
                let r = xp.read(start.max(durable(xp)), &xlines)?;
                let mx = m.memory.transmit(&vc, r.ready, page_bits, mux, Traffic::Migration);
                let rep = replay(&mut m.pairs[pair].dram, &task, &seq, start, &|_| mx.arrival)?;
                let first = rep.first_read_data().unwrap_or(start);
                let end = rep.end().unwrap_or(start);
                let md = m.memory.transmit(&vc, first, page_bits, mux, Traffic::Migration);
                let pairs: Vec<(u64, u64)> = xlines.iter().copied().zip(d_vals.iter().copied()).collect();
                m.pairs[pair].xpoint.write(md.arrival, &pairs)?;
                self.record(tid, HandshakeStep::MigrationRead, first);
                self.record(tid, HandshakeStep::MigrationWrite, end);
                let ready = end.max(md.arrival) + sb;
                self.record(tid, HandshakeStep::Ready, ready);
                self.record(tid, HandshakeStep::Confirm, ready + sb);
                (r.values, ready + sb)
            }
            TaskKind::ReverseWrite => {
                return Err(ControllerError::Invalid("reverse write is not a planar swap".into()));
            }
        };
        let dram = &mut self.mcs[mc].pairs[pair].dram;
        for (&l, &v) in dlines.iter().zip(&x_vals) {
            dram.write_line(l, v);
        }
        self.stats.migration_wait_ps += (now - self.tasks[tid].task.enqueued_at).as_ps();
        self.stats.migration_busy_ps += (done - now).as_ps();
        self.schedule(eng, done, Ev::TaskDone(tid));
        Ok(())
    }

    // ---- end of run ----

    /// Latest value of a line through the current mapping.
    fn peek_line(&self, line: u64) -> Result<u64, ControllerError> {
        let lb = self.geo.line_bytes;
        let lpp = self.geo.lines_per_page();
        let addr = line * lb;
        let lip = line % lpp;
        if self.platform == Platform::Origin {
            let p = place(&self.geo, addr / self.geo.page_bytes);
            return Ok(self.mcs[p.controller].pairs[p.pair].dram.read_line(p.local * lpp + lip));
        }
        match decode_address(&self.geo, addr, self.mode)? {
            Decoded::Planar { group, slot, .. } => {
                let p = place(&self.geo, group);
                let dev = &self.mcs[p.controller].pairs[p.pair];
                let f = self.planar.as_ref().expect("planar").frame(group, slot);
                if f == DRAM_FRAME {
                    Ok(dev.dram.read_line(p.local * lpp + lip))
                } else {
                    let xf = planar_xpoint_frame(&self.geo, p.local, u64::from(f));
                    Ok(dev.xpoint.peek(xf * lpp + lip)?)
                }
            }
            Decoded::TwoLevel { index, tag, .. } => {
                let p = place(&self.geo, index);
                let dev = &self.mcs[p.controller].pairs[p.pair];
                let meta = self.cache.as_ref().expect("two-level").meta(index);
                if meta.valid && u64::from(meta.tag) == tag {
                    Ok(dev.dram.read_line(p.local))
                } else {
                    Ok(dev.xpoint.peek(two_level_xpoint_line(&self.geo, p.local, tag))?)
                }
            }
        }
    }

    fn finish(mut self, run_time: SimTime) -> Result<RunStats, ControllerError> {
        let mut st = std::mem::take(&mut self.stats);
        st.run_time = run_time;
        st.requests = self
            .records
            .iter()
            .zip(&self.reqs)
            .map(|(r, s)| MemRequest {
                controller_id: Some(s.controller),
                completion_time: s.done,
                ..r.clone()
            })
            .collect();
        st.latencies_ps = self
            .reqs
            .iter()
            .map(|s| s.done.map_or(0, |d| (d - s.admitted).as_ps()))
            .collect();
        let mut lines: Vec<(u64, u64)> = self.reference.iter().map(|(&l, &v)| (l, v)).collect();
        lines.sort_unstable();
        for (line, v) in lines {
            st.lines_checked += 1;
            let got = self.peek_line(line)?;
            if self.opts.record_values {
                st.final_image.push((line * self.geo.line_bytes, got));
            }
            if got != v {
                st.image_mismatches += 1;
            }
        }
        if let Some(cache) = &self.cache {
            st.two_level_lookups = cache.lookups;
            st.two_level_hits = cache.hits;
            // clean cached lines must match their XPoint home
            for index in 0..self.geo.dram_lines() {
                let meta = cache.meta(index);
                if meta.valid && !meta.dirty {
                    let p = place(&self.geo, index);
                    let dev = &self.mcs[p.controller].pairs[p.pair];
                    let home = two_level_xpoint_line(&self.geo, p.local, u64::from(meta.tag));
                    if dev.dram.read_line(p.local) != dev.xpoint.peek(home)? {
                        st.inclusion_violations += 1;
                    }
                }
            }
        }
        for m in &self.mcs {
            st.data_routes.push(RouteStats::from(&m.data));
            st.memory_routes.push(RouteStats::from(&m.memory));
            st.dedicated_routes.push(RouteStats::from(&m.dedicated));
            for p in &m.pairs {
                st.dram_bytes_read += p.dram.bytes_read;
                st.dram_bytes_written += p.dram.bytes_written;
                st.dram_activates += p.dram.activates;
                st.xpoint_media_reads += p.xpoint.media_reads;
                st.xpoint_media_writes += p.xpoint.media_writes;
                st.xpoint_lines_read += p.xpoint.lines_read;
                st.xpoint_lines_written += p.xpoint.lines_written;
                st.xpoint_max_line_wear = st.xpoint_max_line_wear.max(p.xpoint.max_line_wear());
            }
        }
        Ok(st)
    }
}

//! The slot loop: mobility, per-cell scheduling, transmission commit with
//! strict duplicate-service priority, the removal regimes, arrivals, and
//! metric accumulation.
//!
//! Phase order within a slot (service before arrival, the canonical
//! max[Q - mu, 0] + A reading): (1) draw the placement, (2+3) per cell in
//! ascending id order, decide on slot-start state and commit — cells hold
//! disjoint node sets, so commits in one cell never affect another cell's
//! view, (4) apply the variant's removal regime, (5) Bernoulli arrivals,
//! (6) sample metrics at the slot boundary.

use std::collections::{HashMap, HashSet};

use crate::config::{validate_config, ConfigError, SimConfig, Variant};
use crate::duplicates::{maybe_duplicate, RemovalLedger};
use crate::metrics::{finalize, MetricsReport, RawTally};
use crate::mobility::place;
use crate::policy::{
    select_cell_transmission, snw_select_cell_transmission, ScheduledTransmission, SnwState,
    TieBreak,
};
use crate::rng::{uniform_f64, RunRngs};
use crate::types::{partner, CopyKind, NodeState, Packet};

/// Where a copy of a packet is stored at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Loc {
    Main,
    Dup,
}

/// All current storage spots of one packet id (backpressure variants only).
#[derive(Debug, Clone)]
struct Copies {
    commodity: u32,
    spots: Vec<(u32, Loc)>,
}

/// One committed transmission, kept only when auditing.
#[derive(Debug, Clone, Copy)]
struct TxRecord {
    cell: u32,
    sender: u32,
    commodity: u32,
    served: CopyKind,
    /// Sender's main-queue length for the commodity at commit time.
    pre_q: usize,
}

/// Violations found by the per-slot audit pass.
#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub slots_audited: u64,
    pub total_violations: u64,
    /// First few violation descriptions (capped).
    pub violations: Vec<String>,
}

const AUDIT_REPORT_CAP: usize = 25;

/// The complete state of one run at a slot boundary.
pub struct SimState {
    cfg: SimConfig,
    t: u64,
    rngs: RunRngs,
    nodes: Vec<NodeState>,
    snw: Option<SnwState>,
    /// Ids that have reached their destination.
    delivered_ids: HashSet<u64>,
    /// Copy locations per id (maintained for the backpressure variants).
    holders: HashMap<u64, Copies>,
    next_id: u64,
    pub ledger: RemovalLedger,

    // Monotone per-run counters.
    admitted: u64,
    delivered: u64,
    transmissions: u64,
    duplicate_transmissions: u64,

    // Incremental occupancy counters. Q and D track buffer contents; U is
    // the number of packets in flight (admitted, not yet first-delivered),
    // which can be fewer than the copies of them sitting in queues.
    cur_q: u64,
    cur_u: u64,
    cur_d: u64,

    // Structural flow counters (audit support).
    main_pushes: u64,
    main_pops: u64,
    dup_pushes: u64,
    dup_pops: u64,

    // Metrics accumulation.
    sum_q: u128,
    sum_u: u128,
    sum_d: u128,
    delay_sum: u128,
    delay_count: u64,
    series: Vec<(u64, u64)>,

    // Per-slot scratch.
    cell_of: Vec<u32>,
    cell_members: Vec<Vec<u32>>,
    delivered_this_slot: Vec<u64>,

    // Audit plumbing.
    auditing: bool,
    txlog: Vec<TxRecord>,
    audit: AuditReport,
}

impl SimState {
    pub fn new(cfg: SimConfig) -> Result<Self, ConfigError> {
        let cfg = validate_config(cfg)?;
        let n = cfg.nodes;
        let snw = (cfg.variant == Variant::Snw).then(|| SnwState::new(n));
        Ok(SimState {
            rngs: RunRngs::from_seed(cfg.seed),
            nodes: (0..n).map(|i| NodeState::new(i, n)).collect(),
            snw,
            delivered_ids: HashSet::new(),
            holders: HashMap::new(),
            next_id: 0,
            ledger: RemovalLedger::default(),
            admitted: 0,
            delivered: 0,
            transmissions: 0,
            duplicate_transmissions: 0,
            cur_q: 0,
            cur_u: 0,
            cur_d: 0,
            main_pushes: 0,
            main_pops: 0,
            dup_pushes: 0,
            dup_pops: 0,
            sum_q: 0,
            sum_u: 0,
            sum_d: 0,
            delay_sum: 0,
            delay_count: 0,
            series: Vec::new(),
            cell_of: vec![0; n as usize],
            cell_members: vec![Vec::new(); cfg.cells as usize],
            delivered_this_slot: Vec::new(),
            auditing: false,
            txlog: Vec::new(),
            audit: AuditReport::default(),
            t: 0,
            cfg,
        })
    }

    pub fn slot(&self) -> u64 {
        self.t
    }

    // ---- holder-index helpers -------------------------------------------

    fn idx_add(&mut self, id: u64, commodity: u32, node: u32, loc: Loc) {
        self.holders
            .entry(id)
            .or_insert_with(|| Copies { commodity, spots: Vec::new() })
            .spots
            .push((node, loc));
    }

    fn idx_remove(&mut self, id: u64, node: u32, loc: Loc) {
        if let Some(c) = self.holders.get_mut(&id) {
            if let Some(pos) = c.spots.iter().position(|&s| s == (node, loc)) {
                c.spots.swap_remove(pos);
            }
            if c.spots.is_empty() {
                self.holders.remove(&id);
            }
        }
    }

    // ---- counted storage mutations --------------------------------------

    fn push_original(&mut self, node: u32, p: Packet) {
        debug_assert_eq!(p.kind, CopyKind::Original);
        self.cur_q += 1;
        self.main_pushes += 1;
        self.idx_add(p.id, p.commodity, node, Loc::Main);
        self.nodes[node as usize].push_main(p);
    }

    fn pop_original(&mut self, node: u32, commodity: u32) -> Packet {
        let p = self.nodes[node as usize].pop_main(commodity).expect("pop from empty main queue");
        self.cur_q -= 1;
        self.main_pops += 1;
        self.idx_remove(p.id, node, Loc::Main);
        p
    }

    /// Undo a pop: the original stays at the sender (BWAR-IM duplication).
    fn unpop_original(&mut self, node: u32, p: Packet) {
        self.cur_q += 1;
        self.main_pushes += 1;
        self.idx_add(p.id, p.commodity, node, Loc::Main);
        self.nodes[node as usize].push_main_front(p);
    }

    fn store_dup(&mut self, node: u32, p: Packet) {
        debug_assert!(matches!(p.kind, CopyKind::Duplicate | CopyKind::FlaggedOriginal));
        debug_assert!(self.nodes[node as usize].d_len(p.commodity) < self.cfg.d_max as usize);
        self.cur_d += 1;
        self.dup_pushes += 1;
        self.idx_add(p.id, p.commodity, node, Loc::Dup);
        self.nodes[node as usize].push_dup(p);
    }

    fn remove_dup_entry(&mut self, node: u32, commodity: u32, id: u64) -> Packet {
        let p = self.nodes[node as usize].remove_dup(commodity, id).expect("dup entry missing");
        self.cur_d -= 1;
        self.dup_pops += 1;
        self.idx_remove(id, node, Loc::Dup);
        p
    }

    // ---- slot phases -----------------------------------------------------

    fn draw_placement(&mut self) {
        let p = place(&mut self.rngs.mobility, self.t, self.cfg.nodes, self.cfg.cells);
        self.cell_of = p.cell_of;
        for m in &mut self.cell_members {
            m.clear();
        }
        // node ids pushed in ascending order: members stay sorted
        for n in 0..self.cfg.nodes {
            self.cell_members[self.cell_of[n as usize] as usize].push(n);
        }
    }

    fn first_delivery(&mut self, id: u64, admit_time: u64) {
        if !self.delivered_ids.insert(id) {
            // redelivery: the transmission counted, the delivery does not
            return;
        }
        self.delivered += 1;
        debug_assert!(self.t > admit_time, "delay must be at least one slot");
        if admit_time >= self.cfg.warmup {
            self.delay_sum += (self.t - admit_time) as u128;
            self.delay_count += 1;
        }
        // One less packet in flight, however many copies of it remain.
        self.cur_u -= 1;
        self.delivered_this_slot.push(id);
    }

    /// Merge-aware forward of an original into the receiver's main queue.
    /// The node invariant (no id twice per node and commodity) decides the
    /// collisions: an original already present wins over the incoming copy;
    /// a duplicate already present is displaced by it.
    fn forward_original(&mut self, receiver: u32, p: Packet) {
        let rs = &self.nodes[receiver as usize];
        if rs.main_queues[p.commodity as usize].iter().any(|q| q.id == p.id) {
            // the in-flight copy dissolves; a durable copy already lives here
            self.ledger.removed_originals += 1;
            return;
        }
        if rs.dup_buffers[p.commodity as usize].iter().any(|q| q.id == p.id) {
            self.remove_dup_entry(receiver, p.commodity, p.id);
            self.ledger.removed_duplicates += 1;
        }
        self.push_original(receiver, p);
    }

    fn commit_bwar(&mut self, tx: ScheduledTransmission) {
        let ScheduledTransmission { cell, sender, receiver, commodity, served } = tx;
        let d_max = self.cfg.d_max;
        let variant = self.cfg.variant;
        if self.auditing {
            self.txlog.push(TxRecord {
                cell,
                sender,
                commodity,
                served,
                pre_q: self.nodes[sender as usize].q_len(commodity),
            });
        }
        self.transmissions += 1;

        match served {
            CopyKind::Original => {
                let p = self.pop_original(sender, commodity);
                debug_assert_eq!(p.kind, CopyKind::Original);
                let post_q = self.nodes[sender as usize].q_len(commodity);
                let post_d = self.nodes[sender as usize].d_len(commodity);

                if receiver == commodity {
                    self.first_delivery(p.id, p.admit_time);
                    // The sender may still park a flagged twin (ID/TD); for
                    // IM the twin would live at the receiver, and the
                    // destination buffers nothing.
                    if matches!(variant, Variant::BwarId | Variant::BwarTd)
                        && maybe_duplicate(post_q, post_d, self.cfg.q_th, post_d, d_max)
                    {
                        self.store_dup(sender, Packet { kind: CopyKind::FlaggedOriginal, ..p });
                    }
                    // delivered copy is consumed
                    return;
                }

                match variant {
                    Variant::BwarIm
                        if maybe_duplicate(
                            post_q,
                            post_d,
                            self.cfg.q_th,
                            self.nodes[receiver as usize].d_len(commodity),
                            d_max,
                        ) && !self.nodes[receiver as usize].holds_id(commodity, p.id) =>
                    {
                        // the transmitted copy becomes the receiver's
                        // duplicate; the original never leaves the sender
                        self.store_dup(receiver, Packet { kind: CopyKind::Duplicate, ..p.clone() });
                        self.unpop_original(sender, p);
                    }
                    Variant::BwarId | Variant::BwarTd
                        if maybe_duplicate(post_q, post_d, self.cfg.q_th, post_d, d_max) =>
                    {
                        self.store_dup(sender, Packet { kind: CopyKind::FlaggedOriginal, ..p.clone() });
                        self.forward_original(receiver, p);
                    }
                    _ => self.forward_original(receiver, p),
                }
            }
            CopyKind::Duplicate | CopyKind::FlaggedOriginal => {
                // Serving the duplicate buffer transmits a copy; the stored
                // entry itself stays (it is only removed by its regime).
                self.duplicate_transmissions += 1;
                let item = self.nodes[sender as usize].dup_buffers[commodity as usize]
                    .front()
                    .expect("scheduled duplicate service on empty buffer")
                    .clone();
                debug_assert_eq!(item.kind, served);
                if receiver == commodity {
                    self.first_delivery(item.id, item.admit_time);
                } else if self.nodes[receiver as usize].d_len(commodity) < d_max as usize
                    && !self.nodes[receiver as usize].holds_id(commodity, item.id)
                {
                    self.store_dup(receiver, Packet { kind: CopyKind::Duplicate, ..item });
                }
                // otherwise the transmitted copy is discarded at the receiver
            }
        }
    }

    fn commit_snw(&mut self, holder: u32, receiver: u32, commodity: u32, id: u64, admit: u64, spray: bool) {
        self.transmissions += 1;
        let snw = self.snw.as_mut().expect("SNW state");
        if spray {
            self.duplicate_transmissions += 1;
            snw.commit_spray(holder, receiver, admit, id, commodity);
        } else {
            // handing the copy to the destination removes it from the holder
            snw.commit_delivery(holder, admit, id, commodity);
            if self.delivered_ids.insert(id) {
                self.delivered += 1;
                debug_assert!(self.t > admit);
                if admit >= self.cfg.warmup {
                    self.delay_sum += (self.t - admit) as u128;
                    self.delay_count += 1;
                }
                self.cur_u -= 1;
                self.delivered_this_slot.push(id);
            }
        }
    }

    /// Ideal removal: destroy every remaining copy of a delivered packet.
    fn ideal_purge(&mut self, id: u64) {
        let Some(copies) = self.holders.remove(&id) else { return };
        let c = copies.commodity;
        for (node, loc) in copies.spots {
            match loc {
                Loc::Main => {
                    let p = self.nodes[node as usize].remove_main(c, id).expect("indexed copy");
                    debug_assert_eq!(p.kind, CopyKind::Original);
                    self.cur_q -= 1;
                    self.main_pops += 1;
                    self.ledger.removed_originals += 1;
                    // cur_u untouched: the id is already delivered
                }
                Loc::Dup => {
                    self.nodes[node as usize].remove_dup(c, id).expect("indexed copy");
                    self.cur_d -= 1;
                    self.dup_pops += 1;
                    self.ledger.removed_duplicates += 1;
                }
            }
        }
    }

    /// BWAR-TD: a flagged original meeting its destination is acknowledged
    /// (delete) if the destination already has the packet, otherwise it
    /// returns to the main queue where destination advantage will serve it.
    fn flagged_encounter_resolution(&mut self) {
        for node in 0..self.cfg.nodes {
            let actives: Vec<u32> = self.nodes[node as usize]
                .active
                .iter()
                .copied()
                .filter(|&c| self.cell_of[node as usize] == self.cell_of[c as usize])
                .collect();
            for c in actives {
                let flagged: Vec<u64> = self.nodes[node as usize].dup_buffers[c as usize]
                    .iter()
                    .filter(|p| p.kind == CopyKind::FlaggedOriginal)
                    .map(|p| p.id)
                    .collect();
                for id in flagged {
                    if self.delivered_ids.contains(&id) {
                        self.remove_dup_entry(node, c, id);
                        self.ledger.removed_duplicates += 1;
                    } else {
                        let mut p = self.remove_dup_entry(node, c, id);
                        p.kind = CopyKind::Original;
                        self.push_original(node, p);
                    }
                }
            }
        }
    }

    /// BWAR-TD: delete unflagged duplicates admitted P or more slots ago.
    fn timeout_sweep(&mut self) {
        let horizon = self.cfg.timeout as u64;
        for node in 0..self.cfg.nodes {
            let actives: Vec<u32> = self.nodes[node as usize].active.iter().copied().collect();
            for c in actives {
                let expired: Vec<u64> = self.nodes[node as usize].dup_buffers[c as usize]
                    .iter()
                    .filter(|p| p.kind == CopyKind::Duplicate && self.t - p.admit_time >= horizon)
                    .map(|p| p.id)
                    .collect();
                for id in expired {
                    self.remove_dup_entry(node, c, id);
                    self.ledger.removed_duplicates += 1;
                }
            }
        }
    }

    fn removals(&mut self) {
        match self.cfg.variant {
            Variant::BwarIm | Variant::BwarId => {
                let delivered = std::mem::take(&mut self.delivered_this_slot);
                for id in delivered {
                    self.ideal_purge(id);
                }
            }
            Variant::BwarTd => {
                self.flagged_encounter_resolution();
                self.timeout_sweep();
                self.delivered_this_slot.clear();
            }
            Variant::Snw => {
                // leftover copies of a delivered packet serve no one; drop
                // them all so the residual budget stops spraying
                let delivered = std::mem::take(&mut self.delivered_this_slot);
                for id in delivered {
                    let erased = self.snw.as_mut().expect("SNW state").purge(id);
                    self.ledger.removed_duplicates += erased;
                }
            }
            _ => self.delivered_this_slot.clear(),
        }
    }

    fn arrivals(&mut self) {
        let lambda = self.cfg.arrival_rate;
        for n in 0..self.cfg.nodes {
            // one draw per node per slot regardless of lambda, so arrival
            // sample paths are comparable across lambda values under a seed
            let x = uniform_f64(&mut self.rngs.arrivals);
            if x < lambda {
                let id = self.next_id;
                self.next_id += 1;
                self.admitted += 1;
                self.cur_u += 1;
                let commodity = partner(n);
                if let Some(snw) = self.snw.as_mut() {
                    snw.admit(n, self.t, id, commodity, self.cfg.snw_copies);
                    self.cur_q += 1;
                } else {
                    self.push_original(
                        n,
                        Packet {
                            id,
                            source: n,
                            commodity,
                            admit_time: self.t,
                            kind: CopyKind::Original,
                        },
                    );
                }
            }
        }
    }

    /// Advance one slot.
    pub fn step(&mut self) {
        self.draw_placement();

        if self.cfg.variant == Variant::Snw {
            for cell in 0..self.cfg.cells {
                if self.cell_members[cell as usize].len() < 2 {
                    continue;
                }
                let decision = snw_select_cell_transmission(
                    cell,
                    &self.cell_members[cell as usize],
                    &self.cell_of,
                    self.snw.as_ref().expect("SNW state"),
                );
                if let Some(d) = decision {
                    if self.auditing {
                        self.txlog.push(TxRecord {
                            cell,
                            sender: d.tx.sender,
                            commodity: d.tx.commodity,
                            served: d.tx.served,
                            pre_q: 0,
                        });
                    }
                    self.commit_snw(
                        d.tx.sender,
                        d.tx.receiver,
                        d.tx.commodity,
                        d.packet_id,
                        d.admit_time,
                        d.tx.served == CopyKind::Duplicate,
                    );
                }
            }
        } else {
            for cell in 0..self.cfg.cells {
                if self.cell_members[cell as usize].len() < 2 {
                    continue;
                }
                let mut tie = if self.cfg.random_tie_break {
                    TieBreak::Seeded(&mut self.rngs.tiebreak)
                } else {
                    TieBreak::Lexicographic
                };
                let decision = select_cell_transmission(
                    self.cfg.variant,
                    cell,
                    &self.cell_members[cell as usize],
                    &self.nodes,
                    self.cfg.d_max,
                    &mut tie,
                );
                if let Some(tx) = decision {
                    self.commit_bwar(tx);
                }
            }
        }

        self.removals();
        self.arrivals();

        // slot-boundary sample
        if let Some(snw) = &self.snw {
            self.cur_q = snw.total_copies;
        }
        self.sum_q += self.cur_q as u128;
        self.sum_u += self.cur_u as u128;
        self.sum_d += self.cur_d as u128;
        if self.t % self.cfg.sample_stride == 0 {
            self.series.push((self.t, self.cur_q));
        }

        if self.auditing {
            self.audit_slot();
            self.txlog.clear();
        }
        self.t += 1;
    }

    fn tally(&self) -> RawTally {
        RawTally {
            slots: self.t,
            admitted: self.admitted,
            delivered: self.delivered,
            transmissions: self.transmissions,
            duplicate_transmissions: self.duplicate_transmissions,
            sum_q: self.sum_q,
            sum_u: self.sum_u,
            sum_d: self.sum_d,
            delay_sum: self.delay_sum,
            delay_count: self.delay_count,
            series: self.series.clone(),
        }
    }

    // ---- audit -----------------------------------------------------------

    fn violation(&mut self, msg: String) {
        self.audit.total_violations += 1;
        if self.audit.violations.len() < AUDIT_REPORT_CAP {
            self.audit.violations.push(msg);
        }
    }

    /// Recompute every invariant from scratch and compare against the
    /// incremental state. Runs at the slot boundary (after removals and
    /// arrivals), before `t` advances.
    fn audit_slot(&mut self) {
        let t = self.t;
        let d_max = self.cfg.d_max as usize;
        let mut msgs: Vec<String> = Vec::new();

        // one transmission per cell
        let mut seen_cells = HashSet::new();
        for rec in &self.txlog {
            if !seen_cells.insert(rec.cell) {
                msgs.push(format!("INV-ONE-TX-PER-CELL violated in cell {} at slot {t}", rec.cell));
            }
            if rec.served != CopyKind::Original && rec.pre_q != 0 {
                msgs.push(format!(
                    "INV-DUP-PRIORITY violated at slot {t}: node {} served a duplicate for \
                     commodity {} with {} originals queued",
                    rec.sender, rec.commodity, rec.pre_q
                ));
            }
        }

        if self.cfg.variant == Variant::Snw {
            let snw = self.snw.as_ref().expect("SNW state");
            let mut copies_per_id: HashMap<u64, u64> = HashMap::new();
            let mut tokens_per_id: HashMap<u64, u64> = HashMap::new();
            for (id, node, tok) in snw.iter_copies() {
                *copies_per_id.entry(id).or_default() += 1;
                *tokens_per_id.entry(id).or_default() += tok as u64;
                if tok == 0 {
                    msgs.push(format!("INV-SNW-TOKENS: zero-token copy of {id} at node {node}"));
                }
            }
            for (&id, &toks) in &tokens_per_id {
                if toks > self.cfg.snw_copies as u64 {
                    msgs.push(format!(
                        "INV-SNW-TOKENS: packet {id} holds {toks} tokens, budget {}",
                        self.cfg.snw_copies
                    ));
                }
            }
            for id in 0..self.next_id {
                if !self.delivered_ids.contains(&id) && !copies_per_id.contains_key(&id) {
                    msgs.push(format!("INV-CONSERVATION: undelivered packet {id} has no copy"));
                }
            }
            for (&id, &n) in &copies_per_id {
                if self.delivered_ids.contains(&id) {
                    msgs.push(format!("INV-PURGE: delivered packet {id} still has {n} copies"));
                }
            }
            let total: u64 = copies_per_id.values().sum();
            if total != self.cur_q {
                msgs.push(format!("INV-COUNTER-Q: recount {total} != incremental {}", self.cur_q));
            }
            let in_flight =
                copies_per_id.keys().filter(|id| !self.delivered_ids.contains(id)).count();
            if in_flight as u64 != self.cur_u {
                msgs.push(format!(
                    "INV-COUNTER-U: recount {in_flight} != incremental {}",
                    self.cur_u
                ));
            }
        } else {
            let mut q = 0u64;
            let mut d = 0u64;
            let mut undelivered: HashSet<u64> = HashSet::new();
            let mut durable: HashSet<u64> = HashSet::new();
            let mut spot_count = 0usize;
            for node in 0..self.cfg.nodes {
                let ns = &self.nodes[node as usize];
                for c in 0..self.cfg.nodes {
                    let (qlen, dlen) = (ns.q_len(c), ns.d_len(c));
                    if c == node && (qlen > 0 || dlen > 0) {
                        msgs.push(format!(
                            "INV-SELF-QUEUE: node {node} buffers its own commodity at slot {t}"
                        ));
                    }
                    if dlen > d_max {
                        msgs.push(format!(
                            "INV-DUP-CAP: node {node} commodity {c} holds {dlen} > D_max {d_max}"
                        ));
                    }
                    q += qlen as u64;
                    d += dlen as u64;
                    spot_count += qlen + dlen;
                    let mut ids = HashSet::with_capacity(qlen + dlen);
                    for p in &ns.main_queues[c as usize] {
                        if p.kind != CopyKind::Original {
                            msgs.push(format!(
                                "INV-KIND: non-original {:?} in main queue of node {node}",
                                p.kind
                            ));
                        }
                        let delivered = self.delivered_ids.contains(&p.id);
                        if !delivered {
                            undelivered.insert(p.id);
                        }
                        if delivered
                            && matches!(self.cfg.variant, Variant::BwarIm | Variant::BwarId)
                        {
                            msgs.push(format!(
                                "INV-PURGE: delivered packet {} still in node {node}'s main queue",
                                p.id
                            ));
                        }
                        durable.insert(p.id);
                        if !ids.insert(p.id) {
                            msgs.push(format!(
                                "INV-UNIQUE: id {} twice at node {node} commodity {c}",
                                p.id
                            ));
                        }
                    }
                    for p in &ns.dup_buffers[c as usize] {
                        if !self.delivered_ids.contains(&p.id) {
                            undelivered.insert(p.id);
                        }
                        match p.kind {
                            CopyKind::Original => msgs.push(format!(
                                "INV-KIND: plain original in dup buffer of node {node}"
                            )),
                            CopyKind::FlaggedOriginal => {
                                durable.insert(p.id);
                            }
                            CopyKind::Duplicate => {
                                if self.cfg.variant == Variant::BwarTd
                                    && t - p.admit_time >= self.cfg.timeout as u64
                                {
                                    msgs.push(format!(
                                        "INV-TIMEOUT: duplicate of {} aged {} >= P {} survived \
                                         the sweep",
                                        p.id,
                                        t - p.admit_time,
                                        self.cfg.timeout
                                    ));
                                }
                            }
                        }
                        if self.delivered_ids.contains(&p.id)
                            && matches!(self.cfg.variant, Variant::BwarIm | Variant::BwarId)
                        {
                            msgs.push(format!(
                                "INV-PURGE: delivered packet {} still in node {node}'s dup buffer",
                                p.id
                            ));
                        }
                        if !ids.insert(p.id) {
                            msgs.push(format!(
                                "INV-UNIQUE: id {} twice at node {node} commodity {c}",
                                p.id
                            ));
                        }
                    }
                }
            }
            if matches!(self.cfg.variant, Variant::Rb | Variant::RbDa) && d > 0 {
                msgs.push(format!("INV-NO-REDUNDANCY: {d} duplicate-buffer entries under {}",
                    self.cfg.variant));
            }
            if q != self.cur_q {
                msgs.push(format!("INV-COUNTER-Q: recount {q} != incremental {}", self.cur_q));
            }
            // U counts packets in flight, not copies: one per distinct
            // undelivered id held anywhere in the network
            if undelivered.len() as u64 != self.cur_u {
                msgs.push(format!(
                    "INV-COUNTER-U: recount {} != incremental {}",
                    undelivered.len(),
                    self.cur_u
                ));
            }
            if d != self.cur_d {
                msgs.push(format!("INV-COUNTER-D: recount {d} != incremental {}", self.cur_d));
            }
            if self.main_pushes - self.main_pops != q {
                msgs.push(format!(
                    "INV-FLOW-MAIN: pushes {} - pops {} != residents {q}",
                    self.main_pushes, self.main_pops
                ));
            }
            if self.dup_pushes - self.dup_pops != d {
                msgs.push(format!(
                    "INV-FLOW-DUP: pushes {} - pops {} != residents {d}",
                    self.dup_pushes, self.dup_pops
                ));
            }
            let indexed: usize = self.holders.values().map(|c| c.spots.len()).sum();
            if indexed != spot_count {
                msgs.push(format!(
                    "INV-HOLDER-INDEX: {indexed} indexed spots, {spot_count} stored copies"
                ));
            }
            // original-copy conservation: every undelivered admitted packet
            // keeps at least one durable copy somewhere
            for id in 0..self.next_id {
                if !self.delivered_ids.contains(&id) && !durable.contains(&id) {
                    msgs.push(format!(
                        "INV-CONSERVATION: undelivered packet {id} lost its last durable copy"
                    ));
                }
            }
            if self.admitted != self.delivered + (self.next_id - self.delivered_ids.len() as u64) {
                msgs.push(format!(
                    "INV-CONSERVATION: admitted {} != delivered {} + undelivered {}",
                    self.admitted,
                    self.delivered,
                    self.next_id - self.delivered_ids.len() as u64
                ));
            }
        }

        self.audit.slots_audited += 1;
        for m in msgs {
            self.violation(m);
        }
    }
}

/// Run a config to completion.
pub fn run(cfg: SimConfig) -> Result<MetricsReport, ConfigError> {
    let mut state = SimState::new(cfg)?;
    for _ in 0..state.cfg.slots {
        state.step();
    }
    Ok(finalize(&state.tally(), &state.cfg))
}

/// Run with the exhaustive per-slot invariant audit enabled.
pub fn run_audited(cfg: SimConfig) -> Result<(MetricsReport, AuditReport), ConfigError> {
    let mut state = SimState::new(cfg)?;
    state.auditing = true;
    for _ in 0..state.cfg.slots {
        state.step();
    }
    let report = finalize(&state.tally(), &state.cfg);
    Ok((report, state.audit))
}

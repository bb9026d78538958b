//! Link weights and the per-cell scheduling decision.
//!
//! One transmission is allowed per cell per slot. The backpressure family
//! (RB, RB-DA, BWAR-*) picks the sender/receiver/commodity triple by the
//! criteria, in order: largest main-queue differential, then destination
//! advantage, then largest duplicate-buffer differential, then lexicographic
//! (a, b, c). Spray and Wait has its own two-priority rule.

use std::collections::{BTreeSet, HashMap};

use rand_chacha::ChaCha8Rng;

use crate::config::Variant;
use crate::rng::uniform_index;
use crate::types::{CopyKind, NodeState};

/// The enhanced link weight, kept in exact integers.
///
/// `scaled_weight` is 4*D_max times the fractional weight
/// `q_diff + 1/2*[dest] + 1/(4*D_max)*dup_diff`, so no rounding occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkWeight {
    pub scaled_weight: i64,
    pub q_diff: i64,
    pub dest_flag: bool,
    pub dup_diff: i64,
}

/// Plain backpressure weight: the main-queue differential.
pub fn rb_weight(q_i: usize, q_j: usize) -> i64 {
    q_i as i64 - q_j as i64
}

/// The adaptive-redundancy link weight. The destination indicator only fires
/// when the sender actually holds something for that commodity
/// (`Q_i + D_i > 0`); an empty encounter carries no advantage.
pub fn bwar_weight(
    q_i: usize,
    q_j: usize,
    d_i: usize,
    d_j: usize,
    j_is_dest: bool,
    d_max: u32,
) -> LinkWeight {
    let q_diff = q_i as i64 - q_j as i64;
    let dest_flag = j_is_dest && q_i + d_i > 0;
    let dup_diff = d_i as i64 - d_j as i64;
    let dm = d_max as i64;
    LinkWeight {
        scaled_weight: 4 * dm * q_diff + 2 * dm * (dest_flag as i64) + dup_diff,
        q_diff,
        dest_flag,
        dup_diff,
    }
}

impl LinkWeight {
    /// The tie-break key: criteria in priority order.
    ///
    /// The selection compares these tuples lexicographically instead of
    /// comparing `scaled_weight`. The two orders agree except on one boundary:
    /// (q_diff+1, no dest, dup_diff=-D_max) and (q_diff, dest, dup_diff=+D_max)
    /// have equal scaled weight (the fractional weight ties too: the 1/2+1/4
    /// margins sum to less than 1 only for nonnegative dup terms). The
    /// criteria-in-order reading resolves that tie toward the strictly larger
    /// queue differential, which is what this key does. A tuple maximum always
    /// attains the maximum scaled weight, so the "schedule only if the weight
    /// is positive" test below is unaffected.
    #[inline]
    fn key(&self) -> (i64, bool, i64) {
        (self.q_diff, self.dest_flag, self.dup_diff)
    }
}

/// The per-cell decision: who sends what to whom, and which copy kind the
/// sender will serve. `served` is derivable from slot-start state because
/// commits in other cells never touch this cell's nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduledTransmission {
    pub cell: u32,
    pub sender: u32,
    pub receiver: u32,
    pub commodity: u32,
    pub served: CopyKind,
}

/// Residual tie-break rule after all weight criteria.
pub enum TieBreak<'a> {
    /// Deterministic: smallest (sender, receiver, commodity).
    Lexicographic,
    /// Uniform over the tied candidates, one draw per scheduled transmission.
    Seeded(&'a mut ChaCha8Rng),
}

fn weight_for(
    variant: Variant,
    sa: &NodeState,
    sb: &NodeState,
    b: u32,
    c: u32,
    d_max: u32,
) -> LinkWeight {
    let (q_a, q_b) = (sa.q_len(c), sb.q_len(c));
    match variant {
        // RB ignores both extra criteria; RB-DA adds only the destination
        // indicator. Both fall out of the full weight with the duplicate
        // occupancies masked to zero (those variants never create duplicates).
        Variant::Rb => bwar_weight(q_a, q_b, 0, 0, false, d_max),
        Variant::RbDa => bwar_weight(q_a, q_b, 0, 0, b == c, d_max),
        Variant::BwarIm | Variant::BwarId | Variant::BwarTd => {
            bwar_weight(q_a, q_b, sa.d_len(c), sb.d_len(c), b == c, d_max)
        }
        Variant::Snw => unreachable!("Spray and Wait does not use link weights"),
    }
}

/// Pick the transmission for one cell, or `None` to leave the cell idle.
///
/// Only commodities the sender actually stores can produce a positive weight
/// (any other commodity yields q_diff <= 0, an inactive destination indicator,
/// and dup_diff <= 0), so the scan covers `members x members x active[sender]`.
/// Scheduling requires a strictly positive weight; a cell full of empty or
/// perfectly balanced queues stays idle, but a pure duplicate-differential or
/// destination-encounter weight is enough — serving redundancy is free.
pub fn select_cell_transmission(
    variant: Variant,
    cell: u32,
    members: &[u32],
    states: &[NodeState],
    d_max: u32,
    tie: &mut TieBreak,
) -> Option<ScheduledTransmission> {
    let mut best: Option<((i64, bool, i64), i64, (u32, u32, u32))> = None;
    let mut ties: Vec<(u32, u32, u32)> = Vec::new();
    let collect_ties = matches!(tie, TieBreak::Seeded(_));

    for &a in members {
        let sa = &states[a as usize];
        if sa.active.is_empty() {
            continue;
        }
        for &b in members {
            if b == a {
                continue;
            }
            let sb = &states[b as usize];
            for &c in &sa.active {
                let w = weight_for(variant, sa, sb, b, c, d_max);
                let key = w.key();
                match &mut best {
                    Some((bk, _, _)) if key < *bk => {}
                    Some((bk, _, _)) if key == *bk => {
                        if collect_ties {
                            ties.push((a, b, c));
                        }
                    }
                    // Strict improvement: iteration order is ascending
                    // (a, b, c), so the stored candidate is the
                    // lexicographic minimum of the maximizers.
                    _ => {
                        best = Some((key, w.scaled_weight, (a, b, c)));
                        if collect_ties {
                            ties.clear();
                            ties.push((a, b, c));
                        }
                    }
                }
            }
        }
    }

    let (_, scaled, mut pick) = best?;
    if scaled <= 0 {
        return None;
    }
    if let TieBreak::Seeded(rng) = tie {
        pick = ties[uniform_index(rng, ties.len() as u32) as usize];
    }
    let (a, b, c) = pick;
    let served = if states[a as usize].q_len(c) > 0 {
        CopyKind::Original
    } else {
        // A positive weight with an empty main queue implies a nonempty
        // duplicate buffer (the weight's duplicate terms are the only ones
        // left), so the front exists.
        states[a as usize].dup_buffers[c as usize]
            .front()
            .expect("positive weight with empty buffers")
            .kind
    };
    Some(ScheduledTransmission { cell, sender: a, receiver: b, commodity: c, served })
}

// ---------------------------------------------------------------------------
// Spray and Wait
// ---------------------------------------------------------------------------

/// Copy bookkeeping for Spray and Wait. Each copy of a packet sits at one
/// holder with a remaining token budget; binary spraying hands off half the
/// tokens with each copy, and a copy whose budget reaches 1 only waits for
/// the destination. Copies of a delivered packet are purged wholesale (the
/// same ideal-removal assumption the redundancy variants get), so spraying
/// only ever works on undelivered traffic.
pub struct SnwState {
    /// Remaining tokens per (packet id, holder).
    tokens: HashMap<(u64, u32), u32>,
    /// All copies at [node][commodity], oldest (admit_time, id) first.
    copies: Vec<Vec<BTreeSet<(u64, u64)>>>,
    /// Copies with tokens > 1 per node, ordered (admit_time, id, commodity).
    sprayable: Vec<BTreeSet<(u64, u64, u32)>>,
    /// Where every live packet's copies sit, for wholesale purging.
    holders: HashMap<u64, PacketCopies>,
    pub total_copies: u64,
}

#[derive(Debug, Clone)]
struct PacketCopies {
    admit: u64,
    commodity: u32,
    at: Vec<u32>,
}

/// A Spray-and-Wait cell decision, carrying the packet identity the commit
/// phase needs (the scheduled copy is not necessarily a queue head).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnwDecision {
    pub tx: ScheduledTransmission,
    pub packet_id: u64,
    pub admit_time: u64,
}

impl SnwState {
    pub fn new(nodes: u32) -> Self {
        let n = nodes as usize;
        SnwState {
            tokens: HashMap::new(),
            copies: vec![vec![BTreeSet::new(); n]; n],
            sprayable: vec![BTreeSet::new(); n],
            holders: HashMap::new(),
            total_copies: 0,
        }
    }

    pub fn has_copy(&self, id: u64, node: u32) -> bool {
        self.tokens.contains_key(&(id, node))
    }

    pub fn tokens_at(&self, id: u64, node: u32) -> Option<u32> {
        self.tokens.get(&(id, node)).copied()
    }

    /// Iterate (packet id, holder, tokens) — audit support.
    pub fn iter_copies(&self) -> impl Iterator<Item = (u64, u32, u32)> + '_ {
        self.tokens.iter().map(|(&(id, node), &tok)| (id, node, tok))
    }

    fn insert_copy(&mut self, node: u32, admit: u64, id: u64, commodity: u32, tokens: u32) {
        debug_assert!(tokens >= 1);
        self.tokens.insert((id, node), tokens);
        self.copies[node as usize][commodity as usize].insert((admit, id));
        if tokens > 1 {
            self.sprayable[node as usize].insert((admit, id, commodity));
        }
        self.holders
            .entry(id)
            .or_insert_with(|| PacketCopies { admit, commodity, at: Vec::new() })
            .at
            .push(node);
        self.total_copies += 1;
    }

    fn remove_copy(&mut self, node: u32, admit: u64, id: u64, commodity: u32) {
        self.tokens.remove(&(id, node));
        self.copies[node as usize][commodity as usize].remove(&(admit, id));
        self.sprayable[node as usize].remove(&(admit, id, commodity));
        if let Some(pc) = self.holders.get_mut(&id) {
            if let Some(pos) = pc.at.iter().position(|&n| n == node) {
                pc.at.swap_remove(pos);
            }
            if pc.at.is_empty() {
                self.holders.remove(&id);
            }
        }
        self.total_copies -= 1;
    }

    /// Drop every remaining copy of a packet (ideal removal after delivery).
    /// Returns how many copies were erased.
    pub fn purge(&mut self, id: u64) -> u64 {
        let Some(pc) = self.holders.remove(&id) else {
            return 0;
        };
        let mut erased = 0;
        for node in pc.at {
            self.tokens.remove(&(id, node));
            self.copies[node as usize][pc.commodity as usize].remove(&(pc.admit, id));
            self.sprayable[node as usize].remove(&(pc.admit, id, pc.commodity));
            self.total_copies -= 1;
            erased += 1;
        }
        erased
    }

    /// Source receives the full budget of a freshly admitted packet.
    pub fn admit(&mut self, source: u32, admit: u64, id: u64, commodity: u32, budget: u32) {
        self.insert_copy(source, admit, id, commodity, budget);
    }

    /// Binary spray: the receiver gets floor(h/2) tokens with its copy, the
    /// holder keeps the rest. Returns (kept, given).
    pub fn commit_spray(
        &mut self,
        holder: u32,
        receiver: u32,
        admit: u64,
        id: u64,
        commodity: u32,
    ) -> (u32, u32) {
        let h = self.tokens[&(id, holder)];
        debug_assert!(h > 1, "spraying requires tokens > 1");
        let given = h / 2;
        let kept = h - given;
        self.tokens.insert((id, holder), kept);
        if kept <= 1 {
            self.sprayable[holder as usize].remove(&(admit, id, commodity));
        }
        self.insert_copy(receiver, admit, id, commodity, given);
        (kept, given)
    }

    /// The holder hands its copy to the destination (first delivery or
    /// redelivery acknowledgement either way removes the copy).
    pub fn commit_delivery(&mut self, holder: u32, admit: u64, id: u64, commodity: u32) {
        self.remove_copy(holder, admit, id, commodity);
    }
}

/// The Spray-and-Wait cell rule.
///
/// Priority 1 — delivery: if any in-cell holder has a copy whose destination
/// is also in the cell, hand over the oldest such packet (admit_time, then
/// id; ties go to the smallest holder).
/// Priority 2 — binary spray: the oldest (admit_time, id, holder) copy with
/// tokens > 1 that has a cell-mate without a copy; the smallest-id lacking
/// cell-mate receives. Otherwise the cell idles (wait phase).
pub fn snw_select_cell_transmission(
    cell: u32,
    members: &[u32],
    cell_of: &[u32],
    snw: &SnwState,
) -> Option<SnwDecision> {
    // Priority 1: deliveries.
    let mut best: Option<(u64, u64, u32, u32)> = None; // (admit, id, holder, dest)
    for &h in members {
        for &d in members {
            if d == h {
                continue;
            }
            if let Some(&(admit, id)) = snw.copies[h as usize][d as usize].first() {
                if best.map_or(true, |(ba, bi, _, _)| (admit, id) < (ba, bi)) {
                    best = Some((admit, id, h, d));
                }
            }
        }
    }
    if let Some((admit, id, holder, dest)) = best {
        return Some(SnwDecision {
            tx: ScheduledTransmission {
                cell,
                sender: holder,
                receiver: dest,
                commodity: dest,
                served: CopyKind::Original,
            },
            packet_id: id,
            admit_time: admit,
        });
    }

    // Priority 2: sprays. Merge the members' sprayable sets in
    // (admit, id, holder) order and stop at the first candidate with an
    // eligible receiver. No candidate's destination is in the cell here
    // (priority 1 would have fired), so any copy-lacking cell-mate works.
    let mut cursors: Vec<_> =
        members.iter().map(|&h| (h, snw.sprayable[h as usize].iter().peekable())).collect();
    loop {
        let mut min: Option<(u64, u64, u32, usize)> = None; // (admit, id, commodity, cursor idx)
        for (i, (_, cur)) in cursors.iter_mut().enumerate() {
            if let Some(&&(admit, id, c)) = cur.peek() {
                // Strict comparison on (admit, id): members ascend, so equal
                // keys keep the smaller holder.
                if min.map_or(true, |(ba, bi, _, _)| (admit, id) < (ba, bi)) {
                    min = Some((admit, id, c, i));
                }
            }
        }
        let (admit, id, commodity, i) = min?;
        let holder = cursors[i].0;
        let receiver =
            members.iter().copied().find(|&m| m != holder && !snw.has_copy(id, m));
        if let Some(receiver) = receiver {
            debug_assert_ne!(cell_of[commodity as usize], cell, "priority 1 missed a delivery");
            return Some(SnwDecision {
                tx: ScheduledTransmission {
                    cell,
                    sender: holder,
                    receiver,
                    commodity,
                    served: CopyKind::Duplicate,
                },
                packet_id: id,
                admit_time: admit,
            });
        }
        cursors[i].1.next();
    }
}

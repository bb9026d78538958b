//! Domain types shared by the scheduler and the engine: packets, copy kinds,
//! and per-node queue state.

use std::collections::{BTreeSet, VecDeque};

/// What a stored (or transmitted) copy of a packet is.
///
/// `Original` lives in a main queue. `Duplicate` is a redundant copy living in
/// a duplicate buffer. `FlaggedOriginal` is the sender-retained original that
/// BWAR-ID/BWAR-TD move into the duplicate buffer when the packet is
/// duplicated; it is exempt from timeout deletion and can return to the main
/// queue on a destination encounter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CopyKind {
    Original,
    Duplicate,
    FlaggedOriginal,
}

/// A unit of traffic. All copies of the same packet share `id`, `source`,
/// `commodity` and `admit_time`; only `kind` differs between copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    /// Globally unique, assigned in admission order.
    pub id: u64,
    /// Node that generated the packet.
    pub source: u32,
    /// Final destination; also the queue index the packet occupies everywhere.
    pub commodity: u32,
    /// Slot at which the packet entered the network. Immutable; timeout and
    /// delay are both measured from it.
    pub admit_time: u64,
    pub kind: CopyKind,
}

/// The fixed pairing: node 2i and node 2i+1 are each other's destination.
#[inline]
pub fn partner(node: u32) -> u32 {
    node ^ 1
}

/// Per-node storage: one main FIFO and one bounded duplicate buffer per
/// commodity. A node's own-commodity buffers stay empty (destinations consume
/// packets immediately), and no packet id appears twice within one node's
/// combined storage for a commodity.
#[derive(Debug, Clone)]
pub struct NodeState {
    pub node: u32,
    pub partner: u32,
    /// Indexed by commodity; `main_queues[c]` holds Q_n^c.
    pub main_queues: Vec<VecDeque<Packet>>,
    /// Indexed by commodity; `dup_buffers[c]` holds D_n^c, capacity `D_max`.
    pub dup_buffers: Vec<VecDeque<Packet>>,
    /// Commodities with at least one stored copy (main or duplicate). The
    /// scheduler only inspects these: a commodity absent here can never
    /// contribute a positive link weight from this node as sender.
    pub active: BTreeSet<u32>,
}

impl NodeState {
    pub fn new(node: u32, total_nodes: u32) -> Self {
        let n = total_nodes as usize;
        NodeState {
            node,
            partner: partner(node),
            main_queues: vec![VecDeque::new(); n],
            dup_buffers: vec![VecDeque::new(); n],
            active: BTreeSet::new(),
        }
    }

    #[inline]
    pub fn q_len(&self, commodity: u32) -> usize {
        self.main_queues[commodity as usize].len()
    }

    #[inline]
    pub fn d_len(&self, commodity: u32) -> usize {
        self.dup_buffers[commodity as usize].len()
    }

    /// Push to the main queue tail, keeping the active set in sync.
    pub fn push_main(&mut self, p: Packet) {
        let c = p.commodity;
        self.main_queues[c as usize].push_back(p);
        self.active.insert(c);
    }

    /// Re-insert at the main queue head (used when a transmission leaves the
    /// original in place: the pop is undone, preserving FIFO order).
    pub fn push_main_front(&mut self, p: Packet) {
        let c = p.commodity;
        self.main_queues[c as usize].push_front(p);
        self.active.insert(c);
    }

    pub fn pop_main(&mut self, commodity: u32) -> Option<Packet> {
        let p = self.main_queues[commodity as usize].pop_front();
        if p.is_some() {
            self.sync_active(commodity);
        }
        p
    }

    /// Store a copy in the duplicate buffer. Caller is responsible for the
    /// capacity check against D_max.
    pub fn push_dup(&mut self, p: Packet) {
        let c = p.commodity;
        self.dup_buffers[c as usize].push_back(p);
        self.active.insert(c);
    }

    /// Remove the duplicate-buffer entry holding `id`, if present.
    pub fn remove_dup(&mut self, commodity: u32, id: u64) -> Option<Packet> {
        let buf = &mut self.dup_buffers[commodity as usize];
        let pos = buf.iter().position(|p| p.id == id)?;
        let p = buf.remove(pos);
        self.sync_active(commodity);
        p
    }

    /// Remove the main-queue entry holding `id`, if present (ideal purge path;
    /// normal service always pops from the front instead).
    pub fn remove_main(&mut self, commodity: u32, id: u64) -> Option<Packet> {
        let buf = &mut self.main_queues[commodity as usize];
        let pos = buf.iter().position(|p| p.id == id)?;
        let p = buf.remove(pos);
        self.sync_active(commodity);
        p
    }

    #[inline]
    pub fn holds_id(&self, commodity: u32, id: u64) -> bool {
        self.main_queues[commodity as usize].iter().any(|p| p.id == id)
            || self.dup_buffers[commodity as usize].iter().any(|p| p.id == id)
    }

    fn sync_active(&mut self, commodity: u32) {
        if self.main_queues[commodity as usize].is_empty()
            && self.dup_buffers[commodity as usize].is_empty()
        {
            self.active.remove(&commodity);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_is_an_involution() {
        for n in 0..64 {
            assert_eq!(partner(partner(n)), n);
            assert_ne!(partner(n), n);
        }
        assert_eq!(partner(0), 1);
        assert_eq!(partner(7), 6);
    }

    fn pkt(id: u64, commodity: u32) -> Packet {
        Packet { id, source: 0, commodity, admit_time: 0, kind: CopyKind::Original }
    }

    #[test]
    fn active_set_tracks_occupancy() {
        let mut n = NodeState::new(0, 4);
        assert!(n.active.is_empty());
        n.push_main(pkt(1, 2));
        n.push_dup(Packet { kind: CopyKind::Duplicate, ..pkt(2, 3) });
        assert_eq!(n.active.iter().copied().collect::<Vec<_>>(), vec![2, 3]);

        n.pop_main(2).unwrap();
        assert!(!n.active.contains(&2));
        n.remove_dup(3, 2).unwrap();
        assert!(n.active.is_empty());
    }

    #[test]
    fn active_set_needs_both_buffers_empty() {
        let mut n = NodeState::new(0, 4);
        n.push_main(pkt(1, 2));
        n.push_dup(Packet { kind: CopyKind::Duplicate, ..pkt(9, 2) });
        n.pop_main(2).unwrap();
        // duplicate still there
        assert!(n.active.contains(&2));
        n.remove_dup(2, 9).unwrap();
        assert!(!n.active.contains(&2));
    }

    #[test]
    fn remove_main_by_id_keeps_order() {
        let mut n = NodeState::new(0, 4);
        for id in 0..4 {
            n.push_main(pkt(id, 1));
        }
        n.remove_main(1, 2).unwrap();
        let ids: Vec<u64> = n.main_queues[1].iter().map(|p| p.id).collect();
        assert_eq!(ids, vec![0, 1, 3]);
        assert!(n.remove_main(1, 2).is_none());
    }

    #[test]
    fn holds_id_sees_both_buffers() {
        let mut n = NodeState::new(0, 4);
        n.push_main(pkt(5, 1));
        n.push_dup(Packet { kind: CopyKind::Duplicate, ..pkt(6, 1) });
        assert!(n.holds_id(1, 5));
        assert!(n.holds_id(1, 6));
        assert!(!n.holds_id(1, 7));
        assert!(!n.holds_id(2, 5));
    }
}

//! Duplicate creation and removal bookkeeping.
//!
//! Creation: a transmitted original is duplicated when it leaves the sender's
//! combined occupancy for that commodity below the threshold — in the cell
//! model (q_th = 1) exactly when the transmission empties it. Where the twin
//! lands is variant-specific and handled in the engine commit:
//! BWAR-IM keeps the original in the sender's main queue and stores the
//! transmitted copy as a duplicate at the receiver; BWAR-ID/TD forward the
//! original and park a flagged twin in the sender's duplicate buffer.
//!
//! Removal: the ideal variants delete every copy of a packet network-wide in
//! the slot it is first delivered; the timeout variant deletes unflagged
//! duplicates P slots after admission and resolves flagged originals on
//! destination encounters. Those passes live in the engine, which owns the
//! state they sweep; this module defines the decision rule and the ledger.

/// Running totals of copies destroyed outside normal service: purged, timed
/// out, acknowledged, or displaced by a merge. Originals and duplicates are
/// tallied separately (the gamma and gamma-tilde flows).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RemovalLedger {
    pub removed_originals: u64,
    pub removed_duplicates: u64,
}

impl RemovalLedger {
    pub fn total(&self) -> u64 {
        self.removed_originals + self.removed_duplicates
    }
}

/// Should the just-transmitted original be duplicated?
///
/// `post_tx_q`/`post_tx_d` are the sender's occupancies for the commodity
/// after the packet left; `target_dup_len` is the current fill of whichever
/// duplicate buffer would hold the twin. No duplication when that buffer is
/// full — the transmission itself still happens.
pub fn maybe_duplicate(
    post_tx_q: usize,
    post_tx_d: usize,
    q_th: u32,
    target_dup_len: usize,
    d_max: u32,
) -> bool {
    post_tx_q + post_tx_d < q_th as usize && target_dup_len < d_max as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_exactly_when_the_sender_runs_empty() {
        // cell-model parameters: q_th = D_max = 1
        assert!(maybe_duplicate(0, 0, 1, 0, 1));
        assert!(!maybe_duplicate(2, 0, 1, 0, 1), "queue not low");
        assert!(!maybe_duplicate(1, 0, 1, 0, 1), "one packet left is not low");
        assert!(!maybe_duplicate(0, 1, 1, 0, 1), "a parked duplicate counts");
    }

    #[test]
    fn full_target_buffer_blocks_duplication() {
        assert!(!maybe_duplicate(0, 0, 1, 1, 1));
        assert!(maybe_duplicate(0, 0, 1, 1, 2), "room left when D_max = 2");
    }

    #[test]
    fn zero_threshold_never_duplicates() {
        assert!(!maybe_duplicate(0, 0, 0, 0, 1));
    }

    #[test]
    fn general_threshold() {
        assert!(maybe_duplicate(1, 1, 3, 0, 2));
        assert!(!maybe_duplicate(2, 1, 3, 0, 2));
    }
}

//! Shared test fixtures: a brute-force re-implementation of the per-cell
//! scheduling rule, written directly from the four selection criteria so it
//! shares no code (and no algebra) with the production scheduler.

use bwar::config::Variant;
use bwar::policy::{select_cell_transmission, ScheduledTransmission, TieBreak};
use bwar::types::{CopyKind, NodeState, Packet};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small cell instance: the occupants and their per-commodity buffer
/// occupancies over a fixed universe of nodes.
#[derive(Debug, Clone)]
pub struct CellInstance {
    pub members: Vec<u32>,
    /// q[node][commodity], d[node][commodity]
    pub q: Vec<Vec<u32>>,
    pub d: Vec<Vec<u32>>,
    pub d_max: u32,
}

pub const UNIVERSE: u32 = 6;

/// Enumerate every (sender, receiver, commodity) triple and apply the four
/// selection criteria one after another, then the positivity gate:
///
/// 1. keep the triples maximizing the main-queue differential;
/// 2. if any survivor has receiver = commodity with a nonempty combined
///    buffer at the sender, keep exactly those;
/// 3. keep the survivors maximizing the combined (main + duplicate)
///    differential;
/// 4. take the lexicographically smallest (sender, receiver, commodity).
///
/// The winner is scheduled only if its composite weight is positive, i.e.
/// the fractional form q_diff + dest/2 + dup_diff/(4 D_max) > 0, evaluated
/// here in integers.
pub fn oracle_select(
    variant: Variant,
    inst: &CellInstance,
) -> Option<(u32, u32, u32, CopyKind)> {
    let use_dest = variant != Variant::Rb;
    let use_dup = variant.is_bwar();

    let mut candidates: Vec<(u32, u32, u32)> = Vec::new();
    for &a in &inst.members {
        for &b in &inst.members {
            if a == b {
                continue;
            }
            for c in 0..UNIVERSE {
                if c == a {
                    continue;
                }
                candidates.push((a, b, c));
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }

    let qd = |a: u32, b: u32, c: u32| {
        inst.q[a as usize][c as usize] as i64 - inst.q[b as usize][c as usize] as i64
    };
    let dd = |a: u32, b: u32, c: u32| {
        if !use_dup {
            return 0;
        }
        inst.d[a as usize][c as usize] as i64 - inst.d[b as usize][c as usize] as i64
    };
    let is_dest = |a: u32, b: u32, c: u32| {
        use_dest
            && b == c
            && inst.q[a as usize][c as usize] + inst.d[a as usize][c as usize] > 0
    };

    // criterion 1
    let best_q = candidates.iter().map(|&(a, b, c)| qd(a, b, c)).max().unwrap();
    let mut pool: Vec<(u32, u32, u32)> =
        candidates.into_iter().filter(|&(a, b, c)| qd(a, b, c) == best_q).collect();

    // criterion 2
    if pool.iter().any(|&(a, b, c)| is_dest(a, b, c)) {
        pool.retain(|&(a, b, c)| is_dest(a, b, c));
    }

    // criterion 3
    let best_d = pool.iter().map(|&(a, b, c)| dd(a, b, c)).max().unwrap();
    pool.retain(|&(a, b, c)| dd(a, b, c) == best_d);

    // criterion 4
    pool.sort();
    let (a, b, c) = pool[0];

    // positivity, in quarters of 1/D_max
    let dest_bonus = if is_dest(a, b, c) { 1 } else { 0 };
    let weight = 4 * inst.d_max as i64 * qd(a, b, c)
        + 2 * inst.d_max as i64 * dest_bonus
        + dd(a, b, c);
    if weight <= 0 {
        return None;
    }
    let served = if inst.q[a as usize][c as usize] > 0 {
        CopyKind::Original
    } else {
        CopyKind::Duplicate
    };
    Some((a, b, c, served))
}

/// Materialize the instance as real node states, with dummy packets filling
/// each buffer to the requested depth.
pub fn build_states(inst: &CellInstance) -> Vec<NodeState> {
    let mut next_id = 0u64;
    let mut states: Vec<NodeState> = (0..UNIVERSE).map(|n| NodeState::new(n, UNIVERSE)).collect();
    for n in 0..UNIVERSE as usize {
        for c in 0..UNIVERSE {
            if c == n as u32 {
                continue;
            }
            for _ in 0..inst.q[n][c as usize] {
                states[n].push_main(Packet {
                    id: next_id,
                    source: n as u32,
                    commodity: c,
                    admit_time: 0,
                    kind: CopyKind::Original,
                });
                next_id += 1;
            }
            for _ in 0..inst.d[n][c as usize] {
                states[n].push_dup(Packet {
                    id: next_id,
                    source: n as u32,
                    commodity: c,
                    admit_time: 0,
                    kind: CopyKind::Duplicate,
                });
                next_id += 1;
            }
        }
    }
    states
}

pub fn production_select(
    variant: Variant,
    inst: &CellInstance,
) -> Option<(u32, u32, u32, CopyKind)> {
    let states = build_states(inst);
    let tx: Option<ScheduledTransmission> = select_cell_transmission(
        variant,
        0,
        &inst.members,
        &states,
        inst.d_max,
        &mut TieBreak::Lexicographic,
    );
    tx.map(|t| (t.sender, t.receiver, t.commodity, t.served))
}

/// Random small instances: 2..=4 members out of the 6-node universe, buffer
/// depths 0..=3, duplicates only for the redundancy variants.
pub fn random_instance(rng: &mut ChaCha8Rng, with_dups: bool) -> CellInstance {
    let k = 2 + (rng.next_u64() % 3) as usize; // 2..=4 members
    let mut picks: Vec<u32> = (0..UNIVERSE).collect();
    for i in 0..k {
        let j = i + (rng.next_u64() as usize) % (picks.len() - i);
        picks.swap(i, j);
    }
    let mut members: Vec<u32> = picks[..k].to_vec();
    members.sort_unstable();

    let d_max = 3;
    let mut q = vec![vec![0u32; UNIVERSE as usize]; UNIVERSE as usize];
    let mut d = vec![vec![0u32; UNIVERSE as usize]; UNIVERSE as usize];
    for n in 0..UNIVERSE as usize {
        for c in 0..UNIVERSE as usize {
            if n == c {
                continue;
            }
            q[n][c] = (rng.next_u64() % 4) as u32;
            if with_dups {
                d[n][c] = (rng.next_u64() % 4) as u32;
            }
        }
    }
    CellInstance { members, q, d, d_max }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

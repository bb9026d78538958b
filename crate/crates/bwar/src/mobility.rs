//! The i.i.d. cell-partitioned mobility model: every slot, every node lands
//! in a uniformly random cell, independent of everything else.

use rand_chacha::ChaCha8Rng;

use crate::rng::uniform_index;

/// One slot's node-to-cell assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub slot: u64,
    /// `cell_of[n]` is the cell of node n, in [0, C).
    pub cell_of: Vec<u32>,
}

/// Draw a placement. Consumes exactly N draws from `rng`, in node-index
/// order — callers rely on this for reproducibility.
pub fn place(rng: &mut ChaCha8Rng, slot: u64, nodes: u32, cells: u32) -> Placement {
    let cell_of = (0..nodes).map(|_| uniform_index(rng, cells)).collect();
    Placement { slot, cell_of }
}

/// Node ids in `cell`, ascending. Scheduler tie-breaking depends on this
/// ordering being deterministic.
pub fn members(p: &Placement, cell: u32) -> Vec<u32> {
    (0..p.cell_of.len() as u32).filter(|&n| p.cell_of[n as usize] == cell).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, STREAM_MOBILITY};

    #[test]
    fn single_cell_takes_everyone() {
        let mut rng = stream(1, STREAM_MOBILITY);
        let p = place(&mut rng, 0, 10, 1);
        assert!(p.cell_of.iter().all(|&c| c == 0));
        assert_eq!(members(&p, 0), (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn fixed_seed_replays_the_same_placements() {
        let mut a = stream(99, STREAM_MOBILITY);
        let mut b = stream(99, STREAM_MOBILITY);
        for t in 0..50 {
            assert_eq!(place(&mut a, t, 44, 25), place(&mut b, t, 44, 25));
        }
    }

    #[test]
    fn members_are_ascending_and_partition_the_nodes() {
        let mut rng = stream(5, STREAM_MOBILITY);
        for t in 0..200 {
            let p = place(&mut rng, t, 30, 7);
            let mut total = 0;
            for cell in 0..7 {
                let m = members(&p, cell);
                assert!(m.windows(2).all(|w| w[0] < w[1]), "ascending order");
                total += m.len();
            }
            assert_eq!(total, 30, "every node in exactly one cell");
        }
    }

    #[test]
    fn members_direct_construction() {
        let p = Placement { slot: 0, cell_of: vec![3, 3, 0] };
        assert_eq!(members(&p, 3), vec![0, 1]);
        assert_eq!(members(&p, 0), vec![2]);
        assert_eq!(members(&p, 1), Vec::<u32>::new());
    }

    /// Frequency check against the uniform law: node 0's per-cell occupancy
    /// over 10^5 slots must sit within +-0.01 of 1/25.
    #[test]
    fn occupancy_frequencies_match_uniform_law() {
        let mut rng = stream(2024, STREAM_MOBILITY);
        let (nodes, cells, slots) = (44, 25, 100_000);
        let mut counts = vec![0u64; cells as usize];
        for t in 0..slots {
            let p = place(&mut rng, t, nodes, cells);
            counts[p.cell_of[0] as usize] += 1;
        }
        for (cell, count) in counts.iter().enumerate() {
            let freq = *count as f64 / slots as f64;
            assert!(
                (freq - 0.04).abs() < 0.01,
                "cell {cell}: frequency {freq} outside 0.04 +- 0.01"
            );
        }
    }

    /// Encounter probability: two specific nodes share a cell with empirical
    /// probability within 10% of 1/C over 10^5 slots.
    #[test]
    fn encounter_probability_near_one_over_c() {
        let mut rng = stream(77, STREAM_MOBILITY);
        let (cells, slots) = (25u32, 100_000u64);
        let mut met = 0u64;
        for t in 0..slots {
            let p = place(&mut rng, t, 44, cells);
            if p.cell_of[0] == p.cell_of[1] {
                met += 1;
            }
        }
        let freq = met as f64 / slots as f64;
        let expect = 1.0 / cells as f64;
        assert!(
            (freq - expect).abs() / expect < 0.10,
            "encounter frequency {freq} more than 10% away from {expect}"
        );
    }
}

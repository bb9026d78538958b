//! Canned experiment grids. Each preset expands deterministically into one
//! family of related configs (a size ladder, a load sweep, a timeout sweep);
//! seeds are applied by the runner, not here.

use std::fmt;
use std::str::FromStr;

use crate::config::{recommended_nodes, SimConfig, Variant};

/// Arrival rates for the λ-sweep presets. The range spans four decades of
/// load on the 44-node network: from nearly idle to well past saturation.
pub const LAMBDA_GRID: [f64; 7] = [0.001, 0.004, 0.016, 0.032, 0.064, 0.096, 0.128];

/// Network sizes for the size-sweep preset: cell counts with their
/// density-matched node counts.
pub const SIZE_GRID: [(u32, u32); 5] = [(9, 16), (12, 20), (16, 28), (20, 34), (25, 44)];

/// Timeout sensitivity points, as multiples of the cell count.
pub const TIMEOUT_MULTIPLES: [u32; 4] = [1, 2, 4, 8];

/// Arrival rates probed by the timeout-sensitivity preset.
pub const TIMEOUT_LAMBDAS: [f64; 4] = [0.001, 0.016, 0.064, 0.128];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Delay across network sizes at near-zero load, all variants.
    Fig1a,
    /// Delay across arrival rates on the 44-node network, all variants.
    Fig1b,
    /// Stability/backlog across arrival rates (same grid as Fig1b).
    Fig3,
    /// Transmission counts across arrival rates (same grid as Fig1b).
    Fig4,
    /// Timeout sensitivity of the timeout variant, with an ideal-removal
    /// reference at each arrival rate.
    Fig5,
}

impl Preset {
    pub const ALL: [Preset; 5] =
        [Preset::Fig1a, Preset::Fig1b, Preset::Fig3, Preset::Fig4, Preset::Fig5];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig1a => "fig1a",
            Preset::Fig1b => "fig1b",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fig1a" => Ok(Preset::Fig1a),
            "fig1b" => Ok(Preset::Fig1b),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            other => Err(format!(
                "unknown preset '{other}' (expected fig1a, fig1b, fig3, fig4, or fig5)"
            )),
        }
    }
}

fn lambda_sweep(slots: u64, warmup: u64) -> Vec<SimConfig> {
    let mut out = Vec::new();
    for variant in Variant::ALL {
        for &lambda in &LAMBDA_GRID {
            let mut cfg = SimConfig::new(variant, 25, 44, lambda);
            cfg.slots = slots;
            cfg.warmup = warmup;
            out.push(cfg);
        }
    }
    out
}

/// Expand a preset into its config list. Deterministic; the same preset
/// with `slots`/`warmup` overridden yields the same set with only those
/// fields changed.
pub fn expand(preset: Preset, slots: u64, warmup: u64) -> Vec<SimConfig> {
    match preset {
        Preset::Fig1a => {
            let mut out = Vec::new();
            for variant in Variant::ALL {
                for &(cells, nodes) in &SIZE_GRID {
                    debug_assert_eq!(nodes, recommended_nodes(cells));
                    let mut cfg = SimConfig::new(variant, cells, nodes, 0.001);
                    cfg.slots = slots;
                    cfg.warmup = warmup;
                    out.push(cfg);
                }
            }
            out
        }
        Preset::Fig1b | Preset::Fig3 | Preset::Fig4 => lambda_sweep(slots, warmup),
        Preset::Fig5 => {
            let cells = 25;
            let nodes = 44;
            let mut out = Vec::new();
            for &lambda in &TIMEOUT_LAMBDAS {
                for &m in &TIMEOUT_MULTIPLES {
                    let mut cfg = SimConfig::new(Variant::BwarTd, cells, nodes, lambda);
                    cfg.timeout = m * cells;
                    cfg.slots = slots;
                    cfg.warmup = warmup;
                    out.push(cfg);
                }
                // ideal-removal baseline at the default timeout column
                let mut cfg = SimConfig::new(Variant::BwarId, cells, nodes, lambda);
                cfg.slots = slots;
                cfg.warmup = warmup;
                out.push(cfg);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1a_covers_sizes_times_variants() {
        let cfgs = expand(Preset::Fig1a, 100_000, 0);
        assert_eq!(cfgs.len(), 30);
        assert!(cfgs.iter().all(|c| c.arrival_rate == 0.001));
        assert!(cfgs.iter().all(|c| c.slots == 100_000));
        // every (variant, size) pair appears exactly once
        let mut seen = std::collections::BTreeSet::new();
        for c in &cfgs {
            assert!(seen.insert((c.variant.name(), c.cells)));
        }
    }

    #[test]
    fn lambda_sweeps_cover_grid_times_variants() {
        for p in [Preset::Fig1b, Preset::Fig3, Preset::Fig4] {
            let cfgs = expand(p, 50_000, 0);
            assert_eq!(cfgs.len(), 42);
            assert!(cfgs.iter().all(|c| c.cells == 25 && c.nodes == 44));
        }
    }

    #[test]
    fn fig5_sweeps_timeout_multiples() {
        let cfgs = expand(Preset::Fig5, 50_000, 0);
        assert_eq!(cfgs.len(), 20);
        let td: Vec<_> = cfgs.iter().filter(|c| c.variant.name() == "BWAR-TD").collect();
        assert_eq!(td.len(), 16);
        for c in &td {
            assert_eq!(c.timeout % c.cells, 0);
            assert!(TIMEOUT_MULTIPLES.contains(&(c.timeout / c.cells)));
        }
        assert_eq!(cfgs.iter().filter(|c| c.variant.name() == "BWAR-ID").count(), 4);
    }

    #[test]
    fn expansion_is_deterministic_and_slots_only_change() {
        let a = expand(Preset::Fig5, 50_000, 0);
        let b = expand(Preset::Fig5, 75_000, 10);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.variant, y.variant);
            assert_eq!(x.arrival_rate, y.arrival_rate);
            assert_eq!(x.timeout, y.timeout);
            assert_eq!(y.slots, 75_000);
            assert_eq!(y.warmup, 10);
        }
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert_eq!("FIG1A".parse::<Preset>().unwrap(), Preset::Fig1a);
        assert!("fig2".parse::<Preset>().is_err());
    }
}

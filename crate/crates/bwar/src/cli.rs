//! Command-line front end: flag parsing, preset expansion, parallel run
//! orchestration, CSV emission.
//!
//! Exit codes: 0 success, 1 output I/O failure, 2 usage or validation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use rayon::prelude::*;

use crate::config::{recommended_nodes, validate_config, SimConfig, Variant};
use crate::engine::run;
use crate::metrics::{render_csv, write_csv, RunRecord};
use crate::presets::{expand, Preset};

const DEFAULT_SLOTS: u64 = 100_000;

#[derive(Parser, Debug)]
#[command(
    name = "bwar",
    version,
    about = "Discrete-time simulator for backpressure routing with adaptive redundancy \
             in cell-partitioned mobile networks",
    after_help = "Worker count follows RAYON_NUM_THREADS. Identical flags and seed \
                  reproduce byte-identical CSV output."
)]
struct Cli {
    /// Canned experiment grid: fig1a, fig1b, fig3, fig4, or fig5
    #[arg(long, conflicts_with_all = ["variant", "cells", "nodes", "lambda", "timeout", "snw_copies"])]
    preset: Option<String>,

    /// Protocol variant: RB, RB-DA, BWAR-IM, BWAR-ID, BWAR-TD, or SNW
    #[arg(long)]
    variant: Option<String>,

    /// Number of cells
    #[arg(long)]
    cells: Option<u32>,

    /// Number of nodes (even; defaults to the density-matched count for --cells)
    #[arg(long)]
    nodes: Option<u32>,

    /// Arrival probability per node per slot
    #[arg(long)]
    lambda: Option<f64>,

    /// Slots per run
    #[arg(long)]
    slots: Option<u64>,

    /// Base seed
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Number of replications: seeds seed, seed+1, ..., seed+K-1
    #[arg(long, default_value_t = 1)]
    seeds: u64,

    /// Duplicate timeout in slots (timeout variant; defaults to the cell count)
    #[arg(long)]
    timeout: Option<u32>,

    /// Copy budget per packet (spray variant; defaults to ceil(N/10))
    #[arg(long)]
    snw_copies: Option<u32>,

    /// Slots whose arrivals are excluded from delay statistics
    #[arg(long)]
    warmup: Option<u64>,

    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Expand the flags into (experiment label, configs). Usage problems come
/// back as Err strings for exit code 2.
fn assemble(cli: &Cli) -> Result<(String, Vec<SimConfig>), String> {
    if cli.seeds == 0 {
        return Err("--seeds must be positive".into());
    }
    if cli.seed.checked_add(cli.seeds - 1).is_none() {
        return Err("--seed + --seeds overflows".into());
    }

    if let Some(name) = &cli.preset {
        let preset: Preset = name.parse()?;
        let configs = expand(
            preset,
            cli.slots.unwrap_or(DEFAULT_SLOTS),
            cli.warmup.unwrap_or(0),
        );
        return Ok((preset.name().to_string(), configs));
    }

    let Some(variant_name) = &cli.variant else {
        return Err("either --preset or --variant is required".into());
    };
    let variant: Variant = variant_name.parse()?;
    let cells = cli.cells.unwrap_or(25);
    let nodes = cli.nodes.unwrap_or_else(|| recommended_nodes(cells.max(1)));
    let mut cfg = SimConfig::new(variant, cells, nodes, cli.lambda.unwrap_or(0.001));
    if let Some(t) = cli.slots {
        cfg.slots = t;
    }
    if let Some(p) = cli.timeout {
        cfg.timeout = p;
    }
    if let Some(l) = cli.snw_copies {
        cfg.snw_copies = l;
    }
    if let Some(w) = cli.warmup {
        cfg.warmup = w;
    }
    Ok(("custom".to_string(), vec![cfg]))
}

/// Parse argv, run every (config, seed) job, emit CSV. Returns the process
/// exit code instead of exiting so tests can drive it in-process.
pub fn parse_and_run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here too and must stay exit 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };

    let (experiment, configs) = match assemble(&cli) {
        Ok(x) => x,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };

    // one job per (config, seed), validated before anything runs
    let mut jobs: Vec<SimConfig> = Vec::with_capacity(configs.len() * cli.seeds as usize);
    for cfg in &configs {
        for k in 0..cli.seeds {
            let mut job = cfg.clone();
            job.seed = cli.seed + k;
            jobs.push(job);
        }
    }
    for job in &jobs {
        if let Err(e) = validate_config(job.clone()) {
            eprintln!("error: {e}");
            return 2;
        }
    }

    let reports: Result<Vec<_>, _> = jobs.par_iter().map(|job| run(job.clone())).collect();
    let reports = match reports {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };

    let records: Vec<RunRecord> = jobs
        .into_iter()
        .zip(reports)
        .map(|(cfg, report)| RunRecord { experiment: experiment.clone(), cfg, report })
        .collect();

    match &cli.out {
        Some(path) => {
            if let Err(e) = write_csv(&records, path) {
                eprintln!("error: {e}");
                return 1;
            }
        }
        None => {
            let body = render_csv(&records);
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush()) {
                eprintln!("error: writing stdout: {e}");
                return 1;
            }
        }
    }
    0
}

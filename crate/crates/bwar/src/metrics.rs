//! Per-run statistics, the empirical stability test, λ-sweep threshold
//! estimation, and CSV output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::config::{ConfigError, SimConfig};
use crate::engine::run;

/// A run is called stable when the regression slope of its total-queue
/// series stays below this, in packets per slot. Under zero traffic the
/// sampled series is identically zero, so the slope noise floor at λ=0 is
/// exactly 0 and the constant term dominates: tol = max(1e-3, 3σ) = 1e-3.
/// An unstable run at these network sizes grows its backlog by well over
/// one packet per hundred slots, three orders of magnitude above this.
pub const SLOPE_TOL: f64 = 1e-3;

/// Raw accumulations handed over by the engine at the end of a run.
#[derive(Debug, Clone, Default)]
pub struct RawTally {
    pub slots: u64,
    pub admitted: u64,
    pub delivered: u64,
    pub transmissions: u64,
    pub duplicate_transmissions: u64,
    /// Sums of the slot-boundary occupancy samples over all slots.
    pub sum_q: u128,
    pub sum_u: u128,
    pub sum_d: u128,
    /// Delay sum/count over delivered packets admitted at or after warmup.
    pub delay_sum: u128,
    pub delay_count: u64,
    /// Downsampled (slot, total main-queue occupancy) series.
    pub series: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub admitted: u64,
    pub delivered: u64,
    /// None when nothing was delivered; a delay of 0 is impossible.
    pub mean_delay: Option<f64>,
    /// Time averages sampled at every slot boundary: Q = stored copies
    /// (main-queue entries, or all copies under spray-and-wait), U = packets
    /// admitted but not yet first-delivered, D = duplicate-buffer entries.
    pub mean_q: f64,
    pub mean_u: f64,
    pub mean_d: f64,
    pub transmissions: u64,
    pub duplicate_transmissions: u64,
    pub growth_slope: f64,
    pub stable: bool,
}

/// Least-squares slope of y against x. Fewer than two points: 0.
fn regression_slope(points: &[(u64, u64)]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0 as f64).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1 as f64).sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for &(x, y) in points {
        let dx = x as f64 - mean_x;
        sxy += dx * (y as f64 - mean_y);
        sxx += dx * dx;
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

pub fn finalize(raw: &RawTally, _cfg: &SimConfig) -> MetricsReport {
    let slots = raw.slots.max(1) as f64;
    let mean_delay = (raw.delay_count > 0)
        .then(|| raw.delay_sum as f64 / raw.delay_count as f64);
    // stability is judged on the trailing half of the occupancy series so
    // the verdict reflects where the run settled, not how it started
    let tail = &raw.series[raw.series.len() / 2..];
    let growth_slope = regression_slope(tail);
    MetricsReport {
        admitted: raw.admitted,
        delivered: raw.delivered,
        mean_delay,
        mean_q: raw.sum_q as f64 / slots,
        mean_u: raw.sum_u as f64 / slots,
        mean_d: raw.sum_d as f64 / slots,
        transmissions: raw.transmissions,
        duplicate_transmissions: raw.duplicate_transmissions,
        growth_slope,
        stable: growth_slope < SLOPE_TOL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdEstimate {
    /// Midpoint between the largest stable and smallest unstable grid λ.
    Estimate(f64),
    /// Every grid point was stable; the edge lies above the grid.
    AllStable,
    /// Every grid point was unstable; the edge lies below the grid.
    AllUnstable,
}

impl ThresholdEstimate {
    pub fn value(&self) -> Option<f64> {
        match *self {
            ThresholdEstimate::Estimate(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub lambda: f64,
    pub report: MetricsReport,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Grid points in ascending λ order.
    pub points: Vec<SweepPoint>,
    pub threshold: ThresholdEstimate,
    /// True when a stable point was found above the first unstable one.
    /// Stability should be monotone in λ for these policies; a violation
    /// means the verdicts near the edge are noisy at this run length.
    pub non_monotone: bool,
}

/// Run `template` across an evenly spaced λ grid and bracket the stability
/// edge. Grid points run in parallel; the reduce is deterministic.
pub fn estimate_stability_threshold(
    template: &SimConfig,
    lambda_lo: f64,
    lambda_hi: f64,
    points: usize,
    slots_per_point: u64,
) -> Result<SweepResult, ConfigError> {
    if !(lambda_lo < lambda_hi) || points < 2 {
        return Err(ConfigError::SweepGrid(format!(
            "need lambda_lo < lambda_hi and >= 2 points, got [{lambda_lo}, {lambda_hi}] x {points}"
        )));
    }
    let grid: Vec<f64> = (0..points)
        .map(|i| lambda_lo + (lambda_hi - lambda_lo) * i as f64 / (points - 1) as f64)
        .collect();
    let reports: Vec<MetricsReport> = grid
        .par_iter()
        .map(|&lambda| {
            let mut cfg = template.clone();
            cfg.arrival_rate = lambda;
            cfg.slots = slots_per_point;
            run(cfg)
        })
        .collect::<Result<_, _>>()?;

    let first_unstable = reports.iter().position(|r| !r.stable);
    let threshold = match first_unstable {
        None => ThresholdEstimate::AllStable,
        Some(0) => ThresholdEstimate::AllUnstable,
        Some(i) => ThresholdEstimate::Estimate((grid[i - 1] + grid[i]) / 2.0),
    };
    let non_monotone = match first_unstable {
        Some(i) => reports[i + 1..].iter().any(|r| r.stable),
        None => false,
    };
    let points = grid
        .into_iter()
        .zip(reports)
        .map(|(lambda, report)| SweepPoint { lambda, report })
        .collect();
    Ok(SweepResult { points, threshold, non_monotone })
}

// ---- CSV ------------------------------------------------------------------

pub const CSV_HEADER: &str = "experiment,variant,C,N,lambda,seed,slots,warmup,admitted,\
delivered,mean_delay,mean_Q,mean_U,mean_D,transmissions,duplicate_transmissions,\
growth_slope,stable";

/// One output row: the experiment label, the exact config that ran, and
/// what came out.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub experiment: String,
    pub cfg: SimConfig,
    pub report: MetricsReport,
}

/// Six significant digits, plain decimal notation. `{:e}` supplies the
/// decimal exponent exactly (no log10 rounding trouble at decade edges).
/// Values at 1e6 and above round to whole numbers, which keeps the column
/// parseable at the cost of a seventh digit.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:e}", x.abs());
    let exp: i32 = sci[sci.find('e').expect("exponent marker") + 1..]
        .parse()
        .expect("exponent digits");
    let decimals = (5 - exp).clamp(0, 40) as usize;
    format!("{x:.decimals$}")
}

fn push_row(out: &mut String, rec: &RunRecord) {
    let c = &rec.cfg;
    let r = &rec.report;
    let delay = r.mean_delay.map_or_else(|| "nan".to_string(), fmt_sig);
    let _ = write!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        rec.experiment,
        c.variant.name(),
        c.cells,
        c.nodes,
        fmt_sig(c.arrival_rate),
        c.seed,
        c.slots,
        c.warmup,
        r.admitted,
        r.delivered,
        delay,
        fmt_sig(r.mean_q),
        fmt_sig(r.mean_u),
        fmt_sig(r.mean_d),
        r.transmissions,
        r.duplicate_transmissions,
        fmt_sig(r.growth_slope),
        if r.stable { "true" } else { "false" },
    );
}

/// The full CSV artifact as a string: header plus one row per record, in
/// the order given.
pub fn render_csv(records: &[RunRecord]) -> String {
    let mut out = String::with_capacity(64 + records.len() * 128);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for rec in records {
        push_row(&mut out, rec);
    }
    out
}

#[derive(Debug, thiserror::Error)]
#[error("writing {path}: {source}")]
pub struct CsvWriteError {
    pub path: String,
    #[source]
    pub source: std::io::Error,
}

pub fn write_csv(records: &[RunRecord], path: &Path) -> Result<(), CsvWriteError> {
    let body = render_csv(records);
    let ctx = |source: std::io::Error| CsvWriteError { path: path.display().to_string(), source };
    let mut f = std::fs::File::create(path).map_err(ctx)?;
    f.write_all(body.as_bytes()).map_err(ctx)?;
    f.flush().map_err(ctx)
}

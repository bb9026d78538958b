//! C ABI over the simulator: an opaque config handle, flat report struct,
//! and integer status codes. Every function is panic-safe at the boundary
//! (a panic comes back as `BWAR_STATUS_INTERNAL_ERROR`, never an unwind into
//! the caller). Handles from [`bwar_config_new`] must be released with
//! [`bwar_config_free`] exactly once.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use bwar::{recommended_nodes, run, run_audited, SimConfig, Variant};

/// Routing policy selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BwarVariant {
    /// Plain backpressure on queue differentials.
    Rb = 0,
    /// Backpressure with the destination-advantage tie-break.
    RbDa = 1,
    /// Adaptive redundancy, in-memory duplication, ideal removal.
    BwarIm = 2,
    /// Adaptive redundancy, duplicate-at-sender, ideal removal.
    BwarId = 3,
    /// Adaptive redundancy, duplicate-at-sender, timeout removal.
    BwarTd = 4,
    /// Fixed-budget binary spray and wait.
    Snw = 5,
}

impl From<BwarVariant> for Variant {
    fn from(v: BwarVariant) -> Variant {
        match v {
            BwarVariant::Rb => Variant::Rb,
            BwarVariant::RbDa => Variant::RbDa,
            BwarVariant::BwarIm => Variant::BwarIm,
            BwarVariant::BwarId => Variant::BwarId,
            BwarVariant::BwarTd => Variant::BwarTd,
            BwarVariant::Snw => Variant::Snw,
        }
    }
}

/// Call outcome. Anything other than `Ok` leaves the output untouched.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BwarStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    InternalError = 3,
}

/// Opaque simulation configuration; create with `bwar_config_new`, adjust
/// with the setters, release with `bwar_config_free`.
pub struct BwarConfig(SimConfig);

/// Flat result record. `mean_delay` is NaN when nothing was delivered.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BwarReport {
    pub admitted: u64,
    pub delivered: u64,
    pub mean_delay: f64,
    pub mean_queue: f64,
    pub mean_undelivered: f64,
    pub mean_duplicates: f64,
    pub transmissions: u64,
    pub duplicate_transmissions: u64,
    pub growth_slope: f64,
    pub stable: bool,
}

fn fill(out: &mut BwarReport, r: &bwar::MetricsReport) {
    *out = BwarReport {
        admitted: r.admitted,
        delivered: r.delivered,
        mean_delay: r.mean_delay.unwrap_or(f64::NAN),
        mean_queue: r.mean_q,
        mean_undelivered: r.mean_u,
        mean_duplicates: r.mean_d,
        transmissions: r.transmissions,
        duplicate_transmissions: r.duplicate_transmissions,
        growth_slope: r.growth_slope,
        stable: r.stable,
    };
}

/// Allocate a configuration with the given network and arrival rate; all
/// other knobs start at their defaults (100000 slots, seed 1, duplication
/// threshold and capacity 1, timeout equal to the cell count, spray budget
/// ceil(nodes/10)). Never returns NULL.
#[no_mangle]
pub extern "C" fn bwar_config_new(
    variant: BwarVariant,
    cells: u32,
    nodes: u32,
    arrival_rate: f64,
) -> *mut BwarConfig {
    Box::into_raw(Box::new(BwarConfig(SimConfig::new(variant.into(), cells, nodes, arrival_rate))))
}

/// Release a configuration. NULL is a no-op.
///
/// # Safety
/// `cfg` must be NULL or a pointer from `bwar_config_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bwar_config_free(cfg: *mut BwarConfig) {
    if !cfg.is_null() {
        drop(unsafe { Box::from_raw(cfg) });
    }
}

// The setters are spelled out one by one (no macro) so the header generator
// sees every symbol. All share the same contract: NULL handle in, status out.

/// Number of slots to simulate.
///
/// # Safety
/// `cfg` must be NULL or a live pointer from `bwar_config_new`.
#[no_mangle]
pub unsafe extern "C" fn bwar_config_set_slots(cfg: *mut BwarConfig, value: u64) -> BwarStatus {
    let Some(cfg) = (unsafe { cfg.as_mut() }) else {
        return BwarStatus::NullPointer;
    };
    cfg.0.slots = value;
    BwarStatus::Ok
}

/// PRNG seed; equal seeds give byte-identical runs.
///
/// # Safety
/// `cfg` must be NULL or a live pointer from `bwar_config_new`.
#[no_mangle]
pub unsafe extern "C" fn bwar_config_set_seed(cfg: *mut BwarConfig, value: u64) -> BwarStatus {
    let Some(cfg) = (unsafe { cfg.as_mut() }) else {
        return BwarStatus::NullPointer;
    };
    cfg.0.seed = value;
    BwarStatus::Ok
}

/// Packets admitted before this slot are excluded from delay statistics.
///
/// # Safety
/// `cfg` must be NULL or a live pointer from `bwar_config_new`.
#[no_mangle]
pub unsafe extern "C" fn bwar_config_set_warmup(cfg: *mut BwarConfig, value: u64) -> BwarStatus {
    let Some(cfg) = (unsafe { cfg.as_mut() }) else {
        return BwarStatus::NullPointer;
    };
    cfg.0.warmup = value;
    BwarStatus::Ok
}

/// Duplicate only when the post-transmission occupancy is below this.
///
/// # Safety
/// `cfg` must be NULL or a live pointer from `bwar_config_new`.
#[no_mangle]
pub unsafe extern "C" fn bwar_config_set_queue_threshold(
    cfg: *mut BwarConfig,
    value: u32,
) -> BwarStatus {
    let Some(cfg) = (unsafe { cfg.as_mut() }) else {
        return BwarStatus::NullPointer;
    };
    cfg.0.q_th = value;
    BwarStatus::Ok
}

/// Duplicate-buffer capacity per commodity.
///
/// # Safety
/// `cfg` must be NULL or a live pointer from `bwar_config_new`.
#[no_mangle]
pub unsafe extern "C" fn bwar_config_set_dup_capacity(
    cfg: *mut BwarConfig,
    value: u32,
) -> BwarStatus {
    let Some(cfg) = (unsafe { cfg.as_mut() }) else {
        return BwarStatus::NullPointer;
    };
    cfg.0.d_max = value;
    BwarStatus::Ok
}

/// Lifetime (slots since admission) for timeout-based duplicate removal.
///
/// # Safety
/// `cfg` must be NULL or a live pointer from `bwar_config_new`.
#[no_mangle]
pub unsafe extern "C" fn bwar_config_set_timeout(cfg: *mut BwarConfig, value: u32) -> BwarStatus {
    let Some(cfg) = (unsafe { cfg.as_mut() }) else {
        return BwarStatus::NullPointer;
    };
    cfg.0.timeout = value;
    BwarStatus::Ok
}

/// Copy budget for spray-and-wait.
///
/// # Safety
/// `cfg` must be NULL or a live pointer from `bwar_config_new`.
#[no_mangle]
pub unsafe extern "C" fn bwar_config_set_spray_copies(
    cfg: *mut BwarConfig,
    value: u32,
) -> BwarStatus {
    let Some(cfg) = (unsafe { cfg.as_mut() }) else {
        return BwarStatus::NullPointer;
    };
    cfg.0.snw_copies = value;
    BwarStatus::Ok
}

/// Run the simulation and write the result to `out`.
///
/// # Safety
/// `cfg` must be a live pointer from `bwar_config_new` and `out` must point
/// to writable memory for one `BwarReport`.
#[no_mangle]
pub unsafe extern "C" fn bwar_run(cfg: *const BwarConfig, out: *mut BwarReport) -> BwarStatus {
    let (Some(cfg), Some(out)) = (unsafe { cfg.as_ref() }, unsafe { out.as_mut() }) else {
        return BwarStatus::NullPointer;
    };
    match catch_unwind(AssertUnwindSafe(|| run(cfg.0.clone()))) {
        Ok(Ok(report)) => {
            fill(out, &report);
            BwarStatus::Ok
        }
        Ok(Err(_)) => BwarStatus::InvalidConfig,
        Err(_) => BwarStatus::InternalError,
    }
}

/// Run with per-slot invariant auditing; the violation count lands in
/// `violations_out`. Roughly an order of magnitude slower than `bwar_run`.
///
/// # Safety
/// As for `bwar_run`; `violations_out` must point to a writable u64.
#[no_mangle]
pub unsafe extern "C" fn bwar_run_audited(
    cfg: *const BwarConfig,
    out: *mut BwarReport,
    violations_out: *mut u64,
) -> BwarStatus {
    let (Some(cfg), Some(out), Some(violations_out)) =
        (unsafe { cfg.as_ref() }, unsafe { out.as_mut() }, unsafe { violations_out.as_mut() })
    else {
        return BwarStatus::NullPointer;
    };
    match catch_unwind(AssertUnwindSafe(|| run_audited(cfg.0.clone()))) {
        Ok(Ok((report, audit))) => {
            fill(out, &report);
            *violations_out = audit.total_violations;
            BwarStatus::Ok
        }
        Ok(Err(_)) => BwarStatus::InvalidConfig,
        Err(_) => BwarStatus::InternalError,
    }
}

/// Node count that pairs with a cell count to hold per-node capacity steady
/// across network sizes.
#[no_mangle]
pub extern "C" fn bwar_recommended_nodes(cells: u32) -> u32 {
    recommended_nodes(cells)
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn bwar_status_str(status: BwarStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        BwarStatus::Ok => b"ok\0",
        BwarStatus::NullPointer => b"null pointer argument\0",
        BwarStatus::InvalidConfig => b"invalid configuration\0",
        BwarStatus::InternalError => b"internal error\0",
    };
    s.as_ptr().cast()
}

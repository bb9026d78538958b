/* C interface to the bwar mobile-network simulator.
 * Generated by cbindgen; do not edit by hand. */

#ifndef BWAR_H
#define BWAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Routing policy selector.
 */
typedef enum {
  /**
   * Plain backpressure on queue differentials.
   */
  BwarVariant_Rb = 0,
  /**
   * Backpressure with the destination-advantage tie-break.
   */
  BwarVariant_RbDa = 1,
  /**
   * Adaptive redundancy, in-memory duplication, ideal removal.
   */
  BwarVariant_BwarIm = 2,
  /**
   * Adaptive redundancy, duplicate-at-sender, ideal removal.
   */
  BwarVariant_BwarId = 3,
  /**
   * Adaptive redundancy, duplicate-at-sender, timeout removal.
   */
  BwarVariant_BwarTd = 4,
  /**
   * Fixed-budget binary spray and wait.
   */
  BwarVariant_Snw = 5,
} BwarVariant;

/**
 * Call outcome. Anything other than `Ok` leaves the output untouched.
 */
typedef enum {
  BwarStatus_Ok = 0,
  BwarStatus_NullPointer = 1,
  BwarStatus_InvalidConfig = 2,
  BwarStatus_InternalError = 3,
} BwarStatus;

/**
 * Opaque simulation configuration; create with `bwar_config_new`, adjust
 * with the setters, release with `bwar_config_free`.
 */
typedef struct BwarConfig BwarConfig;

/**
 * Flat result record. `mean_delay` is NaN when nothing was delivered.
 */
typedef struct {
  uint64_t admitted;
  uint64_t delivered;
  double mean_delay;
  double mean_queue;
  double mean_undelivered;
  double mean_duplicates;
  uint64_t transmissions;
  uint64_t duplicate_transmissions;
  double growth_slope;
  bool stable;
} BwarReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Allocate a configuration with the given network and arrival rate; all
 * other knobs start at their defaults (100000 slots, seed 1, duplication
 * threshold and capacity 1, timeout equal to the cell count, spray budget
 * ceil(nodes/10)). Never returns NULL.
 */
BwarConfig *bwar_config_new(BwarVariant variant,
                            uint32_t cells,
                            uint32_t nodes,
                            double arrival_rate);

/**
 * Release a configuration. NULL is a no-op.
 *
 * # Safety
 * `cfg` must be NULL or a pointer from `bwar_config_new` not yet freed.
 */
void bwar_config_free(BwarConfig *cfg);

/**
 * Number of slots to simulate.
 *
 * # Safety
 * `cfg` must be NULL or a live pointer from `bwar_config_new`.
 */
BwarStatus bwar_config_set_slots(BwarConfig *cfg, uint64_t value);

/**
 * PRNG seed; equal seeds give byte-identical runs.
 *
 * # Safety
 * `cfg` must be NULL or a live pointer from `bwar_config_new`.
 */
BwarStatus bwar_config_set_seed(BwarConfig *cfg, uint64_t value);

/**
 * Packets admitted before this slot are excluded from delay statistics.
 *
 * # Safety
 * `cfg` must be NULL or a live pointer from `bwar_config_new`.
 */
BwarStatus bwar_config_set_warmup(BwarConfig *cfg, uint64_t value);

/**
 * Duplicate only when the post-transmission occupancy is below this.
 *
 * # Safety
 * `cfg` must be NULL or a live pointer from `bwar_config_new`.
 */
BwarStatus bwar_config_set_queue_threshold(BwarConfig *cfg, uint32_t value);

/**
 * Duplicate-buffer capacity per commodity.
 *
 * # Safety
 * `cfg` must be NULL or a live pointer from `bwar_config_new`.
 */
BwarStatus bwar_config_set_dup_capacity(BwarConfig *cfg, uint32_t value);

/**
 * Lifetime (slots since admission) for timeout-based duplicate removal.
 *
 * # Safety
 * `cfg` must be NULL or a live pointer from `bwar_config_new`.
 */
BwarStatus bwar_config_set_timeout(BwarConfig *cfg, uint32_t value);

/**
 * Copy budget for spray-and-wait.
 *
 * # Safety
 * `cfg` must be NULL or a live pointer from `bwar_config_new`.
 */
BwarStatus bwar_config_set_spray_copies(BwarConfig *cfg, uint32_t value);

/**
 * Run the simulation and write the result to `out`.
 *
 * # Safety
 * `cfg` must be a live pointer from `bwar_config_new` and `out` must point
 * to writable memory for one `BwarReport`.
 */
BwarStatus bwar_run(const BwarConfig *cfg, BwarReport *out);

/**
 * Run with per-slot invariant auditing; the violation count lands in
 * `violations_out`. Roughly an order of magnitude slower than `bwar_run`.
 *
 * # Safety
 * As for `bwar_run`; `violations_out` must point to a writable u64.
 */
BwarStatus bwar_run_audited(const BwarConfig *cfg, BwarReport *out, uint64_t *violations_out);

/**
 * Node count that pairs with a cell count to hold per-node capacity steady
 * across network sizes.
 */
uint32_t bwar_recommended_nodes(uint32_t cells);

/**
 * Static, NUL-terminated description of a status code.
 */
const char *bwar_status_str(BwarStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BWAR_H */

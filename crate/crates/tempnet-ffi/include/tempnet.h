#ifndef TEMPNET_H
#define TEMPNET_H

/* Generated by cbindgen from tempnet-ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum {
  TEMPNET_STATUS_OK = 0,
  TEMPNET_STATUS_NULL_ARGUMENT = 1,
  TEMPNET_STATUS_INVALID_ARGUMENT = 2,
  TEMPNET_STATUS_IO_ERROR = 3,
  TEMPNET_STATUS_PARSE_ERROR = 4,
  TEMPNET_STATUS_BUFFER_TOO_SMALL = 5,
} TempnetStatus;

/**
 * Opaque snapshot-series handle.
 */
typedef struct TempnetSeries TempnetSeries;

/**
 * Result of a sliding-window prediction run over one property.
 */
typedef struct {
  /**
   * Fraction of predictions with percentage error <= error_threshold.
   */
  double fraction_within;
  /**
   * Same fraction over spectrogram-suitable points only; negative when
   * filtering is disabled or no suitable point remains.
   */
  double filtered_fraction;
  /**
   * Points excluded by the suitability filter.
   */
  uintptr_t dropped;
  /**
   * Points whose original value was 0 (undefined percentage error).
   */
  uintptr_t undefined_errors;
} TempnetPredictionSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a contact log file and aggregate it into snapshots.
 *
 * `format` is 0 for the plain triple format, 1 for proximity logs with
 * device-type columns. On success `*out` owns a new handle that must be
 * released with `tempnet_series_free`.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
TempnetStatus tempnet_series_load(const char *path,
                                  uint32_t format,
                                  uint64_t base_resolution,
                                  uint64_t resolution,
                                  TempnetSeries **out);

/**
 * Release a series handle. A null handle is a no-op.
 *
 * # Safety
 * `series` must be a pointer from `tempnet_series_load`, not yet freed.
 */
void tempnet_series_free(TempnetSeries *series);

/**
 * Number of snapshots in the series.
 *
 * # Safety
 * `series` must be a live handle.
 */
uintptr_t tempnet_series_len(const TempnetSeries *series);

/**
 * Number of distinct nodes seen in the underlying log.
 *
 * # Safety
 * `series` must be a live handle.
 */
uintptr_t tempnet_series_node_count(const TempnetSeries *series);

/**
 * Evaluate property `property_id` (0..8 in the order active nodes, active
 * edges, average degree, clustering sum, betweenness sum, closeness sum,
 * modularity, edge emergence) over the series. `values` must hold
 * `capacity` doubles; the number written is stored in `written`.
 *
 * # Safety
 * All pointers must be valid; `values` must point to `capacity` doubles.
 */
TempnetStatus tempnet_metric_series(const TempnetSeries *series,
                                    uint32_t property_id,
                                    double *values,
                                    uintptr_t capacity,
                                    uintptr_t *written);

/**
 * Forecasting window selected from the neighborhood-overlap decay at the
 * given similarity threshold.
 *
 * # Safety
 * `series` must be a live handle and `window_out` a valid pointer.
 */
TempnetStatus tempnet_select_window(const TempnetSeries *series,
                                    uintptr_t max_lag,
                                    double threshold,
                                    uintptr_t *window_out);

/**
 * Sliding-window ARIMA prediction of one property over steps
 * `[test_start, test_end)` with window `w`. When `filter_spectro` is
 * nonzero, points whose training window fails the low-frequency
 * suitability test are excluded from the filtered fraction; `theta` < 0
 * selects the automatic 25th-percentile threshold.
 *
 * # Safety
 * `series` must be a live handle and `summary` a valid pointer.
 */
TempnetStatus tempnet_predict(const TempnetSeries *series,
                              uint32_t property_id,
                              uintptr_t window,
                              uintptr_t test_start,
                              uintptr_t test_end,
                              double error_threshold,
                              uint8_t filter_spectro,
                              double theta,
                              TempnetPredictionSummary *summary);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TEMPNET_H */

#ifndef RID_RVO_H
#define RID_RVO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Policy / message format codes, matching the wire format field.
 */
#define RID_FORMAT_SNMAC 0

#define RID_FORMAT_STANDARD 1

#define RID_FORMAT_CANDIDATE1 2

#define RID_FORMAT_CANDIDATE2 3

/**
 * Largest encoded frame, bytes.
 */
#define RID_MAX_FRAME_LEN 51

typedef enum RidStatus {
  RID_STATUS_OK = 0,
  RID_STATUS_NULL_POINTER = 1,
  RID_STATUS_INVALID_PARAMETER = 2,
  RID_STATUS_MALFORMED_MESSAGE = 3,
  RID_STATUS_ENCODE_OVERFLOW = 4,
  RID_STATUS_INVALID_CONFIG = 5,
  RID_STATUS_IO = 6,
  RID_STATUS_BUFFER_TOO_SMALL = 7,
  RID_STATUS_INTERNAL = 8,
} RidStatus;

/**
 * Opaque experiment configuration.
 */
typedef struct RidExperiment RidExperiment;

/**
 * Opaque simulation report.
 */
typedef struct RidReport RidReport;

typedef struct RidSeparation {
  double mac_radius;
  double loc_term;
  double mobility_term;
  double unmac_radius;
} RidSeparation;

/**
 * Flat message record. Optional fields are present when their `has_` flag
 * is non-zero.
 */
typedef struct RidMessage {
  uint8_t uav_id[16];
  /**
   * Seconds.
   */
  double timestamp;
  double position_x;
  double position_y;
  double velocity_x;
  double velocity_y;
  double control_station_x;
  double control_station_y;
  uint8_t emergency;
  uint8_t has_loc_error;
  uint8_t has_airframe;
  double loc_error;
  double airframe;
} RidMessage;

typedef struct RidPolicySummary {
  uint8_t format;
  size_t runs;
  size_t flights;
  size_t arrived;
  size_t collided;
  size_t stalled;
  size_t mac_count;
  double mac_rate;
  /**
   * NaN when no flight arrived.
   */
  double median_time;
  double mean_time;
  double p95_time;
} RidPolicySummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length in bytes,
 * excluding the terminator; 0 means no error.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t rid_last_error(char *buf, size_t len);

/**
 * Pairwise MAC / uNMAC radii in meters.
 *
 * # Safety
 * `out` must point to a writable `RidSeparation`.
 */
enum RidStatus rid_pairwise_unmac(double airframe_i,
                                  double airframe_j,
                                  double eps_i,
                                  double eps_j,
                                  double speed_i,
                                  double speed_j,
                                  double dt,
                                  struct RidSeparation *out);

/**
 * `p`-quantile of the sum of two half-normal localization errors.
 *
 * # Safety
 * `out` must point to a writable `double`.
 */
enum RidStatus rid_loc_error_sum_quantile(double p, double sigma_i, double sigma_j, double *out);

/**
 * Per-UAV safety-disk radius in meters under policy `format`, with the
 * default 7.5 m maximum airframe and 80 m error bound.
 *
 * # Safety
 * `msg` must point to a valid `RidMessage`, `out` to a writable `double`.
 */
enum RidStatus rid_disk_radius(uint8_t format,
                               const struct RidMessage *msg,
                               double dt,
                               double *out);

/**
 * Encodes `msg` in `format` into `buf`; `written` receives the frame length.
 * `RID_STATUS_BUFFER_TOO_SMALL` leaves the required length in `written`.
 *
 * # Safety
 * `msg` must be valid, `buf` must hold `len` writable bytes, `written` must
 * be writable.
 */
enum RidStatus rid_encode(uint8_t format,
                          const struct RidMessage *msg,
                          uint8_t *buf,
                          size_t len,
                          size_t *written);

/**
 * Decodes one frame. `format` receives the format code.
 *
 * # Safety
 * `buf` must point to `len` readable bytes; `out` and `format` must be writable.
 */
enum RidStatus rid_decode(const uint8_t *buf, size_t len, struct RidMessage *out, uint8_t *format);

/**
 * Parses an experiment from TOML text.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum RidStatus rid_experiment_from_toml(const char *toml, struct RidExperiment **out);

/**
 * Overrides the run count per policy.
 *
 * # Safety
 * `exp` must be a live handle.
 */
enum RidStatus rid_experiment_set_runs(struct RidExperiment *exp, size_t runs);

/**
 * Releases an experiment; null is ignored.
 *
 * # Safety
 * `exp` must be null or a handle not yet freed.
 */
void rid_experiment_free(struct RidExperiment *exp);

/**
 * Runs every policy of the experiment.
 *
 * # Safety
 * `exp` must be a live handle; `out` must be writable.
 */
enum RidStatus rid_experiment_run(const struct RidExperiment *exp, struct RidReport **out);

/**
 * Number of policy summaries in the report.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t rid_report_policy_count(const struct RidReport *report);

/**
 * Copies summary `index` into `out`.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum RidStatus rid_report_summary(const struct RidReport *report,
                                  size_t index,
                                  struct RidPolicySummary *out);

/**
 * Writes `report.json` and `runs.csv` into directory `dir` (created if missing).
 *
 * # Safety
 * `report` must be a live handle; `dir` a NUL-terminated path.
 */
enum RidStatus rid_report_write(const struct RidReport *report, const char *dir);

/**
 * Releases a report; null is ignored.
 *
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void rid_report_free(struct RidReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RID_RVO_H */

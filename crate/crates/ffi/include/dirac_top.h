#ifndef DIRAC_TOP_H
#define DIRAC_TOP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DtStatus {
  DT_STATUS_OK = 0,
  DT_STATUS_NULL_POINTER = 1,
  DT_STATUS_INVALID_UTF8 = 2,
  DT_STATUS_CONFIG = 3,
  DT_STATUS_DOMAIN = 4,
  DT_STATUS_NUMERICAL = 5,
  DT_STATUS_CHECKS_FAILED = 6,
  DT_STATUS_PANIC = 7,
} DtStatus;

/**
 * Opaque engine handle.
 */
typedef struct DtEngine DtEngine;

/**
 * Physical constants in natural units.
 */
typedef struct DtConstants {
  double hbar;
  double c;
  double m;
  double e;
  double a;
  double gamma2;
} DtConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; valid until the next failing call.
 */
const char *dt_last_error_message(void);

/**
 * Creates an engine with the default configuration.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum DtStatus dt_engine_new(struct DtEngine **out);

/**
 * Creates an engine from TOML configuration text.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` writable storage for one handle.
 */
enum DtStatus dt_engine_from_toml(const char *toml, struct DtEngine **out);

/**
 * Releases an engine; null is ignored.
 *
 * # Safety
 * `engine` must come from this library and not be used afterwards.
 */
void dt_engine_free(struct DtEngine *engine);

/**
 * # Safety
 * `engine` must be a live handle.
 */
enum DtStatus dt_engine_set_seed(struct DtEngine *engine, uint64_t seed);

/**
 * # Safety
 * `engine` must be a live handle and `out` writable.
 */
enum DtStatus dt_engine_constants(const struct DtEngine *engine, struct DtConstants *out);

/**
 * Scalar curvature of the configuration metric at q = (x⁰..x³, θ¹..θ⁶).
 *
 * # Safety
 * `engine` must be live, `q` must point to 10 doubles and `out` to one.
 */
enum DtStatus dt_engine_scalar_curvature(const struct DtEngine *engine,
                                         const double *q,
                                         double *out);

/**
 * Λ(θ) for six Euler angles, written row-major into 16 doubles.
 *
 * # Safety
 * `theta` must point to 6 doubles and `out` to 16.
 */
enum DtStatus dt_lorentz_from_euler(const double *theta, double *out);

/**
 * Top length a that makes the reduced mass term equal m²c², using the engine's constants.
 *
 * # Safety
 * `engine` must be live and `out` writable.
 */
enum DtStatus dt_engine_a_from_mass(const struct DtEngine *engine, double m, double *out);

/**
 * Number of verification suites; bit i of a suite mask selects suite i.
 */
uint32_t dt_suite_count(void);

/**
 * Runs the suites in `suite_mask` (0 selects all) and stores the JSON report.
 * Returns `ChecksFailed` when any check fails; the report is still stored.
 *
 * # Safety
 * `engine` must be live; `passed` may be null.
 */
enum DtStatus dt_engine_verify(struct DtEngine *engine, uint32_t suite_mask, bool *passed);

/**
 * JSON text of the last report, or null before any verify call.
 * The pointer stays valid until the next verify call or until the engine is freed.
 *
 * # Safety
 * `engine` must be live.
 */
const char *dt_engine_report_json(const struct DtEngine *engine);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIRAC_TOP_H */

#ifndef GADGETCHECK_H
#define GADGETCHECK_H

/* Generated by cbindgen from the gadgetcheck-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible function.
 */
typedef enum GcStatus {
  GC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  GC_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  GC_STATUS_INVALID_UTF8 = 2,
  /**
   * Circuit text failed to parse or validate.
   */
  GC_STATUS_PARSE = 3,
  /**
   * A numeric argument or fault specification was rejected.
   */
  GC_STATUS_INVALID_ARGUMENT = 4,
  /**
   * Gadget outcomes do not match the circuit.
   */
  GC_STATUS_RESOLVE = 5,
  /**
   * The probability engine or the protocol could not run.
   */
  GC_STATUS_COMPUTATION = 6,
  /**
   * Rust code panicked; the handle arguments should be considered unusable.
   */
  GC_STATUS_PANIC = 7,
} GcStatus;

/**
 * A parsed adaptive circuit.
 */
typedef struct GcCircuit GcCircuit;

/**
 * The outcome of a verification campaign.
 */
typedef struct GcReport GcReport;

/**
 * Campaign parameters. Obtain defaults from [`gc_verify_params_default`].
 */
typedef struct GcVerifyParams {
  uint64_t seed;
  double epsilon;
  double eta;
  double delta;
  size_t extra_check_lines;
} GcVerifyParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next call
 * into this library from the same thread.
 */
const char *gc_last_error(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library and not yet freed.
 */
void gc_string_free(char *s);

/**
 * Parse and validate circuit text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum GcStatus gc_circuit_parse(const char *text, struct GcCircuit **out);

/**
 * Release a circuit handle. Null is ignored.
 *
 * # Safety
 * `c` must be null or a handle from this library that has not been freed.
 */
void gc_circuit_free(struct GcCircuit *c);

/**
 * Number of lines, or 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t gc_circuit_line_count(const struct GcCircuit *c);

/**
 * Number of T-gadgets, or 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t gc_circuit_gadget_count(const struct GcCircuit *c);

/**
 * Number of bare T gates, or 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t gc_circuit_t_count(const struct GcCircuit *c);

/**
 * New circuit with every T replaced by a gadget on a fresh MAGIC line.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum GcStatus gc_circuit_gadgetize(const struct GcCircuit *c, struct GcCircuit **out);

/**
 * Canonical text of the circuit. Free the result with [`gc_string_free`].
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum GcStatus gc_circuit_serialize(const struct GcCircuit *c, char **out);

/**
 * Probability that the output reads `outcome` (0 or 1) when gadget `i` is fixed to
 * `outcomes[i]`. Bare T gates are gadgetized first. `outcomes` may be null when
 * `n_outcomes` is 0.
 *
 * # Safety
 * `c` must be a live handle, `outcomes` must point to `n_outcomes` bytes, `out` must be writable.
 */
enum GcStatus gc_output_probability(const struct GcCircuit *c,
                                    const uint8_t *outcomes,
                                    size_t n_outcomes,
                                    uint8_t outcome,
                                    double *out);

/**
 * Default campaign parameters.
 */
struct GcVerifyParams gc_verify_params_default(void);

/**
 * Run a full verification campaign against the built-in simulated device.
 *
 * `fault` is a fault specification such as `"gadget_coin_bias 0.1"`; null means an ideal
 * device. Bare T gates are gadgetized first. A rejected run still returns `GC_STATUS_OK`;
 * inspect the report with [`gc_report_accepted`].
 *
 * # Safety
 * `c` must be a live handle, `params` readable, `fault` null or NUL-terminated, `out` writable.
 */
enum GcStatus gc_verify(const struct GcCircuit *c,
                        const struct GcVerifyParams *params,
                        const char *fault,
                        struct GcReport **out);

/**
 * 1 if the report accepts, 0 if it rejects or the handle is null.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
int gc_report_accepted(const struct GcReport *r);

/**
 * Certified additive error of an accepted report, or NaN.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
double gc_report_epsilon_prime(const struct GcReport *r);

/**
 * JSON serialization of the report. Free the result with [`gc_string_free`].
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum GcStatus gc_report_json(const struct GcReport *r, char **out);

/**
 * Human-readable summary of the report. Free the result with [`gc_string_free`].
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum GcStatus gc_report_summary(const struct GcReport *r, char **out);

/**
 * Release a report handle. Null is ignored.
 *
 * # Safety
 * `r` must be null or a handle from this library that has not been freed.
 */
void gc_report_free(struct GcReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GADGETCHECK_H */

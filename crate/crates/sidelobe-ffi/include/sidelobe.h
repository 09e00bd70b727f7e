#ifndef SIDELOBE_H
#define SIDELOBE_H

/* Generated by cbindgen from sidelobe-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call in this API.
 */
typedef enum SidelobeStatus {
  SIDELOBE_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SIDELOBE_STATUS_NULL_POINTER = -1,
  /**
   * An argument failed validation (range, sign, parse).
   */
  SIDELOBE_STATUS_INVALID_ARGUMENT = -2,
  /**
   * Sequence text contained a character other than '+' or '-'.
   */
  SIDELOBE_STATUS_PARSE_ERROR = -3,
  /**
   * An output buffer was too small.
   */
  SIDELOBE_STATUS_BUFFER_TOO_SMALL = -4,
  /**
   * An internal invariant failed; the library state is unchanged.
   */
  SIDELOBE_STATUS_INTERNAL = -5,
} SidelobeStatus;

/**
 * Choice of the exponent function psi(n) for bound evaluation.
 */
typedef enum SidelobePsiKind {
  /**
   * psi = log n - (1 - epsilon) log log n; `epsilon` is read.
   */
  SIDELOBE_PSI_KIND_COR2 = 0,
  /**
   * psi = log n - log log n + log 2 + epsilon; `epsilon` is read.
   */
  SIDELOBE_PSI_KIND_COR3 = 1,
  /**
   * psi = log n - log log n + 0.862.
   */
  SIDELOBE_PSI_KIND_COR4 = 2,
  /**
   * psi is the constant passed as `psi_const`.
   */
  SIDELOBE_PSI_KIND_CUSTOM = 3,
} SidelobePsiKind;

/**
 * Opaque handle to a bit-packed ±1 sequence.
 */
typedef struct SidelobeSequence SidelobeSequence;

/**
 * psi, threshold, and proportion bound for one (kind, n).
 */
typedef struct SidelobeBoundEval {
  uint64_t n;
  double psi;
  /**
   * sqrt(2 n psi).
   */
  double threshold;
  /**
   * 2n / (psi e^psi).
   */
  double proportion_bound;
} SidelobeBoundEval;

/**
 * Monte Carlo exceedance estimate with a Wilson 99% interval.
 */
typedef struct SidelobeExceedance {
  uint64_t trials;
  uint64_t hits;
  double proportion;
  double ci99_low;
  double ci99_high;
} SidelobeExceedance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a NUL-terminated `{+,-}` string into a new sequence handle.
 *
 * # Safety
 * `text` must point to a valid NUL-terminated string and `out` must be a
 * valid pointer. On `OK`, `*out` owns the handle and must be released with
 * [`sidelobe_sequence_free`].
 */
enum SidelobeStatus sidelobe_sequence_parse(const char *text, struct SidelobeSequence **out);

/**
 * Builds a sequence from `len` signs, each exactly +1 or -1.
 *
 * # Safety
 * `signs` must point to `len` readable bytes and `out` must be valid.
 */
enum SidelobeStatus sidelobe_sequence_from_signs(const int8_t *signs,
                                                 uintptr_t len,
                                                 struct SidelobeSequence **out);

/**
 * Releases a handle. Null is a no-op.
 *
 * # Safety
 * `seq` must be a handle from this library that has not been freed.
 */
void sidelobe_sequence_free(struct SidelobeSequence *seq);

/**
 * Sequence length.
 *
 * # Safety
 * `seq` and `out` must be valid pointers.
 */
enum SidelobeStatus sidelobe_sequence_len(const struct SidelobeSequence *seq, uintptr_t *out);

/**
 * Single aperiodic autocorrelation `c_shift`.
 *
 * # Safety
 * `seq` and `out` must be valid pointers.
 */
enum SidelobeStatus sidelobe_sequence_autocorrelation(const struct SidelobeSequence *seq,
                                                      uintptr_t shift,
                                                      int64_t *out);

/**
 * Peak sidelobe level; requires length >= 2.
 *
 * # Safety
 * `seq` and `out` must be valid pointers.
 */
enum SidelobeStatus sidelobe_sequence_psl(const struct SidelobeSequence *seq, uint64_t *out);

/**
 * Writes the full spectrum `(c_0, ..., c_{n-1})` into `out`, which holds
 * `capacity` values; fails with `BUFFER_TOO_SMALL` if `capacity < n`.
 *
 * # Safety
 * `seq` must be valid and `out` must point to `capacity` writable i64s.
 */
enum SidelobeStatus sidelobe_sequence_spectrum(const struct SidelobeSequence *seq,
                                               int64_t *out,
                                               uintptr_t capacity);

/**
 * Evaluates psi, the threshold, and the proportion bound for one n.
 * `epsilon` is read for Cor2/Cor3, `psi_const` for Custom.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SidelobeStatus sidelobe_bound_eval(enum SidelobePsiKind kind,
                                        double epsilon,
                                        double psi_const,
                                        uint64_t n,
                                        struct SidelobeBoundEval *out);

/**
 * Tail bound `2 exp(-lambda^2 / 2k)` for a sum of `k` random signs.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SidelobeStatus sidelobe_chernoff_tail(uint64_t k, double lambda, double *out);

/**
 * Seeded Monte Carlo estimate of `P[mu(A) > threshold]` over uniform
 * length-`n` sequences. Results are bit-identical for fixed `(n, trials,
 * seed)` regardless of `workers`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SidelobeStatus sidelobe_mc_exceedance(uintptr_t n,
                                           uint64_t trials,
                                           uint64_t seed,
                                           uint32_t workers,
                                           double threshold,
                                           struct SidelobeExceedance *out);

/**
 * Exact `mu_min(n)` by exhaustive search (pruned prefix extension); the
 * witness text (+/- characters, NUL-terminated) is written into `witness`
 * when `witness_capacity >= n + 1`.
 *
 * # Safety
 * `out_mu_min` must be valid; `witness` may be null (no witness is written)
 * or point to `witness_capacity` writable bytes.
 */
enum SidelobeStatus sidelobe_mu_min(uint32_t n,
                                    uint64_t *out_mu_min,
                                    char *witness,
                                    uintptr_t witness_capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIDELOBE_H */

/* Copyright 2026 The tickbench Authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef TICKBENCH_H
#define TICKBENCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum TbStatus {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_ARGUMENT = 2,
  TB_STATUS_NUMERICAL = 3,
  TB_STATUS_BUDGET_EXHAUSTED = 4,
  TB_STATUS_PANIC = 5,
} TbStatus;

/**
 * Opaque classical clock.
 */
typedef struct TbClassicalClock TbClassicalClock;

/**
 * Opaque delay function.
 */
typedef struct TbDelay TbDelay;

/**
 * Opaque quantum reset clock.
 */
typedef struct TbQuantumClock TbQuantumClock;

/**
 * Moments of a delay function.
 */
typedef struct TbMoments {
  double mass;
  double mean;
  double second_moment;
  double std_dev;
  double accuracy;
} TbMoments;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread, or null. Valid until the next call
 * into the library on this thread.
 */
const char *tb_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *tb_version(void);

/**
 * Ladder Clock of dimension `d`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum TbStatus tb_ladder_clock_new(uintptr_t d, struct TbClassicalClock **out);

/**
 * Clock from JSON `{d, N, T, initial}` with row-major matrices.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TbStatus tb_classical_clock_from_json(const char *json, struct TbClassicalClock **out);

/**
 * JSON form of the clock; release with [`tb_string_free`].
 *
 * # Safety
 * `clock` must be a live handle; `out` must be writable.
 */
enum TbStatus tb_classical_clock_to_json(const struct TbClassicalClock *clock, char **out);

/**
 * Exact first-tick moments.
 *
 * # Safety
 * `clock` must be a live handle; `out` must be writable.
 */
enum TbStatus tb_classical_clock_moments(const struct TbClassicalClock *clock,
                                         struct TbMoments *out);

/**
 * Canonical reset form of `clock` as a new handle.
 *
 * # Safety
 * `clock` must be a live handle; `out` must be writable.
 */
enum TbStatus tb_classical_clock_canonicalize(const struct TbClassicalClock *clock,
                                              struct TbClassicalClock **out);

/**
 * # Safety
 * `clock` must be null or a handle not yet freed.
 */
void tb_classical_clock_free(struct TbClassicalClock *clock);

/**
 * Quantum reset clock from spec JSON
 * `{d, omega, sigma0, n0, k0, eta, potential: {kind, values?}}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TbStatus tb_quantum_clock_from_json(const char *json, struct TbQuantumClock **out);

/**
 * First-tick moments by quadrature with `steps_per_site` steps per time
 * state (0 selects the default).
 *
 * # Safety
 * `clock` must be a live handle; `out` must be writable.
 */
enum TbStatus tb_quantum_clock_moments(const struct TbQuantumClock *clock,
                                       uintptr_t steps_per_site,
                                       struct TbMoments *out);

/**
 * Optimises a free time-diagonal potential for the time state `|θ₀⟩`
 * (`sigma0 <= 0`) or a Quasi-Ideal state of width `sigma0`, and returns
 * the best clock. Returns `BudgetExhausted` together with the best clock
 * found when the search did not converge.
 *
 * # Safety
 * `out` must be writable; `out_r1` must be null or writable.
 */
enum TbStatus tb_quantum_optimize_diag(uintptr_t d,
                                       double sigma0,
                                       uintptr_t budget,
                                       uint64_t seed,
                                       double *out_r1,
                                       struct TbQuantumClock **out);

/**
 * # Safety
 * `clock` must be null or a handle not yet freed.
 */
void tb_quantum_clock_free(struct TbQuantumClock *clock);

/**
 * `amplitude·rate·e^{−rate·t}`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TbStatus tb_delay_exponential(double rate, double amplitude, struct TbDelay **out);

/**
 * Normalised Erlang density of the given shape and rate.
 *
 * # Safety
 * `out` must be writable.
 */
enum TbStatus tb_delay_erlang(uint32_t shape, double rate, struct TbDelay **out);

/**
 * Density sampled on `[0, dt·(len−1)]`.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` must be writable.
 */
enum TbStatus tb_delay_sampled(double dt,
                               const double *values,
                               uintptr_t len,
                               struct TbDelay **out);

/**
 * Convolution `a ∗ b`.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum TbStatus tb_delay_convolve(const struct TbDelay *a,
                                const struct TbDelay *b,
                                struct TbDelay **out);

/**
 * Pointwise sum `a + b`; the total mass must not exceed 1.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum TbStatus tb_delay_mix(const struct TbDelay *a, const struct TbDelay *b, struct TbDelay **out);

/**
 * # Safety
 * `delay` must be a live handle; `out` must be writable.
 */
enum TbStatus tb_delay_moments(const struct TbDelay *delay, struct TbMoments *out);

/**
 * # Safety
 * `delay` must be null or a handle not yet freed.
 */
void tb_delay_free(struct TbDelay *delay);

/**
 * Releases a string returned by the library.
 *
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void tb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TICKBENCH_H */

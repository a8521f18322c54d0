#ifndef RELAYCAP_H
#define RELAYCAP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible function.
 */
enum RcStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  RC_STATUS_OK = 0,
  RC_STATUS_NULL_POINTER = -1,
  RC_STATUS_INVALID_ARGUMENT = -2,
  RC_STATUS_NOT_DETERMINISTIC = -3,
  RC_STATUS_NOT_CONVERGED = -4,
  RC_STATUS_PARSE = -5,
  RC_STATUS_GUARD = -6,
  RC_STATUS_UNSUPPORTED = -7,
  RC_STATUS_PANIC = -99,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum RcStatus RcStatus;
#else
typedef int32_t RcStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/*
 Which cut-set term binds at the reported input.
 */
enum RcBranch
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  RC_BRANCH_LINK = 0,
  RC_BRANCH_BROADCAST = 1,
  RC_BRANCH_TIE = 2,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum RcBranch RcBranch;
#else
typedef int32_t RcBranch;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/*
 Opaque relay channel handle.
 */
typedef struct RcChannel RcChannel;

typedef struct RcOptimizerConfig {
  double tolerance;
  size_t max_iterations;
  size_t restarts;
  uint64_t seed;
} RcOptimizerConfig;

/*
 One optimized rate. Fields without a value are NaN.
 */
typedef struct RcRatePoint {
  double r0;
  double rate;
  double link_term;
  double broadcast_term;
  double upper_bound;
  double link_cost;
  RcBranch active_branch;
  size_t iterations;
  bool converged;
} RcRatePoint;

typedef struct RcSimParams {
  size_t n;
  double rate;
  double r0;
  double eps;
  size_t trials;
  uint64_t master_seed;
  /*
   Weak (entropy-rate) typicality when false, per-cell strong typicality when true.
   */
  bool strong_typicality;
  bool fixed_codebook;
} RcSimParams;

typedef struct RcSimReport {
  size_t trials;
  size_t errors;
  size_t err_a;
  size_t err_b;
  size_t err_c;
  size_t err_none;
  double pe_hat;
  double wilson_low;
  double wilson_high;
  double mean_list_size;
  size_t num_words;
  uint32_t bin_bits;
} RcSimReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *rc_last_error_message(void);

/*
 Library version as a static nul-terminated string.
 */
const char *rc_version(void);

/*
 Creates a channel from p(y, y1 | x) laid out as [x][y][y1].

 # Safety
 `transition` must point to `len` readable doubles; `out` must be writable.
 */
RcStatus rc_channel_new(size_t size_x,
                        size_t size_y,
                        size_t size_y1,
                        const double *transition,
                        size_t len,
                        struct RcChannel **out);

/*
 Parses a channel from its JSON file format.

 # Safety
 `json` must be a nul-terminated string; `out` must be writable.
 */
RcStatus rc_channel_from_json(const char *json, struct RcChannel **out);

/*
 Binary channel Y = X xor S with S ~ Bernoulli(p) seen by the relay.

 # Safety
 `out` must be writable.
 */
RcStatus rc_channel_bsc_state(double p, struct RcChannel **out);

/*
 Releases a channel; null is ignored.

 # Safety
 `ch` must come from an `rc_channel_*` constructor and not be used afterwards.
 */
void rc_channel_free(struct RcChannel *ch);

/*
 Alphabet sizes |X|, |Y|, |Y1|.

 # Safety
 `ch` must be a live handle; the outputs must be writable.
 */
RcStatus rc_channel_sizes(const struct RcChannel *ch,
                          size_t *size_x,
                          size_t *size_y,
                          size_t *size_y1);

/*
 Writes f(x, y) into `table[x * |Y| + y]`, or -1 where p(y|x) = 0.
 Fails with `RC_STATUS_NOT_DETERMINISTIC` when no such f exists.

 # Safety
 `ch` must be a live handle; `table` must hold `len` writable ints.
 */
RcStatus rc_channel_relay_function(const struct RcChannel *ch, int32_t *table, size_t len);

/*
 min{I(X;Y) + r0, I(X;Y,Y1)} at input `px`.

 # Safety
 `ch` must be a live handle; `px` must hold `px_len` doubles.
 */
RcStatus rc_cutset_rate(const struct RcChannel *ch,
                        const double *px,
                        size_t px_len,
                        double r0,
                        double *out);

/*
 Capacity max_p min{I(X;Y) + r0, I(X;Y,Y1)}. `cfg` may be null for
 defaults, `px_out` may be null. The point is written even when the
 certificate misses the tolerance, in which case the status is
 `RC_STATUS_NOT_CONVERGED`.

 # Safety
 `ch` must be a live handle; `out` writable; `px_out`, if non-null, must
 hold `px_len` writable doubles.
 */
RcStatus rc_theorem1_capacity(const struct RcChannel *ch,
                              double r0,
                              const struct RcOptimizerConfig *cfg,
                              struct RcRatePoint *out,
                              double *px_out,
                              size_t px_len);

/*
 Best compress-and-forward rate under link budget `r0`. Arguments as for
 `rc_theorem1_capacity`.

 # Safety
 As for `rc_theorem1_capacity`.
 */
RcStatus rc_cf_optimal(const struct RcChannel *ch,
                       double r0,
                       const struct RcOptimizerConfig *cfg,
                       struct RcRatePoint *out,
                       double *px_out,
                       size_t px_len);

/*
 Gaussian relay capacity for rho = +1 or -1.

 # Safety
 `out` must be writable.
 */
RcStatus rc_gaussian_capacity(double power, double noise, double rho, double r0, double *out);

/*
 Point (R0(sigma2), R*(sigma2)) of the anticorrelated compress-and-forward curve.

 # Safety
 `r0_out` and `rstar_out` must be writable.
 */
RcStatus rc_gaussian_cf_point(double power,
                              double noise,
                              double sigma2,
                              double *r0_out,
                              double *rstar_out);

/*
 Description noise variance whose link rate is `r0` (anticorrelated case).

 # Safety
 `out` must be writable.
 */
RcStatus rc_gaussian_invert_r0(double power, double noise, double r0, double *out);

/*
 Monte Carlo error rate of hash-and-forward. `px` may be null for the
 uniform input.

 # Safety
 `ch` must be a live handle; `params` readable; `out` writable; `px`, if
 non-null, must hold `px_len` doubles.
 */
RcStatus rc_simulate_haf(const struct RcChannel *ch,
                         const double *px,
                         size_t px_len,
                         const struct RcSimParams *params,
                         struct RcSimReport *out);

/*
 Entropy in bits of a probability vector.

 # Safety
 `p` must hold `len` doubles; `out` must be writable.
 */
RcStatus rc_entropy(const double *p, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELAYCAP_H */

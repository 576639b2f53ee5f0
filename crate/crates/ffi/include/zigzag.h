#ifndef ZIGZAG_H
#define ZIGZAG_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZzStatus {
  ZZ_STATUS_OK = 0,
  ZZ_STATUS_NULL_POINTER = 1,
  ZZ_STATUS_INVALID_ARGUMENT = 2,
  ZZ_STATUS_NODE = 3,
  ZZ_STATUS_CONFIG = 4,
  ZZ_STATUS_RUNTIME = 5,
  ZZ_STATUS_PANIC = 6,
} ZzStatus;

typedef enum ZzBranch {
  ZZ_BRANCH_ZIG = 0,
  ZZ_BRANCH_ZAG = 1,
} ZzBranch;

/**
 * Recorded trajectory handle, with jump events for zig-zag runs.
 */
typedef struct ZzTrajectory ZzTrajectory;

/**
 * Weyl wavefunction handle.
 */
typedef struct ZzWeylState ZzWeylState;

/**
 * Zig-zag electron handle.
 */
typedef struct ZzZigzagState ZzZigzagState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call on the same thread.
 */
const char *zz_last_error(void);

/**
 * `E_p`, `N_c` and `N_ζ` for momentum magnitude `p` and mass `m`.
 *
 * # Safety
 * The output pointers must be valid for writes.
 */
enum ZzStatus zz_zigzag_coefficients(double p,
                                     double m,
                                     double *energy,
                                     double *n_c,
                                     double *n_zeta);

/**
 * Build a Weyl wavefunction from `n` plane waves.
 *
 * `momenta` holds `3n` doubles; `modulus` and `phase` hold `n` doubles;
 * `negative_energy` holds `n` flags (nonzero for negative energy) or is
 * NULL for all positive. `left_handed` selects the ψ_L equation.
 *
 * # Safety
 * Arrays must hold the stated number of elements; `out` must be valid for
 * writes.
 */
enum ZzStatus zz_weyl_state_new(const double *momenta,
                                const double *modulus,
                                const double *phase,
                                const uint8_t *negative_energy,
                                size_t n,
                                bool left_handed,
                                struct ZzWeylState **out);

/**
 * # Safety
 * `state` must come from [`zz_weyl_state_new`] and not be used afterwards.
 */
void zz_weyl_state_free(struct ZzWeylState *state);

/**
 * Spinor at `(t, x)` as `re[2]`, `im[2]`.
 *
 * # Safety
 * `x` must hold 3 doubles, `re` and `im` 2 each.
 */
enum ZzStatus zz_weyl_evaluate(const struct ZzWeylState *state,
                               double t,
                               const double *x,
                               double *re,
                               double *im);

/**
 * Guidance velocity at `(t, x)`.
 *
 * # Safety
 * `x` and `v` must hold 3 doubles.
 */
enum ZzStatus zz_weyl_velocity(const struct ZzWeylState *state,
                               double t,
                               const double *x,
                               double *v);

/**
 * Fixed-step RK4 trajectory of a Weyl particle.
 *
 * # Safety
 * `x0` must hold 3 doubles; `out` must be valid for writes.
 */
enum ZzStatus zz_weyl_integrate(const struct ZzWeylState *state,
                                const double *x0,
                                double t0,
                                double t1,
                                double dt,
                                struct ZzTrajectory **out);

/**
 * Zig-zag electron of mass `m` from `n` positive-energy modes.
 *
 * # Safety
 * `momenta` holds `3n` doubles, `modulus` and `phase` `n` each.
 */
enum ZzStatus zz_zigzag_state_new(double m,
                                  const double *momenta,
                                  const double *modulus,
                                  const double *phase,
                                  size_t n,
                                  struct ZzZigzagState **out);

/**
 * # Safety
 * `state` must come from [`zz_zigzag_state_new`] and not be used afterwards.
 */
void zz_zigzag_state_free(struct ZzZigzagState *state);

/**
 * Rate of leaving branch `from` at `(t, x)`.
 *
 * # Safety
 * `x` must hold 3 doubles; `rate` must be valid for writes.
 */
enum ZzStatus zz_zigzag_jump_rate(const struct ZzZigzagState *state,
                                  double t,
                                  const double *x,
                                  enum ZzBranch from,
                                  double *rate);

/**
 * Conventional Dirac velocity of the electron at `(t, x)`.
 *
 * # Safety
 * `x` and `v` must hold 3 doubles.
 */
enum ZzStatus zz_dirac_velocity(const struct ZzZigzagState *state,
                                double t,
                                const double *x,
                                double *v);

/**
 * Zig-zag jump-process trajectory, reproducible per `seed`.
 *
 * # Safety
 * `x0` must hold 3 doubles; `out` must be valid for writes.
 */
enum ZzStatus zz_zigzag_simulate(const struct ZzZigzagState *state,
                                 const double *x0,
                                 enum ZzBranch branch0,
                                 double t0,
                                 double t1,
                                 double dt,
                                 uint64_t seed,
                                 struct ZzTrajectory **out);

/**
 * Number of samples, or 0 for NULL.
 *
 * # Safety
 * `tr` must be NULL or a live trajectory handle.
 */
size_t zz_trajectory_len(const struct ZzTrajectory *tr);

/**
 * Number of jump events, or 0 for NULL.
 *
 * # Safety
 * `tr` must be NULL or a live trajectory handle.
 */
size_t zz_trajectory_jump_count(const struct ZzTrajectory *tr);

/**
 * Sample `index`: time, position, branch (-1 for deterministic movers, else
 * a [`ZzBranch`] value) and speed.
 *
 * # Safety
 * `x` must hold 3 doubles; the other outputs must be valid for writes.
 */
enum ZzStatus zz_trajectory_sample(const struct ZzTrajectory *tr,
                                   size_t index,
                                   double *t,
                                   double *x,
                                   int32_t *branch,
                                   double *speed);

/**
 * Jump `index`: time and position.
 *
 * # Safety
 * `x` must hold 3 doubles; `t` must be valid for writes.
 */
enum ZzStatus zz_trajectory_jump(const struct ZzTrajectory *tr, size_t index, double *t, double *x);

/**
 * # Safety
 * `tr` must come from a simulate/integrate call and not be used afterwards.
 */
void zz_trajectory_free(struct ZzTrajectory *tr);

/**
 * Parse a TOML scenario and run it into `out_dir`.
 *
 * # Safety
 * Both arguments must be NUL-terminated strings.
 */
enum ZzStatus zz_run_scenario(const char *config, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZIGZAG_H */

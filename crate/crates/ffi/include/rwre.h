#ifndef RWRE_H
#define RWRE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RwreStatus {
  RWRE_STATUS_OK = 0,
  RWRE_STATUS_NULL_POINTER = 1,
  RWRE_STATUS_INVALID_ARGUMENT = 2,
  RWRE_STATUS_BALANCE = 3,
  RWRE_STATUS_CAPACITY = 4,
  RWRE_STATUS_FORMAT = 5,
  RWRE_STATUS_BOX_ESCAPE = 6,
  RWRE_STATUS_DOMAIN = 7,
  RWRE_STATUS_SOLVER = 8,
  RWRE_STATUS_SAMPLE_SIZE = 9,
  RWRE_STATUS_CONFIG = 10,
  RWRE_STATUS_IO = 11,
  /**
   * Walk hit its step limit before stopping.
   */
  RWRE_STATUS_TIMEOUT = 12,
  RWRE_STATUS_INTERNAL = 13,
} RwreStatus;

/**
 * Opaque environment on a finite box.
 */
typedef struct RwreEnv RwreEnv;

/**
 * Opaque site law.
 */
typedef struct RwreLaw RwreLaw;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rwre_version(void);

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next call into the library on this thread.
 */
const char *rwre_last_error(void);

/**
 * Parses `srw`, `axis-choice` or `atoms:p,p@q;...` in dimension `dim`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RwreStatus rwre_law_new(const char *spec, size_t dim, struct RwreLaw **out);

/**
 * # Safety
 * `law` must come from [`rwre_law_new`] and not be used afterwards. Null is
 * ignored.
 */
void rwre_law_free(struct RwreLaw *law);

/**
 * Samples an environment on `[-half, half]^d`.
 *
 * # Safety
 * `law` must be a live handle and `out` a writable pointer.
 */
enum RwreStatus rwre_env_sample(const struct RwreLaw *law,
                                int64_t half,
                                uint64_t seed,
                                struct RwreEnv **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RwreStatus rwre_env_load(const char *path, struct RwreEnv **out);

/**
 * # Safety
 * `env` must be a live handle and `path` a NUL-terminated string.
 */
enum RwreStatus rwre_env_save(const struct RwreEnv *env, const char *path);

/**
 * # Safety
 * `env` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void rwre_env_free(struct RwreEnv *env);

/**
 * Dimension of the environment, or 0 for a null handle.
 *
 * # Safety
 * `env` must be null or a live handle.
 */
size_t rwre_env_dim(const struct RwreEnv *env);

/**
 * Copies the `d` axis weights `p_i` at `site` into `weights`.
 *
 * # Safety
 * `site` and `weights` must each hold `dim` elements.
 */
enum RwreStatus rwre_env_weights(const struct RwreEnv *env,
                                 const int64_t *site,
                                 size_t dim,
                                 double *weights);

/**
 * Runs the quenched walk from `start` until it first hits the boundary
 * layer of the discrete ball `‖x‖₂ < radius` (sites of the ball with a
 * neighbour outside it), writing that site and the step count.
 *
 * # Safety
 * `start` and `exit_site` must each hold `dim` elements; `steps` must be
 * writable.
 */
enum RwreStatus rwre_walk_exit_ball(const struct RwreEnv *env,
                                    const int64_t *start,
                                    size_t dim,
                                    double radius,
                                    uint64_t seed,
                                    size_t max_steps,
                                    int64_t *exit_site,
                                    size_t *steps);

/**
 * Largest `sup_{B_R} f / inf_{B_R} f` over point-mass data on the closed
 * ball of radius `2R`, and the fraction of data with zero infimum.
 *
 * # Safety
 * `env` must be a live handle; `ratio` and `zero_inf_frac` writable.
 */
enum RwreStatus rwre_harnack_ratio(const struct RwreEnv *env,
                                   double radius,
                                   double *ratio,
                                   double *zero_inf_frac);

/**
 * Largest total variation between exit laws from the closed ball of radius
 * `psi · R`, over starts in the closed ball of radius `R`.
 *
 * # Safety
 * `env` must be a live handle; `upsilon` writable.
 */
enum RwreStatus rwre_oscillation(const struct RwreEnv *env,
                                 double radius,
                                 double psi,
                                 double *upsilon);

/**
 * Number of sinks of the directed graph on the centered cube with `side`
 * sites per axis, and the density of the largest one.
 *
 * # Safety
 * `env` must be a live handle; `count` and `density` writable.
 */
enum RwreStatus rwre_sinks(const struct RwreEnv *env, int64_t side, size_t *count, double *density);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RWRE_H */

#ifndef SHAPECALC_H
#define SHAPECALC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success; everything else leaves out-parameters
// untouched.
typedef enum ScStatus {
  SC_STATUS_OK = 0,
  // Null pointer, non-UTF-8 string, or out-of-range number.
  SC_STATUS_INVALID_ARGUMENT = 1,
  // JSON that does not describe a valid object.
  SC_STATUS_PARSE = 2,
  // Degenerate or otherwise unusable geometry or field.
  SC_STATUS_GEOMETRY = 3,
  // A field support leaves its allowed region.
  SC_STATUS_SUPPORT = 4,
  // The finite-difference extrapolation did not settle.
  SC_STATUS_NO_CONVERGENCE = 5,
  // A NaN or infinity appeared during evaluation.
  SC_STATUS_NON_FINITE = 6,
  // The operation is not available for this object.
  SC_STATUS_UNSUPPORTED = 7,
  // Reading or writing files failed.
  SC_STATUS_IO = 8,
  // The run completed but at least one check failed.
  SC_STATUS_SUITE_FAILED = 9,
  // An internal panic was caught at the boundary.
  SC_STATUS_PANIC = 10,
} ScStatus;

typedef struct ScField ScField;

typedef struct ScFunctional ScFunctional;

typedef struct ScManifold ScManifold;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *sc_version(void);

// Message of the last failed call on this thread, or NULL after a success.
// Valid until the next `sc_*` call on the same thread.
const char *sc_last_error_message(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void sc_string_free(char *s);

// Builds a curve or surface from a shape description such as
// `{"kind": "circle", "radius": 1}`.
//
// # Safety
// `json` must be NULL or NUL-terminated; `out` must be NULL or writable.
enum ScStatus sc_manifold_from_json(const char *json, struct ScManifold **out);

// # Safety
// `m` must be NULL or a live handle from [`sc_manifold_from_json`].
void sc_manifold_free(struct ScManifold *m);

// Ambient dimension (2 or 3) of the manifold, or 0 for NULL.
//
// # Safety
// `m` must be NULL or a live handle.
uint32_t sc_manifold_dim(const struct ScManifold *m);

// Builds a vector field in R^`dim` from a field description. `region_json`
// is the hold-all region (e.g. `{"kind": "ball", "center": [0,0,0],
// "radius": 5}`); NULL means all of space.
//
// # Safety
// String arguments must be NULL or NUL-terminated; `out` must be NULL or writable.
enum ScStatus sc_field_from_json(const char *json,
                                 uint32_t dim,
                                 const char *region_json,
                                 struct ScField **out);

// # Safety
// `x` must be NULL or a live handle from [`sc_field_from_json`].
void sc_field_free(struct ScField *x);

// Builds a shape functional for use on `m` (crack functionals check that
// `m` lies inside their domain).
//
// # Safety
// `json` must be NULL or NUL-terminated; `m` NULL or live; `out` NULL or writable.
enum ScStatus sc_functional_from_json(const char *json,
                                      const struct ScManifold *m,
                                      struct ScFunctional **out);

// # Safety
// `j` must be NULL or a live handle from [`sc_functional_from_json`].
void sc_functional_free(struct ScFunctional *j);

// J(M).
//
// # Safety
// Handles must be live; `out` writable.
enum ScStatus sc_evaluate(const struct ScFunctional *j, const struct ScManifold *m, double *out);

// Closed-form Eulerian derivative dJ(M)(X).
//
// # Safety
// Handles must be live; `out` writable.
enum ScStatus sc_analytic_derivative(const struct ScFunctional *j,
                                     const struct ScManifold *m,
                                     const struct ScField *x,
                                     double *out);

// Finite-difference derivative along the flow of X. `fd_json` overrides the
// schedule (`{"t0": .., "levels": .., "richardson": .., "flow": ..}`);
// NULL uses the defaults. `out_error` may be NULL.
//
// # Safety
// Handles must be live; strings NULL or NUL-terminated; `out_value` writable.
enum ScStatus sc_eulerian_fd(const struct ScFunctional *j,
                             const struct ScManifold *m,
                             const struct ScField *x,
                             const char *fd_json,
                             double *out_value,
                             double *out_error);

// Analytic-versus-FD comparison. Writes the derivative report as JSON to
// `*out_report` (free with [`sc_string_free`]) and its verdict to
// `*out_pass` (may be NULL). A failed verdict still returns `Ok`.
//
// # Safety
// Handles must be live; strings NULL or NUL-terminated; `out_report` writable.
enum ScStatus sc_compare(const struct ScFunctional *j,
                         const struct ScManifold *m,
                         const struct ScField *x,
                         const char *fd_json,
                         const char *tolerances_json,
                         char **out_report,
                         bool *out_pass);

// Φ_t(x0) by RK4 with `n_steps` steps (0 picks steps of at most 0.01).
//
// # Safety
// `x` must be live; `x0` and `out` must point to three doubles.
enum ScStatus sc_flow_point(const struct ScField *x,
                            const double *x0,
                            double t_final,
                            uint32_t n_steps,
                            double *out);

// Runs an experiment config given as JSON text. Reports go to `out_dir`
// (NULL: the config's `output.path`). The run summary is written as JSON
// to `*out_summary` if that is non-NULL. Returns `SuiteFailed` when any
// check fails.
//
// # Safety
// Strings must be NULL or NUL-terminated; `out_summary` NULL or writable.
enum ScStatus sc_run_config(const char *config_json, const char *out_dir, char **out_summary);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHAPECALC_H */

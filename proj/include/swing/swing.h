/* C interface for the swing-option pricing and verification engine.
 *
 * All functions are thread-compatible: distinct swing_run handles may be
 * used from distinct threads concurrently, but a single handle must not be
 * shared without external synchronization.  Error messages are stored in
 * thread-local storage and refer to the most recent failing call on the
 * calling thread.
 *
 * Strings returned through `char **out` parameters are heap-allocated and
 * must be released with swing_string_free().
 */
#ifndef SWING_SWING_H
#define SWING_SWING_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SWING_API __declspec(dllexport)
#else
#define SWING_API __attribute__((visibility("default")))
#endif

typedef struct swing_run swing_run;

typedef enum swing_status {
    SWING_OK = 0,        /* success */
    SWING_EINVAL = 1,    /* invalid argument or configuration value */
    SWING_EPARSE = 2,    /* malformed JSON / CSV input */
    SWING_EVALIDATE = 3, /* model failed self-validation */
    SWING_EIO = 4,       /* file could not be read or written */
    SWING_EINTERNAL = 5  /* unexpected internal failure */
} swing_status;

/* Library version string, e.g. "1.0.0". Static storage; do not free. */
SWING_API const char *swing_version(void);

/* Last error message for the calling thread. Static storage; do not free.
 * Empty string if no error has occurred on this thread. */
SWING_API const char *swing_last_error(void);

/* Release a string returned through a `char **out` parameter. NULL is ok. */
SWING_API void swing_string_free(char *s);

/* Create a run from a JSON configuration file / string.
 * On failure returns NULL and stores a message retrievable via
 * swing_last_error(); if `status` is non-NULL it receives the error code. */
SWING_API swing_run *swing_run_create_from_file(const char *path,
                                                swing_status *status);
SWING_API swing_run *swing_run_create_from_json(const char *json_text,
                                                swing_status *status);

/* Destroy a run and release all associated memory. NULL is ok. */
SWING_API void swing_run_destroy(swing_run *run);

/* Override the Monte Carlo seed / path count from the configuration.
 * Must be called before swing_run_price_json to take effect. */
SWING_API swing_status swing_run_set_seed(swing_run *run, uint64_t seed);
SWING_API swing_status swing_run_set_paths(swing_run *run, long long n_paths);

/* Output directory named by the configuration ("out" if absent). The pointer
 * stays valid until the run is destroyed; do not free. NULL if run is NULL. */
SWING_API const char *swing_run_out_dir(const swing_run *run);

/* Build the lattice and compute the value / marginal-value surfaces.
 * Idempotent: repeated calls reuse the computed surfaces. */
SWING_API swing_status swing_run_solve(swing_run *run);

/* Write the solved surfaces as CSV (solves first if needed). */
SWING_API swing_status swing_run_export_surface_csv(swing_run *run,
                                                    const char *path);

/* Replace the run's surfaces with ones imported from CSV. The file must
 * cover exactly the grid implied by the configuration; the import re-derives
 * auxiliary fields but trusts the value and marginal columns as stored. */
SWING_API swing_status swing_run_import_surface_csv(swing_run *run,
                                                    const char *path);

/* JSON metadata describing the solved surfaces (grid shape, value at the
 * configured start point, configuration hash). Solves first if needed. */
SWING_API swing_status swing_run_solve_metadata_json(swing_run *run,
                                                     char **out);

/* Run the full verification suite against the run's surfaces and return the
 * report as JSON. Solves first if no surface is present (so a preceding
 * import is honored). If `all_pass` is non-NULL it receives 1 when every
 * check passed and 0 otherwise; the call itself returns SWING_OK in both
 * cases. */
SWING_API swing_status swing_run_verify_json(swing_run *run, char **out,
                                             int *all_pass);

/* Run Monte Carlo pricing (primal policy simulation + dual bound) and return
 * the report as JSON. Requires n_paths >= 2. Solves first if needed. */
SWING_API swing_status swing_run_price_json(swing_run *run, char **out);

/* Value at the configured start point (t = 0, initial node, y = y0). */
SWING_API swing_status swing_run_value(swing_run *run, double *out);

/* Interpolated value at an arbitrary (t, node-at-enclosing-step, y) point.
 * `node` indexes the lattice nodes at the time step containing `t`. */
SWING_API swing_status swing_run_value_at(swing_run *run, double t, int node,
                                          double y, double *out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SWING_SWING_H */

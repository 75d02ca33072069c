/* Public C interface of the sconclab shared library.
 *
 * All entry points are thread-safe with respect to distinct handles. Calls
 * return SCONC_OK or an error code; after an error, sconc_last_error() holds
 * a message for the calling thread until its next API call. Strings returned
 * through char** are heap-allocated and must be released with
 * sconc_string_free().
 */
#ifndef SCONCLAB_H
#define SCONCLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SCONC_API __declspec(dllexport)
#else
#define SCONC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sconc_status {
  SCONC_OK = 0,
  SCONC_ERR_INVALID_ARGUMENT,
  SCONC_ERR_OUT_OF_DOMAIN,
  SCONC_ERR_NON_CONVEX_OBJECTIVE,
  SCONC_ERR_MAXIMIZER_ON_BOUNDARY,
  SCONC_ERR_NO_CONVERGENCE,
  SCONC_ERR_SHOOTING_NOT_DIFFEO,
  SCONC_ERR_LOCALIZATION_VIOLATED,
  SCONC_ERR_MISSING_CONSTANTS,
  SCONC_ERR_CRITICAL_TIME_EXCEEDED,
  SCONC_ERR_EMPTY_CLOUD,
  SCONC_ERR_NO_DIFFERENTIABLE_POINTS,
  SCONC_ERR_ENDPOINTS_SINGULAR,
  SCONC_ERR_NO_PATH_FOUND,
  SCONC_ERR_DEGENERATE_SCALES,
  SCONC_ERR_UNKNOWN_NAME,
  SCONC_ERR_CONFIG,
  SCONC_ERR_IO,
  SCONC_ERR_TOLERANCE,
  SCONC_ERR_INTERNAL
} sconc_status;

typedef struct sconc_system sconc_system;
typedef struct sconc_function sconc_function;

/* Library version as "major.minor.patch". Static storage, do not free. */
SCONC_API const char* sconc_version(void);

/* Stable name of a status code ("ok", "unknown_name", ...). Static storage. */
SCONC_API const char* sconc_status_name(sconc_status status);

/* Message of the last failing call on this thread, or "" if none. The
 * pointer stays valid until this thread's next library call. */
SCONC_API const char* sconc_last_error(void);

/* Releases a string returned through a char** out parameter. NULL is ok. */
SCONC_API void sconc_string_free(char* s);

/* Sets the worker pool size for subsequent calls. n <= 0 selects the
 * hardware count. */
SCONC_API sconc_status sconc_set_threads(int n);

/* Builds a named system ("free", "mechanical", "mechanical-poly", "quartic",
 * "driven") of the given dimension. keys/values carry n_params shape
 * parameters; a bare key such as "a" configures the system, a dotted key
 * such as "domain.kind" addresses another configuration section. */
SCONC_API sconc_status sconc_system_create(const char* name, int dim, const char* const* keys,
                                           const char* const* values, int n_params,
                                           sconc_system** out);
SCONC_API void sconc_system_destroy(sconc_system* sys);
SCONC_API int sconc_system_dim(const sconc_system* sys);

/* Hamiltonian value at (t, x, p); x and p have sconc_system_dim entries. */
SCONC_API sconc_status sconc_system_hamiltonian(const sconc_system* sys, double t,
                                                const double* x, const double* p, double* out);

/* Builds a named semiconcave function ("phi1", "phi2", "neg-norm",
 * "min-parabolas", "two-cones"); bare keys configure the function. */
SCONC_API sconc_status sconc_function_create(const char* name, int dim, const char* const* keys,
                                             const char* const* values, int n_params,
                                             sconc_function** out);
SCONC_API void sconc_function_destroy(sconc_function* fn);
SCONC_API int sconc_function_dim(const sconc_function* fn);

SCONC_API sconc_status sconc_function_value(const sconc_function* fn, const double* x,
                                            double* out);

/* Dimension of the superdifferential at x; 0 where fn is differentiable.
 * tie_tol <= 0 selects the default tie tolerance. */
SCONC_API sconc_status sconc_function_stratum(const sconc_function* fn, const double* x,
                                              double tie_tol, int* out);

/* One Lax-Oleinik value at x: positive != 0 evaluates the sup-convolution,
 * otherwise the inf-convolution. spacing <= 0 selects the default candidate
 * spacing. out_argopt (dim entries) may be NULL. */
SCONC_API sconc_status sconc_evolve_value(const sconc_system* sys, const sconc_function* fn,
                                          double t1, double t2, const double* x, int positive,
                                          double spacing, double* out_value, double* out_argopt);

/* Runs the experiment described by a config file. config_path may be NULL
 * when the overrides carry the whole description; overrides are
 * "section.key=value" strings applied on top of the file. The experiment
 * name comes from [experiment] name, the seed from [experiment] seed
 * (default 1). Artifacts and report.json go under out_dir when it is
 * non-NULL and non-empty, else under the config's [output] dir when set.
 * threads < 0 keeps the current pool. On success *out_report_json (optional)
 * receives the report and *out_pass (optional) the expectation verdict;
 * metric bounds that fail return SCONC_ERR_TOLERANCE with the report still
 * filled in. */
SCONC_API sconc_status sconc_run_config(const char* config_path, const char* const* overrides,
                                        int n_overrides, const char* out_dir, int threads,
                                        char** out_report_json, int* out_pass);

/* Newline-separated listing of one registry: "systems", "functions" or
 * "experiments". */
SCONC_API sconc_status sconc_list(const char* kind, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* SCONCLAB_H */

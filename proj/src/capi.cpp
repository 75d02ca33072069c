#include "sconclab/sconclab.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "config.hpp"
#include "evolution.hpp"
#include "registry.hpp"
#include "report.hpp"
#include "semiconcave.hpp"
#include "tonelli.hpp"
#include "util.hpp"

using namespace sconclab;

// Handles own their objects through the shared_ptr alias used internally.
struct sconc_system {
  SystemPtr sys;
};

struct sconc_function {
  FunctionPtr fn;
};

namespace {

thread_local std::string tl_error;

sconc_status set_error(Err code, const char* what) {
  tl_error = what ? what : "";
  return static_cast<sconc_status>(code);
}

sconc_status caught() {
  try {
    throw;
  } catch (const Error& e) {
    return set_error(e.code(), e.what());
  } catch (const std::exception& e) {
    return set_error(Err::Internal, e.what());
  } catch (...) {
    return set_error(Err::Internal, "unknown failure");
  }
}

// Runs fn inside the exception wall. fn returns sconc_status for calls that
// finish with a verdict of their own.
template <typename F>
sconc_status guarded(F&& fn) {
  try {
    tl_error.clear();
    return fn();
  } catch (...) {
    return caught();
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Bare keys land in `section`; dotted keys are full overrides.
Config config_of_params(const char* section, const char* name, int dim, const char* const* keys,
                        const char* const* values, int n_params) {
  Config cfg;
  cfg.set(section, "name", name ? name : "");
  cfg.set(section, "dim", std::to_string(dim));
  for (int i = 0; i < n_params; ++i) {
    if (!keys || !keys[i] || !values || !values[i])
      fail(Err::InvalidArgument, "parameter %d is null", i);
    std::string key = keys[i];
    if (key.find('.') != std::string::npos)
      cfg.apply_override(key + "=" + values[i]);
    else
      cfg.set(section, key, values[i]);
  }
  return cfg;
}

Vec vec_of(const double* x, int dim, const char* what) {
  if (!x) fail(Err::InvalidArgument, "%s is null", what);
  if (dim < 1 || dim > 3) fail(Err::InvalidArgument, "%s has dim %d, want 1..3", what, dim);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = x[i];
  return v;
}

}  // namespace

extern "C" {

const char* sconc_version(void) { return "1.0.0"; }

const char* sconc_status_name(sconc_status status) {
  switch (status) {
    case SCONC_OK: return "ok";
    case SCONC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SCONC_ERR_OUT_OF_DOMAIN: return "out_of_domain";
    case SCONC_ERR_NON_CONVEX_OBJECTIVE: return "non_convex_objective";
    case SCONC_ERR_MAXIMIZER_ON_BOUNDARY: return "maximizer_on_boundary";
    case SCONC_ERR_NO_CONVERGENCE: return "no_convergence";
    case SCONC_ERR_SHOOTING_NOT_DIFFEO: return "shooting_not_diffeo";
    case SCONC_ERR_LOCALIZATION_VIOLATED: return "localization_violated";
    case SCONC_ERR_MISSING_CONSTANTS: return "missing_constants";
    case SCONC_ERR_CRITICAL_TIME_EXCEEDED: return "critical_time_exceeded";
    case SCONC_ERR_EMPTY_CLOUD: return "empty_cloud";
    case SCONC_ERR_NO_DIFFERENTIABLE_POINTS: return "no_differentiable_points";
    case SCONC_ERR_ENDPOINTS_SINGULAR: return "endpoints_singular";
    case SCONC_ERR_NO_PATH_FOUND: return "no_path_found";
    case SCONC_ERR_DEGENERATE_SCALES: return "degenerate_scales";
    case SCONC_ERR_UNKNOWN_NAME: return "unknown_name";
    case SCONC_ERR_CONFIG: return "config";
    case SCONC_ERR_IO: return "io";
    case SCONC_ERR_TOLERANCE: return "tolerance_failure";
    case SCONC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sconc_last_error(void) { return tl_error.c_str(); }

void sconc_string_free(char* s) { std::free(s); }

sconc_status sconc_set_threads(int n) {
  return guarded([&] {
    set_thread_count(n);
    return SCONC_OK;
  });
}

sconc_status sconc_system_create(const char* name, int dim, const char* const* keys,
                                 const char* const* values, int n_params, sconc_system** out) {
  return guarded([&] {
    if (!out) fail(Err::InvalidArgument, "out handle is null");
    if (!name) fail(Err::InvalidArgument, "system name is null");
    Config cfg = config_of_params("system", name, dim, keys, values, n_params);
    *out = new sconc_system{system_from(cfg, dim)};
    return SCONC_OK;
  });
}

void sconc_system_destroy(sconc_system* sys) { delete sys; }

int sconc_system_dim(const sconc_system* sys) { return sys ? sys->sys->dim() : 0; }

sconc_status sconc_system_hamiltonian(const sconc_system* sys, double t, const double* x,
                                      const double* p, double* out) {
  return guarded([&] {
    if (!sys || !out) fail(Err::InvalidArgument, "null argument");
    int d = sys->sys->dim();
    *out = sys->sys->hamiltonian(t, vec_of(x, d, "x"), vec_of(p, d, "p")).value;
    return SCONC_OK;
  });
}

sconc_status sconc_function_create(const char* name, int dim, const char* const* keys,
                                   const char* const* values, int n_params,
                                   sconc_function** out) {
  return guarded([&] {
    if (!out) fail(Err::InvalidArgument, "out handle is null");
    if (!name) fail(Err::InvalidArgument, "function name is null");
    Config cfg = config_of_params("phi", name, dim, keys, values, n_params);
    *out = new sconc_function{function_from(cfg, dim)};
    return SCONC_OK;
  });
}

void sconc_function_destroy(sconc_function* fn) { delete fn; }

int sconc_function_dim(const sconc_function* fn) { return fn ? fn->fn->dim() : 0; }

sconc_status sconc_function_value(const sconc_function* fn, const double* x, double* out) {
  return guarded([&] {
    if (!fn || !out) fail(Err::InvalidArgument, "null argument");
    *out = fn->fn->value(vec_of(x, fn->fn->dim(), "x"));
    return SCONC_OK;
  });
}

sconc_status sconc_function_stratum(const sconc_function* fn, const double* x, double tie_tol,
                                    int* out) {
  return guarded([&] {
    if (!fn || !out) fail(Err::InvalidArgument, "null argument");
    *out = fn->fn->stratum_dimension(vec_of(x, fn->fn->dim(), "x"), tie_tol);
    return SCONC_OK;
  });
}

sconc_status sconc_evolve_value(const sconc_system* sys, const sconc_function* fn, double t1,
                                double t2, const double* x, int positive, double spacing,
                                double* out_value, double* out_argopt) {
  return guarded([&] {
    if (!sys || !fn || !out_value) fail(Err::InvalidArgument, "null argument");
    int d = sys->sys->dim();
    EvolveOptions opt;
    if (spacing > 0) opt.spacing = spacing;
    Vec xv = vec_of(x, d, "x");
    EvolveValue ev = positive ? lax_oleinik_positive(*sys->sys, *fn->fn, t1, t2, xv, opt)
                              : lax_oleinik_negative(*sys->sys, *fn->fn, t1, t2, xv, opt);
    *out_value = ev.value;
    if (out_argopt)
      for (int i = 0; i < d; ++i) out_argopt[i] = ev.argopt[i];
    return SCONC_OK;
  });
}

sconc_status sconc_run_config(const char* config_path, const char* const* overrides,
                              int n_overrides, const char* out_dir, int threads,
                              char** out_report_json, int* out_pass) {
  return guarded([&] {
    Config cfg = (config_path && *config_path) ? Config::parse_file(config_path) : Config();
    for (int i = 0; i < n_overrides; ++i) {
      if (!overrides || !overrides[i]) fail(Err::InvalidArgument, "override %d is null", i);
      cfg.apply_override(overrides[i]);
    }
    if (threads >= 0) set_thread_count(threads);

    std::string name = cfg.str("experiment", "name");
    std::uint64_t seed = cfg.u64_or("experiment", "seed", 1);
    std::string dir = (out_dir && *out_dir) ? out_dir : cfg.str_or("output", "dir", "");
    bool with_timestamp = cfg.flag_or("output", "timestamp", true);

    Report report = run_experiment(name, cfg, dir, seed);
    if (!dir.empty())
      write_text_file(dir + "/report.json", report.to_json(with_timestamp).dump(2) + "\n");

    if (out_report_json) *out_report_json = dup_string(report.to_json(with_timestamp).dump(2));
    if (out_pass) *out_pass = report.pass() ? 1 : 0;
    if (!report.pass()) return set_error(Err::ToleranceFailure, "expectations failed");
    return SCONC_OK;
  });
}

sconc_status sconc_list(const char* kind, char** out_text) {
  return guarded([&] {
    if (!kind || !out_text) fail(Err::InvalidArgument, "null argument");
    *out_text = dup_string(registry_help(kind));
    return SCONC_OK;
  });
}

}  // extern "C"

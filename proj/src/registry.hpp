#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "report.hpp"
#include "semiconcave.hpp"
#include "tonelli.hpp"

namespace sconclab {

// Name registries backing the config and CLI surfaces. Systems and functions
// are built from their config sections; experiments run against a full
// config and produce a report.

std::vector<std::string> list_systems();
std::vector<std::string> list_functions();
std::vector<std::string> list_experiments();

// Human-readable listing of one registry ("systems", "functions",
// "experiments"): one line per name with its parameters.
std::string registry_help(const std::string& kind);

// Domain from the [domain] section when present, otherwise the fallback.
Domain domain_from(const Config& cfg, int dim, const Domain& fallback);

// System from [system]: name plus shape parameters, domain from [domain] or
// a per-system default.
SystemPtr system_from(const Config& cfg, int dim);

// Function from [phi]: name, dim and shape parameters.
FunctionPtr function_from(const Config& cfg, int dim);

// Effective dimension of a config: [phi] dim, else [system] dim, else 1.
int dim_from(const Config& cfg);

// Runs the named experiment: builds inputs from cfg, writes artifacts under
// out_dir (skipped when empty), evaluates the [expect] section. The report's
// pass flag reflects the expectations.
Report run_experiment(const std::string& name, const Config& cfg, const std::string& out_dir,
                      std::uint64_t seed);

}  // namespace sconclab

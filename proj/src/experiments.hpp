#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "report.hpp"
#include "util.hpp"

namespace sconclab {

// Shared state handed to an experiment body. Artifacts are listed in the
// report and written under out_dir when one is set.
struct ExpCtx {
  const Config& cfg;
  Report& report;
  std::string out_dir;
  std::uint64_t seed;
  Rng rng;

  void artifact(const std::string& name, const std::string& content);
};

struct ExperimentDef {
  const char* name;
  const char* help;
  void (*run)(ExpCtx&);
};

const std::vector<ExperimentDef>& experiment_table();

}  // namespace sconclab

// Command line front end. Talks to the library exclusively through the
// public C interface.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sconclab/sconclab.h"

namespace {

int fail_with(sconc_status status) {
  std::fprintf(stderr, "error: %s: %s\n", sconc_status_name(status), sconc_last_error());
  return status == SCONC_ERR_TOLERANCE ? 2 : 1;
}

// "lo1,hi1 x lo2,hi2 x ..." -> per-axis lows and highs. Whitespace around
// the x separators is accepted.
bool parse_box(const std::string& spec, std::string& lo, std::string& hi) {
  lo.clear();
  hi.clear();
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t cut = spec.find('x', start);
    std::string axis = spec.substr(start, cut == std::string::npos ? cut : cut - start);
    std::size_t comma = axis.find(',');
    if (comma == std::string::npos) return false;
    if (!lo.empty()) {
      lo += ", ";
      hi += ", ";
    }
    lo += axis.substr(0, comma);
    hi += axis.substr(comma + 1);
    if (cut == std::string::npos) break;
    start = cut + 1;
  }
  return !lo.empty();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiconcave calculus and Lax-Oleinik evolution experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sconc_version()));
  // Long-only help everywhere so `--h` stays available as the spacing flag.
  app.set_help_flag("--help", "print this help message and exit");
  app.set_help_all_flag("--help-all", "print help for all subcommands and exit");

  auto* run = app.add_subcommand("run", "run an experiment and print its report");
  std::string experiment, config_path, out_dir;
  std::vector<std::string> sets;
  std::string phi_name, system_name;
  long long seed = -1;
  int threads = -1;
  int dim = 0;
  double t = 0, h = 0;
  bool t_set = false, h_set = false, quiet = false;
  run->add_option("experiment", experiment, "experiment name (see `list experiments`)");
  run->add_option("-c,--config", config_path, "experiment config file")
      ->check(CLI::ExistingFile);
  run->add_option("-o,--out", out_dir, "directory for report.json and artifacts");
  run->add_option("-s,--seed", seed, "random seed (overrides [experiment] seed)");
  run->add_option("-j,--threads", threads,
                  "worker threads, 0 = hardware (default: SCONCLAB_THREADS or hardware)");
  run->add_option("--set", sets, "config override section.key=value, repeatable")
      ->type_name("KEY=VALUE");
  run->add_option("--phi", phi_name, "datum name, shorthand for --set phi.name=...");
  run->add_option("--system", system_name, "system name, shorthand for --set system.name=...");
  run->add_option("--dim", dim, "dimension, shorthand for --set phi.dim=...");
  run->add_option("--t", t, "horizon, shorthand for --set params.t=...")
      ->trigger_on_parse()
      ->each([&](const std::string&) { t_set = true; });
  run->add_option("--h", h, "grid spacing, shorthand for --set params.h=...")
      ->trigger_on_parse()
      ->each([&](const std::string&) { h_set = true; });
  std::string box_spec, a_spec, b_spec;
  run->add_option("--box", box_spec, "window per axis as \"lo,hi x lo,hi\"");
  run->add_option("--a", a_spec, "first endpoint, comma separated");
  run->add_option("--b", b_spec, "second endpoint, comma separated");
  run->add_flag("-q,--quiet", quiet, "suppress the report on stdout");

  auto* list = app.add_subcommand("list", "list a registry");
  std::string kind;
  list->add_option("kind", kind, "systems, functions or experiments")->required();

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    char* text = nullptr;
    sconc_status st = sconc_list(kind.c_str(), &text);
    if (st != SCONC_OK) return fail_with(st);
    std::fputs(text, stdout);
    sconc_string_free(text);
    return 0;
  }

  std::vector<std::string> overrides;
  if (!experiment.empty()) overrides.push_back("experiment.name=" + experiment);
  if (!phi_name.empty()) overrides.push_back("phi.name=" + phi_name);
  if (!system_name.empty()) overrides.push_back("system.name=" + system_name);
  if (dim > 0) overrides.push_back("phi.dim=" + std::to_string(dim));
  if (t_set) overrides.push_back("params.t=" + std::to_string(t));
  if (h_set) overrides.push_back("params.h=" + std::to_string(h));
  if (!box_spec.empty()) {
    std::string lo, hi;
    if (!parse_box(box_spec, lo, hi)) {
      std::fprintf(stderr, "error: config: --box wants \"lo,hi x lo,hi\", got '%s'\n",
                   box_spec.c_str());
      return 1;
    }
    overrides.push_back("params.win_lo=" + lo);
    overrides.push_back("params.win_hi=" + hi);
  }
  if (!a_spec.empty()) overrides.push_back("params.a=" + a_spec);
  if (!b_spec.empty()) overrides.push_back("params.b=" + b_spec);
  if (seed >= 0) overrides.push_back("experiment.seed=" + std::to_string(seed));
  for (const auto& s : sets) overrides.push_back(s);

  if (threads < 0) {
    if (const char* env = std::getenv("SCONCLAB_THREADS")) threads = std::atoi(env);
  }

  std::vector<const char*> ov;
  ov.reserve(overrides.size());
  for (const auto& s : overrides) ov.push_back(s.c_str());

  char* report = nullptr;
  int pass = 0;
  sconc_status st = sconc_run_config(config_path.empty() ? nullptr : config_path.c_str(),
                                     ov.data(), static_cast<int>(ov.size()),
                                     out_dir.empty() ? nullptr : out_dir.c_str(), threads,
                                     quiet ? nullptr : &report, &pass);
  if (report) {
    std::fputs(report, stdout);
    std::fputc('\n', stdout);
    sconc_string_free(report);
  }
  if (st != SCONC_OK) return fail_with(st);
  return 0;
}

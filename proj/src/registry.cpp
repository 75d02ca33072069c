#include "registry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "experiments.hpp"

namespace sconclab {

namespace {

std::string joined(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::vector<std::string> list_systems() {
  return {"free", "mechanical", "mechanical-poly", "quartic", "driven"};
}

std::vector<std::string> list_functions() {
  return {"phi1", "phi2", "neg-norm", "min-parabolas", "two-cones"};
}

std::vector<std::string> list_experiments() {
  std::vector<std::string> out;
  for (const auto& def : experiment_table()) out.push_back(def.name);
  return out;
}

std::string registry_help(const std::string& kind) {
  std::ostringstream os;
  if (kind == "systems") {
    os << "free             kinetic energy only; params: dim\n"
       << "mechanical       |p|^2/2 - a sum_i cos(k x_i) on a torus; params: dim, a, k\n"
       << "mechanical-poly  |p|^2/2 - V(x_1), V polynomial; params: dim, coeffs\n"
       << "quartic          |p|^2/2 + |x|^4/4; params: dim\n"
       << "driven           mechanical with V scaled by 1 + eps sin(omega t); params: dim, a, k, eps, omega\n";
  } else if (kind == "functions") {
    os << "phi1           staircase of parabolas in x_1, singular on x_1 = -2^(1-n); params: dim, n_max\n"
       << "phi2           phi1 plus the piece -x_1, singular on x_1 = 0 as well; params: dim, n_max\n"
       << "neg-norm       -|x| as a min of linear pieces; params: dim, n_dirs\n"
       << "min-parabolas  min(|x - e1|^2, |x + e1|^2); params: dim\n"
       << "two-cones      min of two downward cones; params: dim, a, b, ca, cb, n_dirs\n";
  } else if (kind == "experiments") {
    for (const auto& def : experiment_table()) {
      os << def.name;
      for (std::size_t i = std::string(def.name).size(); i < 15; ++i) os << ' ';
      os << ' ' << def.help << '\n';
    }
  } else {
    fail(Err::UnknownName, "unknown listing '%s'; known: systems, functions, experiments",
         kind.c_str());
  }
  return os.str();
}

Domain domain_from(const Config& cfg, int dim, const Domain& fallback) {
  if (!cfg.find("domain")) return fallback;
  std::string kind = cfg.str_or("domain", "kind", "box");
  if (kind == "box") {
    Vec lo = cfg.vec_or("domain", "lo", dim, Vec(dim, -8.0));
    Vec hi = cfg.vec_or("domain", "hi", dim, Vec(dim, 8.0));
    return Domain::box(lo, hi);
  }
  if (kind == "torus") {
    Vec period = cfg.vec_or("domain", "period", dim, Vec(dim, kTwoPi));
    return Domain::torus(period);
  }
  fail(Err::Config, "unknown domain kind '%s'; known: box, torus", kind.c_str());
}

SystemPtr system_from(const Config& cfg, int dim) {
  std::string name = cfg.str_or("system", "name", "free");
  if (name == "free") {
    return make_free_system(domain_from(cfg, dim, Domain::cube(dim, -8.0, 8.0)));
  }
  if (name == "mechanical") {
    Domain dom = domain_from(cfg, dim, Domain::torus_cube(dim, kTwoPi));
    return make_mechanical_cos(dom, cfg.number_or("system", "a", -1.0),
                               cfg.number_or("system", "k", 1.0));
  }
  if (name == "mechanical-poly") {
    Domain dom = domain_from(cfg, dim, Domain::cube(dim, -8.0, 8.0));
    std::vector<double> coeffs = {0.0, 0.0, 0.5};
    if (cfg.has("system", "coeffs")) coeffs = cfg.numbers("system", "coeffs");
    return make_mechanical_poly(dom, std::move(coeffs));
  }
  if (name == "quartic") {
    return make_quartic_system(domain_from(cfg, dim, Domain::cube(dim, -8.0, 8.0)));
  }
  if (name == "driven") {
    Domain dom = domain_from(cfg, dim, Domain::torus_cube(dim, kTwoPi));
    return make_driven_cos(dom, cfg.number_or("system", "a", -1.0),
                           cfg.number_or("system", "k", 1.0),
                           cfg.number_or("system", "eps", 0.3),
                           cfg.number_or("system", "omega", 2.0));
  }
  fail(Err::UnknownName, "unknown system '%s'; known: %s", name.c_str(),
       joined(list_systems()).c_str());
}

FunctionPtr function_from(const Config& cfg, int dim) {
  std::string name = cfg.str_or("phi", "name", "neg-norm");
  const Domain* domp = nullptr;
  Domain dom;
  if (cfg.find("domain")) {
    dom = domain_from(cfg, dim, Domain::cube(dim, -8.0, 8.0));
    domp = &dom;
  }
  if (name == "phi1") return make_staircase(dim, cfg.integer_or("phi", "n_max", 8), domp);
  if (name == "phi2") return make_staircase_edge(dim, cfg.integer_or("phi", "n_max", 8), domp);
  if (name == "neg-norm") {
    int n_dirs = cfg.integer_or("phi", "n_dirs", dim == 1 ? 2 : 256);
    return make_neg_norm(dim, n_dirs, domp);
  }
  if (name == "min-parabolas") return make_min_parabolas(dim, domp);
  if (name == "two-cones") {
    Vec e1(dim);
    e1[0] = 1.0;
    Vec a = cfg.vec_or("phi", "a", dim, -1.0 * e1);
    Vec b = cfg.vec_or("phi", "b", dim, e1);
    int n_dirs = cfg.integer_or("phi", "n_dirs", dim == 1 ? 2 : 256);
    return make_two_cones(dim, a, b, cfg.number_or("phi", "ca", 0.0),
                          cfg.number_or("phi", "cb", 0.0), n_dirs, domp);
  }
  fail(Err::UnknownName, "unknown function '%s'; known: %s", name.c_str(),
       joined(list_functions()).c_str());
}

int dim_from(const Config& cfg) {
  return cfg.integer_or("phi", "dim", cfg.integer_or("system", "dim", 1));
}

namespace {

const ExperimentDef& find_experiment(const std::string& name) {
  for (const auto& def : experiment_table())
    if (name == def.name) return def;
  fail(Err::UnknownName, "unknown experiment '%s'; known: %s", name.c_str(),
       joined(list_experiments()).c_str());
}

ordered_json params_echo(const Config& cfg) {
  ordered_json out = ordered_json::object();
  for (const auto& sec : cfg.sections()) {
    if (sec.name == "expect" || sec.name == "output") continue;
    ordered_json j = ordered_json::object();
    for (const auto& e : sec.entries) j[e.key] = e.value;
    out[sec.name] = std::move(j);
  }
  return out;
}

void apply_expectations(const Config& cfg, Report& report) {
  const ConfigSection* sec = cfg.find("expect");
  if (!sec) return;
  for (const auto& e : sec->entries) {
    auto dot = e.key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == e.key.size())
      fail(Err::Config, "%s:%d: expectation key '%s' is not op.metric", cfg.origin().c_str(),
           e.line, e.key.c_str());
    Expectation ex;
    ex.op = e.key.substr(0, dot);
    ex.metric = e.key.substr(dot + 1);
    std::vector<double> vals = cfg.numbers("expect", e.key);
    if (vals.empty() || vals.size() > 2)
      fail(Err::Config, "%s:%d: expectation '%s' wants 'bound' or 'bound, tol'",
           cfg.origin().c_str(), e.line, e.key.c_str());
    ex.bound = vals[0];
    ex.tol = vals.size() > 1 ? vals[1] : 0.0;
    if (!report.has_metric(ex.metric))
      fail(Err::Config, "%s:%d: expectation on unknown metric '%s'", cfg.origin().c_str(), e.line,
           ex.metric.c_str());
    report.expect(std::move(ex));
  }
}

}  // namespace

Report run_experiment(const std::string& name, const Config& cfg, const std::string& out_dir,
                      std::uint64_t seed) {
  const ExperimentDef& def = find_experiment(name);
  Report report(name, seed);
  report.set_params(params_echo(cfg));
  ExpCtx ctx{cfg, report, out_dir, seed, Rng(seed)};
  def.run(ctx);
  apply_expectations(cfg, report);
  return report;
}

}  // namespace sconclab

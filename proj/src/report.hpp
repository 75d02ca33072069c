#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "domain.hpp"
#include "evolution.hpp"
#include "pseudograph.hpp"
#include "topology.hpp"

namespace sconclab {

using ordered_json = nlohmann::ordered_json;

// One bound checked against a scalar metric. op is "max" (value <= bound),
// "min" (value >= bound) or "eq" (|value - bound| <= tol).
struct Expectation {
  std::string metric;
  std::string op;
  double bound = 0;
  double tol = 0;
  double value = 0;
  bool pass = false;
};

// Experiment result: scalar metrics, checked expectations, artifact file
// names. Serialization is deterministic; the timestamp is the only
// run-dependent field and can be omitted.
class Report {
 public:
  Report(std::string experiment, std::uint64_t seed)
      : experiment_(std::move(experiment)), seed_(seed) {}

  void set_params(ordered_json params) { params_ = std::move(params); }
  void metric(const std::string& name, double value) { metrics_[name] = value; }
  void info(const std::string& name, ordered_json value) { info_[name] = std::move(value); }
  bool has_metric(const std::string& name) const { return metrics_.contains(name); }
  double metric_value(const std::string& name) const;
  std::vector<std::string> metric_names() const;

  void expect(Expectation e);
  void add_artifact(const std::string& filename) { artifacts_.push_back(filename); }
  void fold_pass(bool ok) { pass_ = pass_ && ok; }
  bool pass() const { return pass_; }
  const std::string& experiment() const { return experiment_; }

  ordered_json to_json(bool with_timestamp = true) const;
  std::string to_text(bool with_timestamp = true) const;

 private:
  std::string experiment_;
  std::uint64_t seed_ = 0;
  ordered_json params_ = ordered_json::object();
  ordered_json metrics_ = ordered_json::object();
  ordered_json info_ = ordered_json::object();
  std::vector<Expectation> expects_;
  std::vector<std::string> artifacts_;
  bool pass_ = true;
};

void write_text_file(const std::string& path, const std::string& content);

// CSV emitters; floats carry 17 significant digits.
std::string csv_of_grid(const GridFn& fn);
std::string csv_of_cloud(const PhaseCloud& cloud);
std::string csv_of_points(const std::vector<Vec>& pts, int dim);
std::string csv_of_strata(const StrataGrid& strata);
std::string csv_of_curve(const CurvePath& path);

}  // namespace sconclab

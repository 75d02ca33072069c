#include "report.hpp"

#include <ctime>
#include <filesystem>
#include <fstream>

namespace sconclab {

namespace {

std::string utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void append_vec(std::string& row, const Vec& v, int dim) {
  for (int k = 0; k < dim; ++k) {
    row += fmt_g17(v[k]);
    row += ',';
  }
}

}  // namespace

double Report::metric_value(const std::string& name) const {
  if (!metrics_.contains(name))
    fail(Err::Config, "experiment '%s' produced no metric '%s'", experiment_.c_str(),
         name.c_str());
  return metrics_.at(name).get<double>();
}

std::vector<std::string> Report::metric_names() const {
  std::vector<std::string> names;
  for (const auto& [k, v] : metrics_.items()) names.push_back(k);
  return names;
}

void Report::expect(Expectation e) {
  e.value = metric_value(e.metric);
  if (e.op == "max")
    e.pass = e.value <= e.bound;
  else if (e.op == "min")
    e.pass = e.value >= e.bound;
  else if (e.op == "eq")
    e.pass = std::fabs(e.value - e.bound) <= e.tol;
  else
    fail(Err::Config, "unknown expectation op '%s'", e.op.c_str());
  pass_ = pass_ && e.pass;
  expects_.push_back(std::move(e));
}

ordered_json Report::to_json(bool with_timestamp) const {
  ordered_json j;
  j["schema"] = "sconclab-report-v1";
  j["experiment"] = experiment_;
  if (with_timestamp) j["timestamp"] = utc_now();
  j["seed"] = seed_;
  j["params"] = params_;
  j["metrics"] = metrics_;
  if (!info_.empty()) j["info"] = info_;
  ordered_json ex = ordered_json::array();
  for (const Expectation& e : expects_) {
    ordered_json row;
    row["metric"] = e.metric;
    row["op"] = e.op;
    row["bound"] = e.bound;
    if (e.op == "eq") row["tol"] = e.tol;
    row["value"] = e.value;
    row["pass"] = e.pass;
    ex.push_back(std::move(row));
  }
  j["expectations"] = std::move(ex);
  j["artifacts"] = artifacts_;
  j["pass"] = pass_;
  return j;
}

std::string Report::to_text(bool with_timestamp) const {
  return to_json(with_timestamp).dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) fail(Err::Io, "cannot create directory %s: %s", p.parent_path().c_str(),
                 ec.message().c_str());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::Io, "cannot open %s for writing", path.c_str());
  out << content;
  if (!out) fail(Err::Io, "write to %s failed", path.c_str());
}

std::string csv_of_grid(const GridFn& fn) {
  std::string out;
  int d = fn.grid.dim;
  for (int k = 0; k < d; ++k) out += "x" + std::to_string(k + 1) + ",";
  out += "value\n";
  for (std::size_t i = 0; i < fn.grid.size(); ++i) {
    std::string row;
    append_vec(row, fn.grid.coord(i), d);
    row += fmt_g17(fn.at(i));
    row += '\n';
    out += row;
  }
  return out;
}

std::string csv_of_cloud(const PhaseCloud& cloud) {
  std::string out;
  for (int k = 0; k < cloud.dim; ++k) out += "x" + std::to_string(k + 1) + ",";
  for (int k = 0; k < cloud.dim; ++k) out += "p" + std::to_string(k + 1) + ",";
  out.back() = '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::string row;
    append_vec(row, cloud.x[i], cloud.dim);
    append_vec(row, cloud.p[i], cloud.dim);
    row.back() = '\n';
    out += row;
  }
  return out;
}

std::string csv_of_points(const std::vector<Vec>& pts, int dim) {
  std::string out;
  for (int k = 0; k < dim; ++k) out += "x" + std::to_string(k + 1) + ",";
  out.back() = '\n';
  for (const Vec& p : pts) {
    std::string row;
    append_vec(row, p, dim);
    row.back() = '\n';
    out += row;
  }
  return out;
}

std::string csv_of_strata(const StrataGrid& strata) {
  std::string out;
  int d = strata.grid.dim;
  for (int k = 0; k < d; ++k) out += "x" + std::to_string(k + 1) + ",";
  out += "label,near_interface\n";
  for (std::size_t i = 0; i < strata.grid.size(); ++i) {
    std::string row;
    append_vec(row, strata.grid.coord(i), d);
    row += std::to_string(strata.labels[i]);
    row += ',';
    row += std::to_string(strata.near_interface[i]);
    row += '\n';
    out += row;
  }
  return out;
}

std::string csv_of_curve(const CurvePath& path) {
  std::string out = "t,";
  int d = path.knots.empty() ? 1 : path.knots.front().d;
  for (int k = 0; k < d; ++k) out += "x" + std::to_string(k + 1) + ",";
  for (int k = 0; k < d; ++k) out += "p" + std::to_string(k + 1) + ",";
  out.back() = '\n';
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    std::string row = fmt_g17(path.times[i]);
    row += ',';
    append_vec(row, path.knots[i], d);
    if (i < path.costates.size())
      append_vec(row, path.costates[i], d);
    else
      append_vec(row, Vec(d), d);
    row.back() = '\n';
    out += row;
  }
  return out;
}

}  // namespace sconclab

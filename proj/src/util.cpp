#include "util.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <thread>

namespace sconclab {

const char* err_name(Err e) {
  switch (e) {
    case Err::Ok: return "ok";
    case Err::InvalidArgument: return "invalid_argument";
    case Err::OutOfDomain: return "out_of_domain";
    case Err::NonConvexObjective: return "non_convex_objective";
    case Err::MaximizerOnBoundary: return "maximizer_on_boundary";
    case Err::NoConvergence: return "no_convergence";
    case Err::ShootingNotDiffeo: return "shooting_not_diffeo";
    case Err::LocalizationViolated: return "localization_violated";
    case Err::MissingConstants: return "missing_constants";
    case Err::CriticalTimeExceeded: return "critical_time_exceeded";
    case Err::EmptyCloud: return "empty_cloud";
    case Err::NoDifferentiablePoints: return "no_differentiable_points";
    case Err::EndpointsSingular: return "endpoints_singular";
    case Err::NoPathFound: return "no_path_found_at_resolution";
    case Err::DegenerateScales: return "degenerate_scales";
    case Err::UnknownName: return "unknown_name";
    case Err::Config: return "config_error";
    case Err::Io: return "io_error";
    case Err::ToleranceFailure: return "tolerance_failure";
    case Err::Internal: return "internal";
  }
  return "internal";
}

static std::string vstrf(const char* fmt, va_list ap) {
  va_list ap2;
  va_copy(ap2, ap);
  int n = std::vsnprintf(nullptr, 0, fmt, ap);
  std::string out(n > 0 ? static_cast<std::size_t>(n) : 0, '\0');
  if (n > 0) std::vsnprintf(out.data(), out.size() + 1, fmt, ap2);
  va_end(ap2);
  return out;
}

void fail(Err code, const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  std::string msg = vstrf(fmt, ap);
  va_end(ap);
  throw Error(code, msg);
}

std::string strf(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  std::string msg = vstrf(fmt, ap);
  va_end(ap);
  return msg;
}

namespace {
std::atomic<int> g_threads{0};

int env_thread_count() {
  const char* v = std::getenv("SCONCLAB_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (end == v || n < 0) return 0;
  return static_cast<int>(n);
}

int resolve_threads() {
  int n = g_threads.load();
  if (n == 0) n = env_thread_count();
  if (n == 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}
}  // namespace

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }
int thread_count() { return resolve_threads(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  int workers = resolve_threads();
  // Chunk layout is fixed so per-chunk state (accumulators, rng streams)
  // is identical regardless of the worker count.
  const std::size_t chunks = 64;
  const std::size_t chunk = (n + chunks - 1) / chunks;
  if (workers <= 1 || n < 2 * chunk) {
    body(0, n);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      std::size_t lo = c * chunk;
      if (lo >= n) return;
      body(lo, std::min(n, lo + chunk));
    }
  };
  std::vector<std::thread> pool;
  int spawn = std::min<std::size_t>(workers, chunks) - 1;
  pool.reserve(spawn);
  for (int i = 0; i < spawn; ++i) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.size() >= prefix.size() && std::memcmp(s.data(), prefix.data(), prefix.size()) == 0;
}

std::string fmt_g17(double v) { return strf("%.17g", v); }

}  // namespace sconclab

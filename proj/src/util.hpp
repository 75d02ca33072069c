#pragma once

#include <array>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sconclab {

// Error taxonomy shared by the C++ core and (by value) the C API.
enum class Err : int {
  Ok = 0,
  InvalidArgument,
  OutOfDomain,
  NonConvexObjective,
  MaximizerOnBoundary,
  NoConvergence,
  ShootingNotDiffeo,
  LocalizationViolated,
  MissingConstants,
  CriticalTimeExceeded,
  EmptyCloud,
  NoDifferentiablePoints,
  EndpointsSingular,
  NoPathFound,
  DegenerateScales,
  UnknownName,
  Config,
  Io,
  ToleranceFailure,
  Internal,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] void fail(Err code, const char* fmt, ...);

std::string strf(const char* fmt, ...);

// Deterministic uniform doubles. mt19937_64 output is specified by the
// standard; the 53-bit conversion below avoids distribution implementations
// that vary across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {
    // splitmix64 warmup decorrelates small seeds
    for (int i = 0; i < 4; ++i) next_u64();
  }
  std::uint64_t next_u64() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [0,1)
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  // uniform integer in [0,n)
  std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

 private:
  std::uint64_t s_;
};

// Global worker count; 0 means "hardware". SCONCLAB_THREADS overrides at
// startup, the CLI flag overrides both.
void set_thread_count(int n);
int thread_count();

// Deterministic parallel map: the index space is split into fixed chunks so
// results do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);
bool starts_with(const std::string& s, const std::string& prefix);

// 17 significant digits survive a double round trip.
std::string fmt_g17(double v);

}  // namespace sconclab

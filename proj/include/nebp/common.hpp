#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nebp {

using UserId = int;
using UnitId = int;
using EdgeId = int;

// z_u = kNone means the user is not connected to any unit.
inline constexpr UnitId kNone = -1;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input files.
struct parse_error : error {
  using error::error;
};

// Invalid parameters (k > n_units, bad stop rule, ...).
struct param_error : error {
  using error::error;
};

// Problem too large for the requested method.
struct resource_error : error {
  using error::error;
};

// A message normalized to zero before flooring could be applied.
struct degeneracy_error : error {
  using error::error;
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

// std::uniform_real_distribution is implementation defined; this is not.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Modulo bias is irrelevant at our sizes and the
// result is identical on every platform, which std::shuffle is not.
inline uint64_t rand_below(Rng& rng, uint64_t n) {
  return rng() % n;
}

template <typename T>
void deterministic_shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rand_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Work items must be
// independent; callers keep determinism by writing results indexed by i.
void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn);

inline int default_workers() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// FNV-1a, used for instance fingerprints in manifests.
inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string format_double(double v);

}  // namespace nebp

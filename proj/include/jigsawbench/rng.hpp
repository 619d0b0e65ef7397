#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace jigsawbench::rng {

// FNV-1a, used for substream tags and report hashing. Not cryptographic.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from (seed, tag[, index]). Trials and
// purposes (spawn, per-action observation, actuation) each get their own
// stream so that swapping one hardware parameter cannot shift the draws
// consumed by an unrelated subsystem.
inline std::uint64_t substream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
  return splitmix64(seed ^ fnv1a(tag) ^ (0x9e3779b97f4a7c15ull * (index + 1)));
}

// mt19937_64 has a standard-mandated sequence, so engines are portable.
// The distributions below are hand-rolled because the std ones are not.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1): 53 random bits scaled.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_index(std::uint64_t n) {
    // Modulo bias is < 2^-53 for any n we use; acceptable here.
    return n == 0 ? 0 : static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

  // Box-Muller. Consumes exactly two uniforms per pair of normals.
  double gaussian(double sigma) {
    if (sigma <= 0.0) {
      return 0.0;
    }
    if (have_spare_) {
      have_spare_ = false;
      return spare_ * sigma;
    }
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a) * sigma;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stateless per-cell uniform, keyed by (seed, counter). Used for sensor
// noise so that draws attach to grid cells rather than to iteration order.
inline double keyed_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(splitmix64(seed ^ splitmix64(counter)) >> 11) * 0x1.0p-53;
}

}  // namespace jigsawbench::rng

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string_view>

namespace occalib {

// Counter-free splitmix64 generator with named/indexed substream derivation.
// Simulation contracts require per-beam and per-trial substreams whose output
// is independent of evaluation order, and results must not change across
// standard-library implementations, so distributions are generated from raw
// bits here instead of <random>.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(mix(seed ^ 0x5851f42d4c957f2dULL)) {}

  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static uint64_t hash_name(std::string_view name) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  /// Independent stream addressed by (root seed, name).
  static Rng substream(uint64_t root, std::string_view name) {
    return Rng(mix(root) ^ hash_name(name));
  }

  /// Independent stream addressed by (root seed, index), e.g. one per beam.
  static Rng substream(uint64_t root, uint64_t index) {
    return Rng(mix(root) ^ mix(index + 0x9e3779b97f4a7c15ULL));
  }

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  /// Standard normal via Box-Muller (two uniforms per draw).
  double normal() {
    const double u = 1.0 - uniform01();
    const double v = uniform01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPiLocal * v);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  /// Isotropic unit vector (normalized Gaussian triple).
  Eigen::Vector3d unit_vector() {
    while (true) {
      const Eigen::Vector3d v(normal(), normal(), normal());
      const double n = v.norm();
      if (n > 1e-12) return v / n;
    }
  }

 private:
  static constexpr double kTwoPiLocal = 6.28318530717958647692;
  uint64_t state_;
};

}  // namespace occalib
